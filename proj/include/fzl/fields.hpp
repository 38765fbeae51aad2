#ifndef FZL_FIELDS_HPP
#define FZL_FIELDS_HPP

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fzl/vec.hpp"

namespace fzl {

// Closed test-function family: (multivariate polynomial of total degree <= 4)
// x (optional Gaussian envelope in v) x (optional trig factor in x, torus).
// Gradients are evaluated analytically so weak-form residuals carry no
// differentiation error.
class ScalarField {
public:
    struct Monomial {
        double coef = 1.0;
        std::array<int, kMaxDim> px{0, 0, 0};
        std::array<int, kMaxDim> pv{0, 0, 0};
    };
    struct GaussianEnvelope {
        double sigma = 1.0; // exp(-|v|^2 / (2 sigma^2))
    };
    struct TrigFactor {
        std::array<int, kMaxDim> k{0, 0, 0}; // integer wave numbers
        double phase = 0.0;
        double side = 1.0; // torus side
    };

    explicit ScalarField(int dim = 2) : dim_(dim) {}

    ScalarField& add_term(double coef, std::array<int, kMaxDim> px,
                          std::array<int, kMaxDim> pv);
    ScalarField& with_envelope(double sigma);
    ScalarField& with_trig(std::array<int, kMaxDim> k, double phase, double side);

    int dim() const { return dim_; }
    const std::string& name() const { return name_; }
    ScalarField& set_name(std::string n) { name_ = std::move(n); return *this; }

    double eval(const Vec& x, const Vec& v) const;
    Vec grad_x(const Vec& x, const Vec& v) const;
    Vec grad_v(const Vec& x, const Vec& v) const;

    static ScalarField one(int d);
    static ScalarField coordinate_v(int k, int d);
    static ScalarField coordinate_x(int k, int d);
    static ScalarField speed_squared(int d);   // |v|^2
    static ScalarField kinetic_energy(int d);  // |v|^2 / 2
    static ScalarField monomial(double coef, std::array<int, kMaxDim> px,
                                std::array<int, kMaxDim> pv, int d);

    // Named presets accepted in configuration files; throws on unknown names.
    static ScalarField from_name(const std::string& name, int d, double torus_side);
    static std::vector<std::string> preset_names();

private:
    int dim_;
    std::vector<Monomial> terms_;
    std::optional<GaussianEnvelope> envelope_;
    std::optional<TrigFactor> trig_;
    std::string name_;

    double poly(const Vec& x, const Vec& v) const;
    Vec poly_grad_x(const Vec& x, const Vec& v) const;
    Vec poly_grad_v(const Vec& x, const Vec& v) const;
};

// Polynomial time factor p(t); phi(t,x,v) = p(t) * phi0(x,v).
struct TimePoly {
    std::vector<double> coef{1.0}; // p(t) = sum coef[k] t^k

    double eval(double t) const;
    double deriv(double t) const;

    static TimePoly constant() { return {}; }
    // (1+t)(T-t): vanishes at the final time
    static TimePoly bump(double T) { return TimePoly{{T, T - 1.0, -1.0}}; }
};

struct TimeField {
    ScalarField space;
    TimePoly time = TimePoly::constant();

    double eval(double t, const Vec& x, const Vec& v) const
    {
        return time.eval(t) * space.eval(x, v);
    }
    double dt(double t, const Vec& x, const Vec& v) const
    {
        return time.deriv(t) * space.eval(x, v);
    }
    Vec grad_x(double t, const Vec& x, const Vec& v) const
    {
        return scale(space.grad_x(x, v), time.eval(t), space.dim());
    }
    Vec grad_v(double t, const Vec& x, const Vec& v) const
    {
        return scale(space.grad_v(x, v), time.eval(t), space.dim());
    }
};

enum class PairSymmetry { AntisymmetricUnderSwap, None };

// Pairwise vector field B(x, v, x*, v*).
struct PairField {
    std::function<Vec(const Vec&, const Vec&, const Vec&, const Vec&)> evaluator;
    PairSymmetry symmetry = PairSymmetry::None;

    Vec operator()(const Vec& x, const Vec& v, const Vec& xs, const Vec& vs) const
    {
        return evaluator(x, v, xs, vs);
    }
};

} // namespace fzl

#endif
