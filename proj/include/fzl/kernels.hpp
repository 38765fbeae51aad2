#ifndef FZL_KERNELS_HPP
#define FZL_KERNELS_HPP

#include <stdexcept>
#include <vector>

#include "fzl/domain.hpp"
#include "fzl/vec.hpp"

namespace fzl {

// Velocity-interaction exponent. Valid range depends on the dimension:
// gamma in (-min(d,4), 1] for the power-law kernel.
struct GammaExponent {
    double value = 0.0;

    static double gamma_d(int d) { return d < 4 ? d : 4; }
    double plus() const { return value > 0.0 ? value : 0.0; }

    void validate(int d) const
    {
        if (!(value > -gamma_d(d) && value <= 1.0))
            throw std::invalid_argument("gamma out of range (-min(d,4), 1]");
    }
};

enum class InteractionVariant { CoulombPower, GeneralizedHard };
enum class SpatialVariant { Exponential, Constant };

// Interaction pair (A, kappa) with normalization constants. All pairwise
// evaluations in the solver read from one of these.
struct KernelSet {
    GammaExponent gamma;
    InteractionVariant variant = InteractionVariant::CoulombPower;
    SpatialVariant spatial = SpatialVariant::Exponential;
    Domain domain;
    double k1 = 1.0;          // exponential kappa amplitude, set by normalization
    double k2 = 1.0;          // exponential kappa decay rate
    double kappa_const = 1.0; // constant kappa value (torus only)
    double soft_core_eps = 0.0;
    bool flip_projection = false; // fault injection for verification negative controls

    static KernelSet make(double gamma, const Domain& domain,
                          InteractionVariant variant = InteractionVariant::CoulombPower,
                          SpatialVariant spatial = SpatialVariant::Exponential,
                          double k2 = 1.0, double soft_core_eps = 0.0);

    double interaction_weight(const Vec& z) const;
    Mat projection_perp(const Vec& z) const;
    Mat pair_matrix(const Vec& z) const;
    double spatial_weight(const Vec& dx) const; // torus: minimal image applied first

    // |kappa|_L1 - 1 measured with a quadrature independent of the one that
    // set k1; used by the verification suite.
    double kappa_l1_error() const;

    bool constant_kappa() const { return spatial == SpatialVariant::Constant; }
};

// A(z) as a free function; KernelSet::interaction_weight forwards here.
double interaction_weight(const Vec& z, int d, double gamma, double eps,
                          InteractionVariant variant);

// Inline kernel pieces for the pairwise sweeps. State entering the sweeps is
// already validated finite, so these skip the argument checks of the public
// entry points.
struct PairKernels {
    bool torus = false;
    double side = 0.0;
    double k1 = 0.0, k2 = 1.0;   // exponential kappa
    double kappa_const = 0.0;    // constant kappa
    bool constant = false;
    double gamma = 0.0;
    double eps2 = 0.0;
    InteractionVariant variant = InteractionVariant::CoulombPower;
    int mode = 0; // 0: |z|^2, 1: |z|^3, 2: |z|, 3: 1, 4: generic pow, 5: hard

    explicit PairKernels(const KernelSet& k)
        : torus(k.domain.is_torus()), side(k.domain.side), k1(k.k1), k2(k.k2),
          kappa_const(k.kappa_const), constant(k.constant_kappa()),
          gamma(k.gamma.value), eps2(k.soft_core_eps * k.soft_core_eps),
          variant(k.variant)
    {
        if (variant == InteractionVariant::GeneralizedHard) {
            mode = 5;
        } else if (eps2 > 0.0) {
            mode = 4;
        } else if (gamma == 0.0) {
            mode = 0;
        } else if (gamma == 1.0) {
            mode = 1;
        } else if (gamma == -1.0) {
            mode = 2;
        } else if (gamma == -2.0) {
            mode = 3;
        } else {
            mode = 4;
        }
    }

    double kappa_r2(double r2x) const
    {
        if (constant) return kappa_const;
        return k1 * std::exp(-k2 * std::sqrt(1.0 + r2x));
    }

    double interaction_r2(double r2v) const
    {
        switch (mode) {
            case 0: return r2v;
            case 1: return r2v * std::sqrt(r2v);
            case 2: return std::sqrt(r2v);
            case 3: return 1.0;
            case 5: return std::pow(std::sqrt(1.0 + r2v), gamma + 2.0) * r2v;
            default: {
                double base = r2v + eps2;
                if (base == 0.0) return gamma > -2.0 ? 0.0 : HUGE_VAL;
                return std::pow(base, 0.5 * (2.0 + gamma));
            }
        }
    }
};

// Apply Pi_{z perp} (or its sign-flipped fault-injection variant) to y.
// z2 = |z|^2 precomputed by the caller; z2 == 0 maps everything to zero.
inline Vec project_perp_apply(const Vec& z, double z2, const Vec& y, int d, bool flip)
{
    if (z2 <= 0.0) return zero_vec();
    double c = dot(z, y, d) / z2;
    Vec r = zero_vec();
    if (flip) {
        for (int k = 0; k < d; ++k) r[k] = y[k] + c * z[k];
    } else {
        for (int k = 0; k < d; ++k) r[k] = y[k] - c * z[k];
    }
    return r;
}

// Normalized mollifier M_w(z) = C w^{-d} exp(-<z/w>), |M_w|_L1 = 1.
struct Mollifier {
    double width = 1.0;
    int dim = 1;
    double norm_const = 1.0; // C, depends on dim only

    static Mollifier make(double width, int dim);

    double eval(const Vec& z) const
    {
        double r2 = norm2(z, dim) / (width * width);
        return amplitude() * std::exp(-bracket(r2));
    }

    double amplitude() const
    {
        double a = norm_const;
        for (int k = 0; k < dim; ++k) a /= width;
        return a;
    }

    // gradient of M_w at z: -M_w(z) * z / (w^2 <z/w>)
    Vec grad(const Vec& z) const
    {
        double r2 = norm2(z, dim) / (width * width);
        double b = bracket(r2);
        double m = amplitude() * std::exp(-b);
        return scale(z, -m / (width * width * b), dim);
    }

    double l1_error() const; // quadrature check of the normalization
};

struct PeetreReport {
    double max_ratio = 0.0;    // largest LHS/RHS, must stay <= 1
    std::size_t worst_index = 0;
};

// Checks <x>^p / <y>^p <= 2^{|p|/2} <x-y>^{|p|} on every sample pair.
PeetreReport peetre_bound_check(double p,
                                const std::vector<std::pair<Vec, Vec>>& samples,
                                int d);

struct ConvolutionDominanceReport {
    std::vector<double> widths;
    std::vector<double> max_ratio_kappa;     // max (kappa * M_w) / kappa per width
    std::vector<double> max_ratio_inverse;   // max (kappa^{-1} * M_w) / kappa^{-1}
    double overall_kappa = 0.0;
    double overall_inverse = 0.0;
};

// Empirical constants of the mollification bounds kappa*M_w <= C kappa and
// kappa^{-1}*M_w <= C kappa^{-1}, over a grid of evaluation points and a set
// of widths in (0,1).
ConvolutionDominanceReport convolution_dominance_check(
    const KernelSet& k, const std::vector<Vec>& grid,
    const std::vector<double>& widths = {0.5, 0.1, 0.02});

} // namespace fzl

#endif
