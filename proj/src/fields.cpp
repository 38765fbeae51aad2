#include "fzl/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace fzl {

namespace {
constexpr double kTwoPi = 6.283185307179586477;

double ipow(double x, int n)
{
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}
} // namespace

ScalarField& ScalarField::add_term(double coef, std::array<int, kMaxDim> px,
                                   std::array<int, kMaxDim> pv)
{
    int deg = 0;
    for (int k = 0; k < dim_; ++k) deg += px[k] + pv[k];
    for (int k = dim_; k < kMaxDim; ++k)
        if (px[k] != 0 || pv[k] != 0)
            throw std::invalid_argument("monomial uses axes beyond the dimension");
    if (deg > 4) throw std::invalid_argument("polynomial degree capped at 4");
    terms_.push_back({coef, px, pv});
    return *this;
}

ScalarField& ScalarField::with_envelope(double sigma)
{
    if (sigma <= 0.0) throw std::invalid_argument("envelope sigma must be positive");
    envelope_ = GaussianEnvelope{sigma};
    return *this;
}

ScalarField& ScalarField::with_trig(std::array<int, kMaxDim> k, double phase, double side)
{
    if (side <= 0.0) throw std::invalid_argument("trig factor needs a torus side");
    trig_ = TrigFactor{k, phase, side};
    return *this;
}

double ScalarField::poly(const Vec& x, const Vec& v) const
{
    double s = 0.0;
    for (const auto& t : terms_) {
        double m = t.coef;
        for (int k = 0; k < dim_; ++k) m *= ipow(x[k], t.px[k]) * ipow(v[k], t.pv[k]);
        s += m;
    }
    return s;
}

Vec ScalarField::poly_grad_x(const Vec& x, const Vec& v) const
{
    Vec g = zero_vec();
    for (const auto& t : terms_) {
        for (int j = 0; j < dim_; ++j) {
            if (t.px[j] == 0) continue;
            double m = t.coef * t.px[j] * ipow(x[j], t.px[j] - 1);
            for (int k = 0; k < dim_; ++k) {
                if (k != j) m *= ipow(x[k], t.px[k]);
                m *= ipow(v[k], t.pv[k]);
            }
            g[j] += m;
        }
    }
    return g;
}

Vec ScalarField::poly_grad_v(const Vec& x, const Vec& v) const
{
    Vec g = zero_vec();
    for (const auto& t : terms_) {
        for (int j = 0; j < dim_; ++j) {
            if (t.pv[j] == 0) continue;
            double m = t.coef * t.pv[j] * ipow(v[j], t.pv[j] - 1);
            for (int k = 0; k < dim_; ++k) {
                m *= ipow(x[k], t.px[k]);
                if (k != j) m *= ipow(v[k], t.pv[k]);
            }
            g[j] += m;
        }
    }
    return g;
}

double ScalarField::eval(const Vec& x, const Vec& v) const
{
    double s = poly(x, v);
    if (envelope_)
        s *= std::exp(-norm2(v, dim_) / (2.0 * envelope_->sigma * envelope_->sigma));
    if (trig_) {
        double arg = trig_->phase;
        for (int k = 0; k < dim_; ++k) arg += kTwoPi * trig_->k[k] * x[k] / trig_->side;
        s *= std::cos(arg);
    }
    return s;
}

Vec ScalarField::grad_x(const Vec& x, const Vec& v) const
{
    double env = 1.0;
    if (envelope_)
        env = std::exp(-norm2(v, dim_) / (2.0 * envelope_->sigma * envelope_->sigma));
    double tr = 1.0, trd = 0.0, arg = 0.0;
    if (trig_) {
        arg = trig_->phase;
        for (int k = 0; k < dim_; ++k) arg += kTwoPi * trig_->k[k] * x[k] / trig_->side;
        tr = std::cos(arg);
        trd = -std::sin(arg);
    }
    Vec g = scale(poly_grad_x(x, v), env * tr, dim_);
    if (trig_) {
        double p = poly(x, v) * env * trd;
        for (int k = 0; k < dim_; ++k)
            g[k] += p * kTwoPi * trig_->k[k] / trig_->side;
    }
    return g;
}

Vec ScalarField::grad_v(const Vec& x, const Vec& v) const
{
    double env = 1.0;
    if (envelope_)
        env = std::exp(-norm2(v, dim_) / (2.0 * envelope_->sigma * envelope_->sigma));
    double tr = 1.0;
    if (trig_) {
        double arg = trig_->phase;
        for (int k = 0; k < dim_; ++k) arg += kTwoPi * trig_->k[k] * x[k] / trig_->side;
        tr = std::cos(arg);
    }
    Vec g = scale(poly_grad_v(x, v), env * tr, dim_);
    if (envelope_) {
        double p = poly(x, v) * env * tr / (envelope_->sigma * envelope_->sigma);
        for (int k = 0; k < dim_; ++k) g[k] -= p * v[k];
    }
    return g;
}

ScalarField ScalarField::one(int d)
{
    ScalarField f(d);
    f.add_term(1.0, {0, 0, 0}, {0, 0, 0});
    f.set_name("one");
    return f;
}

ScalarField ScalarField::coordinate_v(int k, int d)
{
    ScalarField f(d);
    std::array<int, kMaxDim> pv{0, 0, 0};
    pv[k] = 1;
    f.add_term(1.0, {0, 0, 0}, pv);
    f.set_name("v" + std::to_string(k + 1));
    return f;
}

ScalarField ScalarField::coordinate_x(int k, int d)
{
    ScalarField f(d);
    std::array<int, kMaxDim> px{0, 0, 0};
    px[k] = 1;
    f.add_term(1.0, px, {0, 0, 0});
    f.set_name("x" + std::to_string(k + 1));
    return f;
}

ScalarField ScalarField::speed_squared(int d)
{
    ScalarField f(d);
    for (int k = 0; k < d; ++k) {
        std::array<int, kMaxDim> pv{0, 0, 0};
        pv[k] = 2;
        f.add_term(1.0, {0, 0, 0}, pv);
    }
    f.set_name("speed2");
    return f;
}

ScalarField ScalarField::kinetic_energy(int d)
{
    ScalarField f(d);
    for (int k = 0; k < d; ++k) {
        std::array<int, kMaxDim> pv{0, 0, 0};
        pv[k] = 2;
        f.add_term(0.5, {0, 0, 0}, pv);
    }
    f.set_name("energy");
    return f;
}

ScalarField ScalarField::monomial(double coef, std::array<int, kMaxDim> px,
                                  std::array<int, kMaxDim> pv, int d)
{
    ScalarField f(d);
    f.add_term(coef, px, pv);
    return f;
}

std::vector<std::string> ScalarField::preset_names()
{
    return {"one",  "v1",   "v2",   "v3",   "x1",      "x2",       "x3",
            "speed2", "energy", "v1_sq", "v2_sq", "v1v2", "x1v1", "gauss_v1_sq",
            "trig_x1"};
}

ScalarField ScalarField::from_name(const std::string& name, int d, double torus_side)
{
    auto coord = [&](int k, bool vel) {
        if (k >= d) throw std::invalid_argument("probe " + name + " needs dim > " + std::to_string(k));
        return vel ? coordinate_v(k, d) : coordinate_x(k, d);
    };
    if (name == "one") return one(d);
    if (name == "v1") return coord(0, true);
    if (name == "v2") return coord(1, true);
    if (name == "v3") return coord(2, true);
    if (name == "x1") return coord(0, false);
    if (name == "x2") return coord(1, false);
    if (name == "x3") return coord(2, false);
    if (name == "speed2") return speed_squared(d);
    if (name == "energy") return kinetic_energy(d);
    if (name == "v1_sq") {
        ScalarField f = monomial(1.0, {0, 0, 0}, {2, 0, 0}, d);
        f.set_name(name);
        return f;
    }
    if (name == "v2_sq") {
        if (d < 2) throw std::invalid_argument("probe v2_sq needs dim >= 2");
        ScalarField f = monomial(1.0, {0, 0, 0}, {0, 2, 0}, d);
        f.set_name(name);
        return f;
    }
    if (name == "v1v2") {
        if (d < 2) throw std::invalid_argument("probe v1v2 needs dim >= 2");
        ScalarField f = monomial(1.0, {0, 0, 0}, {1, 1, 0}, d);
        f.set_name(name);
        return f;
    }
    if (name == "x1v1") {
        ScalarField f = monomial(1.0, {1, 0, 0}, {1, 0, 0}, d);
        f.set_name(name);
        return f;
    }
    if (name == "gauss_v1_sq") {
        ScalarField f = monomial(1.0, {0, 0, 0}, {2, 0, 0}, d);
        f.with_envelope(2.0);
        f.set_name(name);
        return f;
    }
    if (name == "trig_x1") {
        if (torus_side <= 0.0)
            throw std::invalid_argument("probe trig_x1 requires a torus domain");
        ScalarField f = monomial(1.0, {0, 0, 0}, {0, 0, 0}, d);
        f.with_trig({1, 0, 0}, 0.3, torus_side);
        f.set_name(name);
        return f;
    }
    throw std::invalid_argument("unknown probe name: " + name);
}

double TimePoly::eval(double t) const
{
    double s = 0.0;
    for (std::size_t k = coef.size(); k-- > 0;) s = s * t + coef[k];
    return s;
}

double TimePoly::deriv(double t) const
{
    double s = 0.0;
    for (std::size_t k = coef.size(); k-- > 1;) s = s * t + coef[k] * static_cast<double>(k);
    return s;
}

} // namespace fzl
