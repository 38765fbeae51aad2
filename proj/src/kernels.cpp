#include "fzl/kernels.hpp"

#include <cmath>

#include "fzl/quadrature.hpp"

namespace fzl {

namespace {

void require_finite(const Vec& z, int d)
{
    if (!all_finite(z, d)) throw std::domain_error("non-finite kernel argument");
}

double pow_half(double base2, double exponent)
{
    // base2 = |z|^2 (+ eps^2); returns base2^{exponent/2} with fast paths for
    // the exponents that dominate production runs
    if (exponent == 2.0) return base2;
    if (exponent == 0.0) return 1.0;
    if (exponent == 3.0) return base2 * std::sqrt(base2);
    if (exponent == 1.0) return std::sqrt(base2);
    if (base2 == 0.0) return exponent > 0.0 ? 0.0 : HUGE_VAL;
    return std::pow(base2, 0.5 * exponent);
}

// tensor composite-GL integral of a radial function over the torus cell
double cell_integral(const Domain& domain, int panels,
                     const std::function<double(double)>& radial2)
{
    Rule1d axis = composite_gl(-0.5 * domain.side, 0.5 * domain.side, 12, panels);
    const int n = static_cast<int>(axis.nodes.size());
    double s = 0.0;
    if (domain.dim == 1) {
        for (int a = 0; a < n; ++a)
            s += axis.weights[a] * radial2(axis.nodes[a] * axis.nodes[a]);
    } else if (domain.dim == 2) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double r2 = axis.nodes[a] * axis.nodes[a] + axis.nodes[b] * axis.nodes[b];
                s += axis.weights[a] * axis.weights[b] * radial2(r2);
            }
    } else {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    double r2 = axis.nodes[a] * axis.nodes[a] +
                                axis.nodes[b] * axis.nodes[b] +
                                axis.nodes[c] * axis.nodes[c];
                    s += axis.weights[a] * axis.weights[b] * axis.weights[c] * radial2(r2);
                }
    }
    return s;
}

// integral of exp(-k2 <x>) over R^d or over the torus cell
double kappa_exponential_mass(const Domain& domain, double k2, int refine)
{
    if (domain.is_torus()) {
        return cell_integral(domain, 4 * refine,
                             [k2](double r2) { return std::exp(-k2 * bracket(r2)); });
    }
    return integrate_radial(domain.dim,
                            [k2](double r) { return std::exp(-k2 * bracket(r * r)); },
                            1.0 / k2);
}

} // namespace

KernelSet KernelSet::make(double gamma_value, const Domain& domain,
                          InteractionVariant variant, SpatialVariant spatial,
                          double k2, double soft_core_eps)
{
    KernelSet k;
    k.gamma = GammaExponent{gamma_value};
    if (variant == InteractionVariant::CoulombPower) {
        k.gamma.validate(domain.dim);
    } else if (!(gamma_value <= 1.0)) {
        throw std::invalid_argument("generalized-hard requires gamma <= 1");
    }
    if (k2 <= 0.0) throw std::invalid_argument("k2 must be positive");
    if (soft_core_eps < 0.0) throw std::invalid_argument("soft_core_eps must be >= 0");
    k.variant = variant;
    k.spatial = spatial;
    k.domain = domain;
    k.k2 = k2;
    k.soft_core_eps = soft_core_eps;
    if (spatial == SpatialVariant::Constant) {
        if (!domain.is_torus())
            throw std::invalid_argument("constant kappa is only normalizable on the torus");
        k.kappa_const = 1.0 / domain.volume();
    } else {
        k.k1 = 1.0 / kappa_exponential_mass(domain, k2, 1);
    }
    return k;
}

double interaction_weight(const Vec& z, int d, double gamma, double eps,
                          InteractionVariant variant)
{
    require_finite(z, d);
    double z2 = norm2(z, d);
    if (variant == InteractionVariant::GeneralizedHard) {
        // Abar(z) |z|^2 with Abar = <z>^{gamma+2}
        return std::pow(bracket(z2), gamma + 2.0) * z2;
    }
    double base = z2 + eps * eps;
    return pow_half(base, 2.0 + gamma);
}

double KernelSet::interaction_weight(const Vec& z) const
{
    return fzl::interaction_weight(z, domain.dim, gamma.value, soft_core_eps, variant);
}

Mat KernelSet::projection_perp(const Vec& z) const
{
    require_finite(z, domain.dim);
    Mat m = zero_mat();
    double z2 = norm2(z, domain.dim);
    if (z2 == 0.0) return m; // continuous extension a(0) = 0
    double sign = flip_projection ? 1.0 : -1.0;
    for (int i = 0; i < domain.dim; ++i) {
        m[i][i] = 1.0;
        for (int j = 0; j < domain.dim; ++j) m[i][j] += sign * z[i] * z[j] / z2;
    }
    return m;
}

Mat KernelSet::pair_matrix(const Vec& z) const
{
    Mat m = projection_perp(z);
    double a = interaction_weight(z);
    for (int i = 0; i < domain.dim; ++i)
        for (int j = 0; j < domain.dim; ++j) m[i][j] *= a;
    return m;
}

double KernelSet::spatial_weight(const Vec& dx) const
{
    require_finite(dx, domain.dim);
    if (spatial == SpatialVariant::Constant) return kappa_const;
    Vec r = domain.min_image(dx);
    return k1 * std::exp(-k2 * bracket_of(r, domain.dim));
}

double KernelSet::kappa_l1_error() const
{
    if (spatial == SpatialVariant::Constant)
        return kappa_const * domain.volume() - 1.0;
    // refined grid / panel count, distinct from the normalization pass
    double mass = k1 * kappa_exponential_mass(domain, k2, 2);
    return mass - 1.0;
}

Mollifier Mollifier::make(double width, int dim)
{
    if (width <= 0.0) throw std::invalid_argument("mollifier width must be positive");
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("mollifier dim out of range");
    Mollifier m;
    m.width = width;
    m.dim = dim;
    double mass = integrate_radial(dim, [](double r) { return std::exp(-bracket(r * r)); });
    m.norm_const = 1.0 / mass;
    return m;
}

double Mollifier::l1_error() const
{
    TensorGrid g;
    g.dim = dim;
    g.periodic = false;
    for (int k = 0; k < dim; ++k) {
        g.lo.push_back(-45.0 * width);
        g.hi.push_back(45.0 * width);
        g.n.push_back(dim == 3 ? 361 : 721);
    }
    double s = 0.0;
    for_each_grid_point(g, [&](const double* pt, double w) {
        Vec z = zero_vec();
        for (int k = 0; k < dim; ++k) z[k] = pt[k];
        s += w * eval(z);
    });
    return s - 1.0;
}

PeetreReport peetre_bound_check(double p, const std::vector<std::pair<Vec, Vec>>& samples,
                                int d)
{
    PeetreReport rep;
    double ap = std::abs(p);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& [x, y] = samples[i];
        require_finite(x, d);
        require_finite(y, d);
        double lhs = std::pow(bracket_of(x, d) / bracket_of(y, d), p);
        double rhs = std::pow(2.0, 0.5 * ap) * std::pow(bracket_of(sub(x, y, d), d), ap);
        double ratio = lhs / rhs;
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.worst_index = i;
        }
    }
    return rep;
}

namespace {

// convolution (g * M_w)(x) over R^d by tensor quadrature centered on the
// mollifier peak; n controls the resolution for the convergence check
double convolve_at(const std::function<double(const Vec&)>& g, const Mollifier& m,
                   const Vec& x, int n)
{
    TensorGrid grid;
    grid.dim = m.dim;
    grid.periodic = false;
    for (int k = 0; k < m.dim; ++k) {
        grid.lo.push_back(-45.0 * m.width);
        grid.hi.push_back(45.0 * m.width);
        grid.n.push_back(n);
    }
    double s = 0.0;
    for_each_grid_point(grid, [&](const double* pt, double w) {
        Vec y = zero_vec();
        for (int k = 0; k < m.dim; ++k) y[k] = pt[k];
        Vec xy = zero_vec();
        for (int k = 0; k < m.dim; ++k) xy[k] = x[k] - y[k];
        s += w * g(xy) * m.eval(y);
    });
    return s;
}

double converged_convolve(const std::function<double(const Vec&)>& g, const Mollifier& m,
                          const Vec& x)
{
    int n = m.dim == 1 ? 1601 : 501;
    double a = convolve_at(g, m, x, n);
    double b = convolve_at(g, m, x, n + (n - 1) / 2);
    if (std::abs(a - b) > 1e-6 * (std::abs(b) + 1e-300))
        throw std::runtime_error("convolution quadrature did not converge");
    return b;
}

} // namespace

ConvolutionDominanceReport convolution_dominance_check(const KernelSet& k,
                                                       const std::vector<Vec>& grid,
                                                       const std::vector<double>& widths)
{
    const int d = k.domain.dim;
    auto kappa = [&](const Vec& x) {
        if (k.constant_kappa()) return k.kappa_const;
        return k.k1 * std::exp(-k.k2 * bracket_of(x, d));
    };
    auto kappa_inv = [&](const Vec& x) { return 1.0 / kappa(x); };

    ConvolutionDominanceReport rep;
    for (double w : widths) {
        if (!(w > 0.0 && w < 1.0))
            throw std::invalid_argument("mollifier width must lie in (0,1)");
        Mollifier m = Mollifier::make(w, d);
        double worst_k = 0.0, worst_i = 0.0;
        for (const Vec& x : grid) {
            worst_k = std::max(worst_k, converged_convolve(kappa, m, x) / kappa(x));
            worst_i = std::max(worst_i, converged_convolve(kappa_inv, m, x) / kappa_inv(x));
        }
        rep.widths.push_back(w);
        rep.max_ratio_kappa.push_back(worst_k);
        rep.max_ratio_inverse.push_back(worst_i);
        rep.overall_kappa = std::max(rep.overall_kappa, worst_k);
        rep.overall_inverse = std::max(rep.overall_inverse, worst_i);
    }
    return rep;
}

} // namespace fzl
