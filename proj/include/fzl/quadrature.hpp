#ifndef FZL_QUADRATURE_HPP
#define FZL_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fzl {

struct Rule1d {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre nodes on [-1,1] by Newton iteration on P_n.
Rule1d gauss_legendre(int n);

// Composite Gauss-Legendre on [a,b] with `panels` equal panels.
Rule1d composite_gl(double a, double b, int points_per_panel, int panels);

inline double integrate(const Rule1d& r, const std::function<double(double)>& f)
{
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
    return s;
}

// Surface area of the unit sphere in R^d, d <= 3.
inline double sphere_surface(int d)
{
    switch (d) {
        case 1: return 2.0;
        case 2: return 6.283185307179586477;
        case 3: return 12.566370614359172954;
        default: throw std::invalid_argument("sphere_surface: d must be 1..3");
    }
}

// Integral over R^d of a radial function g(r), for g decaying at least
// exponentially past r_decay. Composite GL out to a cutoff chosen so the
// tail is below double rounding.
double integrate_radial(int d, const std::function<double(double)>& g,
                        double r_decay = 1.0);

// Uniform tensor grid over a box, trapezoidal weights. Exponentially
// accurate for smooth periodic (torus) or exponentially decaying integrands.
struct TensorGrid {
    int dim = 0;
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<int> n; // points per axis
    bool periodic = false;

    std::size_t total() const
    {
        std::size_t t = 1;
        for (int k = 0; k < dim; ++k) t *= static_cast<std::size_t>(n[k]);
        return t;
    }
    double cell_weight() const
    {
        double w = 1.0;
        for (int k = 0; k < dim; ++k) {
            int m = periodic ? n[k] : n[k] - 1;
            w *= (hi[k] - lo[k]) / m;
        }
        return w;
    }
};

// Visit all grid points; for non-periodic axes the endpoint weights are
// halved (trapezoid). f receives the point and its quadrature weight.
void for_each_grid_point(const TensorGrid& g,
                         const std::function<void(const double*, double)>& f);

} // namespace fzl

#endif
