#include "fzl/quadrature.hpp"

#include <cmath>

namespace fzl {

Rule1d gauss_legendre(int n)
{
    Rule1d r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

Rule1d composite_gl(double a, double b, int points_per_panel, int panels)
{
    Rule1d base = gauss_legendre(points_per_panel);
    Rule1d out;
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * h;
        for (std::size_t i = 0; i < base.nodes.size(); ++i) {
            out.nodes.push_back(lo + 0.5 * h * (base.nodes[i] + 1.0));
            out.weights.push_back(0.5 * h * base.weights[i]);
        }
    }
    return out;
}

double integrate_radial(int d, const std::function<double(double)>& g, double r_decay)
{
    const double cutoff = 60.0 * std::max(r_decay, 1.0);
    Rule1d r = composite_gl(0.0, cutoff, 24, 48);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        double rad = r.nodes[i];
        double shell = (d == 1) ? 1.0 :              // r^0
                       (d == 2) ? rad : rad * rad;   // r^{d-1}
        s += r.weights[i] * g(rad) * shell;
    }
    return sphere_surface(d) * s;
}

void for_each_grid_point(const TensorGrid& g,
                         const std::function<void(const double*, double)>& f)
{
    const double w0 = g.cell_weight();
    std::vector<int> idx(g.dim, 0);
    std::vector<double> pt(g.dim, 0.0);
    bool done = false;
    while (!done) {
        double w = w0;
        for (int k = 0; k < g.dim; ++k) {
            int m = g.periodic ? g.n[k] : g.n[k] - 1;
            double h = (g.hi[k] - g.lo[k]) / m;
            pt[k] = g.lo[k] + idx[k] * h;
            if (!g.periodic && (idx[k] == 0 || idx[k] == g.n[k] - 1)) w *= 0.5;
        }
        f(pt.data(), w);
        int k = 0;
        for (; k < g.dim; ++k) {
            if (++idx[k] < g.n[k]) break;
            idx[k] = 0;
        }
        if (k == g.dim) done = true;
    }
}

} // namespace fzl
