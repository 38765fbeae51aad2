#include "fzl/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace fzl {

namespace {

// Gauss-Hermite rule for integrals against exp(-y^2). Roots located by sign
// scanning of the orthonormal recurrence plus bisection; weights by the
// Christoffel formula 1 / sum_k h_k(x)^2.
struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

double hermite_orthonormal(int n, double y, std::vector<double>* table = nullptr)
{
    double h0 = std::pow(M_PI, -0.25);
    if (table) table->push_back(h0);
    if (n == 0) return h0;
    double h1 = std::sqrt(2.0) * y * h0;
    if (table) table->push_back(h1);
    for (int k = 1; k < n; ++k) {
        double h2 = y * std::sqrt(2.0 / (k + 1.0)) * h1 -
                    std::sqrt(static_cast<double>(k) / (k + 1.0)) * h0;
        h0 = h1;
        h1 = h2;
        if (table) table->push_back(h1);
    }
    return h1;
}

HermiteRule gauss_hermite(int n)
{
    HermiteRule rule;
    double reach = std::sqrt(2.0 * n + 1.0) + 2.0;
    const int scan = 200 * n;
    double prev_y = -reach;
    double prev_h = hermite_orthonormal(n, prev_y);
    for (int i = 1; i <= scan; ++i) {
        double y = -reach + 2.0 * reach * i / scan;
        double h = hermite_orthonormal(n, y);
        if (prev_h == 0.0 || h * prev_h < 0.0) {
            double a = prev_y, b = y;
            double fa = prev_h;
            for (int it = 0; it < 80; ++it) {
                double m = 0.5 * (a + b);
                double fm = hermite_orthonormal(n, m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if (fa * fm < 0.0) {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            rule.nodes.push_back(0.5 * (a + b));
        }
        prev_y = y;
        prev_h = h;
    }
    if (static_cast<int>(rule.nodes.size()) != n)
        throw std::runtime_error("gauss_hermite: root scan failed");
    for (double x : rule.nodes) {
        std::vector<double> table;
        hermite_orthonormal(n - 1, x, &table);
        double s = 0.0;
        for (double h : table) s += h * h;
        rule.weights.push_back(1.0 / s);
    }
    return rule;
}

void cholesky_check_spd(const Mat& P, int d)
{
    Mat L = zero_mat();
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = P[i][j];
            for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
            if (i == j) {
                if (s <= 0.0) throw std::invalid_argument("moment matrix is not SPD");
                L[i][i] = std::sqrt(s);
            } else {
                L[i][j] = s / L[j][j];
            }
        }
        for (int j = i + 1; j < d; ++j)
            if (std::abs(P[i][j] - P[j][i]) > 1e-12 * (1.0 + std::abs(P[i][j])))
                throw std::invalid_argument("moment matrix is not symmetric");
    }
}

} // namespace

std::vector<std::pair<double, VelocityMarginal>> homogeneous_marginal(
    const Trajectory& traj, const KernelSet& k)
{
    if (!k.constant_kappa())
        throw std::logic_error(
            "homogeneous marginal requires a constant-kappa run");
    std::vector<std::pair<double, VelocityMarginal>> out;
    for (const auto& snap : traj.snapshots) {
        VelocityMarginal m;
        m.dim = snap.state.dim();
        m.v = snap.state.vs();
        m.w = snap.state.ws();
        out.emplace_back(snap.t, std::move(m));
    }
    return out;
}

Mat second_moment(const VelocityMarginal& m)
{
    Mat P = zero_mat();
    const int n = static_cast<int>(m.w.size());
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m.dim; ++a)
            for (int b = 0; b < m.dim; ++b)
                P[a][b] += m.w[i] * m.v[static_cast<std::size_t>(i) * m.dim + a] *
                           m.v[static_cast<std::size_t>(i) * m.dim + b];
    return P;
}

Mat second_moment(const ParticleEnsemble& e)
{
    VelocityMarginal m;
    m.dim = e.dim();
    m.v = e.vs();
    m.w = e.ws();
    return second_moment(m);
}

RelaxationRate derive_relaxation_rate(int d, int nodes_per_axis)
{
    if (d != 2)
        throw std::invalid_argument("rate derivation implemented for d = 2");
    HermiteRule gh = gauss_hermite(nodes_per_axis);
    const int n = nodes_per_axis;
    const double norm = std::pow(M_PI, -static_cast<double>(d));

    // dP_mm/dt at F = N(0, diag(T)) for unit kappa:
    // -1/2 int int F F_* |z|^2 (2 z_m e_m) . Pi (s - s_*)
    auto moment_rate = [&](double T1, double T2, int m) {
        double s1 = std::sqrt(2.0 * T1), s2 = std::sqrt(2.0 * T2);
        double acc = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int e = 0; e < n; ++e) {
                        double v1 = s1 * gh.nodes[a], v2 = s2 * gh.nodes[b];
                        double u1 = s1 * gh.nodes[c], u2 = s2 * gh.nodes[e];
                        double z1 = v1 - u1, z2 = v2 - u2;
                        double z2n = z1 * z1 + z2 * z2;
                        if (z2n == 0.0) continue;
                        double ds1 = -(v1 - u1) / T1;
                        double ds2 = -(v2 - u2) / T2;
                        double c1 = (z1 * ds1 + z2 * ds2) / z2n;
                        double p1 = ds1 - c1 * z1;
                        double p2 = ds2 - c1 * z2;
                        double g1 = m == 0 ? 2.0 * z1 : 0.0;
                        double g2 = m == 1 ? 2.0 * z2 : 0.0;
                        double w = gh.weights[a] * gh.weights[b] * gh.weights[c] *
                                   gh.weights[e];
                        acc += w * z2n * (g1 * p1 + g2 * p2);
                    }
        return -0.5 * norm * acc;
    };

    std::vector<double> ratios{1.1, 1.5, 2.0, 3.0, 4.0};
    std::vector<double> lambdas;
    double trace_resid = 0.0;
    for (double r : ratios) {
        double T1 = r, T2 = 1.0;
        double tbar = 0.5 * (T1 + T2);
        double r11 = moment_rate(T1, T2, 0);
        double r22 = moment_rate(T1, T2, 1);
        lambdas.push_back(-r11 / (T1 - tbar));
        lambdas.push_back(-r22 / (T2 - tbar));
        trace_resid = std::max(trace_resid, std::abs(r11 + r22) / std::abs(r11));
    }
    double mean = 0.0;
    for (double l : lambdas) mean += l;
    mean /= lambdas.size();
    double spread = 0.0;
    for (double l : lambdas) spread = std::max(spread, std::abs(l - mean) / mean);

    RelaxationRate out;
    out.lambda = mean;
    out.spread = spread;
    out.trace_residual = trace_resid;
    return out;
}

namespace {

// embedded Dormand-Prince 5(4) step on the flattened deviatoric part
struct Dp54 {
    double lambda_c; // decay rate of the deviatoric part

    std::vector<double> f(const std::vector<double>& y) const
    {
        std::vector<double> d(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) d[i] = -lambda_c * y[i];
        return d;
    }

    // returns (5th order solution, embedded error estimate)
    std::pair<std::vector<double>, double> step(const std::vector<double>& y,
                                                double h) const
    {
        static const double a21 = 1.0 / 5;
        static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
        static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        const std::size_t m = y.size();
        auto comb = [&](std::initializer_list<std::pair<double, const std::vector<double>*>> terms) {
            std::vector<double> r = y;
            for (auto& [c, k] : terms)
                for (std::size_t i = 0; i < m; ++i) r[i] += h * c * (*k)[i];
            return r;
        };
        std::vector<double> k1 = f(y);
        std::vector<double> k2 = f(comb({{a21, &k1}}));
        std::vector<double> k3 = f(comb({{a31, &k1}, {a32, &k2}}));
        std::vector<double> k4 = f(comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        std::vector<double> k5 = f(comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        std::vector<double> k6 =
            f(comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        std::vector<double> y5(m);
        for (std::size_t i = 0; i < m; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                b6 * k6[i]);
        std::vector<double> k7 = f(y5);
        double err = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                             e6 * k6[i] + e7 * k7[i]);
            err = std::max(err, std::abs(ei));
        }
        return {y5, err};
    }
};

} // namespace

MomentCurve moment_ode_reference(const Mat& P0, int d, double lambda, double c,
                                 const std::vector<double>& times)
{
    cholesky_check_spd(P0, d);
    if (times.empty()) throw std::invalid_argument("empty time grid");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("oracle times must increase");

    double trace = 0.0;
    for (int a = 0; a < d; ++a) trace += P0[a][a];
    double iso = trace / d;

    std::vector<double> dev;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) dev.push_back(P0[a][b] - (a == b ? iso : 0.0));

    Dp54 ode{lambda * c};
    const double rtol = 1e-10;
    MomentCurve out;
    double t = times.front();
    std::vector<double> y = dev;
    double h = 1e-3;
    for (double target : times) {
        while (t < target - 1e-15 * (1.0 + target)) {
            double step = std::min(h, target - t);
            auto [ynew, err] = ode.step(y, step);
            double scale = rtol * (1.0 + std::abs(iso));
            if (err <= scale) {
                y = ynew;
                t += step;
                h = step * std::min(4.0, 0.9 * std::pow(scale / (err + 1e-300), 0.2));
            } else {
                h = step * std::max(0.1, 0.9 * std::pow(scale / err, 0.2));
            }
        }
        Mat P = zero_mat();
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                P[a][b] = y[static_cast<std::size_t>(a) * d + b] + (a == b ? iso : 0.0);
        out.times.push_back(target);
        out.moments.push_back(P);
    }
    return out;
}

double compare_to_oracle(const Trajectory& traj, const KernelSet& k,
                         const MomentCurve& reference)
{
    if (traj.snapshots.empty() || reference.times.empty())
        throw std::invalid_argument("empty trajectory or reference");
    const int d = traj.snapshots.front().state.dim();

    auto ref_at = [&](double t) {
        if (t < reference.times.front() - 1e-12 || t > reference.times.back() + 1e-12)
            throw std::invalid_argument("snapshot time outside the reference range");
        std::size_t hi = 0;
        while (hi + 1 < reference.times.size() && reference.times[hi] < t) ++hi;
        if (hi == 0) return reference.moments.front();
        double t0 = reference.times[hi - 1], t1 = reference.times[hi];
        double s = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
        Mat P = zero_mat();
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                P[a][b] = (1.0 - s) * reference.moments[hi - 1][a][b] +
                          s * reference.moments[hi][a][b];
        return P;
    };

    double worst = 0.0;
    for (const auto& snap : traj.snapshots) {
        if (snap.state.dim() != d) throw std::invalid_argument("dimension mismatch");
        Mat P = second_moment(snap.state);
        Mat R = ref_at(snap.t);
        double num = 0.0, den = 0.0;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                num += (P[a][b] - R[a][b]) * (P[a][b] - R[a][b]);
                den += R[a][b] * R[a][b];
            }
        worst = std::max(worst, std::sqrt(num / den));
    }
    return worst;
}

} // namespace fzl
