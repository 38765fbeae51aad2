#include "fzl/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fzl {

namespace {

double mollifier_norm_const(int d)
{
    double mass = integrate_radial(d, [](double r) { return std::exp(-bracket(r * r)); });
    return 1.0 / mass;
}

// mass of the minimal-image x mollifier over the torus cell
double torus_cell_mass(const Domain& domain, double alpha, double c)
{
    double amp = c;
    for (int k = 0; k < domain.dim; ++k) amp /= alpha;
    int panels = static_cast<int>(std::max(4.0, std::ceil(domain.side / alpha)));
    panels = std::min(panels, domain.dim == 3 ? 24 : 96);
    Rule1d axis = composite_gl(-0.5 * domain.side, 0.5 * domain.side, 12, panels);
    const int n = static_cast<int>(axis.nodes.size());
    const double ia2 = 1.0 / (alpha * alpha);
    double s = 0.0;
    if (domain.dim == 1) {
        for (int a = 0; a < n; ++a)
            s += axis.weights[a] * std::exp(-bracket(axis.nodes[a] * axis.nodes[a] * ia2));
    } else if (domain.dim == 2) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double r2 = axis.nodes[a] * axis.nodes[a] + axis.nodes[b] * axis.nodes[b];
                s += axis.weights[a] * axis.weights[b] * std::exp(-bracket(r2 * ia2));
            }
    } else {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int cc = 0; cc < n; ++cc) {
                    double r2 = axis.nodes[a] * axis.nodes[a] +
                                axis.nodes[b] * axis.nodes[b] +
                                axis.nodes[cc] * axis.nodes[cc];
                    s += axis.weights[a] * axis.weights[b] * axis.weights[cc] *
                         std::exp(-bracket(r2 * ia2));
                }
    }
    return amp * s;
}

} // namespace

ParticleEnsemble::ParticleEnsemble(Domain domain, double alpha, double beta,
                                   std::vector<double> x, std::vector<double> v,
                                   std::vector<double> w, bool uniform_x,
                                   std::uint64_t seed)
    : domain_(domain), alpha_(alpha), beta_(beta), uniform_x_(uniform_x), seed_(seed),
      n_(static_cast<int>(w.size())), x_(std::move(x)), v_(std::move(v)), w_(std::move(w))
{
    if (alpha_ <= 0.0 || beta_ <= 0.0)
        throw std::invalid_argument("mollifier widths must be positive");
    if (x_.size() != static_cast<std::size_t>(n_) * domain_.dim ||
        v_.size() != static_cast<std::size_t>(n_) * domain_.dim)
        throw std::invalid_argument("coordinate array size mismatch");
    if (uniform_x_ && !domain_.is_torus())
        throw std::invalid_argument("uniform-x reconstruction requires a torus");

    mollifier_c_ = mollifier_norm_const(domain_.dim);
    v_amp_ = mollifier_c_;
    for (int k = 0; k < domain_.dim; ++k) v_amp_ /= beta_;

    if (uniform_x_) {
        x_amp_ = 1.0 / domain_.volume();
        x_renorm_ = 1.0;
    } else if (domain_.is_torus()) {
        x_renorm_ = 1.0 / torus_cell_mass(domain_, alpha_, mollifier_c_);
        x_amp_ = x_renorm_ * mollifier_c_;
        for (int k = 0; k < domain_.dim; ++k) x_amp_ /= alpha_;
    } else {
        x_amp_ = mollifier_c_;
        for (int k = 0; k < domain_.dim; ++k) x_amp_ /= alpha_;
    }
    check_invariants();
}

Vec ParticleEnsemble::position(int i) const
{
    Vec p = zero_vec();
    for (int k = 0; k < dim(); ++k) p[k] = x_[static_cast<std::size_t>(i) * dim() + k];
    return p;
}

Vec ParticleEnsemble::velocity(int i) const
{
    Vec p = zero_vec();
    for (int k = 0; k < dim(); ++k) p[k] = v_[static_cast<std::size_t>(i) * dim() + k];
    return p;
}

ParticleEnsemble ParticleEnsemble::with_state(std::vector<double> x,
                                              std::vector<double> v) const
{
    ParticleEnsemble out = *this;
    if (domain_.is_torus()) {
        for (int i = 0; i < n_; ++i) {
            Vec p = zero_vec();
            for (int k = 0; k < dim(); ++k) p[k] = x[static_cast<std::size_t>(i) * dim() + k];
            p = domain_.wrap(p);
            for (int k = 0; k < dim(); ++k) x[static_cast<std::size_t>(i) * dim() + k] = p[k];
        }
    }
    out.x_ = std::move(x);
    out.v_ = std::move(v);
    out.check_invariants();
    return out;
}

void ParticleEnsemble::check_invariants() const
{
    double sum = 0.0;
    for (double wi : w_) {
        if (!(wi >= 0.0)) throw std::runtime_error("negative particle weight");
        sum += wi;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::runtime_error("particle weights must sum to 1");
    for (double c : x_)
        if (!std::isfinite(c)) throw std::runtime_error("non-finite position");
    for (double c : v_)
        if (!std::isfinite(c)) throw std::runtime_error("non-finite velocity");
    if (domain_.is_torus()) {
        for (std::size_t i = 0; i < x_.size(); ++i)
            if (x_[i] < 0.0 || x_[i] >= domain_.side)
                throw std::runtime_error("torus position outside [0, L)");
    }
}

double default_width(int n, int d)
{
    return 0.8 * std::pow(static_cast<double>(n), -1.0 / (2.0 * d + 2.0));
}

namespace {

struct ReconstructScratch {
    std::vector<double> den;
    std::vector<double> numx;
    std::vector<double> numv;
};

} // namespace

template <int D, bool Torus, bool UniformX>
void reconstruct_sweep(const ParticleEnsemble& e, const ParallelSpec& par,
                       std::vector<ReconstructScratch>& scratch)
{
    const int n = e.size();
    const double* xs = e.xs().data();
    const double* vs = e.vs().data();
    const double* ws = e.ws().data();
    const double L = Torus ? e.domain().side : 0.0;
    const double half = 0.5 * L;
    const double inv_a2 = 1.0 / (e.alpha() * e.alpha());
    const double inv_b2 = 1.0 / (e.beta() * e.beta());
    const double amp = e.x_amplitude() * e.v_amplitude();

    run_chunks(n, par.threads, [&](int c, int lo, int hi) {
        auto& s = scratch[c];
        double dx[D], dv[D];
        for (int i = lo; i < hi; ++i) {
            const double* xi = xs + static_cast<std::size_t>(i) * D;
            const double* vi = vs + static_cast<std::size_t>(i) * D;
            const double wi = ws[i];
            for (int j = i + 1; j < n; ++j) {
                const double* xj = xs + static_cast<std::size_t>(j) * D;
                const double* vj = vs + static_cast<std::size_t>(j) * D;
                double r2x = 0.0, r2v = 0.0;
                for (int k = 0; k < D; ++k) {
                    double dxk = xi[k] - xj[k];
                    if (Torus) dxk = min_image_coord(dxk, half, L);
                    dx[k] = dxk;
                    r2x += dxk * dxk;
                    double dvk = vi[k] - vj[k];
                    dv[k] = dvk;
                    r2v += dvk * dvk;
                }
                double bv = bracket(r2v * inv_b2);
                double psi, gxc = 0.0;
                if (UniformX) {
                    psi = amp * std::exp(-bv);
                } else {
                    double bx = bracket(r2x * inv_a2);
                    psi = amp * std::exp(-bx - bv);
                    gxc = psi * inv_a2 / bx;
                }
                double gvc = psi * inv_b2 / bv;
                const double wj = ws[j];
                s.den[i] += wj * psi;
                s.den[j] += wi * psi;
                double* nxi = s.numx.data() + static_cast<std::size_t>(i) * D;
                double* nxj = s.numx.data() + static_cast<std::size_t>(j) * D;
                double* nvi = s.numv.data() + static_cast<std::size_t>(i) * D;
                double* nvj = s.numv.data() + static_cast<std::size_t>(j) * D;
                for (int k = 0; k < D; ++k) {
                    double gx = gxc * dx[k];
                    double gv = gvc * dv[k];
                    nxi[k] -= wj * gx;
                    nxj[k] += wi * gx;
                    nvi[k] -= wj * gv;
                    nvj[k] += wi * gv;
                }
            }
        }
    });
}

template <int D>
void reconstruct_dispatch(const ParticleEnsemble& e, const ParallelSpec& par,
                          std::vector<ReconstructScratch>& scratch)
{
    const bool torus = e.domain().is_torus();
    if (torus && e.uniform_x())
        reconstruct_sweep<D, true, true>(e, par, scratch);
    else if (torus)
        reconstruct_sweep<D, true, false>(e, par, scratch);
    else
        reconstruct_sweep<D, false, false>(e, par, scratch);
}

BlobEval reconstruct_at_particles(const ParticleEnsemble& e, const ParallelSpec& par)
{
    const int n = e.size();
    const int d = e.dim();
    const double* ws = e.ws().data();
    const bool ux = e.uniform_x();
    const double amp = e.x_amplitude() * e.v_amplitude();

    const int chunks = chunk_count_for(n);
    std::vector<ReconstructScratch> scratch(chunks);
    for (auto& s : scratch) {
        s.den.assign(n, 0.0);
        s.numx.assign(static_cast<std::size_t>(n) * d, 0.0);
        s.numv.assign(static_cast<std::size_t>(n) * d, 0.0);
    }

    switch (d) {
        case 1: reconstruct_dispatch<1>(e, par, scratch); break;
        case 2: reconstruct_dispatch<2>(e, par, scratch); break;
        default: reconstruct_dispatch<3>(e, par, scratch); break;
    }

    BlobEval out;
    out.density.assign(n, 0.0);
    out.score_x.assign(static_cast<std::size_t>(n) * d, 0.0);
    out.score_v.assign(static_cast<std::size_t>(n) * d, 0.0);
    for (const auto& s : scratch) {
        for (int i = 0; i < n; ++i) out.density[i] += s.den[i];
        for (std::size_t k = 0; k < out.score_x.size(); ++k) {
            out.score_x[k] += s.numx[k];
            out.score_v[k] += s.numv[k];
        }
    }
    // self terms: dx = dv = 0, gradient contribution vanishes
    const double self = ux ? amp * std::exp(-1.0) : amp * std::exp(-2.0);
    for (int i = 0; i < n; ++i) out.density[i] += ws[i] * self;
    for (int i = 0; i < n; ++i) {
        double inv = 1.0 / out.density[i];
        for (int k = 0; k < d; ++k) {
            out.score_x[static_cast<std::size_t>(i) * d + k] *= inv;
            out.score_v[static_cast<std::size_t>(i) * d + k] *= inv;
        }
    }
    return out;
}

BlobEval symmetrized_scores(const ParticleEnsemble& e, const BlobEval& blob,
                            const ParallelSpec& par)
{
    const int n = e.size();
    const int d = e.dim();
    const double* xs = e.xs().data();
    const double* vs = e.vs().data();
    const double* ws = e.ws().data();
    const bool torus = e.domain().is_torus();
    const bool ux = e.uniform_x();
    const double L = torus ? e.domain().side : 0.0;
    const double half = 0.5 * L;
    const double inv_a2 = 1.0 / (e.alpha() * e.alpha());
    const double inv_b2 = 1.0 / (e.beta() * e.beta());
    const double amp = e.x_amplitude() * e.v_amplitude();

    const int chunks = chunk_count_for(n);
    std::vector<std::vector<double>> cx(chunks), cv(chunks);
    for (int c = 0; c < chunks; ++c) {
        cx[c].assign(static_cast<std::size_t>(n) * d, 0.0);
        cv[c].assign(static_cast<std::size_t>(n) * d, 0.0);
    }
    run_chunks(n, par.threads, [&](int c, int lo, int hi) {
        double dx[kMaxDim], dv[kMaxDim];
        for (int i = lo; i < hi; ++i) {
            for (int j = i + 1; j < n; ++j) {
                double r2x = 0.0, r2v = 0.0;
                for (int k = 0; k < d; ++k) {
                    double dxk = xs[static_cast<std::size_t>(i) * d + k] -
                                 xs[static_cast<std::size_t>(j) * d + k];
                    if (torus) dxk = min_image_coord(dxk, half, L);
                    dx[k] = dxk;
                    r2x += dxk * dxk;
                    double dvk = vs[static_cast<std::size_t>(i) * d + k] -
                                 vs[static_cast<std::size_t>(j) * d + k];
                    dv[k] = dvk;
                    r2v += dvk * dvk;
                }
                double bv = bracket(r2v * inv_b2);
                double psi, gxc = 0.0;
                if (ux) {
                    psi = amp * std::exp(-bv);
                } else {
                    double bx = bracket(r2x * inv_a2);
                    psi = amp * std::exp(-bx - bv);
                    gxc = psi * inv_a2 / bx;
                }
                double gvc = psi * inv_b2 / bv;
                double inv_fi = 1.0 / blob.density[i];
                double inv_fj = 1.0 / blob.density[j];
                for (int k = 0; k < d; ++k) {
                    double gx = gxc * dx[k];
                    double gv = gvc * dv[k];
                    // grad psi(z_i - z_j) enters corr_i over f_j and corr_j
                    // (negated) over f_i
                    cx[c][static_cast<std::size_t>(i) * d + k] -= ws[j] * gx * inv_fj;
                    cx[c][static_cast<std::size_t>(j) * d + k] += ws[i] * gx * inv_fi;
                    cv[c][static_cast<std::size_t>(i) * d + k] -= ws[j] * gv * inv_fj;
                    cv[c][static_cast<std::size_t>(j) * d + k] += ws[i] * gv * inv_fi;
                }
            }
        }
    });

    BlobEval out;
    out.density = blob.density;
    out.score_x = blob.score_x;
    out.score_v = blob.score_v;
    for (int c = 0; c < chunks; ++c)
        for (std::size_t q = 0; q < out.score_x.size(); ++q) {
            out.score_x[q] += cx[c][q];
            out.score_v[q] += cv[c][q];
        }
    return out;
}

namespace {

struct PointEval {
    double density;
    Vec grad_x;
    Vec grad_v;
};

PointEval eval_point(const ParticleEnsemble& e, const Vec& x, const Vec& v)
{
    const int n = e.size();
    const int d = e.dim();
    const bool torus = e.domain().is_torus();
    const bool ux = e.uniform_x();
    const double L = torus ? e.domain().side : 0.0;
    const double half = 0.5 * L;
    const double inv_a2 = 1.0 / (e.alpha() * e.alpha());
    const double inv_b2 = 1.0 / (e.beta() * e.beta());
    const double amp = e.x_amplitude() * e.v_amplitude();
    const double* xs = e.xs().data();
    const double* vs = e.vs().data();

    PointEval out{0.0, zero_vec(), zero_vec()};
    double dx[kMaxDim], dv[kMaxDim];
    for (int i = 0; i < n; ++i) {
        double r2x = 0.0, r2v = 0.0;
        for (int k = 0; k < d; ++k) {
            double dxk = x[k] - xs[static_cast<std::size_t>(i) * d + k];
            if (torus) dxk = min_image_coord(dxk, half, L);
            dx[k] = dxk;
            r2x += dxk * dxk;
            double dvk = v[k] - vs[static_cast<std::size_t>(i) * d + k];
            dv[k] = dvk;
            r2v += dvk * dvk;
        }
        double bv = bracket(r2v * inv_b2);
        double psi, gxc = 0.0;
        if (ux) {
            psi = amp * std::exp(-bv);
        } else {
            double bx = bracket(r2x * inv_a2);
            psi = amp * std::exp(-bx - bv);
            gxc = psi * inv_a2 / bx;
        }
        double gvc = psi * inv_b2 / bv;
        double wi = e.weight(i);
        out.density += wi * psi;
        for (int k = 0; k < d; ++k) {
            out.grad_x[k] -= wi * gxc * dx[k];
            out.grad_v[k] -= wi * gvc * dv[k];
        }
    }
    return out;
}

} // namespace

double density_at(const ParticleEnsemble& e, const Vec& x, const Vec& v)
{
    return eval_point(e, x, v).density;
}

ScorePair score_at(const ParticleEnsemble& e, const Vec& x, const Vec& v)
{
    PointEval p = eval_point(e, x, v);
    ScorePair s;
    s.x = scale(p.grad_x, 1.0 / p.density, e.dim());
    s.v = scale(p.grad_v, 1.0 / p.density, e.dim());
    return s;
}

double moment(const ParticleEnsemble& e, const MomentSpec& spec)
{
    if (!std::isfinite(spec.a) || !std::isfinite(spec.b))
        throw std::invalid_argument("moment orders must be finite");
    double s = 0.0;
    for (int i = 0; i < e.size(); ++i) {
        double bx = bracket_of(e.position(i), e.dim());
        double bv = bracket_of(e.velocity(i), e.dim());
        s += e.weight(i) * (std::pow(bx, spec.a) + std::pow(bv, spec.b));
    }
    return s;
}

double lp_profile(const ParticleEnsemble& e, double p, double weight_exponent,
                  const VelocityGridSpec& vgrid)
{
    if (p < 1.0) throw std::invalid_argument("lp_profile requires p >= 1");
    if (vgrid.points_per_axis <= 1)
        throw std::invalid_argument("lp_profile: velocity grid not configured");
    const int d = e.dim();

    // x mass of one blob by quadrature (identical for every particle)
    double x_mass;
    if (e.uniform_x()) {
        x_mass = 1.0;
    } else if (e.domain().is_torus()) {
        TensorGrid g;
        g.dim = d;
        g.periodic = false;
        for (int k = 0; k < d; ++k) {
            g.lo.push_back(-0.5 * e.domain().side);
            g.hi.push_back(0.5 * e.domain().side);
            g.n.push_back(257);
        }
        double s = 0.0;
        double inv_a2 = 1.0 / (e.alpha() * e.alpha());
        for_each_grid_point(g, [&](const double* pt, double w) {
            double r2 = 0.0;
            for (int k = 0; k < d; ++k) r2 += pt[k] * pt[k];
            s += w * e.x_amplitude() * std::exp(-bracket(r2 * inv_a2));
        });
        x_mass = s;
    } else {
        double inv_a2 = 1.0 / (e.alpha() * e.alpha());
        double amp = e.x_amplitude();
        x_mass = integrate_radial(
            d, [&](double r) { return amp * std::exp(-bracket(r * r * inv_a2)); },
            e.alpha());
    }

    Mollifier mv = Mollifier::make(e.beta(), d);
    TensorGrid g;
    g.dim = d;
    g.periodic = false;
    for (int k = 0; k < d; ++k) {
        g.lo.push_back(vgrid.lo[k]);
        g.hi.push_back(vgrid.hi[k]);
        g.n.push_back(vgrid.points_per_axis);
    }
    double acc = 0.0;
    for_each_grid_point(g, [&](const double* pt, double wq) {
        Vec v = zero_vec();
        for (int k = 0; k < d; ++k) v[k] = pt[k];
        double F = 0.0;
        for (int i = 0; i < e.size(); ++i)
            F += e.weight(i) * x_mass * mv.eval(sub(v, e.velocity(i), d));
        double val = std::pow(bracket_of(v, d), weight_exponent) * F;
        acc += wq * std::pow(val, p);
    });
    return std::pow(acc, 1.0 / p);
}

double entropy(const ParticleEnsemble& e, const EntropyPlan& plan, const ParallelSpec& par)
{
    if (plan.mode == EntropyMode::Particle) {
        BlobEval b = reconstruct_at_particles(e, par);
        double h = 0.0;
        for (int i = 0; i < e.size(); ++i) h += e.weight(i) * std::log(b.density[i]);
        return h;
    }
    if (e.dim() != 2 || !e.domain().is_torus())
        throw std::invalid_argument("grid-mode entropy supports the d=2 torus only");
    const int n = e.size();
    const double L = e.domain().side;
    double vmax = 0.0;
    for (int i = 0; i < e.size(); ++i)
        vmax = std::max(vmax, std::sqrt(norm2(e.velocity(i), 2)));
    const double ext = vmax + 12.0 * e.beta();

    // separable blob factors tabulated per particle: f on the tensor grid is
    // sum_i w_i X_i[xa, xb] V_i[vc, vd]
    const int nx = std::max(24, plan.points_per_axis / 2); // periodic trapezoid
    const int nv = plan.points_per_axis + 1;
    const double hx = L / nx;
    const double hv = 2.0 * ext / (nv - 1);
    const double ia2 = 1.0 / (e.alpha() * e.alpha());
    const double ib2 = 1.0 / (e.beta() * e.beta());

    std::vector<double> xf(static_cast<std::size_t>(n) * nx * nx);
    std::vector<double> vf(static_cast<std::size_t>(n) * nv * nv);
    for (int i = 0; i < n; ++i) {
        Vec xi = e.position(i), vi = e.velocity(i);
        for (int a = 0; a < nx; ++a)
            for (int b = 0; b < nx; ++b) {
                double dx0 = a * hx - xi[0];
                double dx1 = b * hx - xi[1];
                dx0 -= L * std::rint(dx0 / L);
                dx1 -= L * std::rint(dx1 / L);
                double val = e.uniform_x()
                                 ? e.x_amplitude()
                                 : e.x_amplitude() *
                                       std::exp(-bracket((dx0 * dx0 + dx1 * dx1) * ia2));
                xf[(static_cast<std::size_t>(i) * nx + a) * nx + b] = val;
            }
        for (int c = 0; c < nv; ++c)
            for (int dd = 0; dd < nv; ++dd) {
                double dv0 = -ext + c * hv - vi[0];
                double dv1 = -ext + dd * hv - vi[1];
                vf[(static_cast<std::size_t>(i) * nv + c) * nv + dd] =
                    e.v_amplitude() *
                    std::exp(-bracket((dv0 * dv0 + dv1 * dv1) * ib2));
            }
    }

    double h = 0.0;
    std::vector<double> slab(static_cast<std::size_t>(nx) * nx);
    for (int c = 0; c < nv; ++c) {
        double wc = (c == 0 || c == nv - 1) ? 0.5 : 1.0;
        for (int dd = 0; dd < nv; ++dd) {
            double wd = (dd == 0 || dd == nv - 1) ? 0.5 : 1.0;
            std::fill(slab.begin(), slab.end(), 0.0);
            for (int i = 0; i < n; ++i) {
                double wv = e.weight(i) * vf[(static_cast<std::size_t>(i) * nv + c) * nv + dd];
                if (wv < 1e-18) continue; // below any resolvable contribution
                const double* xrow = xf.data() + static_cast<std::size_t>(i) * nx * nx;
                for (int q = 0; q < nx * nx; ++q) slab[q] += wv * xrow[q];
            }
            double acc = 0.0;
            for (int q = 0; q < nx * nx; ++q)
                if (slab[q] > 0.0) acc += slab[q] * std::log(slab[q]);
            h += wc * wd * acc;
        }
    }
    return h * hx * hx * hv * hv;
}

InitialCondition InitialCondition::parse(const std::string& name, double T)
{
    InitialCondition c;
    c.temperature = T;
    if (name == "maxwellian") {
        c.kind = Kind::Maxwellian;
    } else if (name == "anisotropic-gaussian") {
        c.kind = Kind::AnisotropicGaussian;
    } else if (name == "two-bump") {
        c.kind = Kind::TwoBump;
    } else if (name == "uniform-x-gaussian-v") {
        c.kind = Kind::UniformXGaussianV;
    } else {
        throw std::invalid_argument("unknown initial condition: " + name);
    }
    return c;
}

ParticleEnsemble sample_initial(const InitialCondition& cond, int n, std::uint64_t seed,
                                const Domain& domain, double alpha, double beta,
                                bool uniform_x)
{
    if (n < 2) throw std::invalid_argument("need at least two particles");
    const int d = domain.dim;
    if (cond.kind == InitialCondition::Kind::Maxwellian ||
        cond.kind == InitialCondition::Kind::UniformXGaussianV ||
        cond.kind == InitialCondition::Kind::TwoBump) {
        if (!(cond.temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
    } else {
        for (int k = 0; k < d; ++k)
            if (!(cond.temperatures[k] > 0.0))
                throw std::invalid_argument("temperatures must be positive");
    }

    CounterRng rx(seed, rng_stream::kSampling);
    CounterRng rv(seed, rng_stream::kSampling + 1);
    CounterRng raux(seed, rng_stream::kSampling + 2);

    std::vector<double> x(static_cast<std::size_t>(n) * d);
    std::vector<double> v(static_cast<std::size_t>(n) * d);
    std::vector<double> w(n, 1.0 / n);

    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) {
            std::uint64_t c = static_cast<std::uint64_t>(i) * kMaxDim + k;
            if (domain.is_torus())
                x[static_cast<std::size_t>(i) * d + k] = domain.side * rx.uniform(c);
            else
                x[static_cast<std::size_t>(i) * d + k] = rx.normal(c);
        }
        double mean1 = 0.0, tiso = cond.temperature;
        bool aniso = cond.kind == InitialCondition::Kind::AnisotropicGaussian;
        if (cond.kind == InitialCondition::Kind::TwoBump) {
            tiso = cond.bump_temperature;
            mean1 = raux.uniform(i) < 0.5 ? cond.bump_speed : -cond.bump_speed;
        }
        for (int k = 0; k < d; ++k) {
            std::uint64_t c = static_cast<std::uint64_t>(i) * kMaxDim + k;
            double sigma = std::sqrt(aniso ? cond.temperatures[k] : tiso);
            double val = sigma * rv.normal(c);
            if (k == 0) val += mean1;
            v[static_cast<std::size_t>(i) * d + k] = val;
        }
    }
    return ParticleEnsemble(domain, alpha, beta, std::move(x), std::move(v), std::move(w),
                            uniform_x, seed);
}

void write_snapshot(const std::string& path, const ParticleEnsemble& e)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    const int d = e.dim();
    out << "# fzl ensemble snapshot\n";
    char head[256];
    std::snprintf(head, sizeof(head),
                  "# N=%d d=%d domain=%s side=%.17g alpha=%.17g beta=%.17g uniform_x=%d seed=%llu\n",
                  e.size(), d, e.domain().is_torus() ? "torus" : "whole-space",
                  e.domain().is_torus() ? e.domain().side : 0.0, e.alpha(), e.beta(),
                  e.uniform_x() ? 1 : 0, static_cast<unsigned long long>(e.seed()));
    out << head;
    for (int k = 0; k < d; ++k) out << "x_" << (k + 1) << ",";
    for (int k = 0; k < d; ++k) out << "v_" << (k + 1) << ",";
    out << "w\n";
    char buf[64];
    for (int i = 0; i < e.size(); ++i) {
        for (int k = 0; k < d; ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g,", e.xs()[static_cast<std::size_t>(i) * d + k]);
            out << buf;
        }
        for (int k = 0; k < d; ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g,", e.vs()[static_cast<std::size_t>(i) * d + k]);
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), "%.17g\n", e.weight(i));
        out << buf;
    }
}

ParticleEnsemble read_snapshot(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snapshot " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty snapshot " + path);
    if (!std::getline(in, line)) throw std::runtime_error("truncated snapshot " + path);

    auto grab = [&](const std::string& key) -> std::string {
        auto pos = line.find(key + "=");
        if (pos == std::string::npos)
            throw std::runtime_error("snapshot header missing " + key);
        pos += key.size() + 1;
        auto end = line.find(' ', pos);
        return line.substr(pos, end == std::string::npos ? end : end - pos);
    };
    int n = std::stoi(grab("N"));
    int d = std::stoi(grab("d"));
    std::string dom = grab("domain");
    double side = std::stod(grab("side"));
    double alpha = std::stod(grab("alpha"));
    double beta = std::stod(grab("beta"));
    bool uniform_x = std::stoi(grab("uniform_x")) != 0;
    std::uint64_t seed = std::stoull(grab("seed"));

    std::getline(in, line); // column header
    std::vector<double> x(static_cast<std::size_t>(n) * d);
    std::vector<double> v(static_cast<std::size_t>(n) * d);
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("truncated snapshot " + path);
        std::stringstream ss(line);
        std::string cell;
        for (int k = 0; k < d; ++k) {
            std::getline(ss, cell, ',');
            x[static_cast<std::size_t>(i) * d + k] = std::stod(cell);
        }
        for (int k = 0; k < d; ++k) {
            std::getline(ss, cell, ',');
            v[static_cast<std::size_t>(i) * d + k] = std::stod(cell);
        }
        std::getline(ss, cell, ',');
        w[i] = std::stod(cell);
    }
    Domain domain = dom == "torus" ? Domain::torus(d, side) : Domain::whole_space(d);
    return ParticleEnsemble(domain, alpha, beta, std::move(x), std::move(v), std::move(w),
                            uniform_x, seed);
}

} // namespace fzl
