#include "fzl/functionals.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fzl/quadrature.hpp"

namespace fzl {

void FunctionalReport::check_invariants() const
{
    if (dissipation < 0.0 || action < 0.0)
        throw std::runtime_error("dissipation and action must be nonnegative");
    if (std::abs(mass - 1.0) > 1e-12)
        throw std::runtime_error("mass must equal 1");
}

double alpha_function(double s, const Vec& u, int d)
{
    if (s < 0.0) throw std::invalid_argument("alpha is defined on s >= 0");
    double u2 = norm2(u, d);
    if (s == 0.0)
        return u2 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return u2 / (2.0 * s);
}

namespace {

// ordered scalar pair reduction over i < j with fixed chunk merge
template <typename PairTerm>
double pair_sum(const ParticleEnsemble& e, const ParallelSpec& par, PairTerm&& term)
{
    const int n = e.size();
    const int chunks = chunk_count_for(n);
    std::vector<double> partial(chunks, 0.0);
    run_chunks(n, par.threads, [&](int c, int lo, int hi) {
        double acc = 0.0;
        for (int i = lo; i < hi; ++i)
            for (int j = i + 1; j < n; ++j) acc += term(i, j);
        partial[c] = acc;
    });
    return merge_ordered(partial);
}

double cross_bracket_sq(const Vec& a, const Vec& b, int d)
{
    double s = 0.0;
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
            double c = a[k] * b[l] - a[l] * b[k];
            s += c * c;
        }
    return s;
}

template <int D, bool Torus>
double grad_log_sweep(const ParticleEnsemble& e, const PairKernels& pk, bool flip,
                      const double* sv, const ParallelSpec& par)
{
    const int n = e.size();
    const double* xs = e.xs().data();
    const double* vs = e.vs().data();
    const double* ws = e.ws().data();
    const double half = 0.5 * pk.side;
    const int chunks = chunk_count_for(n);
    std::vector<double> partial(chunks, 0.0);
    run_chunks(n, par.threads, [&](int c, int lo, int hi) {
        double acc = 0.0;
        double z[D], dsv[D];
        for (int i = lo; i < hi; ++i) {
            const double* xi = xs + static_cast<std::size_t>(i) * D;
            const double* vi = vs + static_cast<std::size_t>(i) * D;
            const double* si = sv + static_cast<std::size_t>(i) * D;
            for (int j = i + 1; j < n; ++j) {
                const double* xj = xs + static_cast<std::size_t>(j) * D;
                const double* vj = vs + static_cast<std::size_t>(j) * D;
                const double* sj = sv + static_cast<std::size_t>(j) * D;
                double r2x = 0.0, z2 = 0.0, zds = 0.0;
                for (int kk = 0; kk < D; ++kk) {
                    double dxk = xi[kk] - xj[kk];
                    if (Torus) dxk = min_image_coord(dxk, half, pk.side);
                    r2x += dxk * dxk;
                    double zk = vi[kk] - vj[kk];
                    double dk = si[kk] - sj[kk];
                    z[kk] = zk;
                    dsv[kk] = dk;
                    z2 += zk * zk;
                    zds += zk * dk;
                }
                if (z2 == 0.0) continue;
                double fac = pk.kappa_r2(r2x) * pk.interaction_r2(z2);
                double cc = zds / z2;
                double p2 = 0.0;
                for (int kk = 0; kk < D; ++kk) {
                    double pr = flip ? dsv[kk] + cc * z[kk] : dsv[kk] - cc * z[kk];
                    p2 += pr * pr;
                }
                acc += ws[i] * ws[j] * fac * p2;
            }
        }
        partial[c] = acc;
    });
    return merge_ordered(partial);
}

double grad_log_dissipation(const ParticleEnsemble& e, const KernelSet& k,
                            const BlobEval& blob, const ParallelSpec& par)
{
    const PairKernels pk(k);
    const bool flip = k.flip_projection;
    const double* sv = blob.score_v.data();
    const bool torus = k.domain.is_torus();
    const int d = e.dim();
    if (d == 2 && torus) return grad_log_sweep<2, true>(e, pk, flip, sv, par);
    if (d == 2) return grad_log_sweep<2, false>(e, pk, flip, sv, par);
    if (d == 3 && torus) return grad_log_sweep<3, true>(e, pk, flip, sv, par);
    if (d == 3) return grad_log_sweep<3, false>(e, pk, flip, sv, par);
    if (torus) return grad_log_sweep<1, true>(e, pk, flip, sv, par);
    return grad_log_sweep<1, false>(e, pk, flip, sv, par);
}

} // namespace

double dissipation(const ParticleEnsemble& e, const KernelSet& k, DissipationForm form,
                   const BlobEval& blob, const ParallelSpec& par)
{
    if (e.size() < 2) throw std::invalid_argument("dissipation needs N >= 2");
    const int d = e.dim();
    const double* sv = blob.score_v.data();
    auto score = [&](int i) {
        Vec s = zero_vec();
        for (int kk = 0; kk < d; ++kk) s[kk] = sv[static_cast<std::size_t>(i) * d + kk];
        return s;
    };

    switch (form) {
        case DissipationForm::GradLog:
            return grad_log_dissipation(e, k, blob, par);
        case DissipationForm::CrossProduct:
            return pair_sum(e, par, [&](int i, int j) {
                Vec z = sub(e.velocity(i), e.velocity(j), d);
                double z2 = norm2(z, d);
                if (z2 == 0.0) return 0.0;
                Vec ds = sub(score(i), score(j), d);
                double kap = k.spatial_weight(sub(e.position(i), e.position(j), d));
                double wb = k.interaction_weight(z) / z2; // |z|^gamma for the power kernel
                return 0.5 * e.weight(i) * e.weight(j) * kap * wb *
                       cross_bracket_sq(z, ds, d);
            });
        case DissipationForm::SqrtForm:
            return pair_sum(e, par, [&](int i, int j) {
                Vec z = sub(e.velocity(i), e.velocity(j), d);
                double z2 = norm2(z, d);
                if (z2 == 0.0) return 0.0;
                double fi = blob.density[i], fj = blob.density[j];
                double root = std::sqrt(fi * fj);
                Vec grad_sqrt = scale(sub(score(i), score(j), d), 0.5 * root, d);
                Vec pr = project_perp_apply(z, z2, grad_sqrt, d, k.flip_projection);
                double kap = k.spatial_weight(sub(e.position(i), e.position(j), d));
                // integrand 2 kappa A |Pi grad sqrt|^2 / (f f*) on ordered
                // pairs; this loop visits unordered pairs, hence the 4
                return e.weight(i) * e.weight(j) * 4.0 * kap * k.interaction_weight(z) *
                       norm2(pr, d) / (fi * fj);
            });
    }
    return 0.0;
}

double dissipation(const ParticleEnsemble& e, const KernelSet& k, DissipationForm form,
                   const ParallelSpec& par)
{
    BlobEval blob = reconstruct_at_particles(e, par);
    return dissipation(e, k, form, blob, par);
}

std::pair<double, double> fisher_terms(const ParticleEnsemble& e, const KernelSet& k,
                                       const BlobEval& blob)
{
    const int d = e.dim();
    double fisher = 0.0, cross = 0.0;
    for (int i = 0; i < e.size(); ++i) {
        Vec s = zero_vec();
        for (int kk = 0; kk < d; ++kk)
            s[kk] = blob.score_v[static_cast<std::size_t>(i) * d + kk];
        Vec v = e.velocity(i);
        double wgt = e.weight(i) * std::pow(bracket_of(v, d), k.gamma.value);
        fisher += wgt * norm2(s, d);
        cross += wgt * cross_bracket_sq(v, s, d);
    }
    return {fisher, cross};
}

std::pair<double, double> fisher_terms(const ParticleEnsemble& e, const KernelSet& k,
                                       const ParallelSpec& par)
{
    return fisher_terms(e, k, reconstruct_at_particles(e, par));
}

double action(const ParticleEnsemble& e, const GrazingRate& rate, const KernelSet& k,
              const BlobEval& blob, const ParallelSpec& par)
{
    if (rate.kind() == GrazingRate::Kind::Zero) return 0.0;
    const int d = e.dim();
    PairContext ctx{e, blob, k};
    return pair_sum(e, par, [&](int i, int j) {
        double kap = k.spatial_weight(sub(e.position(i), e.position(j), d));
        Vec rij = rate.pair_rate(i, j, ctx);
        Vec rji = rate.pair_rate(j, i, ctx);
        return 0.5 * e.weight(i) * e.weight(j) * (norm2(rij, d) + norm2(rji, d)) / kap;
    });
}

double action(const ParticleEnsemble& e, const GrazingRate& rate, const KernelSet& k,
              const ParallelSpec& par)
{
    return action(e, rate, k, reconstruct_at_particles(e, par), par);
}

double entropy_flux_pairing(const ParticleEnsemble& e, const GrazingRate& rate,
                            const KernelSet& k, const BlobEval& blob,
                            const ParallelSpec& par)
{
    if (rate.kind() == GrazingRate::Kind::Zero) return 0.0;
    const int d = e.dim();
    PairContext ctx{e, blob, k};
    const double* sv = blob.score_v.data();
    return pair_sum(e, par, [&](int i, int j) {
        Vec z = sub(e.velocity(i), e.velocity(j), d);
        double z2 = norm2(z, d);
        if (z2 == 0.0) return 0.0;
        Vec ds = zero_vec();
        for (int kk = 0; kk < d; ++kk)
            ds[kk] = sv[static_cast<std::size_t>(i) * d + kk] -
                     sv[static_cast<std::size_t>(j) * d + kk];
        Vec pr = project_perp_apply(z, z2, ds, d, k.flip_projection);
        Vec grad_log = scale(pr, std::sqrt(k.interaction_weight(z)), d);
        Vec dr = sub(rate.pair_rate(i, j, ctx), rate.pair_rate(j, i, ctx), d);
        return 0.5 * e.weight(i) * e.weight(j) * dot(grad_log, dr, d);
    });
}

namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& y)
{
    double s = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        s += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

void require_time_ordered(const Trajectory& traj)
{
    if (traj.snapshots.size() < 2)
        throw std::invalid_argument("need at least two snapshots");
    for (std::size_t i = 1; i < traj.snapshots.size(); ++i)
        if (!(traj.snapshots[i].t > traj.snapshots[i - 1].t))
            throw std::invalid_argument("snapshot times must increase");
}

} // namespace

double variational_J(const Trajectory& traj, const GrazingRate& rate, const KernelSet& k,
                     const ParallelSpec& par)
{
    require_time_ordered(traj);
    std::vector<double> ts, ds, as;
    double h0 = 0.0, hT = 0.0;
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const auto& snap = traj.snapshots[s];
        BlobEval blob = reconstruct_at_particles(snap.state, par);
        double h = 0.0;
        for (int i = 0; i < snap.state.size(); ++i)
            h += snap.state.weight(i) * std::log(blob.density[i]);
        if (s == 0) h0 = h;
        if (s + 1 == traj.snapshots.size()) hT = h;
        ts.push_back(snap.t);
        ds.push_back(dissipation(snap.state, k, DissipationForm::GradLog, blob, par));
        as.push_back(action(snap.state, rate, k, blob, par));
    }
    return hT - h0 + 0.5 * trapezoid(ts, ds) + 0.5 * trapezoid(ts, as);
}

double chain_rule_residual(const Trajectory& traj, const GrazingRate& rate,
                           const KernelSet& k, const ParallelSpec& par)
{
    require_time_ordered(traj);
    std::vector<double> ts, flux;
    double h0 = 0.0, hT = 0.0;
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const auto& snap = traj.snapshots[s];
        BlobEval blob = reconstruct_at_particles(snap.state, par);
        double h = 0.0;
        for (int i = 0; i < snap.state.size(); ++i)
            h += snap.state.weight(i) * std::log(blob.density[i]);
        if (s == 0) h0 = h;
        if (s + 1 == traj.snapshots.size()) hT = h;
        ts.push_back(snap.t);
        flux.push_back(entropy_flux_pairing(snap.state, rate, k, blob, par));
    }
    return hT - h0 - trapezoid(ts, flux);
}

double chain_rule_residual_window(const Trajectory& traj, const GrazingRate& rate,
                                  const KernelSet& k, std::size_t from, std::size_t to,
                                  const ParallelSpec& par)
{
    if (from == to) return 0.0;
    std::size_t lo = std::min(from, to), hi = std::max(from, to);
    if (hi >= traj.snapshots.size())
        throw std::invalid_argument("snapshot index out of range");
    double sign = from < to ? 1.0 : -1.0;
    std::vector<double> ts, flux;
    double h_lo = 0.0, h_hi = 0.0;
    for (std::size_t s = lo; s <= hi; ++s) {
        const auto& snap = traj.snapshots[s];
        BlobEval blob = reconstruct_at_particles(snap.state, par);
        double h = 0.0;
        for (int i = 0; i < snap.state.size(); ++i)
            h += snap.state.weight(i) * std::log(blob.density[i]);
        if (s == lo) h_lo = h;
        if (s == hi) h_hi = h;
        ts.push_back(snap.t);
        flux.push_back(entropy_flux_pairing(snap.state, rate, k, blob, par));
    }
    return sign * (h_hi - h_lo - trapezoid(ts, flux));
}

double weak_form_residual(const Trajectory& traj, const TimeField& phi, const KernelSet& k,
                          const ParallelSpec& par)
{
    require_time_ordered(traj);
    const int d = traj.snapshots.front().state.dim();
    std::vector<double> ts, transport, collision;
    double m0 = 0.0, mT = 0.0;
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const auto& snap = traj.snapshots[s];
        const ParticleEnsemble& e = snap.state;
        double t = snap.t;
        double m = 0.0, tr = 0.0;
        for (int i = 0; i < e.size(); ++i) {
            Vec x = e.position(i), v = e.velocity(i);
            m += e.weight(i) * phi.eval(t, x, v);
            tr += e.weight(i) * (phi.dt(t, x, v) + dot(v, phi.grad_x(t, x, v), d));
        }
        if (s == 0) m0 = m;
        if (s + 1 == traj.snapshots.size()) mT = m;

        BlobEval blob = reconstruct_at_particles(e, par);
        const double* sv = blob.score_v.data();
        double tfac = phi.time.eval(t);
        double col = pair_sum(e, par, [&](int i, int j) {
            Vec z = sub(e.velocity(i), e.velocity(j), d);
            double z2 = norm2(z, d);
            if (z2 == 0.0) return 0.0;
            Vec dphi = sub(phi.space.grad_v(e.position(i), e.velocity(i)),
                           phi.space.grad_v(e.position(j), e.velocity(j)), d);
            Vec ds = zero_vec();
            for (int kk = 0; kk < d; ++kk)
                ds[kk] = sv[static_cast<std::size_t>(i) * d + kk] -
                         sv[static_cast<std::size_t>(j) * d + kk];
            Vec pr_phi = project_perp_apply(z, z2, dphi, d, k.flip_projection);
            Vec pr_s = project_perp_apply(z, z2, ds, d, k.flip_projection);
            double kap = k.spatial_weight(sub(e.position(i), e.position(j), d));
            return e.weight(i) * e.weight(j) * kap * k.interaction_weight(z) *
                   dot(pr_phi, pr_s, d);
        });
        ts.push_back(t);
        transport.push_back(tr);
        collision.push_back(tfac * col);
    }
    return std::abs(mT - m0 - trapezoid(ts, transport) + trapezoid(ts, collision));
}

IntegrabilityReport grazing_integrability(const Trajectory& traj, const GrazingRate& rate,
                                          const KernelSet& k, const ParallelSpec& par)
{
    require_time_ordered(traj);
    const int d = traj.snapshots.front().state.dim();
    const double gexp = 1.0 + 0.5 * std::abs(k.gamma.value);
    const bool soft = k.gamma.value < -2.0 && k.soft_core_eps > 0.0;

    std::vector<double> ts, lhs, acts, moments, soft_lhs;
    for (const auto& snap : traj.snapshots) {
        const ParticleEnsemble& e = snap.state;
        BlobEval blob = reconstruct_at_particles(e, par);
        PairContext ctx{e, blob, k};
        double l = pair_sum(e, par, [&](int i, int j) {
            Vec rij = rate.pair_rate(i, j, ctx);
            Vec rji = rate.pair_rate(j, i, ctx);
            double m = std::pow(bracket_of(e.velocity(i), d), gexp) +
                       std::pow(bracket_of(e.velocity(j), d), gexp) +
                       bracket_of(e.position(i), d) + bracket_of(e.position(j), d);
            return e.weight(i) * e.weight(j) * m *
                   (std::sqrt(norm2(rij, d)) + std::sqrt(norm2(rji, d)));
        });
        ts.push_back(snap.t);
        lhs.push_back(l);
        acts.push_back(action(e, rate, k, blob, par));
        moments.push_back(moment(e, MomentSpec{2.0, 2.0 + std::abs(k.gamma.value)}));
        if (soft) {
            soft_lhs.push_back(pair_sum(e, par, [&](int i, int j) {
                Vec z = sub(e.velocity(i), e.velocity(j), d);
                Vec rij = rate.pair_rate(i, j, ctx);
                Vec rji = rate.pair_rate(j, i, ctx);
                double zfac = std::pow(norm2(z, d), 0.5 * (1.0 + 0.5 * k.gamma.value));
                return e.weight(i) * e.weight(j) * zfac *
                       (std::sqrt(norm2(rij, d)) + std::sqrt(norm2(rji, d)));
            }));
        }
    }
    IntegrabilityReport rep;
    rep.lhs = trapezoid(ts, lhs);
    rep.action_integral = trapezoid(ts, acts);
    rep.moment_integral = trapezoid(ts, moments);
    rep.bound = std::sqrt(rep.action_integral * rep.moment_integral);
    if (soft) {
        rep.soft_lhs = trapezoid(ts, soft_lhs);
        rep.soft_evaluated = true;
    }
    return rep;
}

double velocity_convolution_profile(const ParticleEnsemble& e, double alpha_exp,
                                    double delta, const std::vector<Vec>& probes)
{
    const int d = e.dim();
    if (d != 1 && d != 2)
        throw std::invalid_argument("velocity_convolution_profile supports d = 1, 2");
    if (!(alpha_exp > -static_cast<double>(d)))
        throw std::invalid_argument("alpha must exceed -d");
    for (const auto& p : probes)
        if (!all_finite(p, d)) throw std::domain_error("non-finite probe velocity");

    Mollifier mv = Mollifier::make(e.beta(), d);
    auto marginal = [&](const Vec& u) {
        double F = 0.0;
        for (int i = 0; i < e.size(); ++i) F += e.weight(i) * mv.eval(sub(u, e.velocity(i), d));
        return F;
    };
    auto weighted = [&](const Vec& u) {
        return std::pow(bracket_of(u, d), delta) * marginal(u);
    };

    double worst = 0.0;
    for (const Vec& v : probes) {
        double reach = 0.0;
        for (int i = 0; i < e.size(); ++i) {
            double r = std::sqrt(norm2(sub(v, e.velocity(i), d), d));
            reach = std::max(reach, r);
        }
        double R = reach + 40.0 * e.beta();
        double g = 0.0;
        if (d == 2) {
            // polar quadrature about the probe; substitution r = s^p removes
            // the |.|^alpha singularity
            double p = 2.0 / (2.0 + alpha_exp);
            Rule1d sr = composite_gl(0.0, std::pow(R, 1.0 / p), 16, 48);
            const int ntheta = 128;
            for (std::size_t a = 0; a < sr.nodes.size(); ++a) {
                double s = sr.nodes[a];
                double r = std::pow(s, p);
                double ring = 0.0;
                for (int q = 0; q < ntheta; ++q) {
                    double th = 2.0 * M_PI * q / ntheta;
                    Vec u = {v[0] + r * std::cos(th), v[1] + r * std::sin(th), 0.0};
                    ring += weighted(u);
                }
                ring *= 2.0 * M_PI / ntheta;
                // r^{1+alpha} dr = p s^{p(2+alpha)-1} ds = p s ds
                g += sr.weights[a] * p * s * ring;
            }
        } else {
            double p = 1.0 / (1.0 + alpha_exp);
            Rule1d sr = composite_gl(0.0, std::pow(R, 1.0 / p), 16, 48);
            for (std::size_t a = 0; a < sr.nodes.size(); ++a) {
                double s = sr.nodes[a];
                double t = std::pow(s, p);
                Vec up = {v[0] + t, 0.0, 0.0};
                Vec dn = {v[0] - t, 0.0, 0.0};
                g += sr.weights[a] * p * (weighted(up) + weighted(dn));
            }
        }
        worst = std::max(worst, std::pow(bracket_of(v, d), -alpha_exp) * g);
    }
    return worst;
}

double ensemble_mass(const ParticleEnsemble& e)
{
    double s = 0.0;
    for (int i = 0; i < e.size(); ++i) s += e.weight(i);
    return s;
}

Vec ensemble_momentum(const ParticleEnsemble& e)
{
    Vec p = zero_vec();
    for (int i = 0; i < e.size(); ++i) {
        Vec v = e.velocity(i);
        for (int k = 0; k < e.dim(); ++k) p[k] += e.weight(i) * v[k];
    }
    return p;
}

double ensemble_energy(const ParticleEnsemble& e)
{
    double s = 0.0;
    for (int i = 0; i < e.size(); ++i) s += e.weight(i) * norm2(e.velocity(i), e.dim());
    return s;
}

} // namespace fzl
