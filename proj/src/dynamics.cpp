#include "fzl/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace fzl {

void IntegratorConfig::validate() const
{
    if (dt < 0.0) throw std::invalid_argument("dt must be nonnegative");
    if (t_end < 0.0) throw std::invalid_argument("t_end must be nonnegative");
    if (dt > 0.0 && t_end > 0.0 && dt > t_end + 1e-15)
        throw std::invalid_argument("dt must not exceed t_end");
    if (snapshot_every < 1) throw std::invalid_argument("snapshot_every must be >= 1");
}

double default_dt(const ParticleEnsemble& e, const KernelSet& k)
{
    double amax = 0.0;
    for (int i = 0; i < e.size(); ++i)
        for (int j = i + 1; j < e.size(); ++j) {
            Vec z = sub(e.velocity(i), e.velocity(j), e.dim());
            amax = std::max(amax, k.interaction_weight(z));
        }
    if (amax <= 0.0) amax = 1.0;
    return 0.01 * e.beta() * e.beta() / amax;
}

RunBudgets declare_budgets(const ParticleEnsemble& e, const IntegratorConfig& cfg)
{
    RunBudgets b;
    double e0 = ensemble_energy(e);
    b.momentum = 1e-9 * (1.0 + std::sqrt(e0));
    double dtq = cfg.dt > 0.0 ? cfg.dt : 1e-3;
    int order = cfg.scheme == Scheme::Rk4 ? 4 : 2;
    // clamped so the 100x abort guard is reachable for genuine blow-ups yet
    // stays above any legitimate per-run drift
    double rel = std::clamp(10.0 * std::pow(dtq, order), 1e-9, 1e-4);
    b.energy = rel * (1.0 + e0);
    return b;
}

namespace {

struct Derivative {
    std::vector<double> xdot;
    std::vector<double> vdot;
};

Derivative eval_field(const ParticleEnsemble& e, const GrazingRate& rate,
                      const KernelSet& k, const ParallelSpec& par,
                      const BlobEval* blob = nullptr,
                      const std::vector<double>* force = nullptr)
{
    Derivative d;
    d.xdot = transport_field(e);
    if (force)
        d.vdot = *force;
    else
        d.vdot = blob ? grazing_divergence_field(e, rate, k, *blob, par)
                      : grazing_divergence_field(e, rate, k, par);
    return d;
}

// first_blob / first_force: stage-1 reconstruction and drift of e, when the
// caller already has them
ParticleEnsemble advance(const ParticleEnsemble& e, const GrazingRate& rate,
                         const KernelSet& k, const IntegratorConfig& cfg, double dt,
                         const BlobEval* first_blob = nullptr,
                         const std::vector<double>* first_force = nullptr)
{
    const std::size_t m = e.xs().size();
    auto shifted = [&](const Derivative& d, double h) {
        std::vector<double> x(m), v(m);
        for (std::size_t q = 0; q < m; ++q) {
            x[q] = e.xs()[q] + h * d.xdot[q];
            v[q] = e.vs()[q] + h * d.vdot[q];
        }
        return e.with_state(std::move(x), std::move(v));
    };

    std::vector<double> x(m), v(m);
    if (cfg.scheme == Scheme::Midpoint) {
        Derivative k1 = eval_field(e, rate, k, cfg.parallel, first_blob, first_force);
        Derivative k2 = eval_field(shifted(k1, 0.5 * dt), rate, k, cfg.parallel);
        for (std::size_t q = 0; q < m; ++q) {
            x[q] = e.xs()[q] + dt * k2.xdot[q];
            v[q] = e.vs()[q] + dt * k2.vdot[q];
        }
    } else {
        Derivative k1 = eval_field(e, rate, k, cfg.parallel, first_blob, first_force);
        Derivative k2 = eval_field(shifted(k1, 0.5 * dt), rate, k, cfg.parallel);
        Derivative k3 = eval_field(shifted(k2, 0.5 * dt), rate, k, cfg.parallel);
        Derivative k4 = eval_field(shifted(k3, dt), rate, k, cfg.parallel);
        const double c = dt / 6.0;
        for (std::size_t q = 0; q < m; ++q) {
            x[q] = e.xs()[q] +
                   c * (k1.xdot[q] + 2.0 * k2.xdot[q] + 2.0 * k3.xdot[q] + k4.xdot[q]);
            v[q] = e.vs()[q] +
                   c * (k1.vdot[q] + 2.0 * k2.vdot[q] + 2.0 * k3.vdot[q] + k4.vdot[q]);
        }
    }
    for (double q : v)
        if (!std::isfinite(q))
            throw BlowUpError("non-finite velocity after step");
    return e.with_state(std::move(x), std::move(v));
}

} // namespace

ParticleEnsemble step_landau(const ParticleEnsemble& e, const KernelSet& k,
                             const IntegratorConfig& cfg)
{
    cfg.validate();
    double dt = cfg.dt > 0.0 ? cfg.dt : default_dt(e, k);
    return advance(e, GrazingRate::landau(), k, cfg, dt);
}

ParticleEnsemble step_tgre(const ParticleEnsemble& e, const GrazingRate& rate,
                           const KernelSet& k, const IntegratorConfig& cfg)
{
    cfg.validate();
    double dt = cfg.dt > 0.0 ? cfg.dt : default_dt(e, k);
    return advance(e, rate, k, cfg, dt);
}

Trajectory run(const ParticleEnsemble& initial, const KernelSet& k,
               const IntegratorConfig& cfg_in, const std::optional<GrazingRate>& rate_in)
{
    IntegratorConfig cfg = cfg_in;
    cfg.validate();
    if (cfg.dt == 0.0) cfg.dt = default_dt(initial, k);
    GrazingRate rate = rate_in.value_or(GrazingRate::landau());
    RunBudgets budgets = declare_budgets(initial, cfg);

    const int d = initial.dim();
    Vec p0 = ensemble_momentum(initial);
    double e0 = ensemble_energy(initial);

    Trajectory traj;
    std::vector<double> ts, ds, as, flux;
    double h0 = 0.0;

    const bool closed_form = rate.kind() == GrazingRate::Kind::LandauClosedForm;
    BlobEval carry;
    std::vector<double> carry_force;
    bool has_carry = false, has_force = false;
    auto capture = [&](double t, const ParticleEnsemble& e) {
        BlobEval blob = reconstruct_at_particles(e, cfg.parallel);
        double h = 0.0;
        for (int i = 0; i < e.size(); ++i) h += e.weight(i) * std::log(blob.density[i]);
        if (traj.snapshots.empty()) h0 = h;
        ts.push_back(t);
        if (closed_form) {
            // one fused pair sweep yields the drift and D; the closed-form
            // identities A(f, U) = D(f) and flux = -D(f) fill the rest
            double dval = 0.0;
            carry_force =
                landau_velocity_field_with_dissipation(e, k, blob, cfg.parallel, dval);
            has_force = true;
            ds.push_back(dval);
            as.push_back(dval);
            flux.push_back(-dval);
        } else {
            ds.push_back(dissipation(e, k, DissipationForm::GradLog, blob, cfg.parallel));
            as.push_back(action(e, rate, k, blob, cfg.parallel));
            flux.push_back(entropy_flux_pairing(e, rate, k, blob, cfg.parallel));
        }

        auto trap = [&](const std::vector<double>& y) {
            double s = 0.0;
            for (std::size_t i = 1; i < ts.size(); ++i)
                s += 0.5 * (ts[i] - ts[i - 1]) * (y[i] + y[i - 1]);
            return s;
        };
        FunctionalReport rep;
        rep.t = t;
        rep.mass = ensemble_mass(e);
        rep.momentum = ensemble_momentum(e);
        rep.energy = ensemble_energy(e);
        rep.entropy = h;
        rep.dissipation = ds.back();
        rep.action = as.back();
        auto [fi, cf] = fisher_terms(e, k, blob);
        rep.fisher = fi;
        rep.cross_fisher = cf;
        rep.chain_residual = h - h0 - trap(flux);
        rep.j_running = h - h0 + 0.5 * trap(ds) + 0.5 * trap(as);
        rep.check_invariants();
        traj.reports.push_back(rep);
        traj.snapshots.push_back(Snapshot{t, e});
        carry = std::move(blob); // stage 1 of the next step reuses it
        has_carry = true;
    };

    capture(0.0, initial);
    if (cfg.t_end == 0.0) return traj;

    ParticleEnsemble state = initial;
    double t = 0.0;
    long step = 0;
    const double tiny = 1e-12 * cfg.t_end;
    while (t < cfg.t_end - tiny) {
        double dt = std::min(cfg.dt, cfg.t_end - t);
        state = advance(state, rate, k, cfg, dt, has_carry ? &carry : nullptr,
                        has_force ? &carry_force : nullptr);
        has_carry = false;
        has_force = false;
        t += dt;
        ++step;

        Vec p = ensemble_momentum(state);
        double en = ensemble_energy(state);
        double pdrift = 0.0;
        for (int q = 0; q < d; ++q) pdrift = std::max(pdrift, std::abs(p[q] - p0[q]));
        double edrift = std::abs(en - e0);
        if (pdrift > 100.0 * budgets.momentum || edrift > 100.0 * budgets.energy) {
            std::ostringstream msg;
            msg << "conservation budget exceeded at t=" << t << " step=" << step
                << " momentum_drift=" << pdrift << " (budget " << budgets.momentum
                << ") energy_drift=" << edrift << " (budget " << budgets.energy << ")";
            throw BlowUpError(msg.str());
        }
        bool last = t >= cfg.t_end - tiny;
        if (step % cfg.snapshot_every == 0 || last) capture(t, state);
    }
    traj.check_invariants(cfg.t_end);
    return traj;
}

} // namespace fzl
