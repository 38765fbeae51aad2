#include <doctest.h>

#include <cmath>

#include "fzl/driver.hpp"
#include "fzl/dynamics.hpp"
#include "test_util.hpp"

using namespace fzl;

namespace {
const Domain kTorus2 = Domain::torus(2, 2.0);

ParticleEnsemble small_state(int n, std::uint64_t seed)
{
    return sample_initial(InitialCondition::parse("two-bump", 1.0), n, seed, kTorus2, 0.3,
                          0.3);
}
} // namespace

TEST_CASE("config validation and defaults")
{
    IntegratorConfig cfg;
    cfg.dt = 2.0;
    cfg.t_end = 1.0;
    CHECK_THROWS(cfg.validate());
    cfg.dt = 0.1;
    cfg.snapshot_every = 0;
    CHECK_THROWS(cfg.validate());
    cfg.snapshot_every = 1;
    CHECK_NOTHROW(cfg.validate());

    KernelSet k = KernelSet::make(0.0, kTorus2);
    ParticleEnsemble e = small_state(32, 3);
    double dt = default_dt(e, k);
    CHECK(dt > 0.0);
    double amax = 0.0;
    for (int i = 0; i < e.size(); ++i)
        for (int j = i + 1; j < e.size(); ++j)
            amax = std::max(amax, norm2(sub(e.velocity(i), e.velocity(j), 2), 2));
    CHECK(dt == doctest::Approx(0.01 * 0.09 / amax).epsilon(1e-12));
}

TEST_CASE("single Landau step conserves momentum exactly and energy to scheme order")
{
    KernelSet k = KernelSet::make(0.0, kTorus2);
    ParticleEnsemble e = small_state(64, 11);
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;

    ParticleEnsemble e1 = step_landau(e, k, cfg);
    Vec p0 = ensemble_momentum(e), p1 = ensemble_momentum(e1);
    for (int q = 0; q < 2; ++q) CHECK(std::abs(p1[q] - p0[q]) <= 1e-13);
    CHECK(ensemble_mass(e1) == ensemble_mass(e));
    CHECK(e1.ws() == e.ws());

    double de = std::abs(ensemble_energy(e1) - ensemble_energy(e));
    CHECK(de <= 1e-10);
}

TEST_CASE("tgre stepping: zero rate is free transport, landau rate matches bit for bit")
{
    KernelSet k = KernelSet::make(0.0, kTorus2);
    ParticleEnsemble e = small_state(48, 13);
    IntegratorConfig cfg;
    cfg.dt = 5e-3;
    cfg.t_end = 1.0;

    ParticleEnsemble freestream = step_tgre(e, GrazingRate::zero(), k, cfg);
    CHECK(freestream.vs() == e.vs());
    // positions advance by dt * v modulo the wrap
    for (int i = 0; i < e.size(); ++i)
        for (int q = 0; q < 2; ++q) {
            double expect = e.xs()[2 * i + q] + cfg.dt * e.vs()[2 * i + q];
            expect -= 2.0 * std::floor(expect / 2.0);
            if (expect >= 2.0) expect -= 2.0;
            CHECK(freestream.xs()[2 * i + q] == doctest::Approx(expect).epsilon(1e-15));
        }

    ParticleEnsemble a = step_landau(e, k, cfg);
    ParticleEnsemble b = step_tgre(e, GrazingRate::landau(), k, cfg);
    CHECK(a.xs() == b.xs());
    CHECK(a.vs() == b.vs());
}

TEST_CASE("run: snapshots, reports, monotone entropy, t_end = 0")
{
    KernelSet k = KernelSet::make(0.0, kTorus2);
    ParticleEnsemble e = small_state(96, 17);
    IntegratorConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_end = 0.1;
    cfg.snapshot_every = 5;

    Trajectory traj = run(e, k, cfg);
    CHECK(traj.snapshots.front().t == 0.0);
    CHECK(traj.snapshots.back().t == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(traj.snapshots.size() == 11);
    CHECK(traj.reports.size() == traj.snapshots.size());

    for (const auto& rep : traj.reports) {
        CHECK(rep.mass == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(rep.dissipation >= 0.0);
        CHECK(rep.action >= 0.0);
    }
    // entropy decays along the collisional run (two-bump is far from
    // equilibrium; the dissipation dominates sampling fluctuations)
    for (std::size_t s = 1; s < traj.reports.size(); ++s)
        CHECK(traj.reports[s].entropy <=
              traj.reports[s - 1].entropy + 1e-3 * cfg.dt * (1.0 + traj.reports[s - 1].dissipation));

    IntegratorConfig zero = cfg;
    zero.t_end = 0.0;
    Trajectory still = run(e, k, zero);
    CHECK(still.snapshots.size() == 1);
    CHECK(still.reports.size() == 1);
    CHECK(still.reports.front().j_running == 0.0);
}

TEST_CASE("run: deterministic across thread counts")
{
    KernelSet k = KernelSet::make(0.0, kTorus2);
    ParticleEnsemble e = small_state(128, 23);
    IntegratorConfig c1;
    c1.dt = 2e-3;
    c1.t_end = 0.05;
    c1.parallel.threads = 1;
    IntegratorConfig c3 = c1;
    c3.parallel.threads = 3;

    Trajectory t1 = run(e, k, c1);
    Trajectory t3 = run(e, k, c3);
    REQUIRE(t1.snapshots.size() == t3.snapshots.size());
    for (std::size_t s = 0; s < t1.snapshots.size(); ++s) {
        CHECK(t1.snapshots[s].state.xs() == t3.snapshots[s].state.xs());
        CHECK(t1.snapshots[s].state.vs() == t3.snapshots[s].state.vs());
    }
    for (std::size_t s = 0; s < t1.reports.size(); ++s) {
        CHECK(diagnostics_row(t1.reports[s], 2) == diagnostics_row(t3.reports[s], 2));
    }
}

TEST_CASE("convergence order under dt halving")
{
    KernelSet k = KernelSet::make(0.0, kTorus2);
    ParticleEnsemble e = small_state(32, 29);

    auto run_with = [&](Scheme scheme, double dt) {
        IntegratorConfig cfg;
        cfg.scheme = scheme;
        cfg.dt = dt;
        cfg.t_end = 0.4;
        cfg.snapshot_every = 1 << 20; // final snapshot only
        return run(e, k, cfg);
    };
    auto energy_error = [&](Scheme scheme, double dt) {
        Trajectory traj = run_with(scheme, dt);
        return std::abs(traj.reports.back().energy - traj.reports.front().energy);
    };

    // midpoint: energy error at order 2
    double e1 = energy_error(Scheme::Midpoint, 0.04);
    double e2 = energy_error(Scheme::Midpoint, 0.02);
    double e3 = energy_error(Scheme::Midpoint, 0.01);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(std::log2(e2 / e3) == doctest::Approx(2.0).epsilon(0.15));

    // rk4: state error at order 4 (the energy error superconverges past 4, so
    // the order is read off Richardson state differences). Whole space keeps
    // the fields smooth; the torus minimal-image kernel has a cut locus that
    // pollutes the large-dt asymptotics.
    Domain free = Domain::whole_space(2);
    KernelSet kf = KernelSet::make(0.0, free);
    ParticleEnsemble ef = sample_initial(InitialCondition::parse("two-bump", 1.0), 32, 29,
                                         free, 0.3, 0.3);
    auto state = [&](double dt) {
        IntegratorConfig cfg;
        cfg.dt = dt;
        cfg.t_end = 0.4;
        cfg.snapshot_every = 1 << 20;
        return run(ef, kf, cfg).snapshots.back().state;
    };
    ParticleEnsemble s1 = state(0.08), s2 = state(0.04), s3 = state(0.02), s4 = state(0.01);
    auto gap = [&](const ParticleEnsemble& a, const ParticleEnsemble& b) {
        double m = 0.0;
        for (std::size_t q = 0; q < a.vs().size(); ++q)
            m = std::max(m, std::abs(a.vs()[q] - b.vs()[q]));
        return m;
    };
    double g1 = gap(s1, s2), g2 = gap(s2, s3), g3 = gap(s3, s4);
    CHECK(std::log2(g1 / g2) == doctest::Approx(4.0).epsilon(0.075));
    CHECK(std::log2(g2 / g3) == doctest::Approx(4.0).epsilon(0.075));

    // rk4 energy error still decays at least at the scheme order
    double r1 = energy_error(Scheme::Rk4, 0.08);
    double r2 = energy_error(Scheme::Rk4, 0.04);
    CHECK(std::log2(r1 / r2) >= 3.7);
}

TEST_CASE("budget guard aborts on blow-up")
{
    KernelSet k = KernelSet::make(1.0, kTorus2);
    ParticleEnsemble e = small_state(32, 31);
    IntegratorConfig cfg;
    cfg.dt = 0.9; // far beyond any stable step for hard potentials
    cfg.t_end = 9.0;
    CHECK_THROWS_AS(run(e, k, cfg), BlowUpError);
}

TEST_CASE("trajectory invariants")
{
    Trajectory traj;
    CHECK_THROWS(traj.check_invariants(1.0));
    ParticleEnsemble e = small_state(8, 37);
    traj.snapshots.push_back({0.0, e});
    traj.snapshots.push_back({0.5, e});
    CHECK_THROWS(traj.check_invariants(1.0)); // must end at t_end
    traj.snapshots.push_back({1.0, e});
    CHECK_NOTHROW(traj.check_invariants(1.0));
    traj.snapshots.push_back({0.7, e});
    CHECK_THROWS(traj.check_invariants(0.7));
}
