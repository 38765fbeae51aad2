// Command-line entry point: run / verify / functionals / oracle.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fzl/driver.hpp"
#include "fzl/version.hpp"

namespace fs = std::filesystem;
using namespace fzl;

namespace {

Config load_config(const std::string& path, std::uint64_t seed_override, bool has_seed,
                   int threads_override)
{
    Config cfg = path.empty() ? Config{} : Config::parse_file(path);
    cfg.validate_keys(config_key_registry());
    if (has_seed) cfg.set("seed", std::to_string(seed_override));
    if (threads_override > 0) cfg.set("parallel.threads", std::to_string(threads_override));
    return cfg;
}

int cmd_run(const Config& cfg, const std::string& out_dir)
{
    RunArtifacts art = execute_run(cfg);
    write_run_outputs(out_dir, art);
    std::printf("run complete: %zu snapshots, t_end=%.6g, outputs in %s\n",
                art.trajectory.snapshots.size(), art.integrator.t_end, out_dir.c_str());
    const auto& last = art.trajectory.reports.back();
    std::printf("final: H=%.10g D=%.10g J_running=%.10g energy=%.10g\n", last.entropy,
                last.dissipation, last.j_running, last.energy);
    return 0;
}

int cmd_verify(const Config& cfg)
{
    KernelSet k = kernels_from_config(cfg);
    ParticleEnsemble e = initial_from_config(cfg, k);
    std::vector<ScalarField> probes = probes_from_config(cfg, k);
    ParallelSpec par;
    par.threads = cfg.get_int("parallel.threads", 1);

    VerifyReport rep = verify_generic(e, k, probes, 1e-10, par);

    // kernel-level property checks ride along
    double kappa_err = std::abs(k.kappa_l1_error());
    rep.add("kappa L1 normalization", kappa_err, 1.0, 1e-8);
    Mollifier mx = Mollifier::make(e.alpha(), k.domain.dim);
    rep.add("mollifier L1 normalization", std::abs(mx.l1_error()), 1.0, 1e-8);

    CounterRng rng(cfg.get_u64("seed", 1), rng_stream::kPropertyTests);
    double worst_proj = 0.0, worst_pairz = 0.0;
    for (int s = 0; s < 200; ++s) {
        Vec z = zero_vec();
        for (int q = 0; q < k.domain.dim; ++q)
            z[q] = 3.0 * rng.normal(16 * static_cast<std::uint64_t>(s) + q);
        Mat P = k.projection_perp(z);
        Mat A = k.pair_matrix(z);
        for (int a = 0; a < k.domain.dim; ++a) {
            double rowz = 0.0;
            for (int b = 0; b < k.domain.dim; ++b) {
                double pp = 0.0;
                for (int c = 0; c < k.domain.dim; ++c) pp += P[a][c] * P[c][b];
                worst_proj = std::max(worst_proj, std::abs(pp - P[a][b]));
                rowz += A[a][b] * z[b];
            }
            double scale = k.interaction_weight(z) * std::sqrt(norm2(z, k.domain.dim));
            worst_pairz = std::max(worst_pairz, std::abs(rowz) / (scale + 1e-300));
        }
    }
    rep.add("projection idempotent", worst_proj, 1.0, 1e-13);
    rep.add("pair matrix annihilates z", worst_pairz, 1.0, 1e-13);

    std::vector<std::pair<Vec, Vec>> samples;
    for (int s = 0; s < 2000; ++s) {
        Vec a = zero_vec(), b = zero_vec();
        for (int q = 0; q < k.domain.dim; ++q) {
            a[q] = 5.0 * rng.normal(100000 + 16 * static_cast<std::uint64_t>(s) + q);
            b[q] = 5.0 * rng.normal(200000 + 16 * static_cast<std::uint64_t>(s) + q);
        }
        samples.emplace_back(a, b);
    }
    PeetreReport pr = peetre_bound_check(2.0, samples, k.domain.dim);
    rep.add("peetre bound", pr.max_ratio > 1.0 ? pr.max_ratio - 1.0 : 0.0, 1.0, 1e-12);

    std::printf("%-32s %14s %14s %6s\n", "check", "residual", "tolerance", "status");
    for (const auto& c : rep.checks)
        std::printf("%-32s %14.4e %14.4e %6s\n", c.name.c_str(), c.residual, c.tolerance,
                    c.pass ? "pass" : "FAIL");
    std::printf("verify: %s\n", rep.all_pass ? "all checks passed" : "FAILURES present");
    return rep.all_pass ? 0 : 1;
}

int cmd_functionals(const std::string& dir)
{
    LoadedRun lr = load_run(dir);
    const KernelSet& k = lr.kernels;
    const int d = k.domain.dim;
    std::uint64_t seed = lr.meta.get_u64("seed", 1);
    ParallelSpec par;
    par.threads = lr.meta.get_int("parallel.threads", 1);

    std::string kind = lr.meta.get_string("rate.kind", "landau");
    GrazingRate rate = GrazingRate::landau();
    if (lr.meta.get_string("mode", "landau") == "tgre") {
        if (kind == "zero") rate = GrazingRate::zero();
        else if (kind == "perturbed-landau")
            rate = GrazingRate::perturbed_landau(lr.meta.get_double("rate.amplitude", 0.5),
                                                 seed);
    }

    double tol_j = lr.meta.get_double("budget.tol_j", 0.0);
    double tol_chain = lr.meta.get_double("budget.tol_chain", 0.0);
    double tol_weak = lr.meta.get_double("budget.tol_weak", 0.0);

    const Trajectory& traj = lr.trajectory;
    bool single = traj.snapshots.size() < 2;
    double T = traj.snapshots.back().t;

    double J = 0.0, chain = 0.0;
    EntropyPlan plan;
    double h_first = entropy(traj.snapshots.front().state, plan, par);
    double h_last = entropy(traj.snapshots.back().state, plan, par);
    IntegrabilityReport integ;
    if (!single) {
        J = variational_J(traj, rate, k, par);
        chain = chain_rule_residual(traj, rate, k, par);
        integ = grazing_integrability(traj, rate, k, par);
    }

    std::vector<TimeField> phis;
    phis.push_back({ScalarField::one(d), TimePoly::constant()});
    phis.push_back({ScalarField::coordinate_v(0, d), TimePoly::constant()});
    phis.push_back({ScalarField::speed_squared(d), TimePoly::constant()});
    double side = k.domain.is_torus() ? k.domain.side : 0.0;
    phis.push_back({ScalarField::from_name("v1_sq", d, side), TimePoly::bump(T)});
    phis.push_back({ScalarField::from_name("x1v1", d, side), TimePoly::constant()});
    if (k.domain.is_torus())
        phis.push_back({ScalarField::from_name("trig_x1", d, side), TimePoly::constant()});

    fs::path out = fs::path(dir) / "functionals.csv";
    std::ofstream csv(out);
    csv << "name,value,tolerance\n";
    char buf[160];
    auto row = [&](const std::string& name, double value, double tol) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n", name.c_str(), value, tol);
        csv << buf;
    };
    row("H_first", h_first, 0.0);
    row("H_last", h_last, 0.0);
    row("J_T", J, tol_j);
    row("chain_residual", chain, tol_chain);
    std::printf("J_T          = %.6e (tol %.3e)\n", J, tol_j);
    std::printf("chain        = %.6e (tol %.3e)\n", chain, tol_chain);
    bool ok = true;
    if (!single) {
        row("integrability_lhs", integ.lhs, integ.bound);
        row("integrability_bound", integ.bound, 0.0);
        for (const auto& phi : phis) {
            double r = weak_form_residual(traj, phi, k, par);
            row("weak_" + phi.space.name(), r, tol_weak);
            std::printf("weak[%-8s] = %.6e (tol %.3e)\n", phi.space.name().c_str(), r,
                        tol_weak);
            if (tol_weak > 0.0 && r > tol_weak) ok = false;
        }
        if (integ.lhs > integ.bound) ok = false;
        if (tol_j > 0.0 && std::abs(J) > tol_j && kind == "landau") ok = false;
        if (tol_chain > 0.0 && std::abs(chain) > tol_chain && kind == "landau") ok = false;
    }
    std::printf("functionals written to %s\n", out.string().c_str());
    return ok ? 0 : 1;
}

int cmd_oracle(const Config& cfg, const std::string& out_dir)
{
    KernelSet k = kernels_from_config(cfg);
    if (k.gamma.value != 0.0)
        throw ConfigError("oracle requires gamma = 0 (Maxwell molecules)");
    if (!k.constant_kappa())
        throw ConfigError("oracle requires kernel.kappa = constant");

    RunArtifacts art = execute_run(cfg);
    RelaxationRate rate = derive_relaxation_rate(k.domain.dim);
    double lambda_scale = cfg.get_double("oracle.lambda_scale", 1.0);
    double lambda = rate.lambda * lambda_scale;

    Mat P0 = second_moment(art.trajectory.snapshots.front().state);
    std::vector<double> times;
    for (const auto& s : art.trajectory.snapshots) times.push_back(s.t);
    MomentCurve ref = moment_ode_reference(P0, k.domain.dim, lambda, k.kappa_const, times);
    double dev = compare_to_oracle(art.trajectory, k, ref);
    double threshold = cfg.get_double("oracle.threshold", 0.05);

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream csv(fs::path(out_dir) / "oracle.csv");
        csv << "t,P11_ref,P12_ref,P22_ref,P11,P12,P22\n";
        char buf[256];
        for (std::size_t s = 0; s < times.size(); ++s) {
            Mat P = second_moment(art.trajectory.snapshots[s].state);
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          times[s], ref.moments[s][0][0], ref.moments[s][0][1],
                          ref.moments[s][1][1], P[0][0], P[0][1], P[1][1]);
            csv << buf;
        }
    }

    std::printf("derived relaxation rate lambda = %.8f (spread %.2e, trace residual %.2e)\n",
                rate.lambda, rate.spread, rate.trace_residual);
    std::printf("max relative moment deviation  = %.4f (threshold %.4f)\n", dev, threshold);
    bool pass = dev <= threshold;
    if (!pass) {
        if (art.trajectory.snapshots.front().state.size() < 1024)
            std::printf("note: N=%d is small; particle moments carry sampling noise of "
                        "order 1/sqrt(N), increase N for a meaningful comparison\n",
                        art.trajectory.snapshots.front().state.size());
        std::printf("oracle: FAIL\n");
        return 1;
    }
    std::printf("oracle: pass\n");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"structure-preserving particle solver for the fuzzy Landau equation"};
    app.set_version_flag("--version", fzl::kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", traj_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "seed override")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--threads", threads, "worker thread count");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "integrate a configured scenario");
    add_common(run_cmd);
    CLI::App* verify_cmd = app.add_subcommand("verify", "verify the structural identities");
    add_common(verify_cmd);
    CLI::App* fun_cmd =
        app.add_subcommand("functionals", "recompute functionals of a stored run");
    fun_cmd->add_option("dir", traj_dir, "trajectory directory")->required();
    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "compare against the moment-ODE oracle");
    add_common(oracle_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return cmd_run(load_config(config_path, seed, seed_set, threads), out_dir);
        if (verify_cmd->parsed())
            return cmd_verify(load_config(config_path, seed, seed_set, threads));
        if (fun_cmd->parsed()) return cmd_functionals(traj_dir);
        if (oracle_cmd->parsed())
            return cmd_oracle(load_config(config_path, seed, seed_set, threads), out_dir);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 2;
    }
    return 2;
}
