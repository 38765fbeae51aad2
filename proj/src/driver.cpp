#include "fzl/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fzl/version.hpp"

namespace fzl {

namespace fs = std::filesystem;

KernelSet kernels_from_config(const Config& cfg)
{
    int d = cfg.get_int("domain.dim", 2);
    std::string kind = cfg.get_choice("domain.kind", "torus", {"torus", "whole-space"});
    Domain domain = kind == "torus" ? Domain::torus(d, cfg.get_double("domain.side", 2.0))
                                    : Domain::whole_space(d);
    std::string variant = cfg.get_choice("kernel.variant", "coulomb-power",
                                         {"coulomb-power", "generalized-hard"});
    std::string spatial =
        cfg.get_choice("kernel.kappa", "exponential", {"exponential", "constant"});
    KernelSet k = KernelSet::make(
        cfg.get_double("gamma", 0.0), domain,
        variant == "coulomb-power" ? InteractionVariant::CoulombPower
                                   : InteractionVariant::GeneralizedHard,
        spatial == "exponential" ? SpatialVariant::Exponential : SpatialVariant::Constant,
        cfg.get_double("kernel.k2", 1.0), cfg.get_double("kernel.soft_core_eps", 0.0));
    k.flip_projection = cfg.get_bool("debug.flip_projection", false);
    return k;
}

ParticleEnsemble initial_from_config(const Config& cfg, const KernelSet& k)
{
    int n = cfg.get_int("N", 256);
    std::uint64_t seed = cfg.get_u64("seed", 1);
    double alpha = cfg.get_double("widths.alpha", default_width(n, k.domain.dim));
    double beta = cfg.get_double("widths.beta", default_width(n, k.domain.dim));
    bool uniform_x = cfg.get_bool("widths.uniform_x", false);

    std::string name = cfg.get_choice(
        "init.condition", "uniform-x-gaussian-v",
        {"maxwellian", "anisotropic-gaussian", "two-bump", "uniform-x-gaussian-v"});
    InitialCondition cond = InitialCondition::parse(name, cfg.get_double("init.temperature", 1.0));
    cond.temperatures = {cfg.get_double("init.t1", 1.0), cfg.get_double("init.t2", 1.0),
                         cfg.get_double("init.t3", 1.0)};
    cond.bump_speed = cfg.get_double("init.bump_speed", 1.5);
    cond.bump_temperature = cfg.get_double("init.bump_temperature", 0.25);
    return sample_initial(cond, n, seed, k.domain, alpha, beta, uniform_x);
}

IntegratorConfig integrator_from_config(const Config& cfg)
{
    IntegratorConfig icfg;
    std::string scheme = cfg.get_choice("integrator.scheme", "rk4", {"rk4", "midpoint"});
    icfg.scheme = scheme == "rk4" ? Scheme::Rk4 : Scheme::Midpoint;
    icfg.dt = cfg.get_double("integrator.dt", 0.0);
    icfg.t_end = cfg.get_double("integrator.t_end", 1.0);
    icfg.snapshot_every = cfg.get_int("integrator.snapshot_every", 1);
    icfg.parallel.threads = cfg.get_int("parallel.threads", 1);
    icfg.parallel.deterministic = cfg.get_bool("parallel.deterministic", true);
    icfg.validate();
    return icfg;
}

std::optional<GrazingRate> rate_from_config(const Config& cfg, std::uint64_t seed)
{
    std::string mode = cfg.get_choice("mode", "landau", {"landau", "tgre"});
    if (mode == "landau") return std::nullopt;
    std::string kind =
        cfg.get_choice("rate.kind", "landau", {"zero", "landau", "perturbed-landau"});
    if (kind == "zero") return GrazingRate::zero();
    if (kind == "landau") return GrazingRate::landau();
    return GrazingRate::perturbed_landau(cfg.get_double("rate.amplitude", 0.5), seed);
}

std::vector<ScalarField> probes_from_config(const Config& cfg, const KernelSet& k)
{
    std::vector<std::string> names = cfg.get_list(
        "probes", {"one", "v1", "v2", "speed2", "x1v1", "v1_sq"});
    if (names.empty()) throw ConfigError("probes: empty probe list");
    std::vector<ScalarField> out;
    double side = k.domain.is_torus() ? k.domain.side : 0.0;
    for (const auto& n : names)
        out.push_back(ScalarField::from_name(n, k.domain.dim, side));
    return out;
}

double entropy_rate_exact(const ParticleEnsemble& e, const std::vector<double>& xdot,
                          const std::vector<double>& vdot, const BlobEval& blob,
                          const ParallelSpec& par)
{
    BlobEval sym = symmetrized_scores(e, blob, par);
    const int d = e.dim();
    double s = 0.0;
    for (int i = 0; i < e.size(); ++i) {
        double acc = 0.0;
        for (int k = 0; k < d; ++k) {
            std::size_t q = static_cast<std::size_t>(i) * d + k;
            acc += xdot[q] * sym.score_x[q] + vdot[q] * sym.score_v[q];
        }
        s += e.weight(i) * acc;
    }
    return s;
}

ToleranceBudgets declare_tolerances(const ParticleEnsemble& initial, const KernelSet& k,
                                    const IntegratorConfig& icfg,
                                    const std::optional<GrazingRate>& rate)
{
    const double dt = icfg.dt;
    const double T = icfg.t_end;
    const double n = initial.size();
    const double base = 10.0 * (dt * dt + 1.0 / std::sqrt(n));

    GrazingRate r = rate.value_or(GrazingRate::landau());
    ParallelSpec par = icfg.parallel;
    BlobEval blob = reconstruct_at_particles(initial, par);
    std::vector<double> xdot = transport_field(initial);
    std::vector<double> vdot = grazing_divergence_field(initial, r, k, blob, par);
    double exact_rate = entropy_rate_exact(initial, xdot, vdot, blob, par);
    double flux = entropy_flux_pairing(initial, r, k, blob, par);
    double defect = std::abs(exact_rate - flux);

    ToleranceBudgets b;
    b.chain_defect_rate = defect;
    // chain/J error is dominated by the sampling defect of the discrete
    // chain rule; sqrt(N) * defect is its CLT-normalized scale
    double scale = T * std::max(std::sqrt(n) * defect, 1e-6);
    b.tol_j = base * scale;
    b.tol_chain = base * scale;
    // the weak-form identity holds at the particle level; only time
    // discretization enters
    double e0 = ensemble_energy(initial);
    b.tol_weak = base * std::max(dt, 1e-6) * (1.0 + e0) * std::max(T, 1.0);
    return b;
}

RunArtifacts execute_run(const Config& cfg)
{
    cfg.validate_keys(config_key_registry());
    RunArtifacts art;
    art.kernels = kernels_from_config(cfg);
    ParticleEnsemble initial = initial_from_config(cfg, art.kernels);
    art.integrator = integrator_from_config(cfg);
    if (art.integrator.dt == 0.0) art.integrator.dt = default_dt(initial, art.kernels);
    art.rate = rate_from_config(cfg, cfg.get_u64("seed", 1));
    art.budgets = declare_tolerances(initial, art.kernels, art.integrator, art.rate);
    art.trajectory = run(initial, art.kernels, art.integrator, art.rate);

    // configuration closure: every key needed to replay the run bit for bit
    Config r = cfg;
    char buf[64];
    auto put_double = [&](const std::string& key, double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        r.set(key, buf);
    };
    r.set("domain.kind", art.kernels.domain.is_torus() ? "torus" : "whole-space");
    if (art.kernels.domain.is_torus()) put_double("domain.side", art.kernels.domain.side);
    r.set("domain.dim", std::to_string(art.kernels.domain.dim));
    put_double("gamma", art.kernels.gamma.value);
    r.set("kernel.variant", art.kernels.variant == InteractionVariant::CoulombPower
                                ? "coulomb-power"
                                : "generalized-hard");
    r.set("kernel.kappa",
          art.kernels.spatial == SpatialVariant::Exponential ? "exponential" : "constant");
    put_double("kernel.k2", art.kernels.k2);
    put_double("kernel.soft_core_eps", art.kernels.soft_core_eps);
    r.set("N", std::to_string(initial.size()));
    r.set("seed", std::to_string(cfg.get_u64("seed", 1)));
    put_double("widths.alpha", initial.alpha());
    put_double("widths.beta", initial.beta());
    r.set("widths.uniform_x", initial.uniform_x() ? "true" : "false");
    r.set("integrator.scheme", art.integrator.scheme == Scheme::Rk4 ? "rk4" : "midpoint");
    put_double("integrator.dt", art.integrator.dt);
    put_double("integrator.t_end", art.integrator.t_end);
    r.set("integrator.snapshot_every", std::to_string(art.integrator.snapshot_every));
    r.set("parallel.threads", std::to_string(art.integrator.parallel.threads));
    put_double("budget.momentum", declare_budgets(initial, art.integrator).momentum);
    put_double("budget.energy", declare_budgets(initial, art.integrator).energy);
    put_double("budget.tol_j", art.budgets.tol_j);
    put_double("budget.tol_chain", art.budgets.tol_chain);
    put_double("budget.tol_weak", art.budgets.tol_weak);
    r.set("meta.version", kVersion);
    r.set("meta.rng", "splitmix64-counter");
    put_double("meta.k1", art.kernels.k1);
    put_double("meta.kappa_const", art.kernels.kappa_const);
    art.resolved = r;
    return art;
}

std::string diagnostics_header(int d)
{
    std::string h = "t,mass";
    for (int k = 1; k <= d; ++k) h += ",mom_" + std::to_string(k);
    h += ",energy,H,D,A,fisher,cross_fisher,chain_residual,J_running";
    return h;
}

std::string diagnostics_row(const FunctionalReport& rep, int d)
{
    char buf[64];
    std::string row;
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        row += row.empty() ? buf : (std::string(",") + buf);
    };
    put(rep.t);
    put(rep.mass);
    for (int k = 0; k < d; ++k) put(rep.momentum[k]);
    put(rep.energy);
    put(rep.entropy);
    put(rep.dissipation);
    put(rep.action);
    put(rep.fisher);
    put(rep.cross_fisher);
    put(rep.chain_residual);
    put(rep.j_running);
    return row;
}

void write_run_outputs(const std::string& out_dir, const RunArtifacts& art)
{
    fs::create_directories(fs::path(out_dir) / "snapshots");
    const int d = art.kernels.domain.dim;

    std::ofstream diag(fs::path(out_dir) / "diagnostics.csv");
    diag << diagnostics_header(d) << "\n";
    for (const auto& rep : art.trajectory.reports) diag << diagnostics_row(rep, d) << "\n";

    for (std::size_t s = 0; s < art.trajectory.snapshots.size(); ++s) {
        char name[64];
        std::snprintf(name, sizeof(name), "t_%05zu.csv", s);
        write_snapshot((fs::path(out_dir) / "snapshots" / name).string(),
                       art.trajectory.snapshots[s].state);
    }

    std::ofstream meta(fs::path(out_dir) / "run.meta");
    meta << art.resolved.serialize();

    std::ofstream times(fs::path(out_dir) / "snapshots" / "times.csv");
    times << "index,t\n";
    char buf[64];
    for (std::size_t s = 0; s < art.trajectory.snapshots.size(); ++s) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", s, art.trajectory.snapshots[s].t);
        times << buf;
    }
}

LoadedRun load_run(const std::string& dir)
{
    LoadedRun out;
    fs::path meta_path = fs::path(dir) / "run.meta";
    if (!fs::exists(meta_path))
        throw ConfigError("missing run.meta under " + dir);
    out.meta = Config::parse_file(meta_path.string());
    out.kernels = kernels_from_config(out.meta);

    fs::path times_path = fs::path(dir) / "snapshots" / "times.csv";
    if (!fs::exists(times_path))
        throw ConfigError("missing snapshots/times.csv under " + dir);
    std::ifstream times(times_path);
    std::string line;
    std::getline(times, line); // header
    while (std::getline(times, line)) {
        auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        std::size_t index = std::stoul(line.substr(0, comma));
        double t = std::stod(line.substr(comma + 1));
        char name[64];
        std::snprintf(name, sizeof(name), "t_%05zu.csv", index);
        fs::path snap = fs::path(dir) / "snapshots" / name;
        if (!fs::exists(snap))
            throw ConfigError("missing snapshot file " + snap.string());
        out.trajectory.snapshots.push_back(Snapshot{t, read_snapshot(snap.string())});
    }
    if (out.trajectory.snapshots.empty())
        throw ConfigError("no snapshots found under " + dir);
    return out;
}

} // namespace fzl
