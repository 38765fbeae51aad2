#ifndef FZL_DRIVER_HPP
#define FZL_DRIVER_HPP

#include <optional>
#include <string>

#include "fzl/config.hpp"
#include "fzl/dynamics.hpp"
#include "fzl/generic_blocks.hpp"
#include "fzl/oracle.hpp"

namespace fzl {

KernelSet kernels_from_config(const Config& cfg);
ParticleEnsemble initial_from_config(const Config& cfg, const KernelSet& k);
IntegratorConfig integrator_from_config(const Config& cfg);
std::optional<GrazingRate> rate_from_config(const Config& cfg, std::uint64_t seed);
std::vector<ScalarField> probes_from_config(const Config& cfg, const KernelSet& k);

struct ToleranceBudgets {
    double tol_j = 0.0;
    double tol_chain = 0.0;
    double tol_weak = 0.0;
    double chain_defect_rate = 0.0; // measured t = 0 defect feeding the budgets
};

// Declared error budgets, 10 (dt^2 + N^{-1/2}) times a run-measured scale;
// recorded in run.meta before the run starts.
ToleranceBudgets declare_tolerances(const ParticleEnsemble& initial, const KernelSet& k,
                                    const IntegratorConfig& icfg,
                                    const std::optional<GrazingRate>& rate);

// Exact d/dt of the particle entropy sum under the given fields, through the
// symmetrized scores. Used to size the chain-rule budgets.
double entropy_rate_exact(const ParticleEnsemble& e, const std::vector<double>& xdot,
                          const std::vector<double>& vdot, const BlobEval& blob,
                          const ParallelSpec& par);

struct RunArtifacts {
    KernelSet kernels;
    IntegratorConfig integrator;
    std::optional<GrazingRate> rate;
    ToleranceBudgets budgets;
    Trajectory trajectory;
    Config resolved; // full configuration closure written to run.meta
};

RunArtifacts execute_run(const Config& cfg);

// diagnostics.csv, snapshots/t_<index>.csv and run.meta under out_dir
void write_run_outputs(const std::string& out_dir, const RunArtifacts& art);

std::string diagnostics_header(int d);
std::string diagnostics_row(const FunctionalReport& rep, int d);

// Reads snapshots + run.meta back into a trajectory (the `functionals`
// subcommand's input).
struct LoadedRun {
    Config meta;
    KernelSet kernels;
    Trajectory trajectory;
};
LoadedRun load_run(const std::string& dir);

} // namespace fzl

#endif
