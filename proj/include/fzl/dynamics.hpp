#ifndef FZL_DYNAMICS_HPP
#define FZL_DYNAMICS_HPP

#include <optional>
#include <string>

#include "fzl/functionals.hpp"
#include "fzl/trajectory.hpp"

namespace fzl {

enum class Scheme { Rk4, Midpoint };

struct IntegratorConfig {
    Scheme scheme = Scheme::Rk4;
    double dt = 0.0; // 0: pick the default heuristic at run start
    double t_end = 1.0;
    int snapshot_every = 1;
    ParallelSpec parallel;

    void validate() const;
};

// dt heuristic when the configuration leaves it open: 0.01 beta^2 / max A.
double default_dt(const ParticleEnsemble& e, const KernelSet& k);

struct RunBudgets {
    double momentum = 0.0; // abort when drift exceeds 100x
    double energy = 0.0;
};

RunBudgets declare_budgets(const ParticleEnsemble& e, const IntegratorConfig& cfg);

struct BlowUpError : std::runtime_error {
    explicit BlowUpError(const std::string& what) : std::runtime_error(what) {}
};

// One explicit step of xdot = v, vdot = landau collision drift.
ParticleEnsemble step_landau(const ParticleEnsemble& e, const KernelSet& k,
                             const IntegratorConfig& cfg);

// One step of the transport-grazing dynamics with a supplied rate. The
// closed-form Landau rate shares the step_landau code path bit for bit.
ParticleEnsemble step_tgre(const ParticleEnsemble& e, const GrazingRate& rate,
                           const KernelSet& k, const IntegratorConfig& cfg);

// Integrate to t_end, capturing snapshots and functional reports at the
// snapshot cadence and monitoring the conservation budgets each step.
Trajectory run(const ParticleEnsemble& initial, const KernelSet& k,
               const IntegratorConfig& cfg,
               const std::optional<GrazingRate>& rate = std::nullopt);

} // namespace fzl

#endif
