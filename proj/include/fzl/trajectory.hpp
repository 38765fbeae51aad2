#ifndef FZL_TRAJECTORY_HPP
#define FZL_TRAJECTORY_HPP

#include <stdexcept>
#include <vector>

#include "fzl/ensemble.hpp"
#include "fzl/report.hpp"

namespace fzl {

struct Snapshot {
    double t = 0.0;
    ParticleEnsemble state;
};

// Ordered snapshots of a run plus the diagnostics captured alongside them.
struct Trajectory {
    std::vector<Snapshot> snapshots;
    std::vector<FunctionalReport> reports;

    void check_invariants(double t_end) const
    {
        if (snapshots.empty()) throw std::runtime_error("empty trajectory");
        if (snapshots.front().t != 0.0)
            throw std::runtime_error("trajectory must start at t = 0");
        for (std::size_t i = 1; i < snapshots.size(); ++i)
            if (!(snapshots[i].t > snapshots[i - 1].t))
                throw std::runtime_error("snapshot times must increase strictly");
        if (std::abs(snapshots.back().t - t_end) > 1e-9 * (1.0 + t_end))
            throw std::runtime_error("trajectory must end at t_end");
    }
};

} // namespace fzl

#endif
