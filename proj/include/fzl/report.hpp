#ifndef FZL_REPORT_HPP
#define FZL_REPORT_HPP

#include <map>
#include <string>

#include "fzl/vec.hpp"

namespace fzl {

// One diagnostics row: conserved quantities and the running functionals at a
// snapshot time.
struct FunctionalReport {
    double t = 0.0;
    double mass = 0.0;
    Vec momentum = zero_vec();
    double energy = 0.0;
    double entropy = 0.0;
    double dissipation = 0.0;
    double action = 0.0;
    double fisher = 0.0;
    double cross_fisher = 0.0;
    double chain_residual = 0.0;
    double j_running = 0.0;
    std::map<std::string, double> aux;

    void check_invariants() const;
};

} // namespace fzl

#endif
