#ifndef FZL_ORACLE_HPP
#define FZL_ORACLE_HPP

#include <vector>

#include "fzl/kernels.hpp"
#include "fzl/trajectory.hpp"

namespace fzl {

// Velocity marginal of a snapshot: positions dropped, weights kept.
struct VelocityMarginal {
    int dim = 0;
    std::vector<double> v;
    std::vector<double> w;
};

// Requires the source run to have used constant kappa; the marginal then
// evolves by the homogeneous collision dynamics.
std::vector<std::pair<double, VelocityMarginal>> homogeneous_marginal(
    const Trajectory& traj, const KernelSet& k);

Mat second_moment(const VelocityMarginal& m);
Mat second_moment(const ParticleEnsemble& e);

struct RelaxationRate {
    double lambda = 0.0;     // dP/dt = -lambda c (P - tr P / d Id) for gamma = 0
    double spread = 0.0;     // max relative deviation across anisotropy ratios
    double trace_residual = 0.0; // |d tr P / dt| / scale, should vanish
};

// Derives the Maxwell-molecule second-moment relaxation rate by pairing the
// homogeneous collision operator against v_m v_n at anisotropic Gaussian
// states with tensor Gauss-Hermite quadrature. Independent of the particle
// solver's collision code.
RelaxationRate derive_relaxation_rate(int d, int nodes_per_axis = 40);

struct MomentCurve {
    std::vector<double> times;
    std::vector<Mat> moments;
};

// Reference curve P(t) of dP/dt = -lambda c (P - tr P / d Id), P(0) = P0 SPD.
// The traceless part is integrated with an adaptive embedded Runge-Kutta
// pair at tolerance 1e-10; the trace is carried exactly.
MomentCurve moment_ode_reference(const Mat& P0, int d, double lambda, double c,
                                 const std::vector<double>& times);

// max over matching times of |P_particles - P_ref|_F / |P_ref|_F
double compare_to_oracle(const Trajectory& traj, const KernelSet& k,
                         const MomentCurve& reference);

} // namespace fzl

#endif
