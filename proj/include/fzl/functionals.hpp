#ifndef FZL_FUNCTIONALS_HPP
#define FZL_FUNCTIONALS_HPP

#include <utility>
#include <vector>

#include "fzl/grazing.hpp"
#include "fzl/operators.hpp"
#include "fzl/trajectory.hpp"

namespace fzl {

// alpha(s, u) = |u|^2 / (2s), with the convex lower-semicontinuous closure at
// s = 0: zero on (0,0), +inf when u != 0. 1-homogeneous in (s,u) jointly.
double alpha_function(double s, const Vec& u, int d);

enum class DissipationForm { GradLog, CrossProduct, SqrtForm };

// Entropy dissipation D(f) by particle-pair quadrature, in three algebraically
// equal but arithmetically distinct forms.
double dissipation(const ParticleEnsemble& e, const KernelSet& k,
                   DissipationForm form, const BlobEval& blob,
                   const ParallelSpec& par = {});
double dissipation(const ParticleEnsemble& e, const KernelSet& k,
                   DissipationForm form = DissipationForm::GradLog,
                   const ParallelSpec& par = {});

// (weighted Fisher, weighted cross-Fisher) information of the blob density.
std::pair<double, double> fisher_terms(const ParticleEnsemble& e, const KernelSet& k,
                                       const BlobEval& blob);
std::pair<double, double> fisher_terms(const ParticleEnsemble& e, const KernelSet& k,
                                       const ParallelSpec& par = {});

// Curve action A(f, U) = 1/2 sum_{i != j} w_i w_j |R(i,j)|^2 / kappa_ij.
double action(const ParticleEnsemble& e, const GrazingRate& rate, const KernelSet& k,
              const BlobEval& blob, const ParallelSpec& par = {});
double action(const ParticleEnsemble& e, const GrazingRate& rate, const KernelSet& k,
              const ParallelSpec& par = {});

// 1/2 int grad~ log f . dU by pair quadrature; the chain-rule right-hand side
// integrand at one instant.
double entropy_flux_pairing(const ParticleEnsemble& e, const GrazingRate& rate,
                            const KernelSet& k, const BlobEval& blob,
                            const ParallelSpec& par = {});

// J_T = H(f_T) - H(f_0) + 1/2 int D dt + 1/2 int A dt, trapezoid in time.
double variational_J(const Trajectory& traj, const GrazingRate& rate, const KernelSet& k,
                     const ParallelSpec& par = {});

// H(f_t) - H(f_s) - 1/2 int_s^t int grad~ log f . dU dr  (whole window by default)
double chain_rule_residual(const Trajectory& traj, const GrazingRate& rate,
                           const KernelSet& k, const ParallelSpec& par = {});

// windowed variant between two snapshot indices; to < from integrates against
// the orientation and flips the sign
double chain_rule_residual_window(const Trajectory& traj, const GrazingRate& rate,
                                  const KernelSet& k, std::size_t from, std::size_t to,
                                  const ParallelSpec& par = {});

// Weak-form residual for a time-dependent probe, boundary terms retained:
// | [phi moment]_0^T - int (d_t phi + v . grad_x phi) dt
//   + 1/2 int kappa f f_* grad~ phi . grad~ log f dt |.
double weak_form_residual(const Trajectory& traj, const TimeField& phi,
                          const KernelSet& k, const ParallelSpec& par = {});

struct IntegrabilityReport {
    double lhs = 0.0;          // int |U| (<v>^{1+|g|/2} + <v*>^{1+|g|/2} + <x> + <x*>)
    double action_integral = 0.0; // C_A
    double moment_integral = 0.0; // C_E = int E_{2, 2+|gamma|} dt
    double bound = 0.0;        // sqrt(C_A C_E)
    // very-soft diagnostic, only populated when soft_core_eps > 0
    double soft_lhs = 0.0;
    bool soft_evaluated = false;
};

IntegrabilityReport grazing_integrability(const Trajectory& traj, const GrazingRate& rate,
                                          const KernelSet& k, const ParallelSpec& par = {});

// max over probe velocities of <v>^{-alpha} | <.>^delta f *_v |v - .|^alpha |_{L^1_x},
// the empirical constant of the velocity-convolution bounds.
double velocity_convolution_profile(const ParticleEnsemble& e, double alpha_exp,
                                    double delta, const std::vector<Vec>& probes);

// Scalar moments used in reports.
double ensemble_mass(const ParticleEnsemble& e);
Vec ensemble_momentum(const ParticleEnsemble& e);
double ensemble_energy(const ParticleEnsemble& e); // sum w |v|^2

} // namespace fzl

#endif
