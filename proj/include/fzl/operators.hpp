#ifndef FZL_OPERATORS_HPP
#define FZL_OPERATORS_HPP

#include <vector>

#include "fzl/ensemble.hpp"
#include "fzl/fields.hpp"
#include "fzl/grazing.hpp"
#include "fzl/kernels.hpp"
#include "fzl/parallel.hpp"

namespace fzl {

// sqrt(A(v - v*)) Pi_{(v-v*) perp} (grad_v phi(x,v) - grad_v* phi(x*,v*))
Vec fuzzy_gradient(const ScalarField& phi, const Vec& x, const Vec& v, const Vec& xs,
                   const Vec& vs, const KernelSet& k);

// Pairing int grad~ phi . B deta by particle-pair quadrature; equal to
// -<phi, div~ B> by definition of the adjoint divergence.
double weak_divergence_pairing(const ScalarField& phi, const PairField& B,
                               const ParticleEnsemble& e, const KernelSet& k);

// Collision drift: vdot_i = -sum_j w_j kappa_ij A_ij Pi_ij (s_i - s_j),
// with s the analytic blob score at the particle sites.
std::vector<double> landau_velocity_field(const ParticleEnsemble& e, const KernelSet& k,
                                          const BlobEval& blob, const ParallelSpec& par);
std::vector<double> landau_velocity_field(const ParticleEnsemble& e, const KernelSet& k,
                                          const ParallelSpec& par = {});

// Fused sweep producing the drift and the grad-log entropy dissipation from
// the same pair pass; the per-snapshot diagnostics use it to avoid walking
// the pairs twice.
std::vector<double> landau_velocity_field_with_dissipation(const ParticleEnsemble& e,
                                                           const KernelSet& k,
                                                           const BlobEval& blob,
                                                           const ParallelSpec& par,
                                                           double& dissipation_out);

// Free transport: xdot_i = v_i.
std::vector<double> transport_field(const ParticleEnsemble& e);

// Drift realizing -1/2 div~ U for a pairwise rate:
// vdot_i = 1/2 sum_j w_j sqrt(A) Pi [R(i,j) - R(j,i)].
// The closed-form Landau rate routes through landau_velocity_field so the
// two entry points share one code path.
std::vector<double> grazing_divergence_field(const ParticleEnsemble& e,
                                             const GrazingRate& rate, const KernelSet& k,
                                             const BlobEval& blob, const ParallelSpec& par);
std::vector<double> grazing_divergence_field(const ParticleEnsemble& e,
                                             const GrazingRate& rate, const KernelSet& k,
                                             const ParallelSpec& par = {});

} // namespace fzl

#endif
