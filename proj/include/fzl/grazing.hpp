#ifndef FZL_GRAZING_HPP
#define FZL_GRAZING_HPP

#include <cstdint>
#include <memory>

#include "fzl/ensemble.hpp"
#include "fzl/fields.hpp"
#include "fzl/kernels.hpp"
#include "fzl/rng.hpp"

namespace fzl {

// Shared context for pairwise rate evaluation: the ensemble, its blob
// reconstruction at the particle sites, and the kernels.
struct PairContext {
    const ParticleEnsemble& ensemble;
    const BlobEval& blob;
    const KernelSet& kernels;

    Vec score_v(int i) const
    {
        Vec s = zero_vec();
        for (int k = 0; k < ensemble.dim(); ++k)
            s[k] = blob.score_v[static_cast<std::size_t>(i) * ensemble.dim() + k];
        return s;
    }
};

// Grazing rate U as a pairwise field. Rates are handled through their
// density relative to f f_*: pair_rate returns R(i,j) = U(i,j) / (f_i f_j),
// which is the object every quadrature below consumes. The closed-form
// Landau rate is R = -kappa sqrt(A) Pi (s_i - s_j).
class GrazingRate {
public:
    enum class Kind { Zero, LandauClosedForm, PairField, PerturbedLandau };

    static GrazingRate zero();
    static GrazingRate landau();
    static GrazingRate pair_field(fzl::PairField field);
    static GrazingRate perturbed_landau(double amplitude, std::uint64_t seed);

    Kind kind() const { return kind_; }
    double amplitude() const { return amplitude_; }
    std::uint64_t seed() const { return seed_; }

    Vec pair_rate(int i, int j, const PairContext& ctx) const;

private:
    Kind kind_ = Kind::LandauClosedForm;
    fzl::PairField field_;
    double amplitude_ = 0.0;
    std::uint64_t seed_ = 0;
};

} // namespace fzl

#endif
