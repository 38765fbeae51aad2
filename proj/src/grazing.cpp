#include "fzl/grazing.hpp"

#include <cmath>

namespace fzl {

GrazingRate GrazingRate::zero()
{
    GrazingRate r;
    r.kind_ = Kind::Zero;
    return r;
}

GrazingRate GrazingRate::landau()
{
    GrazingRate r;
    r.kind_ = Kind::LandauClosedForm;
    return r;
}

GrazingRate GrazingRate::pair_field(fzl::PairField field)
{
    GrazingRate r;
    r.kind_ = Kind::PairField;
    r.field_ = std::move(field);
    return r;
}

GrazingRate GrazingRate::perturbed_landau(double amplitude, std::uint64_t seed)
{
    GrazingRate r;
    r.kind_ = Kind::PerturbedLandau;
    r.amplitude_ = amplitude;
    r.seed_ = seed;
    return r;
}

Vec GrazingRate::pair_rate(int i, int j, const PairContext& ctx) const
{
    const int d = ctx.ensemble.dim();
    switch (kind_) {
        case Kind::Zero:
            return zero_vec();
        case Kind::PairField:
            return field_(ctx.ensemble.position(i), ctx.ensemble.velocity(i),
                          ctx.ensemble.position(j), ctx.ensemble.velocity(j));
        case Kind::LandauClosedForm:
        case Kind::PerturbedLandau: {
            Vec z = sub(ctx.ensemble.velocity(i), ctx.ensemble.velocity(j), d);
            double z2 = norm2(z, d);
            Vec ds = sub(ctx.score_v(i), ctx.score_v(j), d);
            Vec pr = project_perp_apply(z, z2, ds, d, ctx.kernels.flip_projection);
            double kap = ctx.kernels.spatial_weight(
                sub(ctx.ensemble.position(i), ctx.ensemble.position(j), d));
            double fac = -kap * std::sqrt(ctx.kernels.interaction_weight(z));
            if (kind_ == Kind::PerturbedLandau) {
                // symmetric multiplicative noise keyed on the unordered pair,
                // so the rate stays antisymmetric under the swap
                int lo = i < j ? i : j;
                int hi = i < j ? j : i;
                CounterRng rng(seed_, rng_stream::kRatePerturbation);
                std::uint64_t counter =
                    (static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint64_t>(hi);
                fac *= 1.0 + amplitude_ * rng.normal(counter);
            }
            return scale(pr, fac, d);
        }
    }
    return zero_vec();
}

} // namespace fzl
