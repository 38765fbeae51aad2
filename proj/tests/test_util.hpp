#ifndef FZL_TEST_UTIL_HPP
#define FZL_TEST_UTIL_HPP

#include <vector>

#include "fzl/ensemble.hpp"
#include "fzl/kernels.hpp"
#include "fzl/rng.hpp"

namespace fzl::test {

// seeded random ensemble with nonuniform weights, for property tests
inline ParticleEnsemble random_ensemble(int n, const Domain& domain, double alpha,
                                        double beta, std::uint64_t seed,
                                        double vspread = 1.0)
{
    CounterRng rng(seed, rng_stream::kPropertyTests);
    const int d = domain.dim;
    std::vector<double> x(static_cast<std::size_t>(n) * d);
    std::vector<double> v(static_cast<std::size_t>(n) * d);
    std::vector<double> w(n);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) {
            std::uint64_t c = 32 * static_cast<std::uint64_t>(i) + k;
            x[static_cast<std::size_t>(i) * d + k] =
                domain.is_torus() ? domain.side * rng.uniform(c) : rng.normal(c);
            v[static_cast<std::size_t>(i) * d + k] = vspread * rng.normal(c + 8);
        }
        w[i] = 0.5 + rng.uniform(32 * static_cast<std::uint64_t>(i) + 16);
        wsum += w[i];
    }
    for (int i = 0; i < n; ++i) w[i] /= wsum;
    // renormalize exactly within the construction tolerance
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += w[i];
    w[n - 1] += 1.0 - s;
    return ParticleEnsemble(domain, alpha, beta, std::move(x), std::move(v), std::move(w),
                            false, seed);
}

// reference collision drift: naive loop, no chunking, no shared kernels code
inline std::vector<double> brute_force_landau(const ParticleEnsemble& e,
                                              const KernelSet& k,
                                              const std::vector<double>& score_v)
{
    const int n = e.size();
    const int d = e.dim();
    std::vector<double> out(static_cast<std::size_t>(n) * d, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            Vec z = sub(e.velocity(i), e.velocity(j), d);
            double z2 = norm2(z, d);
            if (z2 == 0.0) continue;
            Vec ds = zero_vec();
            for (int q = 0; q < d; ++q)
                ds[q] = score_v[static_cast<std::size_t>(i) * d + q] -
                        score_v[static_cast<std::size_t>(j) * d + q];
            double c = dot(z, ds, d) / z2;
            double kap = k.spatial_weight(sub(e.position(i), e.position(j), d));
            double a = k.interaction_weight(z);
            for (int q = 0; q < d; ++q)
                out[static_cast<std::size_t>(i) * d + q] -=
                    e.weight(j) * kap * a * (ds[q] - c * z[q]);
        }
    }
    return out;
}

} // namespace fzl::test

#endif
