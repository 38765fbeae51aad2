#ifndef FZL_FASTMATH_HPP
#define FZL_FASTMATH_HPP

#include <bit>
#include <cmath>
#include <cstdint>

namespace fzl {

// exp(x) with Cody-Waite argument reduction and the classic rational core;
// error below 1 ulp on the normal range. Pure arithmetic, so results are
// identical across platforms and thread counts. Arguments far outside the
// pairwise-kernel range fall back to the library call.
inline double fast_exp(double x)
{
    if (x < -700.0 || x > 700.0 || !(x == x)) return std::exp(x);
    constexpr double log2e = 1.44269504088896338700e+00;
    constexpr double ln2hi = 6.93147180369123816490e-01;
    constexpr double ln2lo = 1.90821492927058770002e-10;
    constexpr double P1 = 1.66666666666666019037e-01;
    constexpr double P2 = -2.77777777770155933842e-03;
    constexpr double P3 = 6.61375632143793436117e-05;
    constexpr double P4 = -1.65339022054652515390e-06;
    constexpr double P5 = 4.13813679705723846039e-08;

    double kd = x * log2e;
    kd = kd >= 0.0 ? static_cast<double>(static_cast<long>(kd + 0.5))
                   : static_cast<double>(static_cast<long>(kd - 0.5));
    long k = static_cast<long>(kd);
    double hi = x - kd * ln2hi;
    double lo = kd * ln2lo;
    double r = hi - lo;
    double t = r * r;
    double c = r - t * (P1 + t * (P2 + t * (P3 + t * (P4 + t * P5))));
    double y = 1.0 - ((lo - (r * c) / (2.0 - c)) - hi);
    return y * std::bit_cast<double>(static_cast<std::uint64_t>(1023 + k) << 52);
}

} // namespace fzl

#endif
