#ifndef FZL_VEC_HPP
#define FZL_VEC_HPP

#include <array>
#include <cmath>
#include <cstddef>

namespace fzl {

// Phase-space dimension is a runtime parameter, capped so small vectors can
// live on the stack.
inline constexpr int kMaxDim = 3;

using Vec = std::array<double, kMaxDim>;
using Mat = std::array<std::array<double, kMaxDim>, kMaxDim>;

inline Vec zero_vec() { return {0.0, 0.0, 0.0}; }

inline Mat zero_mat()
{
    Mat m{};
    for (auto& row : m) row.fill(0.0);
    return m;
}

inline double dot(const Vec& a, const Vec& b, int d)
{
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += a[k] * b[k];
    return s;
}

inline double norm2(const Vec& a, int d) { return dot(a, a, d); }

inline Vec sub(const Vec& a, const Vec& b, int d)
{
    Vec r = zero_vec();
    for (int k = 0; k < d; ++k) r[k] = a[k] - b[k];
    return r;
}

inline Vec add(const Vec& a, const Vec& b, int d)
{
    Vec r = zero_vec();
    for (int k = 0; k < d; ++k) r[k] = a[k] + b[k];
    return r;
}

inline Vec scale(const Vec& a, double s, int d)
{
    Vec r = zero_vec();
    for (int k = 0; k < d; ++k) r[k] = a[k] * s;
    return r;
}

inline Vec matvec(const Mat& m, const Vec& v, int d)
{
    Vec r = zero_vec();
    for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += m[i][j] * v[j];
        r[i] = s;
    }
    return r;
}

// Japanese bracket <z> = sqrt(1 + |z|^2).
inline double bracket(double r2) { return std::sqrt(1.0 + r2); }

// Minimal-image reduction of a single coordinate difference in (-L, L).
inline double min_image_coord(double dx, double half, double side)
{
    if (dx > half) return dx - side;
    if (dx < -half) return dx + side;
    return dx;
}

inline double bracket_of(const Vec& z, int d) { return bracket(norm2(z, d)); }

inline bool all_finite(const Vec& z, int d)
{
    for (int k = 0; k < d; ++k)
        if (!std::isfinite(z[k])) return false;
    return true;
}

} // namespace fzl

#endif
