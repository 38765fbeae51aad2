#include <doctest.h>

#include <cmath>

#include "fzl/kernels.hpp"
#include "fzl/rng.hpp"

using namespace fzl;

namespace {
const Domain kTorus2 = Domain::torus(2, 2.0);
const Domain kFree2 = Domain::whole_space(2);
const Domain kFree3 = Domain::whole_space(3);
} // namespace

TEST_CASE("interaction weight: power-law values")
{
    KernelSet k0 = KernelSet::make(0.0, kFree2);
    CHECK(k0.interaction_weight({1.0, 0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));

    // gamma = -2 needs d >= 3; the exponent cancels and |z|^0 = 1
    KernelSet km2 = KernelSet::make(-2.0, kFree3);
    CHECK(km2.interaction_weight({3.0, 4.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));

    KernelSet k1 = KernelSet::make(1.0, kFree2);
    CHECK(k1.interaction_weight({0.0, 2.0, 0.0}) == doctest::Approx(8.0).epsilon(1e-15));

    CHECK_THROWS_AS(k0.interaction_weight({std::nan(""), 0.0, 0.0}), std::domain_error);
}

TEST_CASE("interaction weight: soft core and generalized hard")
{
    KernelSet soft = KernelSet::make(-2.5, kFree3, InteractionVariant::CoulombPower,
                                     SpatialVariant::Exponential, 1.0, 0.1);
    // (|z|^2 + eps^2)^{(2+gamma)/2} with |z| = 0
    CHECK(soft.interaction_weight({0.0, 0.0, 0.0}) ==
          doctest::Approx(std::pow(0.01, -0.25)).epsilon(1e-14));

    KernelSet hard = KernelSet::make(0.5, kFree2, InteractionVariant::GeneralizedHard);
    Vec z{1.0, 2.0, 0.0};
    double z2 = 5.0;
    double expected = std::pow(std::sqrt(1.0 + z2), 2.5) * z2;
    CHECK(hard.interaction_weight(z) == doctest::Approx(expected).epsilon(1e-14));
    // sandwich bound with C = 1 is an identity for the built-in Abar
    double abar = hard.interaction_weight(z) / z2;
    double bracket_pow = std::pow(std::sqrt(1.0 + z2), 2.5);
    CHECK(abar <= bracket_pow * (1 + 1e-14));
    CHECK(abar >= bracket_pow * (1 - 1e-14));
    // generalized-hard admits any gamma <= 1
    CHECK_NOTHROW(KernelSet::make(-7.0, kFree2, InteractionVariant::GeneralizedHard));
}

TEST_CASE("gamma range validation")
{
    CHECK_THROWS_AS(KernelSet::make(-2.0, kFree2), std::invalid_argument);
    CHECK_THROWS_AS(KernelSet::make(1.5, kFree2), std::invalid_argument);
    CHECK_NOTHROW(KernelSet::make(-2.0 + 1e-9, kFree2));
    CHECK_NOTHROW(KernelSet::make(-2.0, kFree3)); // gamma_3 = 3
}

TEST_CASE("projection operator")
{
    KernelSet k = KernelSet::make(0.0, kFree2);
    Mat p = k.projection_perp({1.0, 0.0, 0.0});
    CHECK(p[0][0] == doctest::Approx(0.0));
    CHECK(p[0][1] == doctest::Approx(0.0));
    CHECK(p[1][0] == doctest::Approx(0.0));
    CHECK(p[1][1] == doctest::Approx(1.0));

    Vec z{3.0, 4.0, 0.0};
    Mat q = k.projection_perp(z);
    for (int a = 0; a < 2; ++a) {
        double row = q[a][0] * z[0] + q[a][1] * z[1];
        CHECK(std::abs(row) <= 1e-14 * 5.0);
    }

    Mat r = k.projection_perp({1.0, -1.0, 0.0});
    CHECK(r[0][0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r[0][1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r[1][0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r[1][1] == doctest::Approx(0.5).epsilon(1e-15));

    // continuous extension at z = 0
    Mat zero = k.projection_perp({0.0, 0.0, 0.0});
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) CHECK(zero[a][b] == 0.0);
}

TEST_CASE("projection idempotent on random samples")
{
    KernelSet k = KernelSet::make(0.0, kFree3);
    CounterRng rng(7, rng_stream::kPropertyTests);
    for (int s = 0; s < 500; ++s) {
        Vec z = zero_vec();
        for (int q = 0; q < 3; ++q) z[q] = 2.0 * rng.normal(8 * s + q);
        Mat p = k.projection_perp(z);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                double pp = 0.0;
                for (int c = 0; c < 3; ++c) pp += p[a][c] * p[c][b];
                CHECK(std::abs(pp - p[a][b]) <= 1e-13);
            }
    }
}

TEST_CASE("pair matrix: a(z) z = 0 and spectrum")
{
    CounterRng rng(11, rng_stream::kPropertyTests);
    for (double gamma : {-1.0, 0.0, 1.0}) {
        KernelSet k = KernelSet::make(gamma, kFree2);
        for (int s = 0; s < 100; ++s) {
            Vec z = zero_vec();
            for (int q = 0; q < 2; ++q) z[q] = 3.0 * rng.normal(64 * s + 8 * q);
            double a = k.interaction_weight(z);
            Mat m = k.pair_matrix(z);
            double zn = std::sqrt(norm2(z, 2));
            for (int row = 0; row < 2; ++row) {
                double rz = m[row][0] * z[0] + m[row][1] * z[1];
                CHECK(std::abs(rz) <= 1e-13 * a * zn);
            }
            // orthogonal direction is stretched by exactly A(z)
            Vec perp{-z[1], z[0], 0.0};
            Vec mp = matvec(m, perp, 2);
            CHECK(mp[0] == doctest::Approx(a * perp[0]).epsilon(1e-12));
            CHECK(mp[1] == doctest::Approx(a * perp[1]).epsilon(1e-12));
        }
    }

    // gamma = 0 with |z|^2 = 1: the pair matrix is the bare projector
    KernelSet k0 = KernelSet::make(0.0, kFree2);
    Mat m = k0.pair_matrix({1.0, 0.0, 0.0});
    CHECK(m[1][1] == doctest::Approx(1.0));
    CHECK(m[0][0] == doctest::Approx(0.0));
}

TEST_CASE("spatial weight: values, symmetry, normalization")
{
    KernelSet k = KernelSet::make(0.0, kFree2);
    CHECK(k.spatial_weight({0.0, 0.0, 0.0}) ==
          doctest::Approx(k.k1 * std::exp(-1.0)).epsilon(1e-15));

    // closed form for d = 2: k1 = k2^2 e^{k2} / (2 pi (1 + k2))
    CHECK(k.k1 == doctest::Approx(std::exp(1.0) / (4.0 * M_PI)).epsilon(1e-9));
    CHECK(std::abs(k.kappa_l1_error()) <= 1e-8);

    KernelSet k25 = KernelSet::make(0.0, kFree2, InteractionVariant::CoulombPower,
                                    SpatialVariant::Exponential, 2.5);
    double expected = 2.5 * 2.5 * std::exp(2.5) / (2.0 * M_PI * 3.5);
    CHECK(k25.k1 == doctest::Approx(expected).epsilon(1e-9));

    CounterRng rng(3, rng_stream::kPropertyTests);
    for (int s = 0; s < 200; ++s) {
        Vec dx{2.0 * rng.normal(4 * s), 2.0 * rng.normal(4 * s + 1), 0.0};
        Vec neg{-dx[0], -dx[1], 0.0};
        CHECK(k.spatial_weight(dx) == k.spatial_weight(neg)); // bit-exact even function
        Vec z{rng.normal(4 * s + 2), rng.normal(4 * s + 3), 0.0};
        Vec nz{-z[0], -z[1], 0.0};
        CHECK(k.interaction_weight(z) == k.interaction_weight(nz));
    }
}

TEST_CASE("spatial weight on the torus: minimal image and normalization")
{
    KernelSet k = KernelSet::make(0.0, kTorus2);
    CHECK(std::abs(k.kappa_l1_error()) <= 1e-8);
    // shifting by a full period leaves kappa unchanged up to rounding of the image
    Vec a{0.3, 0.0, 0.0};
    Vec b{0.3 + 2.0, 0.0, 0.0};
    CHECK(k.spatial_weight(a) == doctest::Approx(k.spatial_weight(b)).epsilon(1e-14));

    KernelSet kc = KernelSet::make(0.0, kTorus2, InteractionVariant::CoulombPower,
                                   SpatialVariant::Constant);
    CHECK(kc.kappa_const == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::abs(kc.kappa_l1_error()) <= 1e-12);
    CHECK_THROWS_AS(KernelSet::make(0.0, kFree2, InteractionVariant::CoulombPower,
                                    SpatialVariant::Constant),
                    std::invalid_argument);
}

TEST_CASE("mollifier: values and normalization")
{
    for (int d : {1, 2}) {
        for (double width : {1.0, 0.3, 0.1}) {
            Mollifier m = Mollifier::make(width, d);
            CHECK(std::abs(m.l1_error()) <= 1e-8);
            CHECK(m.eval(zero_vec()) ==
                  doctest::Approx(m.amplitude() * std::exp(-1.0)).epsilon(1e-15));
            Vec z{0.4, d > 1 ? -0.2 : 0.0, 0.0};
            Vec nz{-z[0], -z[1], 0.0};
            CHECK(m.eval(z) == m.eval(nz));
            CHECK(m.eval(z) > 0.0);
        }
    }
    // normalization constant depends only on the dimension
    CHECK(Mollifier::make(0.5, 1).norm_const == doctest::Approx(0.830692796024660).epsilon(1e-9));
    CHECK(Mollifier::make(0.5, 2).norm_const == doctest::Approx(0.216313994858066).epsilon(1e-9));
    CHECK(Mollifier::make(0.5, 3).norm_const == doctest::Approx(0.048975607128061).epsilon(1e-9));
}

TEST_CASE("mollifier gradient matches finite differences")
{
    Mollifier m = Mollifier::make(0.3, 2);
    Vec z{0.21, -0.43, 0.0};
    Vec g = m.grad(z);
    for (int q = 0; q < 2; ++q) {
        Vec zp = z, zm = z;
        zp[q] += 1e-6;
        zm[q] -= 1e-6;
        double fd = (m.eval(zp) - m.eval(zm)) / 2e-6;
        CHECK(g[q] == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("peetre bound check")
{
    // x = y: ratio is exactly 2^{-|p|/2}
    std::vector<std::pair<Vec, Vec>> same{{Vec{1.2, -0.5, 0.0}, Vec{1.2, -0.5, 0.0}}};
    PeetreReport rep = peetre_bound_check(3.0, same, 2);
    CHECK(rep.max_ratio == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-14));

    PeetreReport rep0 = peetre_bound_check(0.0, same, 2);
    CHECK(rep0.max_ratio == doctest::Approx(1.0).epsilon(1e-15));

    CounterRng rng(5, rng_stream::kPropertyTests);
    std::vector<std::pair<Vec, Vec>> samples;
    for (int s = 0; s < 100000; ++s) {
        Vec a = zero_vec(), b = zero_vec();
        for (int q = 0; q < 2; ++q) {
            a[q] = 10.0 * rng.normal(8 * static_cast<std::uint64_t>(s) + q);
            b[q] = 10.0 * rng.normal(8 * static_cast<std::uint64_t>(s) + 4 + q);
        }
        samples.emplace_back(a, b);
    }
    for (double p : {-4.0, -2.0, 0.5, 2.0, 4.0}) {
        PeetreReport r = peetre_bound_check(p, samples, 2);
        CHECK(r.max_ratio <= 1.0);
    }
}

TEST_CASE("convolution dominance: constant kernel and width limit")
{
    KernelSet kc = KernelSet::make(0.0, kTorus2, InteractionVariant::CoulombPower,
                                   SpatialVariant::Constant);
    std::vector<Vec> grid{{0.0, 0.0, 0.0}, {0.7, -0.4, 0.0}};
    ConvolutionDominanceReport rep = convolution_dominance_check(kc, grid, {0.5, 0.1});
    for (double r : rep.max_ratio_kappa) CHECK(r == doctest::Approx(1.0).epsilon(1e-9));
    for (double r : rep.max_ratio_inverse) CHECK(r == doctest::Approx(1.0).epsilon(1e-9));

    KernelSet ke = KernelSet::make(0.0, kFree2);
    std::vector<Vec> pts{{0.5, 0.0, 0.0}};
    ConvolutionDominanceReport re = convolution_dominance_check(ke, pts, {0.5, 0.02});
    // mollification approaches the identity as the width shrinks
    CHECK(std::abs(re.max_ratio_kappa[1] - 1.0) < std::abs(re.max_ratio_kappa[0] - 1.0));
    CHECK(std::abs(re.max_ratio_kappa[1] - 1.0) < 0.1);
    CHECK_THROWS(convolution_dominance_check(ke, pts, {1.5}));
}

TEST_CASE("convolution dominance: exponential kernel regression value")
{
    KernelSet ke = KernelSet::make(0.0, kFree2);
    std::vector<Vec> grid;
    for (double x : {0.0, 1.0, 3.0, 6.0}) grid.push_back({x, 0.5 * x, 0.0});
    ConvolutionDominanceReport rep = convolution_dominance_check(ke, grid, {0.1});
    CHECK(rep.overall_kappa < 1.35);
    CHECK(rep.overall_inverse < 1.35);
    CHECK(rep.overall_kappa >= 1.0);
    CHECK(rep.overall_inverse >= 1.0);
}
