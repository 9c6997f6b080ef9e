#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loewner/disk_geometry.hpp"

#include <cmath>
#include <random>

using namespace loewner;
using namespace std::complex_literals;

namespace {

cplx random_disk_point(std::mt19937_64& rng, double rmax = 0.95)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return std::polar(rmax * std::sqrt(u(rng)), 2.0 * M_PI * u(rng));
}

DiskAutomorphism random_automorphism(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    return {random_disk_point(rng, 0.9), std::polar(1.0, u(rng))};
}

} // namespace

TEST_CASE("automorphism apply examples")
{
    CHECK(std::abs(DiskAutomorphism(0.0, 1.0).apply(0.3 + 0.1i) - (0.3 + 0.1i)) == 0.0);
    CHECK(std::abs(DiskAutomorphism(0.5, 1.0).apply(0.0) - 0.5) < 1e-16);
    CHECK(std::abs(DiskAutomorphism(0.5, 1.0).apply(-0.5)) < 1e-16);
}

TEST_CASE("automorphism inverse examples")
{
    const DiskAutomorphism h(0.5, 1.0);
    CHECK(std::abs(h.inverse_apply(0.5)) < 1e-16);
    const DiskAutomorphism g(0.3i, 1i);
    CHECK(std::abs(g.inverse_apply(g.apply(0.2)) - 0.2) < 1e-15);
    // The inverse formula conj(b)(z - a)/(1 - conj(a) z) gives -0.5 at z = 0,
    // and apply(-0.5) = 0 confirms it.
    CHECK(h.inverse_apply(0.0).real() == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(std::abs(h.apply(h.inverse_apply(0.0))) < 1e-15);
}

TEST_CASE("automorphism construction")
{
    CHECK_THROWS_AS(DiskAutomorphism(1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(DiskAutomorphism(0.2, 0.0), InvalidArgument);
    const DiskAutomorphism h(0.1, 3.0 + 4.0i);
    CHECK(std::abs(std::abs(h.b()) - 1.0) <= 1e-14);
    CHECK_THROWS_AS(DiskPoint(cplx(1.0 - 1e-13, 0.0)), InvalidArgument);
    CHECK(DiskPoint(0.5i).value() == 0.5i);
}

TEST_CASE("apply and inverse_apply are mutually inverse on random points")
{
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int k = 0; k < 256; ++k) {
        const DiskAutomorphism h = random_automorphism(rng);
        const cplx z = random_disk_point(rng);
        worst = std::max(worst, std::abs(h.inverse_apply(h.apply(z)) - z));
        worst = std::max(worst, std::abs(h.apply(h.inverse_apply(z)) - z));
    }
    CHECK(worst <= 1e-13);
}

TEST_CASE("automorphisms preserve the disk and its boundary")
{
    std::mt19937_64 rng(12);
    for (int k = 0; k < 64; ++k) {
        const DiskAutomorphism h = random_automorphism(rng);
        CHECK(std::abs(h.apply(random_disk_point(rng))) < 1.0);
        CHECK(std::abs(std::abs(h.apply(std::polar(1.0, 0.1 * k))) - 1.0) < 1e-13);
    }
}

TEST_CASE("derivative matches a difference quotient")
{
    const DiskAutomorphism h(0.3 - 0.2i, 1i);
    const cplx z = 0.1 + 0.4i;
    const double eps = 1e-6;
    const cplx fd = (h.apply(z + eps) - h.apply(z - eps)) / (2.0 * eps);
    CHECK(std::abs(h.derivative(z) - fd) < 1e-8);
}

TEST_CASE("pseudo-hyperbolic distance examples")
{
    CHECK(pseudo_hyperbolic(0.0, 0.3 + 0.4i) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(pseudo_hyperbolic(0.5, 0.5) == 0.0);
    CHECK(pseudo_hyperbolic(0.5, -0.5) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("pseudo-hyperbolic distance is symmetric and Moebius invariant")
{
    std::mt19937_64 rng(13);
    double worst = 0.0;
    for (int k = 0; k < 256; ++k) {
        const DiskAutomorphism h = random_automorphism(rng);
        const cplx z = random_disk_point(rng, 0.9), w = random_disk_point(rng, 0.9);
        CHECK(pseudo_hyperbolic(z, w) == doctest::Approx(pseudo_hyperbolic(w, z)).epsilon(1e-14));
        worst = std::max(worst, std::abs(pseudo_hyperbolic(h.apply(z), h.apply(w)) - pseudo_hyperbolic(z, w)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("hyperbolic distance convention")
{
    CHECK(hyperbolic_distance(0.0, 0.0) == 0.0);
    const double r = (std::exp(1.0) - 1.0) / (std::exp(1.0) + 1.0);
    CHECK(hyperbolic_distance(0.0, r) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(hyperbolic_to_euclidean_radius(1.0) == doctest::Approx(r).epsilon(1e-15));

    std::mt19937_64 rng(14);
    double worst = 0.0;
    for (int k = 0; k < 128; ++k) {
        const DiskAutomorphism h = random_automorphism(rng);
        const cplx z = random_disk_point(rng, 0.8), w = random_disk_point(rng, 0.8);
        worst = std::max(worst, std::abs(hyperbolic_distance(h.apply(z), h.apply(w)) - hyperbolic_distance(z, w)));
    }
    CHECK(worst <= 1e-11);
}

TEST_CASE("Cayley transform")
{
    CHECK(std::abs(cayley_to_halfplane(0.0) - 1i) < 1e-16);
    CHECK(std::abs(cayley_to_halfplane(-1.0)) < 1e-16);
    CHECK(std::abs(cayley_to_halfplane(0.5) - 3i) < 1e-15);
    CHECK_THROWS_AS((void)cayley_from_halfplane(-1i), InvalidArgument);
    CHECK_THROWS_AS((void)cayley_from_halfplane(2.0), InvalidArgument);

    std::mt19937_64 rng(15);
    for (int k = 0; k < 128; ++k) {
        const cplx z = random_disk_point(rng, 0.9);
        const cplx w = cayley_to_halfplane(z);
        CHECK(w.imag() > 0.0);
        CHECK(std::abs(cayley_from_halfplane(w) - z) <= 1e-13);
    }
    const cplx z = 0.2 - 0.3i;
    const double eps = 1e-6;
    const cplx fd = (cayley_to_halfplane(z + eps) - cayley_to_halfplane(z - eps)) / (2.0 * eps);
    CHECK(std::abs(cayley_derivative(z) - fd) < 1e-7);
}
