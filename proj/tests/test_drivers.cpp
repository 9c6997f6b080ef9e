#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loewner/catalog.hpp"
#include "loewner/drivers.hpp"

#include <cmath>
#include <random>

using namespace loewner;
using namespace std::complex_literals;

TEST_CASE("vector field examples")
{
    CHECK(std::abs(constant_driver(1.0, 0.0).vector_field(0.5, 0.0) + 0.5) < 1e-16);
    const HerglotzDriver radial = radial_driver(TimeFunction::constant(0.0));
    for (double t : {0.0, 0.7, 3.0})
        CHECK(std::abs(radial.vector_field(0.5, t) + 1.5) < 1e-15);
    CHECK(std::abs(constant_driver(1.0, 1.0).vector_field(0.0, 0.0) - 1.0) < 1e-16);
}

TEST_CASE("vector field derivative examples")
{
    const HerglotzDriver d0 = constant_driver(1.0, 0.0);
    for (cplx z : {cplx(0.0), cplx(0.3, 0.4), cplx(-0.8)})
        CHECK(std::abs(d0.vector_field_dz(z, 1.0) + 1.0) < 1e-15);
    CHECK(std::abs(constant_driver(1.0, 1.0).vector_field_dz(0.0, 0.0) + 2.0) < 1e-15);

    const HerglotzDriver radial = radial_driver(TimeFunction::constant(0.0));
    for (cplx z : {cplx(0.0), cplx(0.2, -0.5), cplx(0.6, 0.1)})
        CHECK(std::abs(radial.vector_field_dz(z, 0.0) - radial.vector_field_dz_numeric(z, 0.0)) < 1e-8);
    CHECK(std::abs(radial.vector_field_dz(0.0, 0.0) + 1.0) < 1e-15);
}

TEST_CASE("validation examples")
{
    const ValidationReport a = validate(constant_driver(1.0, 0.0));
    CHECK(a.pass);
    CHECK(a.min_re_p == doctest::Approx(1.0));

    const ValidationReport b = validate(expression_driver(parse_expr("(1+z)/(1-z)"), ComplexPath::constant(0.0)));
    CHECK(b.pass);
    CHECK(b.min_re_p >= 0.0);

    const ValidationReport c = validate(expression_driver(parse_expr("-1"), ComplexPath::constant(0.0)));
    CHECK_FALSE(c.pass);
    CHECK(c.min_re_p == doctest::Approx(-1.0));
    CHECK_FALSE(c.failures.empty());

    ValidationGrid grid;
    grid.radii = {0.5, 0.9};
    const ValidationReport d = validate(constant_driver(2.0, 0.0), grid);
    REQUIRE(d.max_abs_g.size() == 2);
    CHECK(d.max_abs_g[1].second == doctest::Approx(1.8));
}

TEST_CASE("Berkson-Porta field vanishes at the Denjoy-Wolff trajectory")
{
    const std::vector<double> ts{0.0, 1.0, 2.0};
    const std::vector<cplx> vs{0.2, 0.5i, -0.3 + 0.1i};
    const HerglotzDriver d = expression_driver(parse_expr("1 + t*z"), ComplexPath::samples(ts, vs));
    for (double t : {0.0, 0.3, 1.0, 1.7, 2.0, 5.0})
        CHECK(d.vector_field(d.tau(t), t) == cplx(0.0, 0.0));
    // t = 0 is the start of every integration, not a breakpoint.
    CHECK(d.breakpoints() == std::vector<double>{1.0, 2.0});
}

TEST_CASE("radial driver matches the classical radial equation")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const HerglotzDriver d = radial_driver(TimeFunction::expression(parse_expr("t^2 - 1")));
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const cplx z = std::polar(0.95 * std::sqrt(u(rng)), 2.0 * M_PI * u(rng));
        const double t = 3.0 * u(rng);
        const cplx kappa = std::polar(1.0, t * t - 1.0);
        worst = std::max(worst, std::abs(d.vector_field(z, t) + z * (kappa + z) / (kappa - z)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("chordal driver is the Cayley pullback of 2/(xi - w)")
{
    const HerglotzDriver d = chordal_driver(TimeFunction::constant(0.3));
    for (cplx z : {cplx(0.1, 0.2), cplx(-0.5, 0.0), cplx(0.4, -0.6)}) {
        const cplx w = cayley_to_halfplane(z);
        CHECK(std::abs(d.vector_field(z, 0.0) * cayley_derivative(z) - 2.0 / (0.3 - w)) < 1e-12);
        CHECK(std::abs(d.vector_field_dz(z, 0.0) - d.vector_field_dz_numeric(z, 0.0)) < 1e-7);
    }
    CHECK(d.form() == HerglotzDriver::Form::Raw);
}

TEST_CASE("time functions and paths")
{
    const TimeFunction f = TimeFunction::samples({0.0, 1.0, 3.0}, {0.0, 2.0, 0.0});
    CHECK(f(0.5) == doctest::Approx(1.0));
    CHECK(f(2.0) == doctest::Approx(1.0));
    CHECK(f(-1.0) == 0.0);
    CHECK(f(9.0) == 0.0);
    CHECK_THROWS_AS(TimeFunction::samples({0.0, 0.0}, {1.0, 2.0}), InvalidArgument);
    CHECK_THROWS_AS(TimeFunction::samples({0.0}, {1.0, 2.0}), InvalidArgument);
    CHECK_THROWS_AS(TimeFunction::expression(parse_expr("z")), InvalidArgument);
    CHECK_THROWS_AS(ComplexPath::constant(1.5), InvalidArgument);
    CHECK_THROWS_AS(constant_driver(-1.0, 0.0), InvalidArgument);
}

TEST_CASE("piecewise drivers switch at the declared time")
{
    const HerglotzDriver d = rotation_then_contraction(1.0);
    CHECK(std::abs(d.herglotz(0.3, 0.5) - 1i) == 0.0);
    CHECK(std::abs(d.herglotz(0.3, 1.0) - 1.0) == 0.0);
    CHECK(d.breakpoints() == std::vector<double>{1.0});
    CHECK(pulse_driver(false).breakpoints().empty());
    CHECK(pulse_driver(true).breakpoints().size() == 2);
}

TEST_CASE("expression domain errors carry the evaluation point")
{
    const HerglotzDriver d = expression_driver(parse_expr("1/(z - 0.5)"), ComplexPath::constant(0.0));
    CHECK_THROWS_AS((void)d.vector_field(0.5, 0.25), DomainError);
    try {
        (void)d.vector_field(0.5, 0.25);
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("t=") != std::string::npos);
    }
}

TEST_CASE("random Herglotz expressions satisfy the Herglotz condition")
{
    std::mt19937_64 rng(32);
    for (int k = 0; k < 20; ++k) {
        const HerglotzDriver d = random_expression_driver(rng);
        CAPTURE(d.label());
        CHECK(validate(d).pass);
    }
}
