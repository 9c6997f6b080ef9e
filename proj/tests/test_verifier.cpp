#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loewner/catalog.hpp"
#include "loewner/verifier.hpp"

#include <cmath>

using namespace loewner;
using namespace std::complex_literals;

namespace {

const HerglotzDriver kElliptic = constant_driver(1.0, 0.0);
const HerglotzDriver kRotation = constant_driver(1i, 0.0);
const HerglotzDriver kLft = constant_driver(1.0, 1.0);

const std::vector<double> kRadii{0.0, 0.35, 0.7};
const std::vector<double> kTimes{0.0, 0.5, 1.0, 2.0};

} // namespace

TEST_CASE("report bookkeeping")
{
    CheckReport r;
    r.threshold = 1.0;
    r.record(0.5, {0.0, 1.0, 0.2});
    r.record(0.25, {0.0, 2.0, 0.3});
    CHECK(r.max_residual == 0.5);
    CHECK(r.witness.t == 1.0);
    r.finalize();
    CHECK(r.pass);
    r.fail("boom", {0.0, 3.0, 0.1});
    r.finalize();
    CHECK_FALSE(r.pass);
    CHECK(r.errors.size() == 1);
    CHECK(r.witness.t == 3.0);

    CheckReport skipped;
    skipped.skipped = true;
    skipped.finalize();
    CHECK(skipped.pass);
}

TEST_CASE("disk grid")
{
    CHECK(disk_grid(kRadii, 8).size() == 17);
    const std::vector<double> zero{0.0};
    CHECK(disk_grid(zero, 8) == std::vector<cplx>{0.0});
}

TEST_CASE("evolution family axioms")
{
    const auto pts = disk_grid(kRadii, 8);
    const CheckReport a = check_ef_axioms(kElliptic, kTimes, pts, 1e-9);
    CHECK(a.pass);
    CHECK(a.max_residual <= 1e-9);

    const std::vector<double> only_zero{0.0};
    const CheckReport b = check_ef_axioms(kElliptic, only_zero, pts, 1e-9);
    CHECK(b.pass);
    CHECK(b.max_residual == 0.0);

    // Negative control: undeclared switch times let the integrator skip the pulse.
    const std::vector<double> ts{0.0, 0.5, 1.00005, 2.0};
    CHECK(check_ef_axioms(pulse_driver(true), ts, pts, 1e-8).pass);
    const CheckReport c = check_ef_axioms(pulse_driver(false), ts, pts, 1e-8);
    CHECK_FALSE(c.pass);
    CHECK(c.max_residual > 1e-3);
    CHECK(c.witness.t > 0.0);
}

TEST_CASE("chain equation")
{
    const auto pts = disk_grid(kRadii, 8);
    const CheckReport a = check_chain_equation(kElliptic, standard_chain(kElliptic), kTimes, pts, 1e-6);
    CHECK(a.pass);

    const ChainEvaluator g = transported_chain(standard_chain(kRotation), parse_expr("z/(1-z)"), 1.0);
    CHECK(check_chain_equation(kRotation, g, kTimes, pts, 1e-6).pass);

    const std::vector<double> one{1.0};
    const CheckReport diag = check_chain_equation(kElliptic, standard_chain(kElliptic), one, pts, 1e-6);
    CHECK(diag.max_residual == 0.0);

    // A chain of a different family is not associated.
    const CheckReport wrong = check_chain_equation(kElliptic, standard_chain(kLft), kTimes, pts, 1e-6);
    CHECK_FALSE(wrong.pass);
}

TEST_CASE("Loewner-Kufarev PDE")
{
    const auto pts = disk_grid(kRadii, 8);
    const std::vector<double> s{0.25, 0.5, 1.5};
    CHECK(check_lk_pde(kElliptic, standard_chain(kElliptic), s, pts, 1e-6).pass);
    ChainOptions opt;
    opt.min_horizon = 4.0;
    const CheckReport lft = check_lk_pde(kLft, standard_chain(kLft, opt), s, pts, 1e-5);
    CHECK(lft.pass);
    CHECK_FALSE(check_lk_pde(kLft, standard_chain(kElliptic), s, pts, 1e-5).pass);
}

TEST_CASE("radial form of the PDE matches the general residual")
{
    const HerglotzDriver d = radial_driver(TimeFunction::expression(parse_expr("t")));
    const ChainEvaluator f = standard_chain(d);
    const double s = 0.7, ds = 1e-4;
    for (cplx z : {cplx(0.3, 0.1), cplx(-0.2, 0.4)}) {
        const cplx dfs = (f(s + ds, z) - f(s - ds, z)) / (2.0 * ds);
        const cplx fz = numeric_derivative([&](cplx x) { return f(s, x); })(z);
        const cplx general = dfs + d.vector_field(z, s) * fz;
        const cplx radial = dfs - z * fz * d.herglotz(z, s);
        CHECK(std::abs(general - radial) < 1e-12);
        CHECK(std::abs(general) < 1e-6);
    }
}

TEST_CASE("beta monotonicity")
{
    const auto pts = disk_grid(kRadii, 8);
    const std::vector<double> ts{0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
    CHECK(check_beta_monotone(kElliptic, ts, pts).pass);
    CHECK(beta_z(kElliptic, 0.3, 1.0) < beta_z(kElliptic, 0.3, 0.5));
    const CheckReport rot = check_beta_monotone(kRotation, ts, pts);
    CHECK(rot.pass);
    CHECK(beta_z(kRotation, 0.3, 4.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(check_beta_monotone(radial_driver(TimeFunction::expression(parse_expr("t"))), ts, pts).pass);
}

TEST_CASE("growth bound")
{
    const std::vector<double> s{0.0, 0.5, 1.0};
    const std::vector<double> radii{0.3, 0.6, 0.9};
    const CheckReport a = check_growth_bound(kElliptic, standard_chain(kElliptic), s, radii, 1e-6);
    CHECK(a.pass);
    CHECK_FALSE(a.skipped);
    const CheckReport b = check_growth_bound(kRotation, standard_chain(kRotation), s, radii, 1e-6);
    CHECK(b.skipped);
    CHECK(b.pass);
    CHECK(check_growth_bound(kLft, standard_chain(kLft), s, radii, 1e-6).pass);
    const std::vector<double> too_far{0.95};
    CHECK_THROWS_AS((void)check_growth_bound(kElliptic, standard_chain(kElliptic), s, too_far, 1e-6),
                    InvalidArgument);
}

TEST_CASE("univalence")
{
    const CheckReport id = check_univalence([](cplx z) { return z; }, 0.9);
    CHECK(id.pass);
    const CheckReport sq = check_univalence([](cplx z) { return z * z; }, 0.9);
    CHECK_FALSE(sq.pass);
    const ChainEvaluator f = standard_chain(kElliptic);
    CHECK(check_univalence([&](cplx z) { return f(1.0, z); }, 0.9, 128).pass);
    CHECK(check_univalence([](cplx z) { return z / ((1.0 - z) * (1.0 - z)); }, 0.9).pass);
}

TEST_CASE("winding numbers")
{
    std::vector<cplx> circle;
    for (int k = 0; k < 64; ++k)
        circle.push_back(std::polar(1.0, 2.0 * M_PI * k / 64));
    CHECK(winding_number(circle, 0.0) == 1);
    CHECK(winding_number(circle, 2.0) == 0);
    std::vector<cplx> twice;
    for (int k = 0; k < 128; ++k)
        twice.push_back(std::polar(1.0, 4.0 * M_PI * k / 128));
    CHECK(winding_number(twice, 0.1i) == 2);
    std::reverse(circle.begin(), circle.end());
    CHECK(winding_number(circle, 0.0) == -1);
}

TEST_CASE("contour inverse oracle")
{
    const MapEvaluator id = [](cplx z) { return z; };
    const MapEvaluator one = [](cplx) { return cplx(1.0); };
    CHECK(std::abs(contour_inverse_oracle(id, one, 0.3, 0.9) - 0.3) < 1e-12);

    const double e = std::exp(1.0);
    const MapEvaluator lin = [e](cplx z) { return e * z; };
    const MapEvaluator dlin = [e](cplx) { return cplx(e); };
    CHECK(std::abs(contour_inverse_oracle(lin, dlin, 0.5, 0.9) - 0.5 / e) < 1e-12);

    const MapEvaluator lft = [](cplx z) { return z / (1.0 - z); };
    const MapEvaluator dlft = [](cplx z) { return 1.0 / ((1.0 - z) * (1.0 - z)); };
    CHECK(std::abs(contour_inverse_oracle(lft, dlft, 1.0, 0.9) - 0.5) < 1e-9);

    // 0.9 e^{0} is a node: the integrand has a pole on the contour.
    CHECK_THROWS_AS((void)contour_inverse_oracle(id, one, 0.9, 0.9), PoleNearContour);
}

TEST_CASE("contour inversion agrees with Newton inversion")
{
    const HerglotzDriver d = radial_driver(TimeFunction::expression(parse_expr("t")));
    const ChainEvaluator f = standard_chain(d);
    for (cplx z : {cplx(-0.1, 0.4)}) {
        const cplx w_newton = induced_evolution(f, 0.0, 1.0, z);
        const cplx target = f(0.0, z);
        const MapEvaluator F = [&](cplx x) { return f(1.0, x); };
        const cplx w_contour = contour_inverse_oracle(F, numeric_derivative(F), target, 0.9, 256);
        CHECK(std::abs(w_newton - w_contour) < 1e-7);
    }
}

TEST_CASE("catalog passes every applicable check")
{
    const auto pts = disk_grid(kRadii, 6);
    const std::vector<double> ts{0.0, 0.5, 1.0};
    for (const auto& e : oracle_catalog()) {
        CAPTURE(e.name);
        CHECK(check_ef_axioms(e.driver, ts, pts, 1e-6).pass);
        CHECK(check_chain_equation(e.driver, standard_chain(e.driver), ts, pts, 1e-6).pass);
        CHECK(check_beta_monotone(e.driver, ts, pts).pass);
    }
}
