#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loewner/disk_geometry.hpp"
#include "loewner/semigroup.hpp"

#include <cmath>

using namespace loewner;
using namespace std::complex_literals;

namespace {

const SemigroupModel kContraction = SemigroupModel::constant(1.0, 0.0);
const SemigroupModel kLft = SemigroupModel::constant(1.0, 1.0);
const SemigroupModel kParabolicAut = SemigroupModel::constant(1i, 1.0);
const SemigroupModel kDilation = SemigroupModel::from_expression(parse_expr("(1+z)/(2*(1-z))"), 1.0);

std::vector<cplx> grid(double rmax)
{
    std::vector<cplx> pts{0.0};
    for (double r : {0.35 * rmax / 0.7, rmax})
        for (int k = 0; k < 8; ++k)
            pts.push_back(std::polar(r, 2.0 * M_PI * k / 8 + 0.1));
    return pts;
}

} // namespace

TEST_CASE("flow examples")
{
    CHECK(std::abs(phi(kContraction, 0.4, 1.0) - 0.4 * std::exp(-1.0)) < 1e-9);
    CHECK(std::abs(phi(kContraction, 0.4, 1.0) - 0.1471518) < 1e-7);
    CHECK(std::abs(phi(kLft, 0.0, 2.0) - 2.0 / 3.0) < 1e-9);
    for (const SemigroupModel* m : {&kContraction, &kLft, &kParabolicAut, &kDilation})
        CHECK(phi(*m, 0.3 - 0.2i, 0.0) == 0.3 - 0.2i);
    CHECK(std::abs(kLft.generator(0.5) - (0.5 - 1.0) * (0.5 - 1.0)) < 1e-15);
}

TEST_CASE("semigroup law")
{
    for (const SemigroupModel* m : {&kContraction, &kLft, &kParabolicAut, &kDilation}) {
        CAPTURE(m->label());
        double worst = 0.0;
        for (double t : {0.25, 0.5, 1.0})
            for (double s : {0.25, 0.5, 1.0})
                for (cplx z : grid(0.7))
                    worst = std::max(worst, std::abs(phi(*m, z, t + s) - phi(*m, phi(*m, z, s), t)));
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("Denjoy-Wolff classification examples")
{
    const DWClass e = classify_dw(kContraction);
    CHECK(e.kind == DWKind::Elliptic);
    CHECK(e.dw_point == cplx(0.0));

    const DWClass h = classify_dw(kDilation);
    CHECK(h.kind == DWKind::Hyperbolic);
    CHECK(h.dw_point == cplx(1.0));
    CHECK(h.derivative_estimate == doctest::Approx(std::exp(-1.0)).epsilon(1e-4));
    CHECK(h.quotients.size() == 3);

    const DWClass p = classify_dw(kLft);
    CHECK(p.kind == DWKind::Parabolic);
    CHECK(std::abs(p.derivative_estimate - 1.0) < 1e-3);

    const DWClass a = classify_dw(kParabolicAut);
    CHECK(a.kind == DWKind::Parabolic);
    CHECK(std::string(to_string(DWKind::Hyperbolic)) == "Hyperbolic");
}

TEST_CASE("classification is stable under a halved tolerance")
{
    const SemigroupModel off_axis = SemigroupModel::constant(2.0 - 1i, 0.3 + 0.4i);
    const SemigroupModel rotated_lft = SemigroupModel::constant(1.0, std::polar(1.0, 2.0));
    for (const SemigroupModel* m : {&kContraction, &kLft, &kParabolicAut, &kDilation, &off_axis, &rotated_lft}) {
        CAPTURE(m->label());
        CHECK(classify_dw(*m, 1e-3).kind == classify_dw(*m, 5e-4).kind);
    }
    CHECK(classify_dw(off_axis).kind == DWKind::Elliptic);
    CHECK(classify_dw(rotated_lft).kind == DWKind::Parabolic);
    CHECK_THROWS_AS((void)classify_dw(kLft, 0.0), InvalidArgument);
    CHECK_THROWS_AS((void)classify_dw(kLft, 0.5), InvalidArgument);
}

TEST_CASE("Denjoy-Wolff point attracts radial approach")
{
    double prev = 1.0;
    for (double r : {0.5, 0.9, 0.99}) {
        const double gap = std::abs(phi(kDilation, r, 1.0) - 1.0);
        CHECK(gap < prev);
        prev = gap;
    }
}

TEST_CASE("hyperbolic step examples")
{
    const HyperbolicStep a = hyperbolic_step(kContraction, 0.3, 1.0);
    CHECK(a.kind == StepKind::ZeroStep);
    CHECK(a.distances.size() == 64);
    const HyperbolicStep b = hyperbolic_step(kLft, 0.3, 1.0);
    CHECK(b.kind == StepKind::ZeroStep);
    const HyperbolicStep c = hyperbolic_step(kParabolicAut, 0.3, 1.0);
    CHECK(c.kind == StepKind::PositiveStep);
    // Hyperbolic semigroups move at a constant positive hyperbolic speed.
    CHECK(hyperbolic_step(kDilation, 0.0, 1.0).kind == StepKind::PositiveStep);
    CHECK_THROWS_AS((void)hyperbolic_step(kLft, 0.3, 1.0, 4), InvalidArgument);
    CHECK_THROWS_AS((void)hyperbolic_step(kLft, 0.3, 0.0), InvalidArgument);
}

TEST_CASE("step distances are non-increasing")
{
    // Schwarz–Pick: rho(z_{k+1}, z_{k+2}) <= rho(z_k, z_{k+1}).
    for (const SemigroupModel* m : {&kContraction, &kLft, &kParabolicAut, &kDilation}) {
        const HyperbolicStep s = hyperbolic_step(*m, -0.2 + 0.4i, 0.5, 32);
        for (std::size_t k = 1; k < s.distances.size(); ++k)
            CHECK(s.distances[k] <= s.distances[k - 1] * (1.0 + 1e-7) + 1e-12);
    }
}

TEST_CASE("elliptic Koenigs examples")
{
    const EllipticKoenigs id = koenigs_elliptic(kContraction);
    CHECK(id.c == cplx(1.0));
    CHECK(std::abs(id.h(0.4) - 0.4) < 1e-9);

    const SemigroupModel m = SemigroupModel::from_expression(parse_expr("1+z"), 0.0);
    const EllipticKoenigs k = koenigs_elliptic(m);
    CHECK(k.c == m.p(0.0));
    CHECK(std::abs(k.h(0.0)) < 1e-12);
    const double h = 1e-4;
    CHECK(std::abs((k.h(h) - k.h(-h)) / (2.0 * h) - 1.0) < 1e-6);
    CHECK(elliptic_koenigs_residual(m, k, grid(0.6)) <= 1e-6);

    const SemigroupModel spiral = SemigroupModel::constant(1.0 + 2i, 0.0);
    const EllipticKoenigs ks = koenigs_elliptic(spiral);
    CHECK(ks.c == 1.0 + 2i);
    CHECK(elliptic_koenigs_residual(spiral, ks, grid(0.6)) <= 1e-8);
}

TEST_CASE("elliptic Koenigs function does not depend on the schedule")
{
    const SemigroupModel m = SemigroupModel::from_expression(parse_expr("1+z/2+z^2/4"), 0.0);
    KoenigsOptions a, b;
    b.t0 = 0.75;
    const EllipticKoenigs ka = koenigs_elliptic(m, a);
    const EllipticKoenigs kb = koenigs_elliptic(m, b);
    for (cplx z : grid(0.7))
        CHECK(std::abs(ka.h(z) - kb.h(z)) <= 10 * a.tol);
}

TEST_CASE("elliptic Koenigs errors")
{
    CHECK_THROWS_AS((void)koenigs_elliptic(kLft), InvalidArgument);
    const SemigroupModel rotation = SemigroupModel::constant(1i, 0.0);
    bool raised = false;
    try {
        const EllipticKoenigs k = koenigs_elliptic(rotation);
        (void)k.h(0.5);
    } catch (const NotConverged&) {
        raised = true;
    } catch (const InvalidArgument&) {
        raised = true;
    }
    CHECK(raised);
}

TEST_CASE("interior Denjoy-Wolff points conjugate to the origin")
{
    const SemigroupModel m = SemigroupModel::constant(1.5 - 0.5i, 0.4 - 0.2i);
    const ConjugatedModel cm = conjugate_to_origin(m);
    CHECK(cm.model.tau() == cplx(0.0));
    for (cplx z : {cplx(0.1, 0.2), cplx(-0.5, 0.1)}) {
        const cplx lhs = phi(cm.model, cm.to_origin.apply(z), 0.7);
        const cplx rhs = cm.to_origin.apply(phi(m, z, 0.7));
        CHECK(std::abs(lhs - rhs) < 1e-8);
    }
    const EllipticKoenigs k = koenigs_elliptic(cm.model);
    CHECK(elliptic_koenigs_residual(cm.model, k, grid(0.6)) <= 1e-8);
}

TEST_CASE("boundary Koenigs examples")
{
    const auto h = koenigs_boundary(kLft);
    CHECK(std::abs(h(0.5) - 1.0) < 1e-10);
    CHECK(std::abs(h(0.0)) < 1e-15);
    CHECK(std::abs(h(phi(kLft, 0.0, 2.0)) - h(phi(kLft, 0.0, 1.0)) - 1.0) < 1e-9);

    const auto g = koenigs_boundary(kDilation);
    CHECK(std::abs(g(0.5) - std::log(3.0)) < 1e-10);
    CHECK(std::abs(g(phi(kDilation, 0.0, 2.0)) - g(phi(kDilation, 0.0, 1.0)) - 1.0) < 1e-8);

    for (const SemigroupModel* m : {&kLft, &kDilation, &kParabolicAut})
        CHECK(boundary_koenigs_residual(*m, koenigs_boundary(*m), grid(0.6)) <= 1e-8);
    CHECK_THROWS_AS((void)koenigs_boundary(kContraction), InvalidArgument);
}

TEST_CASE("chain calibrated Koenigs function")
{
    const auto h = koenigs_boundary_via_chain(kLft);
    CHECK(std::abs(h(0.5) - 1.0) < 1e-6);
    CHECK(boundary_koenigs_residual(kLft, h, grid(0.5)) <= 1e-6);
    const auto direct = koenigs_boundary(kLft);
    for (cplx z : grid(0.5))
        CHECK(std::abs(h(z) - direct(z)) < 1e-6);
}

TEST_CASE("degenerate calibration is reported")
{
    // The standard chain of a rotation-type boundary flow is the identity, so
    // a pinned origin gives no increment.
    const SemigroupModel pinned(1.0, [](cplx z) { return cplx(0.0) * z; }, [](cplx) { return cplx(0.0); }, "zero");
    CHECK_THROWS_AS((void)koenigs_boundary_via_chain(pinned), CalibrationDegenerate);
}
