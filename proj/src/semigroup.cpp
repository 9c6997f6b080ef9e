#include "loewner/semigroup.hpp"

#include "loewner/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace loewner {

namespace {

constexpr double kBoundaryTol = 1e-12;

Field autonomous(std::function<cplx(cplx)> f)
{
    if (!f)
        return {};
    return [f = std::move(f)](cplx z, double) { return f(z); };
}

// Polynomial extrapolation to x = 0 through (x_j, y_j) by Neville's scheme.
double neville_at_zero(std::vector<double> x, std::vector<double> y)
{
    const std::size_t n = x.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            y[i] = (x[i + m] * y[i] - x[i] * y[i + 1]) / (x[i + m] - x[i]);
    return y.front();
}

} // namespace

SemigroupModel::SemigroupModel(cplx tau, std::function<cplx(cplx)> p, std::function<cplx(cplx)> dp,
                               std::string label)
    : tau_(tau), p_(p),
      driver_(HerglotzDriver::berkson_porta(autonomous(p), autonomous(std::move(dp)), ComplexPath::constant(tau),
                                            {}, std::move(label)))
{
}

SemigroupModel SemigroupModel::constant(cplx c, cplx tau)
{
    if (c.real() < -kHerglotzSlack)
        throw InvalidArgument("semigroup constant must have Re c >= 0");
    return SemigroupModel(tau, [c](cplx) { return c; }, [](cplx) { return cplx{}; }, "constant");
}

SemigroupModel SemigroupModel::from_expression(const Expr& p, cplx tau)
{
    if (p.depends_on_t())
        throw InvalidArgument("semigroup Herglotz function must not depend on t");
    const Expr dp = p.differentiate_z();
    return SemigroupModel(tau, [p](cplx z) { return p.evaluate(z, 0.0); },
                          [dp](cplx z) { return dp.evaluate(z, 0.0); }, p.print());
}

EvolutionConfig semigroup_evolution_defaults()
{
    EvolutionConfig c;
    c.rel_tol = 1e-12;
    c.abs_tol = 1e-15;
    c.max_step = 0.5;
    return c;
}

cplx phi(const SemigroupModel& m, cplx z, double t, const EvolutionConfig& cfg)
{
    if (t == 0.0)
        return z;
    return evolve_point(m.driver(), z, 0.0, t, cfg).w;
}

const char* to_string(DWKind k) noexcept
{
    switch (k) {
    case DWKind::Elliptic: return "Elliptic";
    case DWKind::Hyperbolic: return "Hyperbolic";
    case DWKind::Parabolic: return "Parabolic";
    }
    return "Elliptic";
}

const char* to_string(StepKind k) noexcept
{
    switch (k) {
    case StepKind::ZeroStep: return "ZeroStep";
    case StepKind::PositiveStep: return "PositiveStep";
    case StepKind::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

DWClass classify_dw(const SemigroupModel& m, double tol)
{
    if (!(tol > 0.0 && tol < 0.1))
        throw InvalidArgument("classification tolerance must lie in (0, 0.1)");
    DWClass out;
    out.dw_point = m.tau();
    if (std::abs(m.tau()) < 1.0 - kBoundaryTol) {
        out.kind = DWKind::Elliptic;
        return out;
    }
    const cplx dir = m.tau() / std::abs(m.tau());
    const double eps[] = {0.1, 0.01, 0.001};
    for (double e : eps) {
        const cplx w = phi(m, (1.0 - e) * dir, 1.0);
        out.quotients.push_back((1.0 - std::abs(w)) / e);
    }
    for (std::size_t k = 1; k < out.quotients.size(); ++k)
        if (std::abs(out.quotients[k] - out.quotients[k - 1]) > 0.1)
            throw ExtrapolationUnstable("Julia-Wolff quotients disagree by more than 0.1");
    out.derivative_estimate = neville_at_zero({eps[0], eps[1], eps[2]}, out.quotients);
    const double d = out.derivative_estimate;
    if (d > 1.0 + tol || !(d > 0.0))
        throw ExtrapolationUnstable("angular derivative estimate outside (0, 1]");
    out.kind = d < 1.0 - tol ? DWKind::Hyperbolic : DWKind::Parabolic;
    return out;
}

HyperbolicStep hyperbolic_step(const SemigroupModel& m, cplx z0, double t0, int n)
{
    if (!(std::abs(z0) < 1.0) || !(t0 > 0.0) || n < 8)
        throw InvalidArgument("hyperbolic_step needs |z0| < 1, t0 > 0, n >= 8");
    HyperbolicStep out;
    cplx z = z0;
    try {
        for (int k = 0; k < n; ++k) {
            const cplx next = phi(m, z, t0);
            out.distances.push_back(hyperbolic_distance(z, next));
            z = next;
        }
    } catch (const BoundaryEscape&) {
        // The orbit left the numerically representable disk; judge what we have.
    }
    const auto& rho = out.distances;
    const std::size_t len = rho.size();
    if (len < 8)
        return out;

    std::vector<double> xs, ys;
    for (std::size_t k = len - 1; k >= 1 && xs.size() < 4; k /= 2) {
        xs.push_back(1.0 / static_cast<double>(k));
        ys.push_back(rho[k]);
    }
    out.limit_estimate = neville_at_zero(xs, ys);

    const std::size_t q = len - len / 4;
    bool non_increasing = true;
    double tail_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = q; k < len; ++k) {
        tail_min = std::min(tail_min, rho[k]);
        if (k > q && rho[k] > rho[k - 1] * (1.0 + 1e-9) + 1e-300)
            non_increasing = false;
    }
    if (non_increasing && (rho.back() < 1e-4 || std::abs(out.limit_estimate) < 1e-4))
        out.kind = StepKind::ZeroStep;
    else if (tail_min > 1e-2 && out.limit_estimate > 1e-2)
        out.kind = StepKind::PositiveStep;
    return out;
}

EllipticKoenigs koenigs_elliptic(const SemigroupModel& m, const KoenigsOptions& opt)
{
    if (std::abs(m.tau()) != 0.0)
        throw InvalidArgument("koenigs_elliptic requires tau = 0; conjugate first");
    const cplx c = m.p(0.0);
    if (!(c.real() > 0.0))
        throw NotConverged("no strict contraction at the Denjoy-Wolff point (Re p(0) = 0)", 0.0,
                           std::numeric_limits<double>::infinity());
    if (!(opt.tol > 0.0) || !(opt.t0 > 0.0) || !(opt.t_max >= opt.t0))
        throw InvalidArgument("invalid Koenigs options");

    std::vector<double> horizons{opt.t0};
    while (horizons.back() * 2.0 <= opt.t_max)
        horizons.push_back(horizons.back() * 2.0);
    EvolutionConfig cfg = semigroup_evolution_defaults();
    cfg.abs_tol = 1e-250;

    auto h = [d = m.driver(), c, horizons, cfg, tol = opt.tol](cplx z) -> cplx {
        if (z == cplx{0.0, 0.0})
            return z;
        cplx w = z, prev{};
        double t_prev = 0.0;
        double delta = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < horizons.size(); ++k) {
            w = evolve_point(d, w, t_prev, horizons[k], cfg).w;
            t_prev = horizons[k];
            const cplx est = std::exp(c * horizons[k]) * w;
            if (k) {
                delta = std::abs(est - prev);
                if (delta < tol)
                    return est;
            }
            prev = est;
        }
        throw NotConverged("Koenigs limit not reached by t_max", horizons.back(), delta);
    };
    return {c, h};
}

ConjugatedModel conjugate_to_origin(const SemigroupModel& m)
{
    const cplx tau = m.tau();
    if (!(std::abs(tau) < 1.0 - kBoundaryTol))
        throw InvalidArgument("conjugation requires an interior Denjoy-Wolff point");
    const DiskAutomorphism M(-tau, 1.0);
    const cplx p0 = (1.0 - std::norm(tau)) * m.p(tau);
    auto p = [m, M, p0](cplx w) -> cplx {
        if (w == cplx{0.0, 0.0})
            return p0;
        const cplx z = M.inverse_apply(w);
        return -M.derivative(z) * m.generator(z) / w;
    };
    return {SemigroupModel(0.0, p, {}, m.label() + " (conjugated)"), M};
}

std::function<cplx(cplx)> koenigs_boundary(const SemigroupModel& m, double tol)
{
    if (std::abs(std::abs(m.tau()) - 1.0) > kBoundaryTol)
        throw InvalidArgument("koenigs_boundary requires |tau| = 1");
    return [m, tol](cplx z) -> cplx {
        if (!(std::abs(z) < 1.0))
            throw InvalidArgument("Koenigs function evaluated outside the disk");
        return integrate_segment([&m](cplx w) { return 1.0 / m.generator(w); }, 0.0, z, tol);
    };
}

std::function<cplx(cplx)> koenigs_boundary_via_chain(const SemigroupModel& m, const ChainOptions& opt)
{
    if (std::abs(std::abs(m.tau()) - 1.0) > kBoundaryTol)
        throw InvalidArgument("koenigs_boundary requires |tau| = 1");
    const HerglotzDriver d = m.driver();
    const cplx f00 = chain_value(d, 0.0, 0.0, opt).f;
    const cplx inc = chain_value(d, 0.0, phi(m, 0.0, 1.0), opt).f - f00;
    if (std::abs(inc) < 1e-12)
        throw CalibrationDegenerate("chain increment over unit time is numerically zero");
    const cplx mu = 1.0 / inc;
    return [d, opt, mu, f00](cplx z) { return mu * (chain_value(d, 0.0, z, opt).f - f00); };
}

double boundary_koenigs_residual(const SemigroupModel& m, const std::function<cplx(cplx)>& h,
                                 const std::vector<cplx>& points)
{
    double worst = 0.0;
    for (cplx z : points) {
        const cplx hz = h(z);
        for (double t : {0.5, 1.0, 2.0})
            worst = std::max(worst, std::abs(h(phi(m, z, t)) - hz - t));
    }
    return worst;
}

double elliptic_koenigs_residual(const SemigroupModel& m, const EllipticKoenigs& k,
                                 const std::vector<cplx>& points)
{
    double worst = 0.0;
    for (cplx z : points) {
        const cplx hz = k.h(z);
        for (double t : {0.5, 1.0, 2.0})
            worst = std::max(worst, std::abs(k.h(phi(m, z, t)) - std::exp(-k.c * t) * hz));
    }
    return worst;
}

} // namespace loewner
