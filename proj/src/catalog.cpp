#include "loewner/catalog.hpp"

#include "loewner/disk_geometry.hpp"

#include <cmath>
#include <cstdio>

namespace loewner {

namespace {

constexpr cplx kI{0.0, 1.0};

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

std::string fmt(cplx c)
{
    return "(" + fmt(c.real()) + (c.imag() < 0 ? "-" : "+") + fmt(std::abs(c.imag())) + "*i)";
}

} // namespace

std::vector<CatalogEntry> oracle_catalog()
{
    std::vector<CatalogEntry> cat;

    cat.push_back({"constant_elliptic", constant_driver(1.0, 0.0),
                   [](double s, cplx z) { return std::exp(s) * z; },
                   [](double s, double t, cplx z) { return std::exp(-(t - s)) * z; }, true});

    cat.push_back({"rotation", constant_driver(kI, 0.0),
                   [](double s, cplx z) { return std::exp(kI * s) * z; },
                   [](double s, double t, cplx z) { return std::exp(-kI * (t - s)) * z; }, false});

    cat.push_back({"parabolic_lft", constant_driver(1.0, 1.0),
                   [](double s, cplx z) { return z / (1.0 - z) - s; },
                   [](double s, double t, cplx z) { return 1.0 - (1.0 - z) / (1.0 + (t - s) * (1.0 - z)); },
                   true});

    {
        auto p = [](cplx z, double) { return (1.0 + z) / (2.0 * (1.0 - z)); };
        auto dp = [](cplx z, double) { return 1.0 / ((1.0 - z) * (1.0 - z)); };
        cat.push_back({"hyperbolic_dilation",
                       HerglotzDriver::berkson_porta(p, dp, ComplexPath::constant(1.0), {}, "dilation"),
                       [](double s, cplx z) { return std::tanh(std::atanh(z) - 0.5 * s); },
                       [](double s, double t, cplx z) { return std::tanh(std::atanh(z) + 0.5 * (t - s)); }, false});
    }

    cat.push_back({"radial_slit", radial_driver(TimeFunction::constant(0.0)),
                   [](double s, cplx z) { return std::exp(s) * z / ((1.0 + z) * (1.0 + z)); }, {}, true});

    cat.push_back({"chordal_slit", chordal_driver(TimeFunction::constant(0.0)),
                   [](double s, cplx z) {
                       const cplx c = cayley_to_halfplane(z);
                       return -(c * c + 1.0 + 4.0 * s) / 4.0;
                   },
                   [](double s, double t, cplx z) {
                       const cplx w0 = cayley_to_halfplane(z);
                       cplx w = std::sqrt(w0 * w0 - 4.0 * (t - s));
                       if (w.imag() < 0.0)
                           w = -w;
                       return cayley_from_halfplane(w);
                   },
                   true});
    return cat;
}

HerglotzDriver rotation_then_contraction(double switch_time)
{
    return HerglotzDriver::piecewise({{0.0, constant_driver(kI, 0.0)}, {switch_time, constant_driver(1.0, 0.0)}});
}

HerglotzDriver pulse_driver(bool declare_breakpoints)
{
    return HerglotzDriver::piecewise({{0.0, constant_driver(1.0, 0.0)},
                                      {1.0, constant_driver(1e4 + 1.0, 0.0)},
                                      {1.0 + 1e-4, constant_driver(1.0, 0.0)}},
                                     declare_breakpoints);
}

std::string random_herglotz_text(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> nterms(1, 3), kind(0, 3);
    auto time_weight = [&]() -> std::string {
        switch (kind(rng)) {
        case 0: return "1";
        case 1: return "(1+" + fmt(u(rng)) + "*t)";
        case 2: return "exp(-" + fmt(0.5 * u(rng)) + "*t)";
        default: return "(1+" + fmt(0.5 * u(rng)) + "*t^2)";
        }
    };
    std::string text = fmt(cplx{0.05 + u(rng), 2.0 * u(rng) - 1.0});
    const int n = nterms(rng);
    for (int k = 0; k < n; ++k) {
        const cplx kappa = std::polar(1.2 + u(rng), 6.283185307179586 * u(rng));
        text += "+" + fmt(0.1 + u(rng)) + "*" + time_weight() + "*(" + fmt(kappa) + "+z)/(" + fmt(kappa) + "-z)";
    }
    return text;
}

HerglotzDriver random_expression_driver(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Expr p = parse_expr(random_herglotz_text(rng));
    cplx tau{0.0, 0.0};
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: break;
    case 1: tau = std::polar(0.8 * u(rng), 6.283185307179586 * u(rng)); break;
    default: tau = std::polar(1.0, 6.283185307179586 * u(rng)); break;
    }
    return expression_driver(p, ComplexPath::constant(tau));
}

} // namespace loewner
