#include "loewner/drivers.hpp"

#include "loewner/disk_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

namespace loewner {

namespace {

constexpr cplx kI{0.0, 1.0};

// Index of the sample interval containing t (clamped).
std::size_t interval_of(const std::vector<double>& times, double t)
{
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin())
        return 0;
    return std::min<std::size_t>(static_cast<std::size_t>(it - times.begin()) - 1, times.size() - 2);
}

template <class V>
V interpolate(const std::vector<double>& times, const std::vector<V>& values, double t)
{
    if (times.size() == 1 || t <= times.front())
        return values.front();
    if (t >= times.back())
        return values.back();
    const std::size_t k = interval_of(times, t);
    const double w = (t - times[k]) / (times[k + 1] - times[k]);
    return values[k] + w * (values[k + 1] - values[k]);
}

void check_samples(const std::vector<double>& times, std::size_t nvalues)
{
    if (times.empty() || times.size() != nvalues)
        throw InvalidArgument("sample arrays must be non-empty and of equal length");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw InvalidArgument("sample times must be strictly increasing");
}

std::vector<double> merged(std::vector<double> a, const std::vector<double>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    a.erase(std::remove_if(a.begin(), a.end(), [](double x) { return !(x > 0.0); }), a.end());
    return a;
}

std::string where(cplx z, double t)
{
    std::ostringstream os;
    os.precision(17);
    os << " at z=(" << z.real() << "," << z.imag() << "), t=" << t;
    return os.str();
}

} // namespace

// ---------------------------------------------------------------------------

TimeFunction TimeFunction::constant(double value)
{
    TimeFunction f;
    f.mode_ = Mode::Constant;
    f.value_ = value;
    return f;
}

TimeFunction TimeFunction::expression(Expr e)
{
    if (e.depends_on_z())
        throw InvalidArgument("time function must not depend on z");
    TimeFunction f;
    f.mode_ = Mode::Expression;
    f.expr_ = std::move(e);
    return f;
}

TimeFunction TimeFunction::samples(std::vector<double> times, std::vector<double> values)
{
    check_samples(times, values.size());
    TimeFunction f;
    f.mode_ = Mode::Samples;
    f.times_ = std::move(times);
    f.values_ = std::move(values);
    return f;
}

double TimeFunction::operator()(double t) const
{
    switch (mode_) {
    case Mode::Constant: return value_;
    case Mode::Expression: return expr_.evaluate({0.0, 0.0}, t).real();
    case Mode::Samples: return interpolate(times_, values_, t);
    }
    return 0.0;
}

ComplexPath ComplexPath::constant(cplx value)
{
    if (!(std::abs(value) <= 1.0 + 1e-12))
        throw InvalidArgument("tau must lie in the closed unit disk");
    ComplexPath p;
    p.value_ = value;
    return p;
}

ComplexPath ComplexPath::samples(std::vector<double> times, std::vector<cplx> values)
{
    check_samples(times, values.size());
    for (const cplx& v : values)
        if (!(std::abs(v) <= 1.0 + 1e-12))
            throw InvalidArgument("tau samples must lie in the closed unit disk");
    ComplexPath p;
    p.value_ = values.front();
    if (times.size() == 1)
        return p;
    p.times_ = std::move(times);
    p.values_ = std::move(values);
    return p;
}

cplx ComplexPath::operator()(double t) const
{
    if (times_.empty())
        return value_;
    return interpolate(times_, values_, t);
}

// ---------------------------------------------------------------------------

HerglotzDriver HerglotzDriver::berkson_porta(Field p, Field dp, ComplexPath tau,
                                            std::vector<double> breakpoints, std::string label)
{
    HerglotzDriver d;
    d.form_ = Form::BerksonPorta;
    d.field_ = std::move(p);
    d.dfield_ = std::move(dp);
    d.tau_zero_ = tau.is_identically_zero();
    d.breakpoints_ = merged(std::move(breakpoints), tau.knots());
    d.tau_fn_ = [tau = std::move(tau)](double t) { return tau(t); };
    d.label_ = std::move(label);
    return d;
}

HerglotzDriver HerglotzDriver::raw(Field g, Field dg, std::vector<double> breakpoints, std::string label)
{
    HerglotzDriver d;
    d.form_ = Form::Raw;
    d.field_ = std::move(g);
    d.dfield_ = std::move(dg);
    d.breakpoints_ = merged(std::move(breakpoints), {});
    d.label_ = std::move(label);
    return d;
}

HerglotzDriver HerglotzDriver::piecewise(std::vector<std::pair<double, HerglotzDriver>> pieces,
                                         bool declare_breakpoints)
{
    if (pieces.empty())
        throw InvalidArgument("piecewise driver needs at least one piece");
    std::sort(pieces.begin(), pieces.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    auto shared = std::make_shared<const std::vector<std::pair<double, HerglotzDriver>>>(std::move(pieces));
    auto at = [shared](double t) -> const HerglotzDriver& {
        const auto& v = *shared;
        std::size_t k = 0;
        while (k + 1 < v.size() && v[k + 1].first <= t)
            ++k;
        return v[k].second;
    };

    const bool all_bp = std::all_of(shared->begin(), shared->end(),
                                    [](const auto& pc) { return pc.second.form_ == Form::BerksonPorta; });
    HerglotzDriver d;
    d.form_ = all_bp ? Form::BerksonPorta : Form::Raw;
    if (all_bp) {
        d.field_ = [at](cplx z, double t) { return at(t).field_(z, t); };
        d.dfield_ = [at](cplx z, double t) { return at(t).field_dz(z, t); };
        d.tau_fn_ = [at](double t) { return at(t).tau(t); };
    } else {
        d.field_ = [at](cplx z, double t) { return at(t).vector_field(z, t); };
        d.dfield_ = [at](cplx z, double t) { return at(t).vector_field_dz(z, t); };
    }
    d.tau_zero_ = std::all_of(shared->begin(), shared->end(),
                              [](const auto& pc) { return pc.second.tau_identically_zero(); });

    std::vector<double> bps;
    std::string label = "piecewise[";
    for (std::size_t k = 0; k < shared->size(); ++k) {
        const auto& [start, piece] = (*shared)[k];
        const double end = k + 1 < shared->size() ? (*shared)[k + 1].first
                                                   : std::numeric_limits<double>::infinity();
        if (declare_breakpoints && k > 0)
            bps.push_back(start);
        for (double b : piece.breakpoints_)
            if (b > start && b < end)
                bps.push_back(b);
        label += (k ? "," : "") + piece.label_;
    }
    d.breakpoints_ = merged(std::move(bps), {});
    d.label_ = label + "]";
    return d;
}

cplx HerglotzDriver::field_dz(cplx z, double t) const
{
    if (dfield_)
        return dfield_(z, t);
    const double h = 1e-6;
    const cplx hh{h, 0.0};
    return (-field_(z + 2.0 * hh, t) + 8.0 * field_(z + hh, t) - 8.0 * field_(z - hh, t)
            + field_(z - 2.0 * hh, t)) / (12.0 * h);
}

cplx HerglotzDriver::vector_field(cplx z, double t) const
{
    try {
        if (form_ == Form::Raw)
            return field_(z, t);
        const cplx tau = tau_fn_(t);
        return (z - tau) * (std::conj(tau) * z - 1.0) * field_(z, t);
    } catch (const DomainError& e) {
        throw DomainError(e.what() + where(z, t), e.subexpression);
    }
}

cplx HerglotzDriver::vector_field_dz(cplx z, double t) const
{
    if (!dfield_)
        return vector_field_dz_numeric(z, t);
    try {
        if (form_ == Form::Raw)
            return dfield_(z, t);
        const cplx tau = tau_fn_(t);
        const cplx tb = std::conj(tau);
        const cplx p = field_(z, t);
        return ((tb * z - 1.0) + (z - tau) * tb) * p + (z - tau) * (tb * z - 1.0) * dfield_(z, t);
    } catch (const DomainError& e) {
        throw DomainError(e.what() + where(z, t), e.subexpression);
    }
}

cplx HerglotzDriver::vector_field_dz_numeric(cplx z, double t, double h) const
{
    const cplx hh{h, 0.0};
    return (-vector_field(z + 2.0 * hh, t) + 8.0 * vector_field(z + hh, t)
            - 8.0 * vector_field(z - hh, t) + vector_field(z - 2.0 * hh, t)) / (12.0 * h);
}

cplx HerglotzDriver::herglotz(cplx z, double t) const
{
    if (form_ != Form::BerksonPorta)
        throw InvalidArgument("driver '" + label_ + "' has no Berkson–Porta data");
    try {
        return field_(z, t);
    } catch (const DomainError& e) {
        throw DomainError(e.what() + where(z, t), e.subexpression);
    }
}

cplx HerglotzDriver::tau(double t) const
{
    if (form_ != Form::BerksonPorta)
        throw InvalidArgument("driver '" + label_ + "' has no Berkson–Porta data");
    return tau_fn_(t);
}

bool HerglotzDriver::tau_identically_zero() const noexcept
{
    return form_ == Form::BerksonPorta && tau_zero_;
}

// ---------------------------------------------------------------------------

HerglotzDriver constant_driver(cplx c, cplx tau0)
{
    if (c.real() < -kHerglotzSlack)
        throw InvalidArgument("constant Herglotz data needs Re c >= 0");
    std::ostringstream label;
    label << "constant(c=" << c << ",tau=" << tau0 << ")";
    return HerglotzDriver::berkson_porta([c](cplx, double) { return c; },
                                         [](cplx, double) { return cplx{0.0, 0.0}; },
                                         ComplexPath::constant(tau0), {}, label.str());
}

HerglotzDriver radial_driver(TimeFunction theta)
{
    auto knots = theta.knots();
    auto p = [theta](cplx z, double t) {
        const cplx k = std::polar(1.0, theta(t));
        return (k + z) / (k - z);
    };
    auto dp = [theta](cplx z, double t) {
        const cplx k = std::polar(1.0, theta(t));
        const cplx d = k - z;
        return 2.0 * k / (d * d);
    };
    return HerglotzDriver::berkson_porta(p, dp, ComplexPath::constant(0.0), std::move(knots), "radial");
}

HerglotzDriver chordal_driver(TimeFunction xi)
{
    auto knots = xi.knots();
    // G(z) = G_H(C(z)) / C'(z) with G_H(w) = 2/(xi - w) and C'(z) = 2i/(1-z)^2.
    auto g = [xi](cplx z, double t) {
        const cplx u = kI * (1.0 + z) / (1.0 - z);
        const cplx om = 1.0 - z;
        return om * om / (kI * (xi(t) - u));
    };
    auto dg = [xi](cplx z, double t) {
        const cplx u = kI * (1.0 + z) / (1.0 - z);
        const cplx e = xi(t) - u;
        return (2.0 * kI * (1.0 - z) * e + 2.0) / (e * e);
    };
    return HerglotzDriver::raw(g, dg, std::move(knots), "chordal");
}

HerglotzDriver expression_driver(const Expr& p, ComplexPath tau)
{
    Expr dp = p.differentiate_z();
    return HerglotzDriver::berkson_porta([p](cplx z, double t) { return p.evaluate(z, t); },
                                         [dp](cplx z, double t) { return dp.evaluate(z, t); },
                                         std::move(tau), {}, "bp(" + p.print() + ")");
}

// ---------------------------------------------------------------------------

ValidationReport validate(const HerglotzDriver& d, const ValidationGrid& grid)
{
    ValidationReport rep;
    rep.herglotz_applicable = d.form() == HerglotzDriver::Form::BerksonPorta;
    rep.min_re_p = std::numeric_limits<double>::infinity();
    constexpr double two_pi = 2.0 * std::numbers::pi;

    std::vector<double> times = grid.times;
    for (double b : d.breakpoints())
        times.push_back(b);

    if (rep.herglotz_applicable) {
        for (double t : times) {
            const double m = std::abs(d.tau(t));
            rep.max_abs_tau = std::max(rep.max_abs_tau, m);
        }
        if (rep.max_abs_tau > 1.0 + 1e-12) {
            rep.pass = false;
            rep.failures.push_back("tau leaves the closed unit disk");
        }
    }

    bool derivative_warned = false;
    for (double r : grid.radii) {
        double max_g = 0.0;
        for (int k = 0; k < grid.angles; ++k) {
            const cplx z = std::polar(r, two_pi * k / grid.angles);
            for (double t : times) {
                try {
                    if (rep.herglotz_applicable)
                        rep.min_re_p = std::min(rep.min_re_p, d.herglotz(z, t).real());
                    max_g = std::max(max_g, std::abs(d.vector_field(z, t)));
                    if (!derivative_warned) {
                        const cplx d1 = d.vector_field_dz_numeric(z, t, 1e-6);
                        const cplx d2 = d.vector_field_dz_numeric(z, t, 2e-6);
                        const double scale = std::max(1.0, std::abs(d1));
                        if (std::abs(d1 - d2) > 1e-5 * scale) {
                            rep.warnings.push_back("finite-difference derivative unstable" + where(z, t));
                            derivative_warned = true;
                        } else if (d.has_analytic_derivative()
                                   && std::abs(d.vector_field_dz(z, t) - d1) > 1e-5 * scale) {
                            rep.warnings.push_back("analytic derivative disagrees with finite difference"
                                                   + where(z, t));
                            derivative_warned = true;
                        }
                    }
                } catch (const DomainError& e) {
                    rep.pass = false;
                    rep.failures.push_back(e.what());
                }
            }
        }
        rep.max_abs_g.emplace_back(r, max_g);
        if (!std::isfinite(max_g)) {
            rep.pass = false;
            rep.failures.push_back("vector field not finite on radius " + std::to_string(r));
        }
    }

    if (rep.herglotz_applicable && rep.min_re_p < -kHerglotzSlack) {
        rep.pass = false;
        std::ostringstream os;
        os.precision(17);
        os << "Re p < 0 (min Re p = " << rep.min_re_p << ")";
        rep.failures.push_back(os.str());
    }
    if (!rep.herglotz_applicable)
        rep.min_re_p = std::numeric_limits<double>::quiet_NaN();
    return rep;
}

} // namespace loewner
