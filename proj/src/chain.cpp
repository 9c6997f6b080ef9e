#include "loewner/chain.hpp"

#include "loewner/detail/dopri.hpp"
#include "loewner/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace loewner {

namespace {

// Absolute tolerance for the derivative component, which decays to zero and
// must be resolved to full relative accuracy.
constexpr double kTinyAbs = 1e-250;

// 1 - |a|^2 without cancellation near the circle.
double one_minus_abs2(cplx a)
{
    const double r = std::abs(a);
    return (1.0 - r) * (1.0 + r);
}

std::vector<double> stop_list(const HerglotzDriver& d, double s, std::span<const double> extra, double t_end)
{
    std::vector<double> stops;
    for (double b : d.breakpoints())
        if (b > s && b < t_end)
            stops.push_back(b);
    for (double x : extra)
        if (x > s && x <= t_end)
            stops.push_back(x);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    return stops;
}

// Integrates (a, a') with a(0) = 0, a'(0) = 1 from 0 up to the last entry of
// `times`, calling `visit(k, a, d)` at each time; `visit` returning false ends
// the pass. BoundaryEscape propagates to the caller.
template <class Visit>
void run_frames(const HerglotzDriver& d, std::span<const double> times, const EvolutionConfig& cfg,
                Visit&& visit)
{
    cfg.check();
    detail::State<2> y{cplx{0.0, 0.0}, cplx{1.0, 0.0}};
    std::size_t next = 0;
    while (next < times.size() && times[next] <= 0.0)
        if (!visit(next++, y[0], y[1]))
            return;
    if (next == times.size())
        return;

    const double t_end = times.back();
    const std::vector<double> stops = stop_list(d, 0.0, times.subspan(next), t_end);
    detail::Tolerances<2> tol;
    tol.rel = cfg.rel_tol;
    tol.abs = {cfg.abs_tol, kTinyAbs};
    tol.max_step = cfg.max_step;
    auto rhs = [&d](double t, const detail::State<2>& st) {
        return detail::State<2>{d.vector_field(st[0], t), d.vector_field_dz(st[0], t) * st[1]};
    };
    const double limit = 1.0 - cfg.boundary_guard;
    auto inside = [](const detail::State<2>& st) { return std::abs(st[0]) < 1.0; };
    auto guarded = [limit](const detail::State<2>& st) { return std::abs(st[0]) < limit; };
    auto escape = [](double t, const detail::State<2>& st) { throw BoundaryEscape(t, st[0]); };
    bool stopped = false;
    auto on_stop = [&](std::size_t, double time, const detail::State<2>& st) {
        while (next < times.size() && times[next] == time)
            if (!visit(next++, st[0], st[1])) {
                stopped = true;
                return false;
            }
        return true;
    };
    detail::dopri_integrate<2>(rhs, y, 0.0, t_end, stops, tol, inside, guarded, escape, on_stop);
    while (!stopped && next < times.size())
        if (!visit(next++, y[0], y[1]))
            return;
}

DecompositionFrame make_frame(double t, cplx a, cplx deriv)
{
    DecompositionFrame f;
    f.t = t;
    f.a = a;
    const double m = std::abs(deriv);
    f.b = deriv / m;
    f.beta = std::min(1.0, m / one_minus_abs2(a));
    return f;
}

// Neville extrapolation to 1/T = 0 for horizons that double: column j removes
// the T^{-j} term.
class Extrapolation {
public:
    explicit Extrapolation(int depth) : depth_(std::max(depth, 0)) {}

    template <class V>
    V push(V value);

    [[nodiscard]] std::size_t size() const noexcept { return rows_; }

private:
    int depth_;
    std::size_t rows_ = 0;
    std::vector<cplx> prev_, cur_;
};

template <class V>
V Extrapolation::push(V value)
{
    const int cols = std::min<int>(static_cast<int>(rows_), depth_);
    cur_.assign(static_cast<std::size_t>(cols) + 1, cplx{});
    cur_[0] = value;
    for (int j = 1; j <= cols; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        cur_[ju] = cur_[ju - 1] + (cur_[ju - 1] - prev_[ju - 1]) / (std::ldexp(1.0, j) - 1.0);
    }
    prev_.swap(cur_);
    ++rows_;
    if constexpr (std::is_same_v<V, double>)
        return prev_.back().real();
    else
        return prev_.back();
}

void check_chain_call(double s, cplx z, const ChainOptions& opt)
{
    opt.evolution.check();
    if (!(opt.tol > 0.0) || !(opt.t_max > 0.0))
        throw InvalidArgument("chain tolerance and t_max must be positive");
    if (!(s >= 0.0))
        throw InvalidArgument("chain time must be non-negative");
    if (!(std::abs(z) < 1.0 - opt.evolution.boundary_guard))
        throw InvalidArgument("chain argument too close to the unit circle");
}

// a = phi_{0,T}(0), d = phi'_{0,T}(0), g = (w - a)/d with w = phi_{s,T}(z).
// Scaling the offset by d keeps g of the size of the chain value, so its
// right-hand side carries bounded rounding noise even when w - a is tiny.
struct Augmented {
    cplx a, d, g;
};

// Value of h_T^{-1}(w) / beta(T).
cplx chain_estimate(const Augmented& st)
{
    const double m = one_minus_abs2(st.a);
    return st.g * (m / (m - std::conj(st.a) * st.g * st.d));
}

// Integrates (a, d, g) from s through every horizon in `horizons`,
// calling `visit(k, state)` at horizon k until it returns false.
template <class Visit>
void run_augmented(const HerglotzDriver& d, double s, cplx z, std::span<const double> horizons,
                   const EvolutionConfig& cfg, Visit&& visit)
{
    cplx a{0.0, 0.0}, da{1.0, 0.0};
    if (s > 0.0) {
        const double ts[] = {s};
        run_frames(d, ts, cfg, [&](std::size_t, cplx aa, cplx dd) {
            a = aa;
            da = dd;
            return true;
        });
    }
    detail::State<3> y{a, da, (z - a) / da};
    const double t_end = horizons.back();
    const std::vector<double> stops = stop_list(d, s, horizons, t_end);
    detail::Tolerances<3> tol;
    tol.rel = cfg.rel_tol;
    tol.abs = {cfg.abs_tol, kTinyAbs, cfg.abs_tol};
    tol.max_step = cfg.max_step;
    auto rhs = [&d](double t, const detail::State<3>& st) {
        const cplx ga = d.vector_field(st[0], t);
        const cplx gz = d.vector_field_dz(st[0], t);
        const cplx dg = (d.vector_field(st[0] + st[2] * st[1], t) - ga) / st[1] - st[2] * gz;
        return detail::State<3>{ga, gz * st[1], dg};
    };
    const double limit = 1.0 - cfg.boundary_guard;
    auto inside = [](const detail::State<3>& st) {
        return std::abs(st[0]) < 1.0 && std::abs(st[0] + st[2] * st[1]) < 1.0;
    };
    auto guarded = [limit](const detail::State<3>& st) {
        return std::abs(st[0]) < limit && std::abs(st[0] + st[2] * st[1]) < limit;
    };
    auto escape = [](double t, const detail::State<3>& st) { throw BoundaryEscape(t, st[0] + st[2] * st[1]); };
    std::size_t next = 0;
    bool stopped = false;
    auto on_stop = [&](std::size_t, double time, const detail::State<3>& st) {
        while (next < horizons.size() && horizons[next] == time)
            if (!visit(next++, Augmented{st[0], st[1], st[2]})) {
                stopped = true;
                return false;
            }
        return true;
    };
    detail::dopri_integrate<3>(rhs, y, s, t_end, stops, tol, inside, guarded, escape, on_stop);
    while (!stopped && next < horizons.size())
        if (!visit(next++, Augmented{y[0], y[1], y[2]}))
            return;
}

std::vector<double> horizon_schedule(double t0, double t_max)
{
    std::vector<double> hs{t0};
    while (hs.back() * 2.0 <= t_max * (1.0 + 1e-12))
        hs.push_back(hs.back() * 2.0);
    return hs;
}

// A-priori route for tau == 0: |f_s - f_{s,T}| <= |f_{s,T}| (exp(B) - 1) with
// B = 2 E(T) / (1 - |z|)^3, E(T) = exp(-int_0^T Re p(0,x) dx).
std::optional<ChainValue> tail_bound_value(const HerglotzDriver& d, double s, cplx z, double t0,
                                           const ChainOptions& opt)
{
    const auto re_p0 = [&d](double x) { return d.herglotz(0.0, x).real(); };
    const auto& bps = d.breakpoints();
    const double k3 = 2.0 / std::pow(1.0 - std::abs(z), 3);
    const double lambda_s = integrate(re_p0, 0.0, s, bps);
    // |f_s(z)| <= |z| exp(int_0^s Re p0) / (1 - |z|)^2 by the growth theorem.
    double f_guess = std::abs(z) * std::exp(lambda_s) / std::pow(1.0 - std::abs(z), 2);

    double T = t0;
    double lambda = integrate(re_p0, 0.0, T, bps);
    for (int attempt = 0; attempt < 64; ++attempt) {
        while (f_guess * std::expm1(k3 * std::exp(-lambda)) > 0.5 * opt.tol) {
            if (T * 2.0 > opt.t_max * (1.0 + 1e-12))
                return std::nullopt;
            lambda += integrate(re_p0, T, 2.0 * T, bps);
            T *= 2.0;
        }
        const double hz[] = {T};
        cplx f{};
        run_augmented(d, s, z, hz, opt.evolution, [&](std::size_t, const Augmented& st) {
            f = chain_estimate(st);
            return true;
        });
        const double tail = std::abs(f) * std::expm1(k3 * std::exp(-lambda));
        if (tail <= opt.tol)
            return ChainValue{s, z, f, T, tail};
        f_guess = std::max(f_guess * 2.0, std::abs(f));
    }
    return std::nullopt;
}

} // namespace

EvolutionConfig chain_evolution_defaults()
{
    EvolutionConfig c;
    c.rel_tol = 1e-12;
    c.abs_tol = 1e-15;
    c.max_step = 0.5;
    c.boundary_guard = 1e-12;
    return c;
}

DecompositionFrame frame_at(const HerglotzDriver& d, double t, const EvolutionConfig& cfg)
{
    if (!(t >= 0.0))
        throw InvalidArgument("frame time must be non-negative");
    const double ts[] = {t};
    return frames_at(d, ts, cfg).front();
}

std::vector<DecompositionFrame> frames_at(const HerglotzDriver& d, std::span<const double> times,
                                          const EvolutionConfig& cfg)
{
    for (std::size_t k = 0; k < times.size(); ++k)
        if (!(times[k] >= 0.0) || (k && times[k] < times[k - 1]))
            throw InvalidArgument("frame times must be ascending and non-negative");
    std::vector<DecompositionFrame> out;
    out.reserve(times.size());
    run_frames(d, times, cfg, [&](std::size_t k, cplx a, cplx deriv) {
        out.push_back(times[k] == 0.0 ? DecompositionFrame{} : make_frame(times[k], a, deriv));
        return true;
    });
    return out;
}

double beta_z(const HerglotzDriver& d, cplx z, double t, const EvolutionConfig& cfg)
{
    if (t == 0.0)
        return 1.0;
    const auto r = evolve_with_derivative(d, z, 0.0, t, cfg);
    return std::min(1.0, one_minus_abs2(z) * std::abs(*r.v) / one_minus_abs2(r.w));
}

BetaLimit beta_limit(const HerglotzDriver& d, double tol, double t_max, const EvolutionConfig& cfg)
{
    if (!(tol > 0.0) || !(t_max >= 1.0))
        throw InvalidArgument("beta_limit needs tol > 0 and t_max >= 1");
    const std::vector<double> times = horizon_schedule(1.0, t_max);
    BetaLimit out;
    Extrapolation ex(5);
    double prev = 0.0, prev_raw = 0.0;
    try {
        run_frames(d, times, cfg, [&](std::size_t k, cplx a, cplx deriv) {
            const double raw = make_frame(times[k], a, deriv).beta;
            const double extrapolated = ex.push(raw);
            out.horizon = times[k];
            // As in chain_value: keep whichever of the raw and extrapolated sequences moved less.
            double est = extrapolated;
            if (k) {
                const double d_raw = std::abs(raw - prev_raw), d_est = std::abs(extrapolated - prev);
                est = d_raw <= d_est ? raw : extrapolated;
                out.last_delta = std::min(d_raw, d_est);
            } else {
                out.last_delta = std::abs(extrapolated);
            }
            prev = extrapolated;
            prev_raw = raw;
            // beta is non-increasing, so a raw value below tol bounds the limit.
            if (raw < tol) {
                out.beta = 0.0;
                out.converged = true;
                return false;
            }
            if (k >= 2 && out.last_delta < tol) {
                out.beta = est < tol ? 0.0 : std::clamp(est, 0.0, 1.0);
                out.converged = true;
                return false;
            }
            out.beta = std::clamp(est, 0.0, 1.0);
            return true;
        });
    } catch (const BoundaryEscape&) {
        // Samples gathered before the escape stand; convergence is judged on them.
    }
    return out;
}

ChainValue chain_value(const HerglotzDriver& d, double s, cplx z, const ChainOptions& opt)
{
    check_chain_call(s, z, opt);
    const double t0 = std::max({2.0 * s, 1.0, opt.min_horizon});

    if (opt.use_tail_bound && d.form() == HerglotzDriver::Form::BerksonPorta && d.tau_identically_zero())
        if (auto v = tail_bound_value(d, s, z, t0, opt))
            return *v;

    const std::vector<double> horizons = horizon_schedule(t0, opt.t_max);
    // Extrapolation in 1/T suits polynomial convergence (parabolic, boundary
    // cases); elliptic contraction converges exponentially and the raw values
    // settle long before the tableau does. Whichever sequence settles first wins.
    Extrapolation ex(opt.richardson_depth);
    cplx prev_raw{}, prev_est{};
    ChainValue out{s, z, {}, t0, std::numeric_limits<double>::infinity()};
    bool converged = false;
    std::string reason = "chain limit not reached by t_max";
    try {
        run_augmented(d, s, z, horizons, opt.evolution, [&](std::size_t k, const Augmented& st) {
            const cplx raw = chain_estimate(st);
            const cplx est = ex.push(raw);
            out.horizon = horizons[k];
            if (k) {
                const double d_raw = std::abs(raw - prev_raw);
                const double d_est = std::abs(est - prev_est);
                out.f = d_raw <= d_est ? raw : est;
                out.tail_estimate = std::min(d_raw, d_est);
            } else {
                out.f = est;
            }
            prev_raw = raw;
            prev_est = est;
            converged = k >= 1 && out.tail_estimate < opt.tol * std::max(1.0, std::abs(out.f));
            return !converged;
        });
    } catch (const BoundaryEscape& e) {
        reason = "chain limit not reached before the trajectory met the boundary";
    }
    if (!converged)
        throw NotConverged(reason, out.horizon, out.tail_estimate);
    return out;
}

std::vector<ChainOutcome> chain_grid(const HerglotzDriver& d, std::span<const double> s_values,
                                     std::span<const cplx> points, const ChainOptions& opt, Execution exec)
{
    const std::size_t np = points.size();
    std::vector<ChainOutcome> out(s_values.size() * np);
    auto one = [&](std::size_t k) {
        try {
            out[k].value = chain_value(d, s_values[k / np], points[k % np], opt);
        } catch (const std::exception& e) {
            out[k].error = e.what();
        }
    };
    const auto n = static_cast<long>(out.size());
    if (exec == Execution::Serial) {
        for (long k = 0; k < n; ++k)
            one(static_cast<std::size_t>(k));
    } else {
#pragma omp parallel for schedule(dynamic)
        for (long k = 0; k < n; ++k)
            one(static_cast<std::size_t>(k));
    }
    return out;
}

ChainEvaluator standard_chain(const HerglotzDriver& d, const ChainOptions& opt)
{
    return [d, opt](double s, cplx z) { return chain_value(d, s, z, opt).f; };
}

const char* to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::UniqueChain: return "UniqueChain";
    case Verdict::NonUnique: return "NonUnique";
    case Verdict::Unknown: return "Unknown";
    }
    return "Unknown";
}

ChainClassification classify(const HerglotzDriver& d, double tol, double t_max, const EvolutionConfig& cfg)
{
    ChainClassification c;
    std::ostringstream diag;
    diag.precision(6);
    const BetaLimit bl = beta_limit(d, tol, t_max, cfg);
    c.beta_limit = bl.beta;
    if (!bl.converged) {
        c.verdict = Verdict::Unknown;
        diag << "beta limit not converged at t=" << bl.horizon << " (last delta " << bl.last_delta << ")";
    } else if (bl.beta < kClassificationTolerance) {
        c.verdict = Verdict::UniqueChain;
    } else {
        c.verdict = Verdict::NonUnique;
        c.omega_radius = 1.0 / bl.beta;
    }

    // beta(t) = 1 exactly while phi_{0,t} is an automorphism; beta is non-increasing.
    const double level = 1.0 - kClassificationTolerance;
    auto beta_at = [&](double t) { return frame_at(d, t, cfg).beta; };
    double lo = 1e-3;
    if (beta_at(lo) > level) {
        double hi = lo;
        try {
            while (beta_at(hi) > level) {
                lo = hi;
                hi *= 2.0;
                if (hi > t_max) {
                    c.automorphic_throughout = true;
                    break;
                }
            }
            if (!c.automorphic_throughout) {
                while (hi - lo > 1e-9 * std::max(1.0, hi)) {
                    const double mid = 0.5 * (lo + hi);
                    (beta_at(mid) > level ? lo : hi) = mid;
                }
                c.automorphism_threshold = 0.5 * (lo + hi);
            }
        } catch (const Error& e) {
            diag << (diag.tellp() > 0 ? "; " : "") << "automorphism search stopped: " << e.what();
        }
        if (c.automorphic_throughout)
            diag << (diag.tellp() > 0 ? "; " : "") << "phi_{0,t} is an automorphism up to t_max";
    }
    c.diagnostics = diag.str();
    return c;
}

ChainEvaluator transported_chain(ChainEvaluator base, const Expr& h, double beta)
{
    if (!(beta > 0.0 && beta <= 1.0))
        throw InvalidArgument("transport requires 0 < beta <= 1");
    if (h.depends_on_t())
        throw InvalidArgument("transport map must not depend on t");
    const cplx h0 = h.evaluate(0.0, 0.0);
    if (std::abs(h0) > 1e-12)
        throw InvalidArgument("transport map must satisfy h(0) = 0");
    constexpr double eps = 1e-5;
    const cplx dh = (h.evaluate(eps, 0.0) - h.evaluate(-eps, 0.0)) / (2.0 * eps);
    if (std::abs(dh - 1.0) > 1e-6)
        throw InvalidArgument("transport map must satisfy h'(0) = 1");
    // Argument principle: an injective h covers each interior value once, so
    // the image of |w| = 0.99 winds exactly once around it.
    constexpr int n = 2048;
    std::vector<cplx> img;
    for (int k = 0; k < n; ++k)
        img.push_back(h.evaluate(std::polar(0.99, 2.0 * std::numbers::pi * k / n), 0.0));
    auto winds_once = [&img](cplx v) {
        double turn = 0.0;
        for (std::size_t k = 0; k < img.size(); ++k)
            turn += std::arg((img[(k + 1) % img.size()] - v) / (img[k] - v));
        return std::lround(turn / (2.0 * std::numbers::pi)) == 1;
    };
    for (double r : {0.0, 0.3, 0.6, 0.9})
        for (int k = 0; k < (r == 0.0 ? 1 : 16); ++k)
            if (!winds_once(h.evaluate(std::polar(r, 2.0 * std::numbers::pi * k / 16), 0.0)))
                throw InvalidArgument("transport map is not injective on the disk");

    return [base = std::move(base), h, beta](double s, cplx z) {
        const cplx w = beta * base(s, z);
        if (!(std::abs(w) < 1.0))
            throw DomainError("transported chain argument left the unit disk", h.print());
        return h.evaluate(w, 0.0) / beta;
    };
}

cplx induced_evolution(const ChainEvaluator& f, double s, double t, cplx z, double tol)
{
    if (!(s >= 0.0) || !(t >= s))
        throw InvalidArgument("induced evolution requires 0 <= s <= t");
    if (!(std::abs(z) < 1.0))
        throw InvalidArgument("induced evolution requires |z| < 1");
    if (s == t)
        return z;
    const cplx target = f(s, z);
    auto residual = [&](cplx w) { return f(t, w) - target; };

    constexpr int kMaxIterations = 100;
    constexpr double eta = 1e-6;
    std::vector<cplx> iterates{z};
    cplx w = z;
    cplx r = residual(w);
    for (int it = 0; it < kMaxIterations; ++it) {
        if (std::abs(r) <= tol)
            return w;
        const cplx df = (f(t, w + eta) - f(t, w - eta)) / (2.0 * eta);
        const cplx step = -r / df;
        double lambda = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 40 && !accepted; ++halving, lambda *= 0.5) {
            const cplx w_new = w + lambda * step;
            if (!(std::abs(w_new) < 1.0 - 1e-9))
                continue;
            cplx r_new;
            try {
                r_new = residual(w_new);
            } catch (const Error&) {
                continue;
            }
            if (std::abs(r_new) < std::abs(r)) {
                w = w_new;
                r = r_new;
                accepted = true;
            }
        }
        if (!accepted)
            break;
        iterates.push_back(w);
    }
    if (std::abs(r) <= tol)
        return w;
    throw NewtonStall("induced evolution: Newton iteration did not reach the tolerance", std::move(iterates));
}

} // namespace loewner
