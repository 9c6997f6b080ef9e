#include "loewner/evolution.hpp"

#include "loewner/detail/dopri.hpp"

#include <algorithm>
#include <cmath>

namespace loewner {

void EvolutionConfig::check() const
{
    if (!(rel_tol > 0.0 && abs_tol > 0.0 && max_step > 0.0 && boundary_guard > 0.0))
        throw InvalidArgument("evolution tolerances must be positive");
    if (!(boundary_guard < 1e-3))
        throw InvalidArgument("boundary_guard must be below 1e-3");
}

namespace {

void check_call(cplx z, double s, double t, const EvolutionConfig& cfg)
{
    cfg.check();
    if (!(s >= 0.0) || !(t >= s))
        throw InvalidArgument("evolution requires 0 <= s <= t");
    if (!(std::abs(z) < 1.0 - cfg.boundary_guard))
        throw InvalidArgument("starting point too close to the unit circle");
}

// Merged stop list: breakpoints strictly inside (s, t_end) plus requested
// output times. `output_slot[k]` maps stop k to an output index or -1.
struct StopPlan {
    std::vector<double> stops;
    std::vector<int> output_slot;
};

StopPlan plan_stops(const HerglotzDriver& d, double s, std::span<const double> outputs)
{
    const double t_end = outputs.empty() ? s : outputs.back();
    std::vector<std::pair<double, int>> all;
    for (double b : d.breakpoints())
        if (b > s && b < t_end)
            all.emplace_back(b, -1);
    for (std::size_t k = 0; k < outputs.size(); ++k)
        all.emplace_back(outputs[k], static_cast<int>(k));
    std::stable_sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.first < b.first; });
    StopPlan plan;
    for (auto& [time, slot] : all) {
        plan.stops.push_back(time);
        plan.output_slot.push_back(slot);
    }
    return plan;
}

template <std::size_t N>
std::vector<EvolutionResult> run(const HerglotzDriver& d, cplx z, double s,
                                 std::span<const double> outputs, const EvolutionConfig& cfg)
{
    static_assert(N == 1 || N == 2);
    for (std::size_t k = 0; k < outputs.size(); ++k)
        if (!(outputs[k] >= s) || (k && outputs[k] < outputs[k - 1]))
            throw InvalidArgument("output times must be ascending and >= s");

    std::vector<EvolutionResult> out(outputs.size());
    detail::State<N> y{};
    y[0] = z;
    if constexpr (N == 2)
        y[1] = 1.0;
    double max_abs = std::abs(z);
    long steps = 0;

    auto emit = [&](std::size_t slot) {
        EvolutionResult r;
        r.w = y[0];
        if constexpr (N == 2)
            r.v = y[1];
        r.steps = steps;
        r.max_abs_w = max_abs;
        out[slot] = r;
    };

    // Outputs at t == s are the identity.
    std::size_t first = 0;
    while (first < outputs.size() && outputs[first] == s)
        emit(first++);
    if (first == outputs.size())
        return out;

    const StopPlan plan = plan_stops(d, s, outputs.subspan(first));
    detail::Tolerances<N> tol;
    tol.rel = cfg.rel_tol;
    tol.abs.fill(cfg.abs_tol);
    tol.max_step = cfg.max_step;

    auto rhs = [&d](double t, const detail::State<N>& st) {
        detail::State<N> f;
        f[0] = d.vector_field(st[0], t);
        if constexpr (N == 2)
            f[1] = d.vector_field_dz(st[0], t) * st[1];
        return f;
    };
    const double limit = 1.0 - cfg.boundary_guard;
    auto inside = [](const detail::State<N>& st) { return std::abs(st[0]) < 1.0; };
    auto guarded = [&](const detail::State<N>& st) {
        const double m = std::abs(st[0]);
        max_abs = std::max(max_abs, m);
        return m < limit;
    };
    auto escape = [](double t, const detail::State<N>& st) { throw BoundaryEscape(t, st[0]); };
    // The integrator reports a repeated stop time once.
    auto on_stop = [&](std::size_t k, double, const detail::State<N>&) {
        for (std::size_t j = k; j < plan.stops.size() && plan.stops[j] == plan.stops[k]; ++j)
            if (plan.output_slot[j] >= 0)
                emit(first + static_cast<std::size_t>(plan.output_slot[j]));
        return true;
    };

    // Stops equal to the final time never fire; handle the tail explicitly.
    const double t_end = outputs.back();
    const auto stats = detail::dopri_integrate<N>(rhs, y, s, t_end, plan.stops, tol, inside, guarded,
                                                  escape, on_stop);
    steps = stats.steps;
    for (std::size_t k = first; k < outputs.size(); ++k)
        if (outputs[k] == t_end)
            emit(k);
    return out;
}

} // namespace

EvolutionResult evolve_point(const HerglotzDriver& d, cplx z, double s, double t, const EvolutionConfig& cfg)
{
    check_call(z, s, t, cfg);
    const double times[] = {t};
    return run<1>(d, z, s, times, cfg).front();
}

EvolutionResult evolve_with_derivative(const HerglotzDriver& d, cplx z, double s, double t,
                                       const EvolutionConfig& cfg)
{
    check_call(z, s, t, cfg);
    const double times[] = {t};
    return run<2>(d, z, s, times, cfg).front();
}

std::vector<EvolutionResult> evolve_through(const HerglotzDriver& d, cplx z, double s,
                                            std::span<const double> times, bool with_derivative,
                                            const EvolutionConfig& cfg)
{
    check_call(z, s, times.empty() ? s : times.back(), cfg);
    if (times.empty())
        return {};
    return with_derivative ? run<2>(d, z, s, times, cfg) : run<1>(d, z, s, times, cfg);
}

std::vector<PointOutcome> evolve_grid(const HerglotzDriver& d, std::span<const cplx> points, double s,
                                      double t, const EvolutionConfig& cfg, bool with_derivative,
                                      Execution exec)
{
    std::vector<PointOutcome> out(points.size());
    auto one = [&](std::size_t k) {
        try {
            out[k].result = with_derivative ? evolve_with_derivative(d, points[k], s, t, cfg)
                                            : evolve_point(d, points[k], s, t, cfg);
        } catch (const std::exception& e) {
            out[k].error = e.what();
        }
    };
    const auto n = static_cast<long>(points.size());
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

std::vector<std::pair<double, cplx>> trajectory(const HerglotzDriver& d, cplx z, double s, double t, int n,
                                                const EvolutionConfig& cfg)
{
    if (n < 2)
        throw InvalidArgument("trajectory needs at least two samples");
    std::vector<double> times(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        times[static_cast<std::size_t>(k)] = k == n - 1 ? t : s + k * (t - s) / (n - 1);
    const auto res = evolve_through(d, z, s, times, false, cfg);
    std::vector<std::pair<double, cplx>> out;
    out.reserve(res.size());
    for (std::size_t k = 0; k < res.size(); ++k)
        out.emplace_back(times[k], res[k].w);
    return out;
}

} // namespace loewner
