#pragma once

#include "loewner/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

namespace loewner::detail {

template <std::size_t N>
using State = std::array<cplx, N>;

template <std::size_t N>
struct Tolerances {
    double rel = 1e-10;
    std::array<double, N> abs{};
    double max_step = 0.1;
    double min_step = 1e-14;
};

struct IntegrationStats {
    long steps = 0;
    long rejected = 0;
};

// Dormand–Prince 5(4) with a PI step-size controller.
//
// Integration from s to t is split at every entry of `stops` lying in (s, t);
// `on_stop(index, time, state)` fires when a stop is reached; returning false
// ends the integration there. Stage times are
// clamped to the open left side of each segment so data that jumps at a stop
// is always sampled from the segment being integrated.
//
// `inside(state)` is false for states where the right-hand side is undefined;
// such a stage rejects the step. An accepted state failing `guarded(state)`
// is handed to `escape(time, state)`, which is expected to throw.
template <std::size_t N, class Rhs, class Inside, class Guarded, class Escape, class OnStop>
IntegrationStats dopri_integrate(Rhs&& rhs, State<N>& y, double s, double t,
                                 std::span<const double> stops, const Tolerances<N>& tol,
                                 Inside&& inside, Guarded&& guarded, Escape&& escape,
                                 OnStop&& on_stop)
{
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    IntegrationStats stats;
    if (!(t > s))
        return stats;

    double h = std::min({tol.max_step, t - s, 1e-2});
    double err_prev = 1e-4;
    double cur = s;
    std::size_t next_stop = 0;
    while (next_stop < stops.size() && stops[next_stop] <= s)
        ++next_stop;

    State<N> k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
    auto combine = [&](auto&& fn) {
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = fn(i);
    };

    while (cur < t) {
        const bool at_stop = next_stop < stops.size() && stops[next_stop] < t;
        const double seg_end = at_stop ? stops[next_stop] : t;
        const double left = std::nextafter(seg_end, cur);
        auto clamp_t = [&](double x) { return std::min(x, left); };

        k1 = rhs(cur, y);
        bool reject_after = false;
        while (cur < seg_end) {
            const double remaining = seg_end - cur;
            const bool last = h >= remaining * (1.0 - 1e-12);
            const double hs = last ? remaining : h;
            if (hs < tol.min_step && !last)
                throw StepUnderflow(cur);

            bool stage_ok = true;
            auto stage = [&](double c, auto&& fn, State<N>& out) {
                combine(fn);
                if (!inside(tmp)) {
                    stage_ok = false;
                    return;
                }
                out = rhs(clamp_t(cur + c * hs), tmp);
            };
            stage(c2, [&](std::size_t i) { return y[i] + hs * (a21 * k1[i]); }, k2);
            if (stage_ok)
                stage(c3, [&](std::size_t i) { return y[i] + hs * (a31 * k1[i] + a32 * k2[i]); }, k3);
            if (stage_ok)
                stage(c4, [&](std::size_t i) {
                    return y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
                }, k4);
            if (stage_ok)
                stage(c5, [&](std::size_t i) {
                    return y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
                }, k5);
            if (stage_ok)
                stage(1.0, [&](std::size_t i) {
                    return y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i]
                                        + a65 * k5[i]);
                }, k6);
            double err = 0.0;
            if (stage_ok) {
                for (std::size_t i = 0; i < N; ++i)
                    ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
                if (!inside(ynew)) {
                    stage_ok = false;
                } else {
                    k7 = rhs(clamp_t(cur + hs), ynew);
                    for (std::size_t i = 0; i < N; ++i) {
                        const cplx e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i]
                                             + e6 * k6[i] + e7 * k7[i]);
                        const double sc = tol.abs[i] + tol.rel * std::max(std::abs(y[i]), std::abs(ynew[i]));
                        err = std::max(err, std::abs(e) / sc);
                    }
                    if (!std::isfinite(err))
                        stage_ok = false;
                }
            }
            if (!stage_ok) {
                // Left the admissible region mid-step: retry with a smaller step.
                ++stats.rejected;
                if (hs <= tol.min_step) {
                    escape(cur, y);
                    throw StepUnderflow(cur);
                }
                h = hs * 0.25;
                reject_after = true;
                continue;
            }

            if (err <= 1.0) {
                ++stats.steps;
                y = ynew;
                cur = last ? seg_end : cur + hs;
                double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.17) * std::pow(err_prev, 0.04);
                fac = std::clamp(fac, 0.2, reject_after ? 1.0 : 10.0);
                err_prev = std::max(err, 1e-4);
                reject_after = false;
                // A step shortened to hit a stop does not shrink the proposal.
                h = std::min(tol.max_step, last ? std::max(h, hs * fac) : hs * fac);
                if (!guarded(y))
                    escape(cur, y);
                k1 = k7;
            } else {
                ++stats.rejected;
                h = hs * std::max(0.2, 0.9 * std::pow(err, -0.2));
                reject_after = true;
            }
        }
        if (at_stop) {
            if (!on_stop(next_stop, cur, y))
                return stats;
            ++next_stop;
            while (next_stop < stops.size() && stops[next_stop] <= cur)
                ++next_stop;
        }
    }
    return stats;
}

} // namespace loewner::detail
