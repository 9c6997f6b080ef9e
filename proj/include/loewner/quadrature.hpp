#pragma once

#include "loewner/errors.hpp"

#include <functional>
#include <span>

namespace loewner {

/// Adaptive Gauss–Kronrod (7/15) integral of f over [a, b], split at every
/// break point inside the interval.
[[nodiscard]] double integrate(const std::function<double(double)>& f, double a, double b,
                               std::span<const double> breaks = {}, double tol = 1e-13);

[[nodiscard]] cplx integrate_complex(const std::function<cplx(double)>& f, double a, double b,
                             std::span<const double> breaks = {}, double tol = 1e-13);

/// Integral of g along the straight segment from z0 to z1.
[[nodiscard]] cplx integrate_segment(const std::function<cplx(cplx)>& g, cplx z0, cplx z1,
                                     double tol = 1e-13);

} // namespace loewner
