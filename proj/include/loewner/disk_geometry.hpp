#pragma once

#include "loewner/errors.hpp"

namespace loewner {

// Points closer than this to the unit circle are rejected by DiskPoint.
inline constexpr double kBoundaryEpsilon = 1e-12;

class DiskPoint {
public:
    explicit DiskPoint(cplx z);
    [[nodiscard]] cplx value() const noexcept { return z_; }

private:
    cplx z_;
};

/// Möbius automorphism z -> (b z + a) / (1 + b conj(a) z) of the unit disk.
///
/// `b` is projected onto the unit circle at construction, so any nonzero
/// rotation factor is accepted.
class DiskAutomorphism {
public:
    DiskAutomorphism() = default;
    DiskAutomorphism(cplx a, cplx b);

    [[nodiscard]] cplx a() const noexcept { return a_; }
    [[nodiscard]] cplx b() const noexcept { return b_; }

    [[nodiscard]] cplx apply(cplx z) const noexcept;
    [[nodiscard]] cplx inverse_apply(cplx z) const noexcept;
    [[nodiscard]] cplx derivative(cplx z) const noexcept;

private:
    cplx a_{0.0, 0.0};
    cplx b_{1.0, 0.0};
};

/// |z - w| / |1 - conj(w) z|
[[nodiscard]] double pseudo_hyperbolic(cplx z, cplx w) noexcept;

/// log((1 + d) / (1 - d)) with d the pseudo-hyperbolic distance (no 1/2 factor).
[[nodiscard]] double hyperbolic_distance(cplx z, cplx w) noexcept;

/// Radius r of the Euclidean disk centred at 0 whose hyperbolic radius is R.
[[nodiscard]] double hyperbolic_to_euclidean_radius(double R) noexcept;

// Cayley transform C(z) = i(1+z)/(1-z): disk -> upper half-plane, 1 -> infinity.
[[nodiscard]] cplx cayley_to_halfplane(cplx z);
[[nodiscard]] cplx cayley_from_halfplane(cplx w);
[[nodiscard]] cplx cayley_derivative(cplx z) noexcept;

} // namespace loewner
