#include "loewner/disk_geometry.hpp"

#include <cmath>

namespace loewner {

namespace {
constexpr cplx kI{0.0, 1.0};
}

DiskPoint::DiskPoint(cplx z) : z_(z)
{
    if (!(std::abs(z) < 1.0 - kBoundaryEpsilon))
        throw InvalidArgument("point is not strictly inside the unit disk");
}

DiskAutomorphism::DiskAutomorphism(cplx a, cplx b) : a_(a)
{
    if (!(std::abs(a) < 1.0))
        throw InvalidArgument("automorphism centre must satisfy |a| < 1");
    const double nb = std::abs(b);
    if (!(nb > 0.0) || !std::isfinite(nb))
        throw InvalidArgument("automorphism rotation factor must be nonzero");
    b_ = b / nb;
}

cplx DiskAutomorphism::apply(cplx z) const noexcept
{
    return (b_ * z + a_) / (1.0 + b_ * std::conj(a_) * z);
}

cplx DiskAutomorphism::inverse_apply(cplx z) const noexcept
{
    return std::conj(b_) * (z - a_) / (1.0 - std::conj(a_) * z);
}

cplx DiskAutomorphism::derivative(cplx z) const noexcept
{
    const cplx den = 1.0 + b_ * std::conj(a_) * z;
    return b_ * (1.0 - std::norm(a_)) / (den * den);
}

double pseudo_hyperbolic(cplx z, cplx w) noexcept
{
    return std::abs(z - w) / std::abs(1.0 - std::conj(w) * z);
}

double hyperbolic_distance(cplx z, cplx w) noexcept
{
    const double d = pseudo_hyperbolic(z, w);
    // log1p keeps relative precision for nearby points.
    return std::log1p(d) - std::log1p(-d);
}

double hyperbolic_to_euclidean_radius(double R) noexcept
{
    return std::tanh(R / 2.0);
}

cplx cayley_to_halfplane(cplx z)
{
    if (z == cplx{1.0, 0.0})
        throw InvalidArgument("Cayley transform is singular at z = 1");
    return kI * (1.0 + z) / (1.0 - z);
}

cplx cayley_from_halfplane(cplx w)
{
    if (!(w.imag() > 0.0))
        throw InvalidArgument("Cayley inverse requires Im w > 0");
    return (w - kI) / (w + kI);
}

cplx cayley_derivative(cplx z) noexcept
{
    const cplx d = 1.0 - z;
    return 2.0 * kI / (d * d);
}

} // namespace loewner
