#include "loewner/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <vector>

namespace loewner {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
constexpr unsigned kMaxDepth = 15;

template <class R>
R integrate_split(const std::function<R(double)>& f, double a, double b, std::span<const double> breaks,
                  double tol)
{
    if (!(b > a))
        return R{};
    std::vector<double> cuts{a};
    for (double x : breaks)
        if (x > a && x < b)
            cuts.push_back(x);
    cuts.push_back(b);
    // Each piece is mapped onto [0, 1]. The library compares an error estimate
    // taken in unscaled coordinates with a tolerance scaled by the interval
    // length, so on short pieces rounding noise alone would force recursion to
    // the maximum depth.
    R total{};
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k], len = cuts[k + 1] - cuts[k];
        const auto unit = [&f, lo, len](double u) { return f(lo + len * u) * len; };
        total += GK::integrate(unit, 0.0, 1.0, kMaxDepth, tol);
    }
    return total;
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b, std::span<const double> breaks,
                 double tol)
{
    return integrate_split<double>(f, a, b, breaks, tol);
}

cplx integrate_complex(const std::function<cplx(double)>& f, double a, double b, std::span<const double> breaks,
               double tol)
{
    return integrate_split<cplx>(f, a, b, breaks, tol);
}

cplx integrate_segment(const std::function<cplx(cplx)>& g, cplx z0, cplx z1, double tol)
{
    const cplx dz = z1 - z0;
    const std::function<cplx(double)> f = [&](double u) { return g(z0 + u * dz) * dz; };
    return integrate_split<cplx>(f, 0.0, 1.0, {}, tol);
}

} // namespace loewner
