#include "loewner/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace loewner {

namespace {

std::string describe(std::size_t times, std::size_t points)
{
    std::ostringstream os;
    os << times << " times x " << points << " points";
    return os.str();
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

void CheckReport::record(double residual, const Witness& w)
{
    if (residual > max_residual || std::isnan(residual)) {
        max_residual = residual;
        witness = w;
    }
}

void CheckReport::fail(const std::string& message, const Witness& w)
{
    if (errors.empty())
        witness = w;
    errors.push_back(message);
}

void CheckReport::finalize()
{
    pass = skipped || (errors.empty() && max_residual <= threshold);
}

std::vector<cplx> disk_grid(std::span<const double> radii, int angles)
{
    std::vector<cplx> pts;
    for (double r : radii) {
        if (r == 0.0) {
            pts.emplace_back(0.0, 0.0);
            continue;
        }
        for (int k = 0; k < angles; ++k)
            pts.push_back(std::polar(r, kTwoPi * k / angles));
    }
    return pts;
}

MapEvaluator numeric_derivative(MapEvaluator F, double h)
{
    return [F = std::move(F), h](cplx z) {
        return (-F(z + 2.0 * h) + 8.0 * F(z + h) - 8.0 * F(z - h) + F(z - 2.0 * h)) / (12.0 * h);
    };
}

CheckReport check_ef_axioms(const HerglotzDriver& d, std::span<const double> times, std::span<const cplx> points,
                            double tol, const EvolutionConfig& cfg)
{
    CheckReport rep;
    rep.check = "ef_axioms";
    rep.grid = describe(times.size(), points.size());
    rep.threshold = tol;
    const std::size_t n = times.size();
    // Every map is integrated independently: a shared pass would step over the
    // same undeclared features on both sides and hide them.
    for (cplx z : points) {
        for (std::size_t i = 0; i < n; ++i) {
            const double s = times[i];
            Witness w{s, s, z};
            try {
                rep.record(std::abs(evolve_point(d, z, s, s, cfg).w - z), w);
                std::vector<cplx> direct(n);
                for (std::size_t k = i + 1; k < n; ++k)
                    direct[k] = evolve_point(d, z, s, times[k], cfg).w;
                for (std::size_t j = i + 1; j < n; ++j)
                    for (std::size_t k = j + 1; k < n; ++k) {
                        w.t = times[k];
                        const cplx composed = evolve_point(d, direct[j], times[j], times[k], cfg).w;
                        rep.record(std::abs(direct[k] - composed), w);
                    }
            } catch (const std::exception& e) {
                rep.fail(e.what(), w);
            }
        }
    }
    rep.finalize();
    return rep;
}

CheckReport check_chain_equation(const HerglotzDriver& d, const ChainEvaluator& f, std::span<const double> times,
                                 std::span<const cplx> points, double tol, const EvolutionConfig& cfg)
{
    CheckReport rep;
    rep.check = "chain_equation";
    rep.grid = describe(times.size(), points.size());
    rep.threshold = tol;
    for (cplx z : points) {
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double s = times[i];
            Witness w{s, s, z};
            try {
                const cplx fs = f(s, z);
                const auto ws = evolve_through(d, z, s, times.subspan(i), false, cfg);
                for (std::size_t k = 0; k < ws.size(); ++k) {
                    w.t = times[i + k];
                    rep.record(std::abs(f(w.t, ws[k].w) - fs), w);
                }
            } catch (const std::exception& e) {
                rep.fail(e.what(), w);
            }
        }
    }
    rep.finalize();
    return rep;
}

CheckReport check_lk_pde(const HerglotzDriver& d, const ChainEvaluator& f, std::span<const double> s_values,
                         std::span<const cplx> points, double tol, double ds)
{
    CheckReport rep;
    rep.check = "lk_pde";
    rep.grid = describe(s_values.size(), points.size());
    rep.threshold = tol;
    constexpr double hz = 1e-3;
    for (double s : s_values) {
        for (cplx z : points) {
            const Witness w{s, s, z};
            try {
                const cplx dfds = s >= ds ? (f(s + ds, z) - f(s - ds, z)) / (2.0 * ds)
                                          : (-3.0 * f(s, z) + 4.0 * f(s + ds, z) - f(s + 2.0 * ds, z)) / (2.0 * ds);
                const cplx dfdz = (-f(s, z + 2.0 * hz) + 8.0 * f(s, z + hz) - 8.0 * f(s, z - hz)
                                   + f(s, z - 2.0 * hz)) / (12.0 * hz);
                rep.record(std::abs(dfds + d.vector_field(z, s) * dfdz), w);
            } catch (const std::exception& e) {
                rep.fail(e.what(), w);
            }
        }
    }
    rep.finalize();
    return rep;
}

CheckReport check_beta_monotone(const HerglotzDriver& d, std::span<const double> times,
                                std::span<const cplx> points, const EvolutionConfig& cfg)
{
    CheckReport rep;
    rep.check = "beta_monotone";
    rep.grid = describe(times.size(), points.size());
    rep.threshold = 1e-9;
    for (cplx z : points) {
        Witness w{0.0, 0.0, z};
        try {
            const auto rs = evolve_through(d, z, 0.0, times, true, cfg);
            const double mz = (1.0 - std::abs(z)) * (1.0 + std::abs(z));
            double prev = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < rs.size(); ++k) {
                const double r = std::abs(rs[k].w);
                const double beta = times[k] == 0.0 ? 1.0 : mz * std::abs(*rs[k].v) / ((1.0 - r) * (1.0 + r));
                if (k) {
                    w.s = times[k - 1];
                    w.t = times[k];
                    rep.record(std::max(0.0, beta - prev), w);
                }
                prev = beta;
            }
        } catch (const std::exception& e) {
            rep.fail(e.what(), w);
        }
    }
    rep.finalize();
    return rep;
}

CheckReport check_growth_bound(const HerglotzDriver& d, const ChainEvaluator& f, std::span<const double> s_values,
                               std::span<const double> radii, double tol, const EvolutionConfig& cfg)
{
    CheckReport rep;
    rep.check = "growth_bound";
    rep.threshold = 10.0 * tol;
    const std::vector<cplx> pts = disk_grid(radii, 16);
    rep.grid = describe(s_values.size(), pts.size());
    for (double r : radii)
        if (!(r >= 0.0 && r <= 0.9))
            throw InvalidArgument("growth bound radii must lie in [0, 0.9]");
    const ChainClassification c = classify(d, 1e-8, 1024.0, cfg);
    if (c.verdict != Verdict::UniqueChain) {
        rep.skipped = true;
        rep.finalize();
        return rep;
    }
    for (double s : s_values) {
        Witness w{s, s, 0.0};
        try {
            const DecompositionFrame fr = frame_at(d, s, cfg);
            const DiskAutomorphism h = fr.h();
            for (cplx z : pts) {
                w.z = z;
                const double rz = std::abs(z);
                const double bound = rz / (fr.beta * (1.0 - rz) * (1.0 - rz));
                rep.record(std::max(0.0, std::abs(f(s, h.apply(z))) - bound), w);
            }
        } catch (const std::exception& e) {
            rep.fail(e.what(), w);
        }
    }
    rep.finalize();
    return rep;
}

int winding_number(std::span<const cplx> curve, cplx w)
{
    double total = 0.0;
    for (std::size_t k = 0; k < curve.size(); ++k) {
        const cplx a = curve[k] - w;
        const cplx b = curve[(k + 1) % curve.size()] - w;
        total += std::arg(b / a);
    }
    return static_cast<int>(std::lround(total / kTwoPi));
}

CheckReport check_univalence(const MapEvaluator& F, double r, int n)
{
    if (!(r > 0.0 && r < 1.0) || n < 8)
        throw InvalidArgument("univalence check needs 0 < r < 1 and n >= 8");
    CheckReport rep;
    rep.check = "univalence";
    std::ostringstream grid;
    grid << n << " samples on |z| = " << r;
    rep.grid = grid.str();
    rep.threshold = 0.0;
    std::vector<cplx> zs, img;
    for (int k = 0; k < n; ++k) {
        zs.push_back(std::polar(r, kTwoPi * k / n));
        img.push_back(F(zs.back()));
    }
    double diam = 0.0;
    for (const cplx& v : img)
        diam = std::max(diam, std::abs(v - img.front()));
    const double floor = 1e-9 * diam;
    for (std::size_t j = 0; j < img.size(); ++j)
        for (std::size_t k = j + 1; k < img.size(); ++k)
            if (!(std::abs(img[j] - img[k]) > floor)) {
                rep.record(1.0, {0.0, 0.0, zs[j]});
                j = img.size();
                break;
            }

    std::vector<cplx> probes{0.0};
    for (int k = 0; k < 4; ++k)
        probes.push_back(std::polar(0.5 * r, kTwoPi * k / 4 + 0.3));
    for (cplx p : probes) {
        const cplx wp = F(p);
        double dmin = std::numeric_limits<double>::infinity();
        for (const cplx& v : img)
            dmin = std::min(dmin, std::abs(v - wp));
        if (dmin < 1e-9)
            throw WindingAmbiguous("image curve passes within 1e-9 of a probe image", p);
        rep.record(std::abs(winding_number(img, wp) - 1), {0.0, 0.0, p});
    }
    rep.finalize();
    return rep;
}

cplx contour_inverse_oracle(const MapEvaluator& F, const MapEvaluator& dF, cplx w, double R, int nodes)
{
    if (!(R > 0.0 && R < 1.0) || nodes < 8)
        throw InvalidArgument("contour oracle needs 0 < R < 1 and nodes >= 8");
    cplx sum{0.0, 0.0};
    double dmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nodes; ++k) {
        const cplx xi = std::polar(R, kTwoPi * k / nodes);
        const cplx gap = F(xi) - w;
        dmin = std::min(dmin, std::abs(gap));
        sum += xi * xi * dF(xi) / gap;
    }
    if (dmin < 1e-6)
        throw PoleNearContour("target lies within 1e-6 of the image contour", dmin);
    return sum / static_cast<double>(nodes);
}

} // namespace loewner
