#pragma once

#include "loewner/chain.hpp"
#include "loewner/disk_geometry.hpp"
#include "loewner/drivers.hpp"
#include "loewner/evolution.hpp"

#include <functional>
#include <string>
#include <vector>

namespace loewner {

/// Autonomous generator G(z) = (z - tau)(conj(tau) z - 1) p(z).
class SemigroupModel {
public:
    SemigroupModel(cplx tau, std::function<cplx(cplx)> p, std::function<cplx(cplx)> dp, std::string label);

    static SemigroupModel constant(cplx c, cplx tau);
    /// p must not depend on t.
    static SemigroupModel from_expression(const Expr& p, cplx tau);

    [[nodiscard]] cplx tau() const noexcept { return tau_; }
    [[nodiscard]] cplx p(cplx z) const { return p_(z); }
    [[nodiscard]] cplx generator(cplx z) const { return driver_.vector_field(z, 0.0); }
    [[nodiscard]] const HerglotzDriver& driver() const noexcept { return driver_; }
    [[nodiscard]] const std::string& label() const noexcept { return driver_.label(); }

private:
    cplx tau_;
    std::function<cplx(cplx)> p_;
    HerglotzDriver driver_;
};

/// Tolerances used by the semigroup routines unless overridden.
[[nodiscard]] EvolutionConfig semigroup_evolution_defaults();

/// phi_t(z); phi_0 = id.
[[nodiscard]] cplx phi(const SemigroupModel& m, cplx z, double t,
                       const EvolutionConfig& cfg = semigroup_evolution_defaults());

enum class DWKind { Elliptic, Hyperbolic, Parabolic };
[[nodiscard]] const char* to_string(DWKind k) noexcept;

struct DWClass {
    DWKind kind = DWKind::Elliptic;
    cplx dw_point{0.0, 0.0};
    /// Angular derivative of phi_1 at a boundary Denjoy–Wolff point; 0 for interior points.
    double derivative_estimate = 0.0;
    std::vector<double> quotients;   // Julia–Wolff quotients at r = 0.9, 0.99, 0.999
};

/// Throws ExtrapolationUnstable when successive quotients differ by more than
/// 0.1 or the estimate exceeds 1 + tol.
[[nodiscard]] DWClass classify_dw(const SemigroupModel& m, double tol = 1e-3);

enum class StepKind { ZeroStep, PositiveStep, Inconclusive };
[[nodiscard]] const char* to_string(StepKind k) noexcept;

struct HyperbolicStep {
    StepKind kind = StepKind::Inconclusive;
    std::vector<double> distances;   // rho(z_k, z_{k+1}), k = 0..n-1
    double limit_estimate = 0.0;     // extrapolated in 1/k
};

/// Orbit z_k = phi_{k t0}(z0), k = 0..n. Zero step: the extrapolated limit of
/// the distances is below 1e-4 and they do not increase over the final
/// quarter. Positive step: both the final-quarter minimum and the limit
/// exceed 1e-2.
[[nodiscard]] HyperbolicStep hyperbolic_step(const SemigroupModel& m, cplx z0, double t0, int n = 64);

struct KoenigsOptions {
    double tol = 1e-10;
    double t0 = 1.0;        // first horizon; later horizons double
    double t_max = 1024.0;
};

struct EllipticKoenigs {
    cplx c;
    std::function<cplx(cplx)> h;   // h(phi_t(z)) = exp(-c t) h(z)
};

/// Requires tau = 0 and Re p(0) > 0; h(z) = lim e^{cT} phi_T(z).
/// h throws NotConverged when the limit is not reached by t_max.
[[nodiscard]] EllipticKoenigs koenigs_elliptic(const SemigroupModel& m, const KoenigsOptions& opt = {});

/// Conjugation of an interior Denjoy–Wolff point to the origin: the returned
/// model generates M o phi_t o M^{-1} with M(z) = (z - tau)/(1 - conj(tau) z).
struct ConjugatedModel {
    SemigroupModel model;
    DiskAutomorphism to_origin;   // M
};
[[nodiscard]] ConjugatedModel conjugate_to_origin(const SemigroupModel& m);

/// Koenigs function of a boundary Denjoy–Wolff semigroup, h(phi_t) = h + t,
/// h(0) = 0, obtained by integrating h' = 1/G along the segment [0, z].
[[nodiscard]] std::function<cplx(cplx)> koenigs_boundary(const SemigroupModel& m, double tol = 1e-13);

/// mu f_0 with mu fixed by mu (f_0(phi_1(0)) - f_0(0)) = 1, f_0 the standard
/// chain at s = 0. Agrees with koenigs_boundary when the chain is unique.
/// Throws CalibrationDegenerate when the increment is below 1e-12.
[[nodiscard]] std::function<cplx(cplx)> koenigs_boundary_via_chain(const SemigroupModel& m,
                                                                   const ChainOptions& opt = {});

/// max |h(phi_t(z)) - h(z) - t| over t in {0.5, 1, 2} and the given points.
[[nodiscard]] double boundary_koenigs_residual(const SemigroupModel& m, const std::function<cplx(cplx)>& h,
                                               const std::vector<cplx>& points);

/// max |h(phi_t(z)) - exp(-c t) h(z)| over t in {0.5, 1, 2} and the given points.
[[nodiscard]] double elliptic_koenigs_residual(const SemigroupModel& m, const EllipticKoenigs& k,
                                               const std::vector<cplx>& points);

} // namespace loewner
