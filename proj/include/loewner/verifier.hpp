#pragma once

#include "loewner/chain.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace loewner {

/// Location of the worst residual of a check.
struct Witness {
    double s = 0.0;
    double t = 0.0;
    cplx z{0.0, 0.0};
};

struct CheckReport {
    std::string check;
    std::string grid;
    double max_residual = 0.0;
    double threshold = 0.0;
    bool pass = true;
    bool skipped = false;
    Witness witness;
    std::vector<std::string> errors;   // computation failures, each also failing the check

    /// Raises max_residual (and moves the witness) when `residual` exceeds it.
    void record(double residual, const Witness& w);
    /// Records a computation failure at `w`.
    void fail(const std::string& message, const Witness& w);
    /// pass = no errors and max_residual <= threshold.
    void finalize();
};

using MapEvaluator = std::function<cplx(cplx)>;

/// Points r e^{2 pi i k / angles} for each radius (r = 0 yields one point).
[[nodiscard]] std::vector<cplx> disk_grid(std::span<const double> radii, int angles);

/// Fourth-order central difference of F along the real direction.
[[nodiscard]] MapEvaluator numeric_derivative(MapEvaluator F, double h = 1e-3);

/// EF1 exactly and max |phi_{s,t}(z) - phi_{u,t}(phi_{s,u}(z))| over s <= u <= t in `times`.
[[nodiscard]] CheckReport check_ef_axioms(const HerglotzDriver& d, std::span<const double> times,
                                          std::span<const cplx> points, double tol,
                                          const EvolutionConfig& cfg = chain_evolution_defaults());

/// max |f_t(phi_{s,t}(z)) - f_s(z)| over s <= t in `times`.
[[nodiscard]] CheckReport check_chain_equation(const HerglotzDriver& d, const ChainEvaluator& f,
                                               std::span<const double> times, std::span<const cplx> points,
                                               double tol, const EvolutionConfig& cfg = chain_evolution_defaults());

/// max |d_s f_s(z) + G(z,s) f_s'(z)|: central difference in s with step ds
/// (one-sided second order when s < ds) and a fourth-order z-difference.
[[nodiscard]] CheckReport check_lk_pde(const HerglotzDriver& d, const ChainEvaluator& f,
                                       std::span<const double> s_values, std::span<const cplx> points, double tol,
                                       double ds = 1e-4);

/// beta_z(t_{k+1}) <= beta_z(t_k) + 1e-9 along the time grid, for every z.
[[nodiscard]] CheckReport check_beta_monotone(const HerglotzDriver& d, std::span<const double> times,
                                              std::span<const cplx> points,
                                              const EvolutionConfig& cfg = chain_evolution_defaults());

/// |f_s(h_s(z))| <= |z| / (beta(s) (1 - |z|)^2) with slack 10 tol on the
/// circles of the given radii (each <= 0.9). Skipped unless the family
/// classifies as UniqueChain.
[[nodiscard]] CheckReport check_growth_bound(const HerglotzDriver& d, const ChainEvaluator& f,
                                             std::span<const double> s_values, std::span<const double> radii,
                                             double tol, const EvolutionConfig& cfg = chain_evolution_defaults());

/// Pairwise injectivity of F on n samples of |z| = r and winding number 1 of
/// F(|z| = r) around F of interior probes. Throws WindingAmbiguous when the
/// image curve passes within 1e-9 of a probe image.
[[nodiscard]] CheckReport check_univalence(const MapEvaluator& F, double r, int n = 256);

/// Winding number of the closed polygon `curve` around w.
[[nodiscard]] int winding_number(std::span<const cplx> curve, cplx w);

/// F^{-1}(w) = (1/2 pi i) \oint xi F'(xi) / (F(xi) - w) dxi over |xi| = R,
/// trapezoidal rule on `nodes` points. Throws PoleNearContour when
/// min |F(xi) - w| < 1e-6.
[[nodiscard]] cplx contour_inverse_oracle(const MapEvaluator& F, const MapEvaluator& dF, cplx w, double R,
                                          int nodes = 2048);

} // namespace loewner
