#pragma once

#include "loewner/drivers.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace loewner {

struct EvolutionConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.1;
    double boundary_guard = 1e-9;

    /// Throws InvalidArgument unless all fields are positive and boundary_guard < 1e-3.
    void check() const;
};

/// phi_{s,t}(z) and optionally phi'_{s,t}(z).
struct EvolutionResult {
    cplx w;
    std::optional<cplx> v;
    long steps = 0;
    double max_abs_w = 0.0;
};

/// Solves dw/dt = G(w,t), w(s) = z, splitting at every driver breakpoint in (s,t).
/// Throws BoundaryEscape, StepUnderflow, or a DomainError from the driver.
[[nodiscard]] EvolutionResult evolve_point(const HerglotzDriver& d, cplx z, double s, double t,
                                           const EvolutionConfig& cfg = {});

/// As evolve_point, integrating the variational equation dv/dt = G_z(w,t) v,
/// v(s) = 1, jointly with w under one step controller.
[[nodiscard]] EvolutionResult evolve_with_derivative(const HerglotzDriver& d, cplx z, double s,
                                                     double t, const EvolutionConfig& cfg = {});

/// Values of phi_{s,t_k}(z) at every t_k of an ascending list (all >= s),
/// from a single integration pass.
[[nodiscard]] std::vector<EvolutionResult> evolve_through(const HerglotzDriver& d, cplx z, double s,
                                                          std::span<const double> times,
                                                          bool with_derivative,
                                                          const EvolutionConfig& cfg = {});

enum class Execution { Serial, Parallel };

struct PointOutcome {
    std::optional<EvolutionResult> result;
    std::string error;
    [[nodiscard]] bool ok() const noexcept { return result.has_value(); }
};

/// Element-wise evolve_point; failures are recorded per point and never abort
/// the batch. Serial and Parallel produce identical results.
[[nodiscard]] std::vector<PointOutcome> evolve_grid(const HerglotzDriver& d, std::span<const cplx> points,
                                                    double s, double t, const EvolutionConfig& cfg = {},
                                                    bool with_derivative = false,
                                                    Execution exec = Execution::Parallel);

/// n >= 2 uniform samples of the trajectory on [s, t]; the first is (s, z).
[[nodiscard]] std::vector<std::pair<double, cplx>> trajectory(const HerglotzDriver& d, cplx z, double s,
                                                              double t, int n,
                                                              const EvolutionConfig& cfg = {});

} // namespace loewner
