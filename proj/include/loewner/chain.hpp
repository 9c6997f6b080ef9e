#pragma once

#include "loewner/disk_geometry.hpp"
#include "loewner/evolution.hpp"
#include "loewner/expr.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace loewner {

/// Normalising data of phi_{0,t}: a = phi_{0,t}(0), b = phi'_{0,t}(0)/|phi'_{0,t}(0)|,
/// beta = |phi'_{0,t}(0)| / (1 - |a|^2), so that h_t(z) = (b z + a)/(1 + b conj(a) z).
struct DecompositionFrame {
    double t = 0.0;
    cplx a{0.0, 0.0};
    cplx b{1.0, 0.0};
    double beta = 1.0;

    [[nodiscard]] DiskAutomorphism h() const { return DiskAutomorphism(a, b); }
};

/// Tolerances used for chain computations unless overridden.
[[nodiscard]] EvolutionConfig chain_evolution_defaults();

[[nodiscard]] DecompositionFrame frame_at(const HerglotzDriver& d, double t,
                                          const EvolutionConfig& cfg = chain_evolution_defaults());

/// Frames at ascending times from one integration pass.
[[nodiscard]] std::vector<DecompositionFrame> frames_at(const HerglotzDriver& d, std::span<const double> times,
                                                        const EvolutionConfig& cfg = chain_evolution_defaults());

/// (1 - |z|^2) |phi'_{0,t}(z)| / (1 - |phi_{0,t}(z)|^2), in (0, 1].
[[nodiscard]] double beta_z(const HerglotzDriver& d, cplx z, double t,
                            const EvolutionConfig& cfg = chain_evolution_defaults());

struct BetaLimit {
    double beta = 0.0;
    bool converged = false;
    double horizon = 0.0;    // last time sampled
    double last_delta = 0.0; // last difference of extrapolated values
};

/// Limit of beta(t) as t -> infinity from samples at t = 1, 2, 4, ..., t_max,
/// Richardson-extrapolated in 1/t. Values below tol are reported as 0.
[[nodiscard]] BetaLimit beta_limit(const HerglotzDriver& d, double tol = 1e-8, double t_max = 1024.0,
                                   const EvolutionConfig& cfg = chain_evolution_defaults());

struct ChainOptions {
    double tol = 1e-9;
    double t_max = 1048576.0;
    /// First horizon is max(2s, 1, min_horizon); later horizons double.
    double min_horizon = 0.0;
    /// Columns of the extrapolation table in 1/T.
    int richardson_depth = 8;
    /// Use the a-priori tail bound when tau == 0 in Berkson–Porta form.
    bool use_tail_bound = true;
    EvolutionConfig evolution = chain_evolution_defaults();
};

struct ChainValue {
    double s = 0.0;
    cplx z{0.0, 0.0};
    cplx f{0.0, 0.0};
    double horizon = 0.0;
    double tail_estimate = 0.0;
};

/// f_s(z) = lim_{T -> inf} h_T^{-1}(phi_{s,T}(z)) / beta(T) for the standard chain.
/// Two successive extrapolated estimates within tol * max(1, |f|) end the
/// schedule. Throws NotConverged when t_max is reached first.
[[nodiscard]] ChainValue chain_value(const HerglotzDriver& d, double s, cplx z, const ChainOptions& opt = {});

/// Element-wise chain_value; failures are recorded per point.
struct ChainOutcome {
    std::optional<ChainValue> value;
    std::string error;
    [[nodiscard]] bool ok() const noexcept { return value.has_value(); }
};
[[nodiscard]] std::vector<ChainOutcome> chain_grid(const HerglotzDriver& d, std::span<const double> s_values,
                                                   std::span<const cplx> points, const ChainOptions& opt = {},
                                                   Execution exec = Execution::Parallel);

/// (s, z) -> f_s(z)
using ChainEvaluator = std::function<cplx(double s, cplx z)>;

[[nodiscard]] ChainEvaluator standard_chain(const HerglotzDriver& d, const ChainOptions& opt = {});

inline constexpr double kClassificationTolerance = 1e-6;

enum class Verdict { UniqueChain, NonUnique, Unknown };

struct ChainClassification {
    double beta_limit = 0.0;
    Verdict verdict = Verdict::Unknown;
    /// Radius 1/beta of the image domain; empty means the whole plane.
    std::optional<double> omega_radius;
    /// End of the initial interval on which every phi_{0,t} is an automorphism.
    std::optional<double> automorphism_threshold;
    bool automorphic_throughout = false;
    std::string diagnostics;
};

[[nodiscard]] ChainClassification classify(const HerglotzDriver& d, double tol = 1e-8, double t_max = 1024.0,
                                           const EvolutionConfig& cfg = chain_evolution_defaults());

[[nodiscard]] const char* to_string(Verdict v) noexcept;

/// g_t(z) = h(beta f_t(z)) / beta. h is spot-checked for h(0) = 0, h'(0) = 1
/// and injectivity on 64 points of |w| = 0.99 (InvalidArgument otherwise).
/// Evaluation throws DomainError when |beta f_t(z)| >= 1.
[[nodiscard]] ChainEvaluator transported_chain(ChainEvaluator base, const Expr& h, double beta);

/// Solves f_t(w) = f_s(z) by damped Newton iteration seeded at z.
/// Throws NewtonStall after 100 iterations.
[[nodiscard]] cplx induced_evolution(const ChainEvaluator& f, double s, double t, cplx z, double tol = 1e-10);

} // namespace loewner
