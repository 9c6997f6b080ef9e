#pragma once

#include "loewner/chain.hpp"
#include "loewner/drivers.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace loewner {

/// Driver with closed-form reference data.
struct CatalogEntry {
    std::string name;
    HerglotzDriver driver;
    /// Standard chain f_s(z).
    std::function<cplx(double s, cplx z)> chain;
    /// phi_{s,t}(z) where an explicit formula exists, else empty.
    std::function<cplx(double s, double t, cplx z)> flow;
    bool unique_chain = false;
};

/// Constant elliptic, rotation, parabolic LFT, hyperbolic dilation, radial
/// slit (theta == 0) and chordal slit (xi == 0).
[[nodiscard]] std::vector<CatalogEntry> oracle_catalog();

/// c = i on [0, switch_time), then c = 1; tau == 0.
[[nodiscard]] HerglotzDriver rotation_then_contraction(double switch_time = 1.0);

/// c = 1 except for a pulse c = 1e4 + 1 on [1, 1 + 1e-4). With the switch
/// times undeclared the integrator may step over the pulse.
[[nodiscard]] HerglotzDriver pulse_driver(bool declare_breakpoints);

/// Herglotz expression: positive combinations of constants with Re >= 0 and
/// Moebius terms (k + z)/(k - z), |k| > 1, weighted by positive functions of t.
[[nodiscard]] std::string random_herglotz_text(std::mt19937_64& rng);

/// BP driver from random_herglotz_text with a random constant tau in the closed disk.
[[nodiscard]] HerglotzDriver random_expression_driver(std::mt19937_64& rng);

} // namespace loewner
