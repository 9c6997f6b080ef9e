#pragma once

#include "loewner/errors.hpp"

#include <string>
#include <vector>

namespace loewner::cli {

struct Curve {
    std::string label;
    std::vector<cplx> points;
    bool closed = false;
};

/// SVG 1.1 document with one polyline per curve. The viewBox is the bounding
/// box of all points plus a 5% margin, with the imaginary axis pointing up;
/// an empty curve list gives an empty unit canvas.
[[nodiscard]] std::string render_svg(const std::vector<Curve>& curves, int pixels = 512);

} // namespace loewner::cli
