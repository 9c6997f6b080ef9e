#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace loewner::cli {

namespace {

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};

} // namespace

std::string render_svg(const std::vector<Curve>& curves, int pixels)
{
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0;
    for (const Curve& c : curves)
        for (const cplx& p : c.points) {
            if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
                continue;
            x0 = std::min(x0, p.real());
            x1 = std::max(x1, p.real());
            y0 = std::min(y0, -p.imag());
            y1 = std::max(y1, -p.imag());
        }
    if (!(x0 <= x1)) {
        x0 = y0 = 0.0;
        x1 = y1 = 1.0;
    }
    double w = x1 - x0, h = y1 - y0;
    const double span = std::max({w, h, 1e-12});
    // Degenerate extents (a point, a segment) still get a visible box.
    w = std::max(w, 1e-3 * span);
    h = std::max(h, 1e-3 * span);
    const double mx = 0.05 * w, my = 0.05 * h;

    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(pixels)
         + "\" height=\"" + std::to_string(pixels) + "\" viewBox=\"" + num(x0 - mx) + " " + num(y0 - my) + " "
         + num(w + 2 * mx) + " " + num(h + 2 * my) + "\" preserveAspectRatio=\"xMidYMid meet\">\n";
    std::size_t k = 0;
    for (const Curve& c : curves) {
        s += "  <" + std::string(c.closed ? "polygon" : "polyline") + " fill=\"none\" stroke=\""
             + kPalette[k++ % std::size(kPalette)] + "\" stroke-width=\"" + num(0.004 * span)
             + "\" points=\"";
        bool first = true;
        for (const cplx& p : c.points) {
            if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
                continue;
            if (!first)
                s += ' ';
            s += num(p.real()) + "," + num(-p.imag());
            first = false;
        }
        s += "\"><title>" + escape(c.label) + "</title></" + (c.closed ? "polygon" : "polyline") + ">\n";
    }
    s += "</svg>\n";
    return s;
}

} // namespace loewner::cli
