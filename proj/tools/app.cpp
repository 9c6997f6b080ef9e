#include "app.hpp"

#include "svg.hpp"

#include "loewner/catalog.hpp"
#include "loewner/chain.hpp"
#include "loewner/frame_cache.hpp"
#include "loewner/semigroup.hpp"
#include "loewner/verifier.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace loewner::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

struct Grids {
    std::vector<double> radii{0.0, 0.35, 0.7};
    int angles = 8;
    std::vector<cplx> points;
    std::vector<double> times{0.0, 0.5, 1.0, 1.5, 2.0};
    std::vector<double> s_values{0.0};
    std::vector<double> pde_s;          // empty: midpoints of `times`
    std::vector<double> growth_radii{0.3, 0.6, 0.9};
    double univalence_radius = 0.9;
    cplx orbit_start{0.0, 0.0};
    double orbit_step = 1.0;
    int orbit_length = 64;
};

struct Tolerances {
    EvolutionConfig evolution;                        // evolve, plot trajectories
    EvolutionConfig chain_evolution = chain_evolution_defaults();
    ChainOptions chain;
    double beta_tol = 1e-8;
    double beta_t_max = 1024.0;
    double koenigs_tol = 1e-10;
    double ef_tol = 1e-8;
    double chain_eq_tol = 1e-6;
    double pde_tol = 1e-5;
    double growth_tol = 1e-6;
    double oracle_tol = 1e-6;
};

struct DriverBlock {
    std::string kind;
    std::string name;   // catalog mode
    std::optional<HerglotzDriver> driver;
    std::vector<CatalogEntry> catalog;
};

struct Settings {
    Config cfg;
    DriverBlock driver;
    Grids grids;
    Tolerances tol;
    std::string format = "csv";
    std::optional<fs::path> out_path;
    std::optional<fs::path> plot_path;
    std::string plot_kind = "chain";
};

// Failure of the computation itself; reported with exit code 3.
struct ComputationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[noreturn]] void fail_at(const Entry& e, const std::string& msg)
{
    throw ConfigError(msg, e.line, e.column);
}

Expr entry_expr(const Config& c, const std::string& key)
{
    const Entry& e = c.entry("driver", key);
    const std::string text = c.string("driver", key);
    // Offsets are relative to the text after the opening quote.
    try {
        return parse_expr(text);
    } catch (const SyntaxError& x) {
        throw ConfigError(key + ": " + x.what(), e.line, e.column + 1 + static_cast<int>(x.offset));
    } catch (const UnknownIdentifier& x) {
        throw ConfigError(key + ": " + x.what(), e.line, e.column + 1 + static_cast<int>(x.offset));
    }
}

TimeFunction time_function(const Config& c, const std::string& name)
{
    const std::string tk = name + "_times", vk = name + "_values";
    if (c.has("driver", tk) || c.has("driver", vk)) {
        try {
            return TimeFunction::samples(c.numbers("driver", tk), c.numbers("driver", vk));
        } catch (const Error& x) {
            fail_at(c.entry("driver", tk), x.what());
        }
    }
    if (!c.has("driver", name))
        return TimeFunction::constant(0.0);
    const Entry& e = c.entry("driver", name);
    if (std::holds_alternative<double>(e.value))
        return TimeFunction::constant(c.number("driver", name));
    const Expr x = entry_expr(c, name);
    if (x.depends_on_z())
        fail_at(e, name + " must be a function of t only");
    return TimeFunction::expression(x);
}

ComplexPath tau_path(const Config& c)
{
    if (c.has("driver", "tau_times")) {
        const auto ts = c.numbers("driver", "tau_times");
        const auto re = c.numbers("driver", "tau_re_values", std::vector<double>(ts.size(), 0.0));
        const auto im = c.numbers("driver", "tau_im_values", std::vector<double>(ts.size(), 0.0));
        if (re.size() != ts.size() || im.size() != ts.size())
            fail_at(c.entry("driver", "tau_times"), "tau sample arrays differ in length");
        std::vector<cplx> vs;
        for (std::size_t k = 0; k < ts.size(); ++k)
            vs.emplace_back(re[k], im[k]);
        try {
            return ComplexPath::samples(ts, vs);
        } catch (const Error& x) {
            fail_at(c.entry("driver", "tau_times"), x.what());
        }
    }
    return ComplexPath::constant({c.number("driver", "tau_re", 0.0), c.number("driver", "tau_im", 0.0)});
}

DriverBlock read_driver(const Config& c)
{
    DriverBlock b;
    b.kind = c.string("driver", "kind");
    const Entry& kind_entry = c.entry("driver", "kind");
    if (b.kind == "constant") {
        c.restrict_keys("driver", {"kind", "c_re", "c_im", "tau_re", "tau_im"});
        const cplx cc{c.number("driver", "c_re", 0.0), c.number("driver", "c_im", 0.0)};
        const cplx tau{c.number("driver", "tau_re", 0.0), c.number("driver", "tau_im", 0.0)};
        // Built without the Re c >= 0 guard so that validate can report it.
        std::ostringstream label;
        label << "constant(c=" << cc << ",tau=" << tau << ")";
        b.driver = HerglotzDriver::berkson_porta([cc](cplx, double) { return cc; },
                                                 [](cplx, double) { return cplx{0.0, 0.0}; },
                                                 ComplexPath::constant(tau), {}, label.str());
    } else if (b.kind == "radial") {
        c.restrict_keys("driver", {"kind", "theta", "theta_times", "theta_values"});
        b.driver = radial_driver(time_function(c, "theta"));
    } else if (b.kind == "chordal") {
        c.restrict_keys("driver", {"kind", "xi", "xi_times", "xi_values"});
        b.driver = chordal_driver(time_function(c, "xi"));
    } else if (b.kind == "bp") {
        c.restrict_keys("driver", {"kind", "p", "tau_re", "tau_im", "tau_times", "tau_re_values", "tau_im_values",
                                   "breakpoints"});
        const Expr p = entry_expr(c, "p");
        const Expr dp = p.differentiate_z();
        b.driver = HerglotzDriver::berkson_porta([p](cplx z, double t) { return p.evaluate(z, t); },
                                                 [dp](cplx z, double t) { return dp.evaluate(z, t); },
                                                 tau_path(c), c.numbers("driver", "breakpoints", {}),
                                                 "bp(" + p.print() + ")");
    } else if (b.kind == "sampled") {
        c.restrict_keys("driver", {"kind", "equation", "times", "values"});
        const std::string eq = c.string("driver", "equation");
        TimeFunction f;
        try {
            f = TimeFunction::samples(c.numbers("driver", "times"), c.numbers("driver", "values"));
        } catch (const Error& x) {
            fail_at(c.entry("driver", "times"), x.what());
        }
        if (eq == "radial")
            b.driver = radial_driver(f);
        else if (eq == "chordal")
            b.driver = chordal_driver(f);
        else
            fail_at(c.entry("driver", "equation"), "equation must be \"radial\" or \"chordal\"");
    } else if (b.kind == "catalog") {
        c.restrict_keys("driver", {"kind", "name"});
        b.name = c.string("driver", "name");
        for (auto& e : oracle_catalog())
            if (b.name == "all" || e.name == b.name)
                b.catalog.push_back(std::move(e));
        if (b.catalog.empty())
            fail_at(c.entry("driver", "name"), "unknown catalog entry '" + b.name + "'");
        if (b.catalog.size() == 1)
            b.driver = b.catalog.front().driver;
    } else {
        fail_at(kind_entry, "kind must be one of constant, radial, chordal, bp, sampled, catalog");
    }
    return b;
}

std::vector<double> checked_times(const Config& c, const std::string& key, std::vector<double> fallback)
{
    auto v = c.numbers("grids", key, std::move(fallback));
    if (v.empty())
        fail_at(c.entry("grids", key), key + " must not be empty");
    for (std::size_t k = 0; k < v.size(); ++k)
        if (!(v[k] >= 0.0) || !std::isfinite(v[k]) || (k && v[k] < v[k - 1]))
            fail_at(c.entry("grids", key), key + " must be finite, non-negative and ascending");
    return v;
}

Grids read_grids(const Config& c)
{
    c.restrict_keys("grids", {"radii", "angles", "points_re", "points_im", "times", "s", "pde_s", "growth_radii",
                              "univalence_radius", "orbit_re", "orbit_im", "orbit_step", "orbit_length"});
    Grids g;
    g.radii = c.numbers("grids", "radii", g.radii);
    for (double r : g.radii)
        if (!(r >= 0.0 && r < 1.0))
            fail_at(c.entry("grids", "radii"), "radii must lie in [0, 1)");
    const double angles = c.number("grids", "angles", g.angles);
    if (!(angles >= 1.0 && angles <= 1e6) || angles != std::floor(angles))
        fail_at(c.entry("grids", "angles"), "angles must be a positive integer");
    g.angles = static_cast<int>(angles);

    if (c.has("grids", "points_re") || c.has("grids", "points_im")) {
        const auto re = c.numbers("grids", "points_re");
        const auto im = c.numbers("grids", "points_im", std::vector<double>(re.size(), 0.0));
        if (re.size() != im.size() || re.empty())
            fail_at(c.entry("grids", "points_re"), "points_re and points_im must be non-empty and equally long");
        for (std::size_t k = 0; k < re.size(); ++k) {
            const cplx z{re[k], im[k]};
            if (!(std::abs(z) < 1.0))
                fail_at(c.entry("grids", "points_re"), "grid points must lie in the open unit disk");
            g.points.push_back(z);
        }
    } else {
        g.points = disk_grid(g.radii, g.angles);
    }
    if (g.points.empty())
        fail_at(c.entry("grids", "radii"), "the point grid is empty");

    g.times = checked_times(c, "times", g.times);
    g.s_values = checked_times(c, "s", g.s_values);
    if (c.has("grids", "pde_s"))
        g.pde_s = checked_times(c, "pde_s", {});
    g.growth_radii = c.numbers("grids", "growth_radii", g.growth_radii);
    for (double r : g.growth_radii)
        if (!(r >= 0.0 && r <= 0.9))
            fail_at(c.entry("grids", "growth_radii"), "growth_radii must lie in [0, 0.9]");
    g.univalence_radius = c.number("grids", "univalence_radius", g.univalence_radius);
    if (!(g.univalence_radius > 0.0 && g.univalence_radius < 1.0))
        fail_at(c.entry("grids", "univalence_radius"), "univalence_radius must lie in (0, 1)");
    g.orbit_start = {c.number("grids", "orbit_re", 0.0), c.number("grids", "orbit_im", 0.0)};
    if (!(std::abs(g.orbit_start) < 1.0))
        fail_at(c.entry("grids", c.has("grids", "orbit_re") ? "orbit_re" : "orbit_im"),
                "orbit start must lie in the open unit disk");
    g.orbit_step = c.number("grids", "orbit_step", g.orbit_step);
    if (!(g.orbit_step > 0.0))
        fail_at(c.entry("grids", "orbit_step"), "orbit_step must be positive");
    const double len = c.number("grids", "orbit_length", g.orbit_length);
    if (!(len >= 8.0 && len <= 1e5) || len != std::floor(len))
        fail_at(c.entry("grids", "orbit_length"), "orbit_length must be an integer >= 8");
    g.orbit_length = static_cast<int>(len);
    return g;
}

Tolerances read_tolerances(const Config& c)
{
    const std::vector<std::string> keys{"rel_tol",  "abs_tol",    "max_step",    "boundary_guard", "chain_tol",
                                        "t_max",    "min_horizon", "richardson_depth", "beta_tol", "beta_t_max",
                                        "koenigs_tol", "ef_tol",  "chain_eq_tol", "pde_tol", "growth_tol",
                                        "oracle_tol"};
    c.restrict_keys("tolerances", keys);
    for (const auto& k : keys)
        if (c.has("tolerances", k)) {
            const double x = c.number("tolerances", k);
            const bool ok = k == "min_horizon" ? x >= 0.0 : x > 0.0;
            if (!ok || !std::isfinite(x))
                fail_at(c.entry("tolerances", k), k + " must be positive and finite");
        }
    Tolerances t;
    for (EvolutionConfig* e : {&t.evolution, &t.chain_evolution}) {
        e->rel_tol = c.number("tolerances", "rel_tol", e->rel_tol);
        e->abs_tol = c.number("tolerances", "abs_tol", e->abs_tol);
        e->max_step = c.number("tolerances", "max_step", e->max_step);
        e->boundary_guard = c.number("tolerances", "boundary_guard", e->boundary_guard);
        try {
            e->check();
        } catch (const Error& x) {
            throw ConfigError(std::string("tolerances: ") + x.what(), 1, 1);
        }
    }
    t.chain.evolution = t.chain_evolution;
    t.chain.tol = c.number("tolerances", "chain_tol", t.chain.tol);
    t.chain.t_max = c.number("tolerances", "t_max", t.chain.t_max);
    t.chain.min_horizon = c.number("tolerances", "min_horizon", t.chain.min_horizon);
    const double depth = c.number("tolerances", "richardson_depth", t.chain.richardson_depth);
    if (depth != std::floor(depth) || depth > 30)
        fail_at(c.entry("tolerances", "richardson_depth"), "richardson_depth must be an integer in [1, 30]");
    t.chain.richardson_depth = static_cast<int>(depth);
    t.beta_tol = c.number("tolerances", "beta_tol", t.beta_tol);
    t.beta_t_max = c.number("tolerances", "beta_t_max", t.beta_t_max);
    t.koenigs_tol = c.number("tolerances", "koenigs_tol", t.koenigs_tol);
    t.ef_tol = c.number("tolerances", "ef_tol", t.ef_tol);
    t.chain_eq_tol = c.number("tolerances", "chain_eq_tol", t.chain_eq_tol);
    t.pde_tol = c.number("tolerances", "pde_tol", t.pde_tol);
    t.growth_tol = c.number("tolerances", "growth_tol", t.growth_tol);
    t.oracle_tol = c.number("tolerances", "oracle_tol", t.oracle_tol);
    return t;
}

Settings read_settings(Config cfg, const std::optional<fs::path>& out, const std::optional<std::string>& format)
{
    cfg.restrict_sections({"driver", "tolerances", "grids", "output"});
    cfg.restrict_keys("output", {"format", "path", "plot", "plot_kind"});
    Settings s;
    s.driver = read_driver(cfg);
    s.grids = read_grids(cfg);
    s.tol = read_tolerances(cfg);
    s.format = cfg.string("output", "format", "csv");
    if (s.format != "csv" && s.format != "json")
        fail_at(cfg.entry("output", "format"), "format must be \"csv\" or \"json\"");
    if (format) {
        if (*format != "csv" && *format != "json")
            throw ConfigError("--format must be csv or json", 0, 0);
        s.format = *format;
    }
    if (cfg.has("output", "path"))
        s.out_path = cfg.string("output", "path");
    if (cfg.has("output", "plot"))
        s.plot_path = cfg.string("output", "plot");
    if (out) {
        s.out_path = *out;
        s.plot_path = *out;
    }
    s.plot_kind = cfg.string("output", "plot_kind", s.plot_kind);
    if (s.plot_kind != "chain" && s.plot_kind != "trajectory")
        fail_at(cfg.entry("output", "plot_kind"), "plot_kind must be \"chain\" or \"trajectory\"");
    s.cfg = std::move(cfg);
    return s;
}

// ---------------------------------------------------------------------------
// Output helpers

std::string row(std::initializer_list<std::string> fields)
{
    std::string out;
    for (const auto& f : fields) {
        if (!out.empty())
            out += ',';
        out += f;
    }
    return out + "\n";
}

std::string re(cplx z) { return format_real(z.real()); }
std::string im(cplx z) { return format_real(z.imag()); }

json number(double x)
{
    return std::isfinite(x) ? json(x) : json(nullptr);
}

json error_json(const std::string& message, double s, cplx z)
{
    json e;
    e["s"] = number(s);
    e["z_re"] = number(z.real());
    e["z_im"] = number(z.imag());
    e["message"] = message;
    return e;
}

void write_output(const std::optional<fs::path>& path, const std::string& body, std::ostream& out)
{
    if (!path) {
        out << body;
        return;
    }
    std::ofstream f(*path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw ConfigError("cannot write output file " + path->string(), 0, 0);
    f << body;
    if (!f)
        throw ComputationFailure("failed writing " + path->string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

const HerglotzDriver& single_driver(const Settings& s)
{
    if (!s.driver.driver)
        fail_at(s.cfg.entry("driver", "name"), "catalog name \"all\" is only accepted by verify");
    return *s.driver.driver;
}

// Validation gate shared by the computational commands.
bool gate(const HerglotzDriver& d, std::ostream& err)
{
    const ValidationReport rep = validate(d);
    for (const auto& f : rep.failures)
        err << "validation: " << f << "\n";
    return rep.pass;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_validate(const Settings& s, std::ostream& out, std::ostream& err)
{
    const HerglotzDriver& d = single_driver(s);
    ValidationGrid grid;
    grid.times = s.grids.times;
    const ValidationReport rep = validate(d, grid);
    if (s.format == "json") {
        json j;
        j["command"] = "validate";
        j["driver"] = d.label();
        j["pass"] = rep.pass;
        j["herglotz_applicable"] = rep.herglotz_applicable;
        j["min_re_p"] = number(rep.min_re_p);
        j["max_abs_tau"] = number(rep.max_abs_tau);
        json g = json::array();
        for (const auto& [r, m] : rep.max_abs_g)
            g.push_back({{"radius", r}, {"max_abs_g", number(m)}});
        j["max_abs_g"] = g;
        j["failures"] = rep.failures;
        j["warnings"] = rep.warnings;
        write_output(s.out_path, dump(j), out);
    } else {
        std::string body = row({"field", "value"});
        body += row({"pass", rep.pass ? "true" : "false"});
        body += row({"herglotz_applicable", rep.herglotz_applicable ? "true" : "false"});
        body += row({"min_re_p", format_real(rep.min_re_p)});
        body += row({"max_abs_tau", format_real(rep.max_abs_tau)});
        for (const auto& [r, m] : rep.max_abs_g)
        {
            // Shortest round-trip text keeps the radius label readable.
            char buf[32];
            const auto end = std::to_chars(buf, buf + sizeof buf, r).ptr;
            body += row({"max_abs_g@r=" + std::string(buf, end), format_real(m)});
        }
        write_output(s.out_path, body, out);
    }
    for (const auto& f : rep.failures)
        err << "validation: " << f << "\n";
    for (const auto& w : rep.warnings)
        err << "warning: " << w << "\n";
    return rep.pass ? kExitPass : kExitValidationFailure;
}

int cmd_evolve(const Settings& s, std::ostream& out, std::ostream& err)
{
    const HerglotzDriver& d = single_driver(s);
    if (!gate(d, err))
        return kExitValidationFailure;
    std::string csv = row({"s", "t", "z_re", "z_im", "w_re", "w_im", "dw_re", "dw_im"});
    json rows = json::array(), errors = json::array();
    for (double sv : s.grids.s_values)
        for (double t : s.grids.times) {
            if (t < sv)
                continue;
            const auto res = evolve_grid(d, s.grids.points, sv, t, s.tol.evolution, true);
            for (std::size_t j = 0; j < res.size(); ++j) {
                const cplx z = s.grids.points[j];
                if (!res[j].ok()) {
                    json e = error_json(res[j].error, sv, z);
                    e["t"] = t;
                    errors.push_back(e);
                    err << "evolve: s=" << sv << " t=" << t << " z=" << z << ": " << res[j].error << "\n";
                    continue;
                }
                const cplx w = res[j].result->w, v = res[j].result->v.value_or(cplx{});
                csv += row({format_real(sv), format_real(t), re(z), im(z), re(w), im(w), re(v), im(v)});
                rows.push_back({{"s", sv}, {"t", t}, {"z_re", z.real()}, {"z_im", z.imag()},
                                {"w_re", number(w.real())}, {"w_im", number(w.imag())},
                                {"dw_re", number(v.real())}, {"dw_im", number(v.imag())}});
            }
        }
    if (s.format == "json") {
        json j;
        j["command"] = "evolve";
        j["driver"] = d.label();
        j["rows"] = rows;
        j["errors"] = errors;
        write_output(s.out_path, dump(j), out);
    } else {
        write_output(s.out_path, csv, out);
    }
    return errors.empty() ? kExitPass : kExitComputationFailure;
}

int cmd_chain(const Settings& s, std::ostream& out, std::ostream& err)
{
    const HerglotzDriver& d = single_driver(s);
    if (!gate(d, err))
        return kExitValidationFailure;
    const auto res = chain_grid(d, s.grids.s_values, s.grids.points, s.tol.chain);
    const std::size_t np = s.grids.points.size();
    std::string csv = row({"s", "z_re", "z_im", "f_re", "f_im", "horizon", "tail_est"});
    json rows = json::array(), errors = json::array();
    for (std::size_t k = 0; k < res.size(); ++k) {
        const double sv = s.grids.s_values[k / np];
        const cplx z = s.grids.points[k % np];
        if (!res[k].ok()) {
            errors.push_back(error_json(res[k].error, sv, z));
            err << "chain: s=" << sv << " z=" << z << ": " << res[k].error << "\n";
            continue;
        }
        const ChainValue& v = *res[k].value;
        csv += row({format_real(sv), re(z), im(z), re(v.f), im(v.f), format_real(v.horizon),
                    format_real(v.tail_estimate)});
        rows.push_back({{"s", sv}, {"z_re", z.real()}, {"z_im", z.imag()}, {"f_re", number(v.f.real())},
                        {"f_im", number(v.f.imag())}, {"horizon", v.horizon},
                        {"tail_est", number(v.tail_estimate)}});
    }
    if (s.format == "json") {
        json j;
        j["command"] = "chain";
        j["driver"] = d.label();
        j["rows"] = rows;
        j["errors"] = errors;
        write_output(s.out_path, dump(j), out);
    } else {
        write_output(s.out_path, csv, out);
    }
    return errors.empty() ? kExitPass : kExitComputationFailure;
}

int cmd_beta(const Settings& s, std::ostream& out, std::ostream& err)
{
    const HerglotzDriver& d = single_driver(s);
    if (!gate(d, err))
        return kExitValidationFailure;
    const std::optional<FrameCache> cache = FrameCache::from_environment();
    std::string key_text = s.cfg.canonical("driver") + s.cfg.canonical("tolerances");
    for (double t : s.grids.times)
        key_text += format_real(t) + ";";
    const auto frames = cached_frames(d, s.grids.times, s.tol.chain_evolution, cache ? &*cache : nullptr,
                                      content_key(key_text));
    const BetaLimit lim = beta_limit(d, s.tol.beta_tol, s.tol.beta_t_max, s.tol.chain_evolution);
    if (s.format == "json") {
        json j;
        j["command"] = "beta";
        j["driver"] = d.label();
        json fr = json::array();
        for (const auto& f : frames)
            fr.push_back({{"t", f.t}, {"re_a", f.a.real()}, {"im_a", f.a.imag()}, {"re_b", f.b.real()},
                          {"im_b", f.b.imag()}, {"beta", f.beta}});
        j["frames"] = fr;
        j["limit"] = {{"beta", lim.beta}, {"converged", lim.converged}, {"horizon", lim.horizon},
                      {"last_delta", number(lim.last_delta)}};
        write_output(s.out_path, dump(j), out);
    } else {
        std::ostringstream os;
        write_frames_csv(os, frames);
        write_output(s.out_path, os.str(), out);
    }
    err << "beta limit " << format_real(lim.beta) << (lim.converged ? " (converged)" : " (not converged)")
        << " at horizon " << lim.horizon << "\n";
    return kExitPass;
}

int cmd_classify(const Settings& s, std::ostream& out, std::ostream& err)
{
    const HerglotzDriver& d = single_driver(s);
    if (!gate(d, err))
        return kExitValidationFailure;
    const ChainClassification c = classify(d, s.tol.beta_tol, s.tol.beta_t_max, s.tol.chain_evolution);
    const auto opt = [](const std::optional<double>& x) { return x ? format_real(*x) : std::string(); };
    if (s.format == "json") {
        json j;
        j["command"] = "classify";
        j["driver"] = d.label();
        j["verdict"] = to_string(c.verdict);
        j["beta_limit"] = number(c.beta_limit);
        j["omega_radius"] = c.omega_radius ? number(*c.omega_radius) : json(nullptr);
        j["automorphism_threshold"] = c.automorphism_threshold ? number(*c.automorphism_threshold) : json(nullptr);
        j["automorphic_throughout"] = c.automorphic_throughout;
        j["diagnostics"] = c.diagnostics;
        write_output(s.out_path, dump(j), out);
    } else {
        std::string body = row({"verdict", "beta_limit", "omega_radius", "automorphism_threshold",
                                "automorphic_throughout"});
        body += row({to_string(c.verdict), format_real(c.beta_limit), opt(c.omega_radius),
                     opt(c.automorphism_threshold), c.automorphic_throughout ? "true" : "false"});
        write_output(s.out_path, body, out);
    }
    if (!c.diagnostics.empty())
        err << "classify: " << c.diagnostics << "\n";
    return c.verdict == Verdict::Unknown ? kExitComputationFailure : kExitPass;
}

SemigroupModel semigroup_model(const Settings& s)
{
    const Config& c = s.cfg;
    const std::string& kind = s.driver.kind;
    if (kind == "constant")
        return SemigroupModel(
            {c.number("driver", "tau_re", 0.0), c.number("driver", "tau_im", 0.0)},
            [cc = cplx{c.number("driver", "c_re", 0.0), c.number("driver", "c_im", 0.0)}](cplx) { return cc; },
            [](cplx) { return cplx{}; }, "constant");
    if (kind == "bp" && !c.has("driver", "tau_times")) {
        const Expr p = entry_expr(c, "p");
        if (p.depends_on_t())
            fail_at(c.entry("driver", "p"), "semigroup generators must not depend on t");
        return SemigroupModel::from_expression(p, {c.number("driver", "tau_re", 0.0),
                                                   c.number("driver", "tau_im", 0.0)});
    }
    fail_at(c.entry("driver", "kind"), "semigroup needs a constant driver or a bp driver with constant tau");
}

int cmd_semigroup(const Settings& s, std::ostream& out, std::ostream& err)
{
    const SemigroupModel m = semigroup_model(s);
    if (!gate(m.driver(), err))
        return kExitValidationFailure;
    json j;
    j["command"] = "semigroup";
    j["driver"] = m.label();
    j["tau"] = {m.tau().real(), m.tau().imag()};
    json errors = json::array();
    const bool boundary = std::abs(std::abs(m.tau()) - 1.0) <= 1e-12;

    try {
        const DWClass dw = classify_dw(m);
        j["dw"] = {{"kind", to_string(dw.kind)},
                   {"derivative_estimate", number(dw.derivative_estimate)},
                   {"quotients", dw.quotients}};
    } catch (const Error& x) {
        errors.push_back(x.what());
    }
    if (boundary) {
        try {
            const HyperbolicStep st = hyperbolic_step(m, s.grids.orbit_start, s.grids.orbit_step,
                                                      s.grids.orbit_length);
            j["step"] = {{"kind", to_string(st.kind)}, {"limit_estimate", number(st.limit_estimate)},
                         {"last_distance", st.distances.empty() ? json(nullptr) : number(st.distances.back())}};
        } catch (const Error& x) {
            errors.push_back(x.what());
        }
    }

    std::string csv = row({"z_re", "z_im", "h_re", "h_im"});
    json table = json::array();
    try {
        std::function<cplx(cplx)> h;
        double residual = 0.0;
        if (boundary) {
            h = koenigs_boundary(m, 1e-13);
            residual = boundary_koenigs_residual(m, h, s.grids.points);
        } else {
            const ConjugatedModel cm = conjugate_to_origin(m);
            KoenigsOptions ko;
            ko.tol = s.tol.koenigs_tol;
            const EllipticKoenigs k = koenigs_elliptic(cm.model, ko);
            h = [k, M = cm.to_origin](cplx z) { return k.h(M.apply(z)); };
            std::vector<cplx> moved;
            for (cplx z : s.grids.points)
                moved.push_back(cm.to_origin.apply(z));
            residual = elliptic_koenigs_residual(cm.model, k, moved);
            j["multiplier"] = {k.c.real(), k.c.imag()};
        }
        for (cplx z : s.grids.points) {
            const cplx hz = h(z);
            csv += row({re(z), im(z), re(hz), im(hz)});
            table.push_back({{"z_re", z.real()}, {"z_im", z.imag()}, {"h_re", number(hz.real())},
                             {"h_im", number(hz.imag())}});
        }
        j["koenigs_residual"] = number(residual);
    } catch (const Error& x) {
        errors.push_back(x.what());
    }
    j["koenigs"] = table;
    j["errors"] = errors;
    for (const auto& e : errors)
        err << "semigroup: " << e.get<std::string>() << "\n";
    write_output(s.out_path, s.format == "json" ? dump(j) : csv, out);
    return errors.empty() ? kExitPass : kExitComputationFailure;
}

// s values for the PDE check: midpoints of the time grid kept away from breakpoints.
std::vector<double> pde_times(const Settings& s, const HerglotzDriver& d)
{
    std::vector<double> base = s.grids.pde_s;
    if (base.empty())
        for (std::size_t k = 1; k < s.grids.times.size(); ++k)
            base.push_back(0.5 * (s.grids.times[k - 1] + s.grids.times[k]));
    if (base.empty())
        base.push_back(s.grids.times.front() + 0.25);
    std::vector<double> out;
    for (double t : base)
        if (std::none_of(d.breakpoints().begin(), d.breakpoints().end(),
                         [t](double b) { return std::abs(t - b) < 1e-3; }))
            out.push_back(t);
    return out;
}

json report_json(const std::string& driver, const CheckReport& r)
{
    json j;
    j["driver"] = driver;
    j["check"] = r.check;
    j["grid"] = r.grid;
    j["max_residual"] = number(r.max_residual);
    j["threshold"] = r.threshold;
    j["pass"] = r.pass;
    j["skipped"] = r.skipped;
    j["witness"] = {{"s", r.witness.s}, {"t", r.witness.t}, {"z_re", r.witness.z.real()},
                    {"z_im", r.witness.z.imag()}};
    j["errors"] = r.errors;
    return j;
}

std::vector<CheckReport> verify_driver(const Settings& s, const HerglotzDriver& d, const CatalogEntry* oracle)
{
    const Grids& g = s.grids;
    const Tolerances& t = s.tol;
    std::vector<CheckReport> out;
    out.push_back(check_ef_axioms(d, g.times, g.points, t.ef_tol, t.chain_evolution));

    const ChainEvaluator f = standard_chain(d, t.chain);
    out.push_back(check_chain_equation(d, f, g.times, g.points, t.chain_eq_tol, t.chain_evolution));
    // Difference quotients in s amplify the horizon noise of short schedules.
    ChainOptions pde_opt = t.chain;
    pde_opt.min_horizon = std::max(pde_opt.min_horizon, 4.0);
    out.push_back(check_lk_pde(d, standard_chain(d, pde_opt), pde_times(s, d), g.points, t.pde_tol));
    out.push_back(check_beta_monotone(d, g.times, g.points, t.chain_evolution));
    out.push_back(check_growth_bound(d, f, g.times, g.growth_radii, t.growth_tol, t.chain_evolution));

    for (double sv : g.times) {
        CheckReport r;
        try {
            r = check_univalence([&f, sv](cplx z) { return f(sv, z); }, g.univalence_radius);
        } catch (const std::exception& x) {
            r.check = "univalence";
            r.fail(x.what(), {sv, sv, 0.0});
            r.finalize();
        }
        r.check = "univalence@s=" + format_real(sv);
        r.witness.s = r.witness.t = sv;
        out.push_back(std::move(r));
    }

    if (oracle) {
        CheckReport r;
        r.check = "chain_oracle";
        r.threshold = t.oracle_tol;
        r.grid = std::to_string(g.times.size()) + " times x " + std::to_string(g.points.size()) + " points";
        for (double sv : g.times)
            for (cplx z : g.points) {
                try {
                    r.record(std::abs(f(sv, z) - oracle->chain(sv, z)), {sv, sv, z});
                } catch (const std::exception& x) {
                    r.fail(x.what(), {sv, sv, z});
                }
            }
        r.finalize();
        out.push_back(std::move(r));
        if (oracle->flow) {
            CheckReport fr;
            fr.check = "flow_oracle";
            fr.threshold = t.ef_tol;
            fr.grid = r.grid;
            for (std::size_t i = 0; i < g.times.size(); ++i)
                for (cplx z : g.points) {
                    const double sv = g.times[i];
                    try {
                        const auto ws = evolve_through(d, z, sv, std::span(g.times).subspan(i), false,
                                                       t.chain_evolution);
                        for (std::size_t k = 0; k < ws.size(); ++k) {
                            const double tv = g.times[i + k];
                            fr.record(std::abs(ws[k].w - oracle->flow(sv, tv, z)), {sv, tv, z});
                        }
                    } catch (const std::exception& x) {
                        fr.fail(x.what(), {sv, sv, z});
                    }
                }
            fr.finalize();
            out.push_back(std::move(fr));
        }
    }
    return out;
}

int cmd_verify(const Settings& s, std::ostream& out, std::ostream& err)
{
    std::vector<std::pair<std::string, CheckReport>> reports;
    if (!s.driver.catalog.empty()) {
        for (const CatalogEntry& e : s.driver.catalog)
            for (auto& r : verify_driver(s, e.driver, &e))
                reports.emplace_back(e.name, std::move(r));
    } else {
        const HerglotzDriver& d = *s.driver.driver;
        if (!gate(d, err))
            return kExitValidationFailure;
        for (auto& r : verify_driver(s, d, nullptr))
            reports.emplace_back(d.label(), std::move(r));
    }

    bool any_error = false, all_pass = true;
    std::string csv = row({"driver", "check", "grid", "max_residual", "threshold", "pass", "skipped", "witness_s",
                           "witness_t", "witness_re", "witness_im", "errors"});
    json list = json::array();
    for (const auto& [name, r] : reports) {
        any_error = any_error || (!r.skipped && !r.errors.empty());
        all_pass = all_pass && r.pass;
        csv += row({name, r.check, "\"" + r.grid + "\"", format_real(r.max_residual), format_real(r.threshold),
                    r.pass ? "true" : "false", r.skipped ? "true" : "false", format_real(r.witness.s),
                    format_real(r.witness.t), re(r.witness.z), im(r.witness.z), std::to_string(r.errors.size())});
        list.push_back(report_json(name, r));
        if (!r.pass) {
            err << "FAIL " << name << " " << r.check << " residual " << r.max_residual << " > " << r.threshold
                << " at s=" << r.witness.s << " t=" << r.witness.t << " z=" << r.witness.z << "\n";
            for (const auto& e : r.errors)
                err << "  error: " << e << "\n";
        }
    }
    if (s.format == "json") {
        json j;
        j["command"] = "verify";
        j["pass"] = all_pass;
        j["reports"] = list;
        write_output(s.out_path, dump(j), out);
    } else {
        write_output(s.out_path, csv, out);
    }
    if (any_error)
        return kExitComputationFailure;
    return all_pass ? kExitPass : kExitValidationFailure;
}

int cmd_plot(const Settings& s, std::ostream& out, std::ostream& err)
{
    constexpr int kSamples = 512;
    const HerglotzDriver& d = single_driver(s);
    if (!gate(d, err))
        return kExitValidationFailure;
    std::vector<Curve> curves;
    if (s.plot_kind == "trajectory") {
        const double s0 = s.grids.s_values.front();
        const double t1 = std::max(s.grids.times.back(), s0);
        for (cplx z : s.grids.points) {
            Curve c;
            std::ostringstream label;
            label << "trajectory z=" << z;
            c.label = label.str();
            if (t1 > s0) {
                for (const auto& [t, w] : trajectory(d, z, s0, t1, kSamples, s.tol.evolution))
                    c.points.push_back(w);
            }
            curves.push_back(std::move(c));
        }
    } else {
        for (double sv : s.grids.s_values)
            for (double r : s.grids.radii) {
                if (r == 0.0)
                    continue;
                std::vector<cplx> circle;
                for (int k = 0; k < kSamples; ++k)
                    circle.push_back(std::polar(r, 2.0 * std::numbers::pi * k / kSamples));
                const std::vector<double> one{sv};
                const auto res = chain_grid(d, one, circle, s.tol.chain);
                Curve c;
                c.label = "f_" + format_real(sv) + "(|z|=" + format_real(r) + ")";
                c.closed = true;
                for (const auto& o : res) {
                    if (!o.ok())
                        throw ComputationFailure("chain evaluation failed: " + o.error);
                    c.points.push_back(o.value->f);
                }
                curves.push_back(std::move(c));
            }
    }
    write_output(s.plot_path, render_svg(curves, kSamples), out);
    return kExitPass;
}

int dispatch(const std::string& command, Config cfg, const std::optional<fs::path>& out_path,
             const std::optional<std::string>& format, std::ostream& out, std::ostream& err)
{
    const Settings s = read_settings(std::move(cfg), out_path, format);
    if (command == "validate") return cmd_validate(s, out, err);
    if (command == "evolve") return cmd_evolve(s, out, err);
    if (command == "chain") return cmd_chain(s, out, err);
    if (command == "beta") return cmd_beta(s, out, err);
    if (command == "classify") return cmd_classify(s, out, err);
    if (command == "semigroup") return cmd_semigroup(s, out, err);
    if (command == "verify") return cmd_verify(s, out, err);
    if (command == "plot") return cmd_plot(s, out, err);
    err << "unknown command '" << command << "'\n";
    return kExitConfigError;
}

template <class Load>
int guarded(const std::string& origin, std::ostream& err, Load&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        err << e.located(origin) << "\n";
        return kExitConfigError;
    } catch (const InvalidArgument& e) {
        err << origin << ": invalid configuration: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "computation failed: " << e.what() << "\n";
        return kExitComputationFailure;
    }
}

} // namespace

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names{"validate", "evolve",    "chain",  "beta",
                                                "classify", "semigroup", "verify", "plot"};
    return names;
}

int run(const Invocation& inv, std::ostream& out, std::ostream& err)
{
    return guarded(inv.config.string(), err, [&] {
        return dispatch(inv.command, Config::load(inv.config), inv.out, inv.format, out, err);
    });
}

int run_text(const std::string& command, const std::string& config_text, std::optional<std::string> format,
             std::ostream& out, std::ostream& err)
{
    return guarded("<config>", err, [&] {
        Config cfg = Config::parse(config_text);
        if (cfg.has("output", "path") || cfg.has("output", "plot"))
            throw ConfigError("output paths are not accepted for in-memory runs", 1, 1);
        return dispatch(command, std::move(cfg), std::nullopt, format, out, err);
    });
}

} // namespace loewner::cli
