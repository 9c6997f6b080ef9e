#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "app.hpp"
#include "config.hpp"
#include "svg.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace loewner;
using namespace loewner::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run_cfg(const std::string& command, const std::string& text, std::optional<std::string> format = {})
{
    std::ostringstream out, err;
    const int code = run_text(command, text, std::move(format), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "loewner-cli-test";
    fs::create_directories(dir);
    return dir / name;
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

std::vector<std::string> split(const std::string& row)
{
    std::vector<std::string> out;
    std::istringstream in(row);
    for (std::string f; std::getline(in, f, ',');)
        out.push_back(f);
    return out;
}

// Points of every polygon/polyline element, in document order.
std::vector<std::vector<cplx>> svg_curves(const std::string& svg)
{
    std::vector<std::vector<cplx>> curves;
    const std::regex element(R"(<(polygon|polyline)[^>]* points="([^"]*)\")");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), element); it != std::sregex_iterator(); ++it) {
        std::vector<cplx> pts;
        std::istringstream in((*it)[2].str());
        for (std::string pair; in >> pair;) {
            const auto comma = pair.find(',');
            pts.emplace_back(std::stod(pair.substr(0, comma)), -std::stod(pair.substr(comma + 1)));
        }
        curves.push_back(std::move(pts));
    }
    return curves;
}

const char* const kElliptic = "[driver]\nkind = \"constant\"\nc_re = 1\n";

} // namespace

TEST_CASE("config syntax")
{
    const Config c = Config::parse("# comment\n[driver]\nkind = \"bp\"  # trailing\np = \"(1+z)/(1-z)\"\n"
                                   "[grids]\nradii = [0.3, +0.6]\nangles = 4\nflag = true\nnames = [\"a\", \"b\"]\n");
    CHECK(c.string("driver", "kind") == "bp");
    CHECK(c.numbers("grids", "radii") == std::vector<double>{0.3, 0.6});
    CHECK(c.number("grids", "angles") == 4.0);
    CHECK(c.boolean("grids", "flag", false));
    CHECK(c.number("grids", "missing", 7.0) == 7.0);
    CHECK(c.entry("driver", "p").line == 4);
    CHECK(c.entry("driver", "p").column == 5);
    CHECK(c.canonical("grids") == Config::parse("[grids]\nangles = 4.0\nradii=[0.3,0.6]\nnames=[\"a\",\"b\"]\n"
                                                "flag = true\n")
                                      .canonical("grids"));
}

TEST_CASE("config errors carry positions")
{
    auto error_at = [](const std::string& text) -> std::pair<int, int> {
        try {
            (void)Config::parse(text);
        } catch (const ConfigError& e) {
            return {e.line, e.column};
        }
        return {-1, -1};
    };
    CHECK(error_at("[driver]\nkind = \"bp\nx = 1\n") == std::pair{2, 8});
    CHECK(error_at("kind = 1\n") == std::pair{1, 1});
    CHECK(error_at("[a]\nx = 1\nx = 2\n") == std::pair{3, 1});
    CHECK(error_at("[a]\n[a]\n").first == 2);
    CHECK(error_at("[a]\nx = [1, 2\n").first == 2);
    CHECK(error_at("[a]\nx = 1e\n") == std::pair{2, 5});
    CHECK(error_at("[a]\n= 3\n").first == 2);

    ConfigError e("boom", 3, 9);
    CHECK(e.located("run.cfg") == "run.cfg:3:9: boom");
    CHECK(ConfigError("boom", 0, 0).located("run.cfg") == "run.cfg: boom");
}

TEST_CASE("validate exit codes")
{
    CHECK(run_cfg("validate", kElliptic).code == kExitPass);
    const Run neg = run_cfg("validate", "[driver]\nkind = \"bp\"\np = \"-1\"\n");
    CHECK(neg.code == kExitValidationFailure);
    CHECK(neg.out.find("pass,false") != std::string::npos);

    const Run bad = run_cfg("validate", "[driver]\nkind = \"bp\"\np = \"(1+z\"\n");
    CHECK(bad.code == kExitConfigError);
    CHECK(bad.err.find("<config>:3:10:") == 0);

    const Run unknown = run_cfg("validate", "[driver]\nkind = \"constant\"\nc_re = 1\ncolour = 2\n");
    CHECK(unknown.code == kExitConfigError);
    CHECK(unknown.err.find(":4:1:") != std::string::npos);

    CHECK(run_cfg("validate", "[driver]\nkind = \"warp\"\n").code == kExitConfigError);
    CHECK(run_cfg("validate", "[driver]\nkind = \"constant\"\n[tolerances]\nrel_tol = -1\n").code == kExitConfigError);
    CHECK(run_cfg("validate", "[output]\npath = \"x.csv\"\n[driver]\nkind = \"constant\"\nc_re = 1\n").code
          == kExitConfigError);
}

TEST_CASE("malformed file through the file entry point")
{
    const fs::path p = scratch("bad.cfg");
    std::ofstream(p) << "[driver]\nkind = \"bp\"\np = \"(1+z\"\n";
    std::ostringstream out, err;
    CHECK(run({"validate", p, std::nullopt, std::nullopt}, out, err) == kExitConfigError);
    CHECK(err.str().find(p.string() + ":3:10: ") == 0);
    std::ostringstream out2, err2;
    CHECK(run({"validate", scratch("absent.cfg"), std::nullopt, std::nullopt}, out2, err2) == kExitConfigError);
}

TEST_CASE("computational commands refuse invalid drivers")
{
    const std::string text = "[driver]\nkind = \"bp\"\np = \"-1\"\n";
    for (const char* cmd : {"evolve", "chain", "beta", "classify", "verify"})
        CHECK(run_cfg(cmd, text).code == kExitValidationFailure);
}

TEST_CASE("chain row for the linear chain")
{
    const Run r = run_cfg("chain", std::string(kElliptic) + "[grids]\npoints_re = [0.3]\ns = [1]\n");
    REQUIRE(r.code == kExitPass);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == "s,z_re,z_im,f_re,f_im,horizon,tail_est");
    const auto f = split(ls[1]);
    REQUIRE(f.size() == 7);
    CHECK(std::stod(f[3]) == doctest::Approx(std::exp(1.0) * 0.3).epsilon(1e-9));
    CHECK(std::abs(std::stod(f[3]) - 0.8154845) < 1e-7);
}

TEST_CASE("evolve schema")
{
    const Run r = run_cfg("evolve", std::string(kElliptic) + "[grids]\npoints_re = [0.5]\ntimes = [0, 1]\n");
    REQUIRE(r.code == kExitPass);
    const auto ls = lines(r.out);
    CHECK(ls[0] == "s,t,z_re,z_im,w_re,w_im,dw_re,dw_im");
    bool seen = false;
    for (std::size_t k = 1; k < ls.size(); ++k) {
        const auto f = split(ls[k]);
        REQUIRE(f.size() == 8);
        if (std::stod(f[0]) == 0.0 && std::stod(f[1]) == 1.0) {
            CHECK(std::abs(std::stod(f[4]) - 0.5 * std::exp(-1.0)) < 1e-9);
            CHECK(std::abs(std::stod(f[6]) - std::exp(-1.0)) < 1e-9);
            seen = true;
        }
    }
    CHECK(seen);
}

TEST_CASE("classify JSON for the rotation family")
{
    const Run r = run_cfg("classify", "[driver]\nkind = \"constant\"\nc_im = 1\n", "json");
    REQUIRE(r.code == kExitPass);
    CHECK(r.out.find("\"verdict\": \"NonUnique\"") != std::string::npos);
    const std::regex radius(R"re("omega_radius": ([0-9.eE+-]+))re");
    std::smatch m;
    REQUIRE(std::regex_search(r.out, m, radius));
    CHECK(std::stod(m[1]) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("semigroup report")
{
    const Run r = run_cfg("semigroup", "[driver]\nkind = \"constant\"\nc_re = 1\ntau_re = 1\n", "json");
    REQUIRE(r.code == kExitPass);
    CHECK(r.out.find("\"Parabolic\"") != std::string::npos);
    CHECK(r.out.find("\"ZeroStep\"") != std::string::npos);
}

TEST_CASE("outputs are deterministic")
{
    const std::string text = std::string(kElliptic) + "[grids]\nradii = [0, 0.5]\nangles = 3\ns = [0, 0.5]\n";
    for (const char* cmd : {"evolve", "chain", "beta", "classify"})
        for (const char* fmt : {"csv", "json"}) {
            CAPTURE(cmd);
            const Run a = run_cfg(cmd, text, fmt);
            const Run b = run_cfg(cmd, text, fmt);
            CHECK(a.code == kExitPass);
            CHECK(a.out == b.out);
        }
}

TEST_CASE("frame cache reproduces uncached output")
{
    const fs::path dir = scratch("cache");
    fs::remove_all(dir);
    const std::string text = "[driver]\nkind = \"radial\"\ntheta = \"t\"\n[grids]\ntimes = [0, 0.5, 1, 2]\n";
    ::unsetenv("LOEWNER_CACHE_DIR");
    const Run plain = run_cfg("beta", text);
    ::setenv("LOEWNER_CACHE_DIR", dir.c_str(), 1);
    const Run first = run_cfg("beta", text);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir))
        ++files;
    CHECK(files == 1);
    const Run second = run_cfg("beta", text);
    ::unsetenv("LOEWNER_CACHE_DIR");
    REQUIRE(plain.code == kExitPass);
    CHECK(first.out == plain.out);
    CHECK(second.out == plain.out);
    CHECK(lines(plain.out).front() == "t,re_a,im_a,re_b,im_b,beta");
    fs::remove_all(dir);
}

TEST_CASE("verify exit codes")
{
    const Run ok = run_cfg("verify", std::string(kElliptic) + "[grids]\nradii = [0, 0.5]\nangles = 4\n"
                                                              "times = [0, 1]\ns = [0.5]\n");
    CHECK(ok.code == kExitPass);
    // An unattainable threshold turns the same run into a reported failure.
    const Run strict = run_cfg("verify", std::string(kElliptic) + "[grids]\nradii = [0, 0.5]\nangles = 4\n"
                                                                  "times = [0, 1]\ns = [0.5]\n"
                                                                  "[tolerances]\npde_tol = 1e-30\n");
    CHECK(strict.code == kExitValidationFailure);
    CHECK(strict.out.find("lk_pde") != std::string::npos);
}

TEST_CASE("plot of nested chain images")
{
    const Run r = run_cfg("plot", std::string(kElliptic) + "[grids]\nradii = [0.5]\ns = [0, 1]\n");
    REQUIRE(r.code == kExitPass);
    const auto curves = svg_curves(r.out);
    REQUIRE(curves.size() == 2);
    CHECK(curves[0].size() == 512);
    auto mean_radius = [](const std::vector<cplx>& c) {
        double sum = 0.0;
        for (cplx p : c)
            sum += std::abs(p);
        return sum / static_cast<double>(c.size());
    };
    CHECK(mean_radius(curves[1]) / mean_radius(curves[0]) == doctest::Approx(std::exp(1.0)).epsilon(1e-6));
}

TEST_CASE("plot of a trajectory")
{
    const Run r = run_cfg("plot", std::string(kElliptic)
                                      + "[grids]\npoints_re = [0.5]\ntimes = [0, 2]\n[output]\nplot_kind = \"trajectory\"\n");
    REQUIRE(r.code == kExitPass);
    const auto curves = svg_curves(r.out);
    REQUIRE(curves.size() == 1);
    CHECK(r.out.find("<polyline") != std::string::npos);
    const auto& c = curves[0];
    CHECK(std::abs(c.front() - 0.5) < 1e-8);
    CHECK(std::abs(c.back() - 0.5 * std::exp(-2.0)) < 1e-8);
    for (std::size_t k = 1; k < c.size(); ++k)
        CHECK(std::abs(c[k]) < std::abs(c[k - 1]));
}

TEST_CASE("empty SVG canvas")
{
    const std::string svg = render_svg({});
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("viewBox=\"") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg_curves(svg).empty());
    const std::string one = render_svg({Curve{"a<b", {0.0, 1.0}, false}});
    CHECK(one.find("<title>a&lt;b</title>") != std::string::npos);
}
