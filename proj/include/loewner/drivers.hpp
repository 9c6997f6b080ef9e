#pragma once

#include "loewner/errors.hpp"
#include "loewner/expr.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace loewner {

/// Real function of time: a constant, an expression in t, or a
/// piecewise-linear interpolant of samples (held constant outside the knots).
class TimeFunction {
public:
    TimeFunction() = default;
    static TimeFunction constant(double value);
    static TimeFunction expression(Expr e);
    static TimeFunction samples(std::vector<double> times, std::vector<double> values);

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] std::vector<double> knots() const { return times_; }

private:
    enum class Mode { Constant, Expression, Samples } mode_ = Mode::Constant;
    double value_ = 0.0;
    Expr expr_;
    std::vector<double> times_;
    std::vector<double> values_;
};

/// Trajectory t -> closed disk used for the Denjoy–Wolff point tau(t).
class ComplexPath {
public:
    ComplexPath() = default;
    static ComplexPath constant(cplx value);
    static ComplexPath samples(std::vector<double> times, std::vector<cplx> values);

    [[nodiscard]] cplx operator()(double t) const;
    [[nodiscard]] bool is_constant() const noexcept { return times_.empty(); }
    [[nodiscard]] bool is_identically_zero() const noexcept
    {
        return times_.empty() && value_ == cplx{0.0, 0.0};
    }
    [[nodiscard]] std::vector<double> knots() const { return times_; }
    [[nodiscard]] const std::vector<cplx>& sample_values() const noexcept { return values_; }
    [[nodiscard]] cplx constant_value() const noexcept { return value_; }

private:
    cplx value_{0.0, 0.0};
    std::vector<double> times_;
    std::vector<cplx> values_;
};

using Field = std::function<cplx(cplx z, double t)>;

/// Generator of an evolution family: either Berkson–Porta data (p, tau) with
/// G(z,t) = (z - tau(t)) (conj(tau(t)) z - 1) p(z,t), or a raw vector field G.
class HerglotzDriver {
public:
    enum class Form { BerksonPorta, Raw };

    static HerglotzDriver berkson_porta(Field p, Field dp, ComplexPath tau,
                                        std::vector<double> breakpoints, std::string label);
    static HerglotzDriver raw(Field g, Field dg, std::vector<double> breakpoints, std::string label);

    /// Concatenation of drivers: piece k governs [start_k, start_{k+1}).
    /// With `declare_breakpoints = false` the switch times are hidden from the
    /// integrator (used for negative controls).
    static HerglotzDriver piecewise(std::vector<std::pair<double, HerglotzDriver>> pieces,
                                    bool declare_breakpoints = true);

    [[nodiscard]] cplx vector_field(cplx z, double t) const;
    [[nodiscard]] cplx vector_field_dz(cplx z, double t) const;

    /// Herglotz function p(z,t); BP form only.
    [[nodiscard]] cplx herglotz(cplx z, double t) const;
    [[nodiscard]] cplx tau(double t) const;

    [[nodiscard]] Form form() const noexcept { return form_; }
    [[nodiscard]] bool tau_identically_zero() const noexcept;
    [[nodiscard]] bool has_analytic_derivative() const noexcept { return static_cast<bool>(dfield_); }
    [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    /// Fourth-order central difference of G in z with the given step.
    [[nodiscard]] cplx vector_field_dz_numeric(cplx z, double t, double h = 1e-6) const;

private:
    [[nodiscard]] cplx field_dz(cplx z, double t) const;

    Form form_ = Form::Raw;
    Field field_;   // p for BP form, G for raw
    Field dfield_;  // optional analytic derivative of field_
    std::function<cplx(double)> tau_fn_;
    bool tau_zero_ = false;
    std::vector<double> breakpoints_;
    std::string label_;
};

// Built-in catalogue -----------------------------------------------------

/// p == c, tau == tau0. Requires Re c >= 0 and |tau0| <= 1.
HerglotzDriver constant_driver(cplx c, cplx tau0);

/// Radial slit equation: tau == 0, p = (k + z)/(k - z), k(t) = exp(i theta(t)).
HerglotzDriver radial_driver(TimeFunction theta);

/// Chordal slit equation dw/dt = 2/(xi(t) - w) pulled back to the disk by
/// the Cayley map; stored in raw form.
HerglotzDriver chordal_driver(TimeFunction xi);

/// BP driver from a parsed p(z,t); the z-derivative is taken symbolically.
HerglotzDriver expression_driver(const Expr& p, ComplexPath tau);

// Validation ---------------------------------------------------------------

struct ValidationGrid {
    std::vector<double> radii{0.3, 0.6, 0.9, 0.95};
    int angles = 32;
    std::vector<double> times{0.0, 0.5, 1.0, 2.0};
};

struct ValidationReport {
    bool pass = true;
    bool herglotz_applicable = false;   // false for raw drivers
    double min_re_p = 0.0;
    double max_abs_tau = 0.0;
    std::vector<std::pair<double, double>> max_abs_g;  // (radius, max |G|)
    std::vector<std::string> failures;
    std::vector<std::string> warnings;
};

inline constexpr double kHerglotzSlack = 1e-9;

[[nodiscard]] ValidationReport validate(const HerglotzDriver& d, const ValidationGrid& grid = {});

} // namespace loewner
