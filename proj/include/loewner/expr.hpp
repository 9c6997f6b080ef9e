#pragma once

#include "loewner/errors.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace loewner {

/// Immutable expression tree over the variables z (complex) and t (real).
///
/// Grammar (ASCII, whitespace-insensitive):
///
///     expr   := term { ("+" | "-") term }
///     term   := factor { ("*" | "/") factor }
///     factor := "-" factor | power
///     power  := atom [ "^" ["-"] integer ]
///     atom   := number | "i" | "z" | "t" | ident "(" expr ")" | "(" expr ")"
///     ident  := "exp" | "log" | "sqrt"
///
/// Unary minus binds looser than "^", so -z^2 is -(z^2). log and sqrt use
/// principal branches with the cut on the negative real axis.
class Expr {
public:
    enum class Kind { Number, VarZ, VarT, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Sqrt };

    struct Node {
        Kind kind;
        cplx number{};          // Number
        int exponent = 0;       // Pow
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };

    Expr() : Expr(number(0.0)) {}

    static Expr number(cplx value);
    static Expr var_z();
    static Expr var_t();
    static Expr unary(Kind k, const Expr& arg);
    static Expr binary(Kind k, const Expr& lhs, const Expr& rhs);
    static Expr power(const Expr& base, int exponent);

    [[nodiscard]] Kind kind() const noexcept { return node_->kind; }
    [[nodiscard]] const Node& node() const noexcept { return *node_; }

    /// Throws DomainError on division by zero, log/sqrt at 0, or a non-finite result.
    [[nodiscard]] cplx evaluate(cplx z, double t) const;

    /// As evaluate, and lowers `margin` to the smallest distance from a
    /// singularity met on the way (|denominator|, or distance of a log/sqrt
    /// argument to the branch cut (-inf, 0]).
    [[nodiscard]] cplx evaluate(cplx z, double t, double& margin) const;

    /// Symbolic derivative in z (t held constant), lightly constant-folded.
    [[nodiscard]] Expr differentiate_z() const;

    /// Canonical, fully parenthesised text that parses back to a tree with
    /// bit-identical evaluation.
    [[nodiscard]] std::string print() const;

    [[nodiscard]] bool depends_on_t() const;
    [[nodiscard]] bool depends_on_z() const;

private:
    friend struct ExprAccess;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

/// Throws SyntaxError (with byte offset and expected tokens) or UnknownIdentifier.
[[nodiscard]] Expr parse_expr(std::string_view source);

} // namespace loewner
