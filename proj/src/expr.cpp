#include "loewner/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

namespace loewner {

using Kind = Expr::Kind;

Expr Expr::number(cplx value)
{
    return Expr(std::make_shared<const Node>(Node{Kind::Number, value, 0, nullptr, nullptr}));
}

Expr Expr::var_z() { return Expr(std::make_shared<const Node>(Node{Kind::VarZ, {}, 0, nullptr, nullptr})); }
Expr Expr::var_t() { return Expr(std::make_shared<const Node>(Node{Kind::VarT, {}, 0, nullptr, nullptr})); }

Expr Expr::unary(Kind k, const Expr& arg)
{
    return Expr(std::make_shared<const Node>(Node{k, {}, 0, arg.node_, nullptr}));
}

Expr Expr::binary(Kind k, const Expr& lhs, const Expr& rhs)
{
    return Expr(std::make_shared<const Node>(Node{k, {}, 0, lhs.node_, rhs.node_}));
}

Expr Expr::power(const Expr& base, int exponent)
{
    return Expr(std::make_shared<const Node>(Node{Kind::Pow, {}, exponent, base.node_, nullptr}));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string fmt_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print_node(const Expr::Node& n, std::string& out)
{
    switch (n.kind) {
    case Kind::Number: {
        const double re = n.number.real();
        const double im = n.number.imag();
        if (im == 0.0) {
            if (std::signbit(re))
                out += "(-" + fmt_real(-re) + ")";
            else
                out += fmt_real(re);
        } else if (re == 0.0 && im == 1.0) {
            out += "i";
        } else {
            out += "(" + fmt_real(re) + "+" + fmt_real(im) + "*i)";
        }
        return;
    }
    case Kind::VarZ: out += "z"; return;
    case Kind::VarT: out += "t"; return;
    case Kind::Neg:
        out += "(-";
        print_node(*n.lhs, out);
        out += ")";
        return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
        static constexpr char ops[] = {'+', '-', '*', '/'};
        out += "(";
        print_node(*n.lhs, out);
        out += ops[static_cast<int>(n.kind) - static_cast<int>(Kind::Add)];
        print_node(*n.rhs, out);
        out += ")";
        return;
    }
    case Kind::Pow:
        out += "(";
        print_node(*n.lhs, out);
        out += "^" + std::to_string(n.exponent) + ")";
        return;
    case Kind::Exp:
    case Kind::Log:
    case Kind::Sqrt:
        out += n.kind == Kind::Exp ? "exp(" : n.kind == Kind::Log ? "log(" : "sqrt(";
        print_node(*n.lhs, out);
        out += ")";
        return;
    }
}

// ---------------------------------------------------------------------------
// Evaluation

double cut_distance(cplx w)
{
    return w.real() <= 0.0 ? std::abs(w.imag()) : std::abs(w);
}

[[noreturn]] void domain_fail(const char* what, const Expr::Node& n)
{
    std::string sub;
    print_node(n, sub);
    throw DomainError(std::string(what) + " in " + sub, sub);
}

cplx eval_node(const Expr::Node& n, cplx z, double t, double& margin)
{
    cplx r;
    switch (n.kind) {
    case Kind::Number: return n.number;
    case Kind::VarZ: return z;
    case Kind::VarT: return {t, 0.0};
    case Kind::Neg: return -eval_node(*n.lhs, z, t, margin);
    case Kind::Add: r = eval_node(*n.lhs, z, t, margin) + eval_node(*n.rhs, z, t, margin); break;
    case Kind::Sub: r = eval_node(*n.lhs, z, t, margin) - eval_node(*n.rhs, z, t, margin); break;
    case Kind::Mul: r = eval_node(*n.lhs, z, t, margin) * eval_node(*n.rhs, z, t, margin); break;
    case Kind::Div: {
        const cplx num = eval_node(*n.lhs, z, t, margin);
        const cplx den = eval_node(*n.rhs, z, t, margin);
        margin = std::min(margin, std::abs(den));
        if (den == cplx{0.0, 0.0})
            domain_fail("division by zero", n);
        r = num / den;
        break;
    }
    case Kind::Pow: {
        const cplx base = eval_node(*n.lhs, z, t, margin);
        int e = n.exponent;
        if (e < 0) {
            margin = std::min(margin, std::abs(base));
            if (base == cplx{0.0, 0.0})
                domain_fail("negative power of zero", n);
        }
        // Binary exponentiation keeps integer powers exact for small exponents.
        cplx acc{1.0, 0.0};
        cplx sq = base;
        for (unsigned k = static_cast<unsigned>(e < 0 ? -e : e); k != 0; k >>= 1) {
            if (k & 1u)
                acc *= sq;
            sq *= sq;
        }
        r = e < 0 ? 1.0 / acc : acc;
        break;
    }
    case Kind::Exp: r = std::exp(eval_node(*n.lhs, z, t, margin)); break;
    case Kind::Log:
    case Kind::Sqrt: {
        const cplx a = eval_node(*n.lhs, z, t, margin);
        margin = std::min(margin, cut_distance(a));
        if (a == cplx{0.0, 0.0})
            domain_fail(n.kind == Kind::Log ? "log of zero" : "sqrt of zero", n);
        r = n.kind == Kind::Log ? std::log(a) : std::sqrt(a);
        break;
    }
    }
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
        domain_fail("non-finite value", n);
    return r;
}

bool depends(const Expr::Node& n, Kind var)
{
    if (n.kind == var)
        return true;
    return (n.lhs && depends(*n.lhs, var)) || (n.rhs && depends(*n.rhs, var));
}

// ---------------------------------------------------------------------------
// Differentiation with light constant folding

bool is_real_number(const Expr& e, double v)
{
    return e.kind() == Kind::Number && e.node().number == cplx{v, 0.0};
}

bool is_number(const Expr& e) { return e.kind() == Kind::Number; }

Expr add(const Expr& a, const Expr& b)
{
    if (is_real_number(a, 0.0)) return b;
    if (is_real_number(b, 0.0)) return a;
    if (is_number(a) && is_number(b))
        return Expr::number(a.node().number + b.node().number);
    return Expr::binary(Kind::Add, a, b);
}

Expr sub(const Expr& a, const Expr& b)
{
    if (is_real_number(b, 0.0)) return a;
    if (is_real_number(a, 0.0)) return Expr::unary(Kind::Neg, b);
    if (is_number(a) && is_number(b))
        return Expr::number(a.node().number - b.node().number);
    return Expr::binary(Kind::Sub, a, b);
}

Expr mul(const Expr& a, const Expr& b)
{
    if (is_real_number(a, 0.0) || is_real_number(b, 0.0)) return Expr::number(0.0);
    if (is_real_number(a, 1.0)) return b;
    if (is_real_number(b, 1.0)) return a;
    if (is_number(a) && is_number(b))
        return Expr::number(a.node().number * b.node().number);
    return Expr::binary(Kind::Mul, a, b);
}

Expr div(const Expr& a, const Expr& b)
{
    if (is_real_number(a, 0.0)) return Expr::number(0.0);
    if (is_real_number(b, 1.0)) return a;
    return Expr::binary(Kind::Div, a, b);
}

Expr neg(const Expr& a)
{
    if (is_number(a)) return Expr::number(-a.node().number);
    return Expr::unary(Kind::Neg, a);
}

} // namespace

// Rebuild an Expr around a shared child without copying the subtree.
struct ExprAccess {
    static Expr wrap(const std::shared_ptr<const Expr::Node>& n)
    {
        return Expr(n);
    }
};

namespace {

Expr wrap(const std::shared_ptr<const Expr::Node>& n) { return ExprAccess::wrap(n); }

Expr derive(const Expr& e)
{
    const auto& n = e.node();
    switch (n.kind) {
    case Kind::Number:
    case Kind::VarT: return Expr::number(0.0);
    case Kind::VarZ: return Expr::number(1.0);
    case Kind::Neg: return neg(derive(wrap(n.lhs)));
    case Kind::Add: return add(derive(wrap(n.lhs)), derive(wrap(n.rhs)));
    case Kind::Sub: return sub(derive(wrap(n.lhs)), derive(wrap(n.rhs)));
    case Kind::Mul: {
        const Expr u = wrap(n.lhs), v = wrap(n.rhs);
        return add(mul(derive(u), v), mul(u, derive(v)));
    }
    case Kind::Div: {
        const Expr u = wrap(n.lhs), v = wrap(n.rhs);
        const Expr du = derive(u), dv = derive(v);
        if (is_real_number(dv, 0.0))
            return div(du, v);
        return div(sub(mul(du, v), mul(u, dv)), Expr::power(v, 2));
    }
    case Kind::Pow: {
        const Expr u = wrap(n.lhs);
        const Expr du = derive(u);
        if (n.exponent == 0 || is_real_number(du, 0.0))
            return Expr::number(0.0);
        const Expr lower = n.exponent == 2 ? u : Expr::power(u, n.exponent - 1);
        return mul(mul(Expr::number(static_cast<double>(n.exponent)), lower), du);
    }
    case Kind::Exp: return mul(e, derive(wrap(n.lhs)));
    case Kind::Log: {
        const Expr u = wrap(n.lhs);
        return div(derive(u), u);
    }
    case Kind::Sqrt: {
        const Expr u = wrap(n.lhs);
        return div(derive(u), mul(Expr::number(2.0), e));
    }
    }
    return Expr::number(0.0);
}

} // namespace

cplx Expr::evaluate(cplx z, double t) const
{
    double margin = std::numeric_limits<double>::infinity();
    return eval_node(*node_, z, t, margin);
}

cplx Expr::evaluate(cplx z, double t, double& margin) const
{
    return eval_node(*node_, z, t, margin);
}

Expr Expr::differentiate_z() const { return derive(*this); }

std::string Expr::print() const
{
    std::string out;
    print_node(*node_, out);
    return out;
}

bool Expr::depends_on_t() const { return depends(*node_, Kind::VarT); }
bool Expr::depends_on_z() const { return depends(*node_, Kind::VarZ); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr run()
    {
        for (std::size_t k = 0; k < src_.size(); ++k)
            if (static_cast<unsigned char>(src_[k]) > 127)
                throw SyntaxError("non-ASCII byte at offset " + std::to_string(k), k, {"ASCII"});
        Expr e = expr();
        skip_ws();
        if (pos_ != src_.size())
            fail({"operator", "end of input"});
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    char peek()
    {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    [[noreturn]] void fail(std::vector<std::string> expected)
    {
        std::string msg = "syntax error at offset " + std::to_string(pos_) + ": expected ";
        for (std::size_t k = 0; k < expected.size(); ++k)
            msg += (k ? " or " : "") + expected[k];
        if (pos_ >= src_.size())
            msg += ", found end of input";
        else
            msg += ", found '" + std::string(1, src_[pos_]) + "'";
        throw SyntaxError(msg, pos_, std::move(expected));
    }

    Expr expr()
    {
        Expr lhs = term();
        for (char c = peek(); c == '+' || c == '-'; c = peek()) {
            ++pos_;
            Expr rhs = term();
            lhs = Expr::binary(c == '+' ? Kind::Add : Kind::Sub, lhs, rhs);
        }
        return lhs;
    }

    Expr term()
    {
        Expr lhs = factor();
        for (char c = peek(); c == '*' || c == '/'; c = peek()) {
            ++pos_;
            Expr rhs = factor();
            lhs = Expr::binary(c == '*' ? Kind::Mul : Kind::Div, lhs, rhs);
        }
        return lhs;
    }

    Expr factor()
    {
        if (peek() == '-') {
            ++pos_;
            return Expr::unary(Kind::Neg, factor());
        }
        Expr base = atom();
        if (peek() == '^') {
            ++pos_;
            bool negative = false;
            if (peek() == '-') {
                negative = true;
                ++pos_;
            }
            skip_ws();
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            if (start == pos_)
                fail({"integer"});
            int value = 0;
            auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
            if (ec != std::errc{} || value > 4096) {
                pos_ = start;
                fail({"integer exponent <= 4096"});
            }
            base = Expr::power(base, negative ? -value : value);
        }
        return base;
    }

    Expr atom()
    {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            Expr inner = expr();
            if (peek() != ')')
                fail({"')'"});
            ++pos_;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            const std::string_view id = src_.substr(start, pos_ - start);
            if (id == "z") return Expr::var_z();
            if (id == "t") return Expr::var_t();
            if (id == "i") return Expr::number({0.0, 1.0});
            Kind fn;
            if (id == "exp") fn = Kind::Exp;
            else if (id == "log") fn = Kind::Log;
            else if (id == "sqrt") fn = Kind::Sqrt;
            else throw UnknownIdentifier(std::string(id), start);
            if (peek() != '(')
                fail({"'('"});
            ++pos_;
            Expr arg = expr();
            if (peek() != ')')
                fail({"')'"});
            ++pos_;
            return Expr::unary(fn, arg);
        }
        fail({"number", "'i'", "'z'", "'t'", "function", "'('", "'-'"});
    }

    Expr number()
    {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mant = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mant += digits();
        }
        if (mant == 0) {
            pos_ = start;
            fail({"digit"});
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                ++pos_;
            if (digits() == 0)
                pos_ = save;  // not an exponent; let the caller report what follows
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc{} || ptr != src_.data() + pos_) {
            pos_ = start;
            fail({"number"});
        }
        return Expr::number(value);
    }
};

} // namespace

Expr parse_expr(std::string_view source)
{
    return Parser(source).run();
}

} // namespace loewner
