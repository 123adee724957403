#pragma once

// A small expression language for conformal factors and weight functions.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' ['-' | '+'] integer)*
//   primary := number ['i'] | 'i' | ident | func '(' expr ')' | '(' expr ')'
//
// Identifiers: z, zbar, w, wbar, r2. Functions: sqrt, exp, log, conj, abs2.
// r2 is expanded to lambda(z) |w|^2 by the caller at evaluation time, so one
// expression serves every chart. sqrt and log use the principal branch with
// the cut on the negative real axis; evaluating on the cut or at zero is a
// DomainError.

#include "ciconia/errors.hpp"
#include "ciconia/jets.hpp"

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ciconia {

enum class Identifier : std::uint8_t { z, zbar, w, wbar, r2 };
enum class Function : std::uint8_t { sqrt, exp, log, conj, abs2 };
enum class DependenceClass : std::uint8_t { constant, base_only, radial, mixed };

const char* to_string(Identifier id);
const char* to_string(Function fn);
const char* to_string(DependenceClass c);

/// True when a function of class `actual` belongs to the class `required`
/// (a constant is both base-only and radial).
bool satisfies(DependenceClass actual, DependenceClass required);

/// Values bound to the identifiers during evaluation.
template <class T>
struct Bindings {
    T z{};
    T zbar{};
    T w{};
    T wbar{};
    T r2{};
};

class Expression {
public:
    enum class Kind : std::uint8_t { literal, identifier, neg, add, sub, mul, div, pow, call };

    struct Node {
        Kind kind = Kind::literal;
        cplx literal{};
        Identifier id = Identifier::z;
        Function fn = Function::sqrt;
        int exponent = 0;
        int lhs = -1;
        int rhs = -1;
    };

    Expression() : Expression(parse("0")) {}

    static Expression parse(std::string_view source);
    static Expression constant(cplx value);

    const std::string& source() const { return source_; }

    /// Fully parenthesized canonical text; parses back to an identical tree.
    std::string to_string() const;

    DependenceClass classify() const;
    std::set<Identifier> identifiers() const;

    bool uses(Identifier id) const { return identifiers().count(id) != 0; }

    /// Structural equality of the syntax trees (source text is ignored).
    bool operator==(const Expression& other) const;

    template <class T>
    T eval(const Bindings<T>& b) const
    {
        return eval_node<T>(root_, b);
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    int root() const { return root_; }

private:
    friend class ExpressionParser;
    struct RawTag {};
    explicit Expression(RawTag) {}

    template <class T>
    T eval_node(int index, const Bindings<T>& b) const;

    std::string source_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

namespace detail {

inline bool on_branch_cut(cplx v) { return v == cplx(0.0) || (v.imag() == 0.0 && v.real() < 0.0); }

template <class T>
T integer_power(const T& base, int n)
{
    if (n == 0) return T(cplx(1.0));
    unsigned k = static_cast<unsigned>(n < 0 ? -n : n);
    T result(cplx(1.0));
    T square = base;
    bool first = true;
    while (k != 0) {
        if (k & 1U) {
            result = first ? square : result * square;
            first = false;
        }
        k >>= 1U;
        if (k != 0) square = square * square;
    }
    if (n < 0) return T(cplx(1.0)) / result;
    return result;
}

} // namespace detail

template <class T>
T Expression::eval_node(int index, const Bindings<T>& b) const
{
    using std::conj;
    using std::exp;
    using std::log;
    using std::sqrt;
    const Node& n = nodes_[static_cast<std::size_t>(index)];
    switch (n.kind) {
    case Kind::literal: return T(n.literal);
    case Kind::identifier:
        switch (n.id) {
        case Identifier::z: return b.z;
        case Identifier::zbar: return b.zbar;
        case Identifier::w: return b.w;
        case Identifier::wbar: return b.wbar;
        case Identifier::r2: return b.r2;
        }
        break;
    case Kind::neg: return -eval_node<T>(n.lhs, b);
    case Kind::add: return eval_node<T>(n.lhs, b) + eval_node<T>(n.rhs, b);
    case Kind::sub: return eval_node<T>(n.lhs, b) - eval_node<T>(n.rhs, b);
    case Kind::mul: return eval_node<T>(n.lhs, b) * eval_node<T>(n.rhs, b);
    case Kind::div: {
        T num = eval_node<T>(n.lhs, b);
        T den = eval_node<T>(n.rhs, b);
        if (primal(den) == cplx(0.0)) throw PoleError("division by zero");
        return num / den;
    }
    case Kind::pow: {
        T base = eval_node<T>(n.lhs, b);
        if (n.exponent < 0 && primal(base) == cplx(0.0)) throw PoleError("negative power of zero");
        return detail::integer_power(base, n.exponent);
    }
    case Kind::call: {
        T arg = eval_node<T>(n.lhs, b);
        switch (n.fn) {
        case Function::sqrt:
            if (detail::on_branch_cut(primal(arg))) throw DomainError("sqrt evaluated on its branch cut or at zero");
            return sqrt(arg);
        case Function::log:
            if (detail::on_branch_cut(primal(arg))) throw DomainError("log evaluated on its branch cut or at zero");
            return log(arg);
        case Function::exp: return exp(arg);
        case Function::conj: return conj(arg);
        case Function::abs2: return arg * conj(arg);
        }
        break;
    }
    }
    throw Error("corrupt expression tree");
}

} // namespace ciconia
