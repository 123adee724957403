#include "ciconia/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <functional>

namespace ciconia {

const char* to_string(Identifier id)
{
    switch (id) {
    case Identifier::z: return "z";
    case Identifier::zbar: return "zbar";
    case Identifier::w: return "w";
    case Identifier::wbar: return "wbar";
    case Identifier::r2: return "r2";
    }
    return "?";
}

const char* to_string(Function fn)
{
    switch (fn) {
    case Function::sqrt: return "sqrt";
    case Function::exp: return "exp";
    case Function::log: return "log";
    case Function::conj: return "conj";
    case Function::abs2: return "abs2";
    }
    return "?";
}

const char* to_string(DependenceClass c)
{
    switch (c) {
    case DependenceClass::constant: return "constant";
    case DependenceClass::base_only: return "base-only";
    case DependenceClass::radial: return "radial";
    case DependenceClass::mixed: return "mixed";
    }
    return "?";
}

bool satisfies(DependenceClass actual, DependenceClass required)
{
    if (actual == required) return true;
    if (actual == DependenceClass::constant) return required != DependenceClass::constant;
    return required == DependenceClass::mixed;
}

class ExpressionParser {
public:
    explicit ExpressionParser(std::string_view src) : src_(src) {}

    Expression run()
    {
        Expression e{Expression::RawTag{}};
        out_ = &e;
        e.source_ = std::string(src_);
        e.root_ = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) throw SyntaxError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
        return e;
    }

private:
    using Kind = Expression::Kind;

    int push(Expression::Node n)
    {
        out_->nodes_.push_back(n);
        return static_cast<int>(out_->nodes_.size() - 1);
    }

    int binary(Kind k, int lhs, int rhs)
    {
        Expression::Node n;
        n.kind = k;
        n.lhs = lhs;
        n.rhs = rhs;
        return push(n);
    }

    void skip_ws()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            if (pos_ >= src_.size()) throw SyntaxError(std::string("expected '") + c + "' but input ended", pos_);
            throw SyntaxError(std::string("expected '") + c + "'", pos_);
        }
    }

    int parse_expr()
    {
        int lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = binary(Kind::add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = binary(Kind::sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    int parse_term()
    {
        int lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = binary(Kind::mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = binary(Kind::div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    int parse_unary()
    {
        if (accept('-')) {
            Expression::Node n;
            n.kind = Kind::neg;
            n.lhs = parse_unary();
            return push(n);
        }
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    int parse_power()
    {
        int base = parse_primary();
        while (accept('^')) {
            skip_ws();
            const std::size_t at = pos_;
            bool paren = accept('(');
            int sign = 1;
            if (accept('-')) {
                sign = -1;
            } else {
                accept('+');
            }
            skip_ws();
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (start == pos_) throw SyntaxError("integer exponent expected", at);
            if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E')) {
                throw SyntaxError("only integer exponents are supported", at);
            }
            int value = 0;
            const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
            if (res.ec != std::errc()) throw SyntaxError("exponent out of range", at);
            if (paren) expect(')');
            Expression::Node n;
            n.kind = Kind::pow;
            n.lhs = base;
            n.exponent = sign * value;
            base = push(n);
        }
        return base;
    }

    int parse_number()
    {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        if (text == ".") throw SyntaxError("malformed number", start);
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size()) throw SyntaxError("malformed number", start);
        Expression::Node n;
        n.kind = Kind::literal;
        const bool imaginary = pos_ < src_.size() && src_[pos_] == 'i' &&
                               (pos_ + 1 >= src_.size() || !std::isalnum(static_cast<unsigned char>(src_[pos_ + 1])));
        if (imaginary) {
            ++pos_;
            n.literal = cplx(0.0, v);
        } else {
            n.literal = cplx(v, 0.0);
        }
        return push(n);
    }

    int parse_primary()
    {
        skip_ws();
        if (pos_ >= src_.size()) throw SyntaxError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos_;
            const int inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
            const std::string name(src_.substr(start, pos_ - start));
            skip_ws();
            const bool call = pos_ < src_.size() && src_[pos_] == '(';
            if (call) {
                static const std::pair<const char*, Function> functions[] = {
                    {"sqrt", Function::sqrt}, {"exp", Function::exp}, {"log", Function::log},
                    {"conj", Function::conj}, {"abs2", Function::abs2}};
                for (const auto& [fname, fn] : functions) {
                    if (name == fname) {
                        ++pos_;
                        Expression::Node n;
                        n.kind = Kind::call;
                        n.fn = fn;
                        n.lhs = parse_expr();
                        expect(')');
                        return push(n);
                    }
                }
                throw UnknownIdentifier(name);
            }
            if (name == "i") {
                Expression::Node n;
                n.kind = Kind::literal;
                n.literal = cplx(0.0, 1.0);
                return push(n);
            }
            static const std::pair<const char*, Identifier> identifiers[] = {
                {"z", Identifier::z}, {"zbar", Identifier::zbar}, {"w", Identifier::w},
                {"wbar", Identifier::wbar}, {"r2", Identifier::r2}};
            for (const auto& [iname, id] : identifiers) {
                if (name == iname) {
                    Expression::Node n;
                    n.kind = Kind::identifier;
                    n.id = id;
                    return push(n);
                }
            }
            throw UnknownIdentifier(name);
        }
        throw SyntaxError("unexpected '" + std::string(1, c) + "'", pos_);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Expression* out_ = nullptr;
};

Expression Expression::parse(std::string_view source)
{
    return ExpressionParser(source).run();
}

namespace {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_literal(cplx v)
{
    if (v.imag() == 0.0) return format_double(v.real());
    if (v.real() == 0.0) return format_double(v.imag()) + "i";
    return "(" + format_double(v.real()) + "+" + format_double(v.imag()) + "i)";
}

} // namespace

Expression Expression::constant(cplx value)
{
    std::string text = "(" + format_double(value.real()) + ")+(" + format_double(value.imag()) + ")*i";
    if (value.imag() == 0.0) text = "(" + format_double(value.real()) + ")";
    return parse(text);
}

std::string Expression::to_string() const
{
    std::function<std::string(int)> emit = [&](int index) -> std::string {
        const Node& n = nodes_[static_cast<std::size_t>(index)];
        switch (n.kind) {
        case Kind::literal: return format_literal(n.literal);
        case Kind::identifier: return ciconia::to_string(n.id);
        case Kind::neg: return "(-" + emit(n.lhs) + ")";
        case Kind::add: return "(" + emit(n.lhs) + "+" + emit(n.rhs) + ")";
        case Kind::sub: return "(" + emit(n.lhs) + "-" + emit(n.rhs) + ")";
        case Kind::mul: return "(" + emit(n.lhs) + "*" + emit(n.rhs) + ")";
        case Kind::div: return "(" + emit(n.lhs) + "/" + emit(n.rhs) + ")";
        case Kind::pow: return "(" + emit(n.lhs) + "^" + std::to_string(n.exponent) + ")";
        case Kind::call: return std::string(ciconia::to_string(n.fn)) + "(" + emit(n.lhs) + ")";
        }
        return "?";
    };
    return emit(root_);
}

std::set<Identifier> Expression::identifiers() const
{
    std::set<Identifier> ids;
    for (const Node& n : nodes_) {
        if (n.kind == Kind::identifier) ids.insert(n.id);
    }
    return ids;
}

DependenceClass Expression::classify() const
{
    const auto ids = identifiers();
    if (ids.empty()) return DependenceClass::constant;
    bool base = true;
    bool radial = true;
    for (Identifier id : ids) {
        if (id != Identifier::z && id != Identifier::zbar) base = false;
        if (id != Identifier::r2) radial = false;
    }
    if (base) return DependenceClass::base_only;
    if (radial) return DependenceClass::radial;
    return DependenceClass::mixed;
}

bool Expression::operator==(const Expression& other) const
{
    std::function<bool(int, int)> same = [&](int a, int b) -> bool {
        const Node& x = nodes_[static_cast<std::size_t>(a)];
        const Node& y = other.nodes_[static_cast<std::size_t>(b)];
        if (x.kind != y.kind) return false;
        switch (x.kind) {
        case Kind::literal: return x.literal == y.literal;
        case Kind::identifier: return x.id == y.id;
        case Kind::neg: return same(x.lhs, y.lhs);
        case Kind::pow: return x.exponent == y.exponent && same(x.lhs, y.lhs);
        case Kind::call: return x.fn == y.fn && same(x.lhs, y.lhs);
        default: return same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
        }
    };
    return same(root_, other.root_);
}

} // namespace ciconia
