#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ciconia/expr.hpp"
#include "ciconia/sampling.hpp"
#include "ciconia/surface.hpp"

#include <random>

using namespace ciconia;

TEST_CASE("parse and classify")
{
    const auto lam = Expression::parse("4/(1+abs2(z))^2");
    CHECK(lam.classify() == DependenceClass::base_only);
    CHECK(lam.identifiers() == std::set<Identifier>{Identifier::z});

    const auto delta = Expression::parse("1/r2^2");
    CHECK(delta.classify() == DependenceClass::radial);

    CHECK(Expression::parse("3+0i").classify() == DependenceClass::constant);
    CHECK(Expression::parse("z^2").classify() == DependenceClass::base_only);
    CHECK(Expression::parse("r2*z").classify() == DependenceClass::mixed);
    CHECK(Expression::parse("zbar*w").classify() == DependenceClass::mixed);

    CHECK(satisfies(DependenceClass::constant, DependenceClass::radial));
    CHECK(satisfies(DependenceClass::constant, DependenceClass::base_only));
    CHECK_FALSE(satisfies(DependenceClass::radial, DependenceClass::base_only));
}

TEST_CASE("parse errors")
{
    try {
        (void)Expression::parse("4/(1+q)^2");
        FAIL("expected UnknownIdentifier");
    } catch (const UnknownIdentifier& e) {
        CHECK(e.name() == "q");
    }
    CHECK_THROWS_AS((void)Expression::parse("foo(z)"), UnknownIdentifier);
    CHECK_THROWS_AS((void)Expression::parse("(z+1"), SyntaxError);
    CHECK_THROWS_AS((void)Expression::parse("z^1.5"), SyntaxError);
    CHECK_THROWS_AS((void)Expression::parse("z^w"), SyntaxError);
    CHECK_THROWS_AS((void)Expression::parse(""), SyntaxError);
    CHECK_THROWS_AS((void)Expression::parse("z+*2"), SyntaxError);
    try {
        (void)Expression::parse("1 + 2 )");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.position() == 6);
    }
}

TEST_CASE("precedence and literals")
{
    const Bindings<cplx> b{cplx(2, 0), cplx(2, 0), cplx(0, 1), cplx(0, -1), 0.0};
    CHECK(Expression::parse("1+2*3").eval(b) == cplx(7));
    CHECK(Expression::parse("-2^2").eval(b) == cplx(-4));
    CHECK(Expression::parse("2^-1").eval(b) == cplx(0.5));
    CHECK(Expression::parse("2^(-2)").eval(b) == cplx(0.25));
    CHECK(Expression::parse("8/2/2").eval(b) == cplx(2));
    CHECK(Expression::parse("2i*i").eval(b) == cplx(-2));
    CHECK(Expression::parse("w*wbar").eval(b) == cplx(1));
    CHECK(Expression::parse("1.5e1").eval(b) == cplx(15));
    CHECK(std::abs(Expression::parse("exp(log(3))").eval(b) - cplx(3)) < 1e-15);
    CHECK(Expression::parse("abs2(3+4i)").eval(b) == cplx(25));
    CHECK(Expression::constant(cplx(0.25, -3)).eval(b) == cplx(0.25, -3));
}

TEST_CASE("evaluation errors")
{
    const Bindings<cplx> b{};
    CHECK_THROWS_AS((void)Expression::parse("1/z").eval(b), PoleError);
    CHECK_THROWS_AS((void)Expression::parse("z^-2").eval(b), PoleError);
    CHECK_THROWS_AS((void)Expression::parse("log(z)").eval(b), DomainError);
    CHECK_THROWS_AS((void)Expression::parse("sqrt(z-1)").eval(b), DomainError);
}

TEST_CASE("r2 expands through the chart")
{
    const auto r2 = Expression::parse("r2");
    CHECK(std::abs(eval_on_chart(r2, {3.0, cplx(0, 2)}, ConformalChart::flat()).value - 4.0) < 1e-15);
    // lambda(0) = 4 on the sphere, so r2 = 4 |w|^2.
    CHECK(std::abs(eval_on_chart(r2, {0.0, 1.0}, ConformalChart::sphere()).value - 4.0) < 1e-15);
    CHECK_THROWS_AS((void)eval_on_chart(Expression::parse("1/r2^2"), {0.5, 0.0}, ConformalChart::flat()), PoleError);
}

namespace {

std::string random_source(std::mt19937_64& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, 11);
    std::uniform_real_distribution<double> coef(-5, 5);
    static const char* ids[] = {"z", "zbar", "w", "wbar", "r2"};
    if (depth == 0) {
        const int k = pick(rng);
        char buf[64];
        if (k < 3) {
            std::snprintf(buf, sizeof buf, "%.6g", coef(rng));
            return buf;
        }
        if (k == 3) {
            std::snprintf(buf, sizeof buf, "%.4gi", coef(rng));
            return buf;
        }
        return ids[k % 5];
    }
    const auto a = random_source(rng, depth - 1);
    const auto b = random_source(rng, depth - 1);
    switch (pick(rng)) {
    case 0: return a + "+" + b;
    case 1: return a + "-" + b;
    case 2: return a + "*" + b;
    case 3: return a + "/(" + b + ")";
    case 4: return "(" + a + ")^" + std::to_string(static_cast<int>(pick(rng)) - 5);
    case 5: return "-" + a;
    case 6: return "sqrt(" + a + ")";
    case 7: return "exp(" + a + ")";
    case 8: return "log(" + a + ")";
    case 9: return "conj(" + a + ")";
    case 10: return "abs2(" + a + ")";
    default: return "(" + a + ")*(" + b + ")";
    }
}

} // namespace

TEST_CASE("canonical text round-trips to an identical tree")
{
    std::mt19937_64 rng(99);
    for (int k = 0; k < 500; ++k) {
        const auto src = random_source(rng, 4);
        const auto e = Expression::parse(src);
        const auto again = Expression::parse(e.to_string());
        CHECK_MESSAGE(again == e, src);
        CHECK(again.to_string() == e.to_string());
        CHECK(again.classify() == e.classify());
    }
}

TEST_CASE("radial chain rule")
{
    // phi(r2) and phi' written by hand.
    const auto phi = Expression::parse("sqrt(1+r2)/(2+r2^2)");
    const auto dphi = [](double r2) {
        const double s = std::sqrt(1 + r2);
        return (0.5 / s) / (2 + r2 * r2) - s * 2 * r2 / ((2 + r2 * r2) * (2 + r2 * r2));
    };
    for (const auto& chart : {ConformalChart::sphere(), ConformalChart::hyperbolic(), ConformalChart::flat()}) {
        for (const Point4& p : sample_points(chart, {}, 40, 11)) {
            const BaseJets b = base_jets(chart, p);
            const Jet2 v = phi.eval(b.bindings());
            const double r2 = b.r2.value.real();
            const cplx lam = b.lambda.value;
            const cplx dlam_dz = wirtinger(b.lambda, Wirtinger::z);
            const cplx phi_w = dphi(r2) * lam * std::conj(p.w);
            const cplx phi_z = dphi(r2) * dlam_dz * p.w * std::conj(p.w);
            CHECK(std::abs(wirtinger(v, Wirtinger::w) - phi_w) < 1e-9);
            CHECK(std::abs(wirtinger(v, Wirtinger::z) - phi_z) < 1e-9);
            CHECK(std::abs(wirtinger(v, Wirtinger::z) - p.w * b.gamma.value * wirtinger(v, Wirtinger::w)) < 1e-9);
        }
    }
}
