#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ciconia/geometry4d.hpp"
#include "ciconia/kahler.hpp"
#include "oracles.hpp"

#include <numbers>
#include <sstream>

using namespace ciconia;

namespace {

// Riemann tensor from finite differences of the assembled metric values only:
// no metric jets, no analytic d(G^-1).
struct FdCurvature {
    double riemann[4][4][4][4];
    double ricci[4][4];
};

FdCurvature fd_curvature(const ConformalChart& chart, const WeightTriple& w, const Point4& p, double step = 1e-3)
{
    using M = Eigen::Matrix4d;
    const auto c0 = p.real();
    auto G = [&](std::array<double, 4> c) { return assemble(chart, w, Point4::from_real(c)).G; };
    const double h = step;
    // Fourth-order central stencil, nested for the second derivatives.
    auto d1 = [&](const std::function<M(std::array<double, 4>)>& F, std::array<double, 4> c, int i) {
        auto at = [&](double d) {
            auto q = c;
            q[i] += d;
            return F(q);
        };
        return M((-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h));
    };
    M g = G(c0);
    M gi = g.inverse();
    std::array<M, 4> dg;
    std::array<std::array<M, 4>, 4> d2g;
    for (int i = 0; i < 4; ++i) {
        dg[i] = d1(G, c0, i);
        for (int j = 0; j < 4; ++j) d2g[i][j] = d1([&](std::array<double, 4> c) { return d1(G, c, i); }, c0, j);
    }
    // Gamma^a_bc and its derivative by the textbook formulas.
    double low[4][4][4], gam[4][4][4], dgam[4][4][4][4];
    for (int d = 0; d < 4; ++d)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) low[d][b][c] = 0.5 * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                gam[a][b][c] = 0;
                for (int d = 0; d < 4; ++d) gam[a][b][c] += gi(a, d) * low[d][b][c];
            }
    for (int e = 0; e < 4; ++e) {
        const M dgi = -gi * dg[e] * gi;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c) {
                    double s = 0;
                    for (int d = 0; d < 4; ++d)
                        s += dgi(a, d) * low[d][b][c] + gi(a, d) * 0.5 * (d2g[e][b](d, c) + d2g[e][c](d, b) - d2g[e][d](b, c));
                    dgam[e][a][b][c] = s;
                }
    }
    FdCurvature out{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    double q = dgam[c][a][d][b] - dgam[d][a][c][b];
                    for (int e = 0; e < 4; ++e) q += gam[a][c][e] * gam[e][d][b] - gam[a][d][e] * gam[e][c][b];
                    out.riemann[a][b][c][d] = q;
                }
    for (int b = 0; b < 4; ++b)
        for (int d = 0; d < 4; ++d) {
            out.ricci[b][d] = 0;
            for (int a = 0; a < 4; ++a) out.ricci[b][d] += out.riemann[a][b][a][d];
        }
    return out;
}

// Trapezoid-free composite Simpson rule, used as an independent length oracle.
double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return s * h / 3.0;
}

Point4 radial_point(const ConformalChart& chart, cplx z, double r2)
{
    return {z, cplx(std::sqrt(r2 / lambda_value(chart, z)), 0.0)};
}

} // namespace

TEST_CASE("curvature: worked examples")
{
    const auto flat = ConformalChart::flat();
    const auto sasaki = WeightTriple::parse("1", "0", "1");
    const auto c = curvature(flat, sasaki, {cplx(0.3, -0.2), cplx(1.0, 0.5)});
    CHECK(c.max_riemann() < 1e-12);
    CHECK(c.scalar == doctest::Approx(0.0));

    // Flat example a = z^2: Kaehler and flat.
    const auto fe = flat_example(Expression::parse("z^2"));
    double worst = 0.0;
    for (const Point4& p : sample_points(flat, {0.1, 4.0}, 50, 21)) worst = std::max(worst, curvature(flat, fe, p).max_riemann());
    CHECK(worst < 1e-6);

    // cy-i, f = 1, a = 1 at r2 = 1: Ricci-flat but not flat.
    const auto cy = make_family(FamilyKind::cy_i, {1.0, 0.0, 1.0}, flat);
    // With f, a constant and Gamma = 0 it is f|dz + (abar/f) dw|^2 + |dw|^2 / (f r^4):
    // a flat metric (w -> 1/w), so Riemann vanishes as well.
    const auto cc = curvature(flat, cy.weights, radial_point(flat, cplx(0.4, 0.1), 1.0));
    CHECK(cc.max_ricci() < 1e-6);
    CHECK(cc.max_riemann() < 1e-9);
    // On the sphere the family is Ricci-flat and not flat.
    const auto sphere = ConformalChart::sphere();
    const auto iii = make_family(FamilyKind::cy_iii, {1.0, 0.0, 1.0}, sphere);
    const auto cs = curvature(sphere, iii.weights, radial_point(sphere, cplx(0.2, 0.1), 0.5));
    CHECK(cs.max_ricci() < 1e-6);
    CHECK(cs.max_riemann() > 1e-3);

    CHECK_THROWS_AS((void)curvature(flat, WeightTriple::parse("1", "1", "1"), {0.0, 1.0}), DegenerateMetric);
}

TEST_CASE("curvature agrees with a finite-difference oracle")
{
    const std::array<std::array<const char*, 3>, 3> triples{{
        {"1", "0", "1"},
        {"2+abs2(z)", "0.3*z", "1+r2"},
        {"3", "0.5*i", "2+r2"},
    }};
    for (const auto& chart : {ConformalChart::sphere(), ConformalChart::hyperbolic(), ConformalChart::flat()}) {
        for (const auto& t : triples) {
            const auto w = WeightTriple::parse(t[0], t[1], t[2]);
            for (const Point4& p : sample_points(chart, {0.3, 2.0}, 4, 8, 0.1)) {
                const auto c = curvature(chart, w, p);
                const auto o = fd_curvature(chart, w, p);
                double dev = 0.0;
                const double scale = std::max(1.0, c.max_riemann());
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b)
                        for (int k = 0; k < 4; ++k)
                            for (int d = 0; d < 4; ++d) dev = std::max(dev, std::abs(c.riemann[a][b][k][d] - o.riemann[a][b][k][d]));
                CAPTURE(chart.name);
                CHECK(dev / scale < 1e-5);
            }
        }
    }
}

TEST_CASE("curvature identities on random admissible samples")
{
    const auto sphere = ConformalChart::sphere();
    const auto w = WeightTriple::parse("2+abs2(z)", "0.3*z+0.2*r2", "1+r2");
    double bianchi = 0, anti = 0, pair = 0, ric = 0;
    for (const Point4& p : sample_points(sphere, {0.2, 3.0}, 200, 31)) {
        const auto id = identities(curvature(sphere, w, p));
        bianchi = std::max(bianchi, id.bianchi);
        anti = std::max(anti, id.antisymmetry);
        pair = std::max(pair, id.pair_symmetry);
        ric = std::max(ric, id.ricci_symmetry);
    }
    CHECK(bianchi < 1e-6);
    CHECK(anti < 1e-8);
    CHECK(pair < 1e-6);
    CHECK(ric < 1e-8);
}

TEST_CASE("Ricci-flat families have vanishing 4D Ricci tensor")
{
    struct Item {
        FamilyKind kind;
        const char* chart;
        FamilyParams params;
    };
    const Item items[] = {
        {FamilyKind::cy_i, "flat", {1.0, 0.0, 1.0}},
        {FamilyKind::cy_i, "torus", {cplx(0.5, 0.5), 0.0, 2.0}},
        {FamilyKind::cy_ii, "sphere", {0.0, 1.0, 1.0}},
        {FamilyKind::cy_iii, "sphere", {cplx(0.6, 0.2), 0.5, 1.0}},
        {FamilyKind::cy_iv, "hyperbolic", {1.0, 1.0, 1.0}},
        {FamilyKind::general, "sphere", {0.0, -1.0, 1.0}},
    };
    for (const Item& it : items) {
        const auto chart = ConformalChart::model(it.chart);
        const auto fam = make_family(it.kind, it.params, chart);
        CAPTURE(to_string(it.kind));
        double worst = 0.0, scalar = 0.0;
        for (const Point4& p : sample_points(chart, fam.interior(), 40, 3, 0.05)) {
            const auto c = curvature(chart, fam.weights, p);
            worst = std::max(worst, c.max_ricci());
            scalar = std::max(scalar, std::abs(c.scalar));
        }
        CHECK(worst < 1e-6);
        CHECK(scalar < 1e-6);
    }
}

TEST_CASE("Kaehler cross-check: Ric(J., .) is the Ricci form")
{
    for (const char* id : {"iii", "iv", "vi", "vii", "viii"}) {
        const auto& c = kahler_case(id);
        const auto chart = ConformalChart::model(c.chart);
        const auto inst = instantiate_case(c, chart);
        CAPTURE(id);
        double dev = 0.0, dev_neg = 0.0, scal = 0.0, size = 0.0;
        for (const Point4& p : sample_points(chart, inst.fibre, 30, 17, 0.05)) {
            const auto cv = curvature(chart, inst.weights, p);
            const Eigen::Matrix4d ric = ricci_two_form(cv);
            const FormMatrix P = ricci_form(chart, inst.weights, p, RicciRoute::split);
            const Eigen::Matrix4d rho = omega_real(form_components(P));
            dev = std::max(dev, (ric - rho).cwiseAbs().maxCoeff());
            dev_neg = std::max(dev_neg, (ric + rho).cwiseAbs().maxCoeff());
            size = std::max(size, rho.cwiseAbs().maxCoeff());
            // scalar = 4 Re tr(H^-1 P); on an Einstein metric P = (S/8) H gives scalar = S.
            const Eigen::Matrix2cd H = assemble(chart, inst.weights, p).H;
            scal = std::max(scal, std::abs(cv.scalar - 4.0 * (H.inverse() * P).trace().real()) / std::max(1.0, std::abs(cv.scalar)));
        }
        CHECK(dev < 1e-6);
        CHECK(scal < 1e-6);
        if (size > 1e-3) CHECK(dev_neg > 1e-3); // the sign is actually tested
    }
}

TEST_CASE("geodesics")
{
    const auto flat = ConformalChart::flat();
    const auto sasaki = WeightTriple::parse("1", "0", "1");

    SUBCASE("flat Sasaki: straight line")
    {
        const auto init = make_state(flat, sasaki, {0.1, 0.2, 0.3, 0.4}, {1, 0, 1, 0});
        const auto tr = geodesic(flat, sasaki, init, 3.0);
        CHECK(tr.exit == ExitReason::completed);
        CHECK(tr.tau.back() == doctest::Approx(3.0));
        double dev = 0.0;
        for (std::size_t k = 0; k < tr.tau.size(); ++k) {
            const double t = tr.tau[k];
            const std::array<double, 4> expect{0.1 + t, 0.2, 0.3 + t, 0.4};
            for (int i = 0; i < 4; ++i) dev = std::max(dev, std::abs(tr.states[k].position[i] - expect[i]));
        }
        CHECK(dev < 1e-10);
    }

    SUBCASE("sphere Sasaki: energy conservation and reversibility")
    {
        const auto sphere = ConformalChart::sphere();
        auto init = make_state(sphere, sasaki, {0.2, -0.1, 0.5, 0.3}, {0.3, 0.2, -0.4, 0.6});
        const double n = std::sqrt(init.energy);
        for (double& v : init.velocity) v /= n;
        init.energy = 1.0;
        const auto tr = geodesic(sphere, sasaki, init, 10.0);
        REQUIRE(tr.exit == ExitReason::completed);
        CHECK(tr.max_energy_drift < 1e-7);
        CHECK(tr.drift_per_unit() < 1e-8);

        GeodesicState back = tr.states.back();
        for (double& v : back.velocity) v = -v;
        const auto rt = geodesic(sphere, sasaki, back, 10.0);
        double dev = 0.0;
        for (int i = 0; i < 4; ++i) dev = std::max(dev, std::abs(rt.states.back().position[i] - init.position[i]));
        CHECK(dev < 1e-7);

        std::ostringstream csv;
        tr.write_csv(csv);
        CHECK(csv.str().rfind("tau,x,y,s,t,vx,vy,vs,vt,energy\n", 0) == 0);
    }

    SUBCASE("cy-iii: geodesic along grad r2 reaches beta+ in finite parameter")
    {
        const auto sphere = ConformalChart::sphere();
        const auto fam = make_family(FamilyKind::cy_iii, {1.0, 0.0, 1.0}, sphere);
        REQUIRE(fam.r2_hi == doctest::Approx(1.0));
        const Point4 p = radial_point(sphere, 0.0, 0.5);
        // At z = 0 grad lambda = 0, so d(r2) is proportional to ds; v = G^-1 ds.
        // (The coordinate direction d/ds is bent back towards the zero section by the a-coupling.)
        const Eigen::Vector4d v = assemble(sphere, fam.weights, p).G.inverse() * Eigen::Vector4d(0, 0, 1, 0);
        auto init = make_state(sphere, fam.weights, p.real(), {v[0], v[1], v[2], v[3]});
        const double n = std::sqrt(init.energy);
        for (double& v : init.velocity) v /= n;
        init.energy = 1.0;
        GeodesicOptions opt;
        opt.fibre = FibreRange{fam.r2_lo, fam.r2_hi};
        const auto tr = geodesic(sphere, fam.weights, init, 50.0, opt);
        CHECK(tr.exit == ExitReason::domain_exit);
        const auto& last = tr.states.back().position;
        const double r2 = lambda_value(sphere, {last[0], last[1]}) * (last[2] * last[2] + last[3] * last[3]);
        CHECK(r2 > 0.999);
        CHECK(tr.tau.back() < 1.0);
        CHECK(tr.tau.back() > 0.1);
    }
}

TEST_CASE("fibre length and endpoint exponents")
{
    const auto flat = ConformalChart::flat();
    const auto cy = make_family(FamilyKind::cy_i, {1.0, 0.0, 1.0}, flat);
    // sqrt(h) = sqrt(1 + r^-4).
    const auto fl = fibre_length(flat, cy.weights, 0.0, 0.5, 2.0);
    const double oracle = simpson([](double r) { return std::sqrt(1.0 + std::pow(r, -4)); }, 0.5, 2.0);
    CHECK(fl.value == doctest::Approx(oracle).epsilon(1e-9));
    CHECK_FALSE(fl.divergent());

    const auto whole = fibre_length(flat, cy.weights, 0.0, 0.0, std::numeric_limits<double>::infinity());
    CHECK(whole.lo.divergent);
    CHECK(whole.hi.divergent);
    CHECK(whole.lo.alpha == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(std::abs(whole.hi.alpha) < 0.05);
    CHECK(std::isinf(whole.value));

    // Convergent singular endpoint: sqrt(h) = (1 - r)^(-1/4) on [0, 1], length 4/3.
    const auto w = WeightTriple::parse("1", "0", "1/sqrt(1-sqrt(r2))");
    const auto fin = fibre_length(flat, w, 0.0, 0.0, 1.0);
    CHECK(fin.hi.alpha == doctest::Approx(-0.25).epsilon(0.05));
    CHECK_FALSE(fin.divergent());
    CHECK(fin.value == doctest::Approx(4.0 / 3.0).epsilon(1e-6));

    // log sqrt(h) quadratic in log r: no power law at r = 0.
    CHECK_THROWS_AS((void)fibre_length(flat, WeightTriple::parse("1", "0", "exp(-log(r2)^2)"), 0.0, 0.0, 1.0),
                    ExponentFitUnstable);
}

TEST_CASE("completeness verdicts")
{
    struct Item {
        FamilyKind kind;
        const char* chart;
        FamilyParams params;
        double inner, outer;
        bool inner_inf, outer_inf;
        Completeness verdict;
    };
    const Item items[] = {
        {FamilyKind::cy_i, "flat", {1.0, 0.0, 1.0}, -2.0, 0.0, true, true, Completeness::complete},
        {FamilyKind::cy_ii, "sphere", {0.0, 1.0, 1.0}, -1.5, -0.25, true, false, Completeness::complete_away_from_zero_section},
        {FamilyKind::cy_iii, "sphere", {1.0, 0.0, 1.0}, -1.5, -0.25, true, false, Completeness::complete_away_from_zero_section},
        {FamilyKind::cy_iv, "hyperbolic", {1.0, 1.0, 1.0}, -0.25, -0.5, false, true, Completeness::complete_with_boundary_added},
    };
    for (const Item& it : items) {
        CAPTURE(to_string(it.kind));
        const auto chart = ConformalChart::model(it.chart);
        const auto rep = completeness_report(make_family(it.kind, it.params, chart), chart);
        CHECK(rep.inner_infinite == it.inner_inf);
        CHECK(rep.outer_infinite == it.outer_inf);
        CHECK(rep.verdict == it.verdict);
        CHECK(std::abs(rep.inner.alpha - it.inner) <= 0.05 * std::max(0.25, std::abs(it.inner)));
        CHECK(std::abs(rep.outer.alpha - it.outer) <= 0.05 * std::max(0.25, std::abs(it.outer)));
        CHECK(rep.interior_length > 0.0);
    }
}
