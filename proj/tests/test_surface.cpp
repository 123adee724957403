#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ciconia/sampling.hpp"
#include "ciconia/surface.hpp"
#include "oracles.hpp"

using namespace ciconia;

TEST_CASE("gamma against hand formulas")
{
    CHECK(gamma(ConformalChart::flat(), cplx(0.3, 1.7)) == cplx(0));
    CHECK(std::abs(gamma(ConformalChart::sphere(), 1.0) - cplx(-1)) < 1e-14);
    CHECK(std::abs(gamma(ConformalChart::hyperbolic(), 0.5) - cplx(4.0 / 3.0)) < 1e-14);
    for (cplx z : sample_base(ConformalChart::hyperbolic(), 50, 5)) {
        CHECK(std::abs(gamma(ConformalChart::hyperbolic(), z) - oracle::hyperbolic_gamma(z)) < 1e-9 * std::abs(oracle::hyperbolic_gamma(z)) + 1e-12);
    }
    for (cplx z : sample_base(ConformalChart::sphere(), 50, 6)) {
        CHECK(std::abs(gamma(ConformalChart::sphere(), z) - oracle::sphere_gamma(z)) < 1e-13);
    }
    CHECK_THROWS_AS((void)gamma(ConformalChart::hyperbolic(), 1.2), DomainError);
}

TEST_CASE("gauss curvature of the models")
{
    CHECK(gauss_curvature(ConformalChart::flat(), cplx(2, 1)) == 0.0);
    const oracle::Fn logl = [](const oracle::Coords& c) { return cplx(std::log(oracle::sphere_lambda({c[0], c[1]}))); };
    const oracle::Fn logh = [](const oracle::Coords& c) { return cplx(std::log(oracle::hyperbolic_lambda({c[0], c[1]}))); };
    for (cplx z : sample_base(ConformalChart::sphere(), 100, 1)) {
        const double k = gauss_curvature(ConformalChart::sphere(), z);
        const double fd = (-2.0 / oracle::sphere_lambda(z) * oracle::d_z_zbar(logl, oracle::coords(z, 0))).real();
        CHECK(std::abs(k - 1.0) < 1e-8);
        CHECK(std::abs(fd - 1.0) < 1e-5);
    }
    for (cplx z : sample_base(ConformalChart::hyperbolic(), 100, 2, 0.1)) {
        const double k = gauss_curvature(ConformalChart::hyperbolic(), z);
        const double fd = (-2.0 / oracle::hyperbolic_lambda(z) * oracle::d_z_zbar(logh, oracle::coords(z, 0))).real();
        CHECK(std::abs(k + 1.0) < 1e-8);
        CHECK(std::abs(fd + 1.0) < 1e-4);
    }
    CHECK(std::abs(gauss_curvature(ConformalChart::hyperbolic_half_plane(), cplx(0.3, 0.7)) + 1.0) < 1e-10);
}

TEST_CASE("constant-curvature models report zero spread")
{
    const std::pair<const char*, double> expected[] = {{"flat", 0.0}, {"torus", 0.0}, {"sphere", 1.0}, {"hyperbolic", -1.0}, {"half-plane", -1.0}};
    for (const auto& [name, k] : expected) {
        const auto s = curvature_summary(ConformalChart::model(name), 200, 42);
        CHECK(s.samples == 200);
        CHECK(std::abs(s.mean - k) < 1e-8);
        CHECK(s.stddev < 1e-8);
    }
    CHECK_THROWS_AS((void)ConformalChart::model("cone"), ConfigError);
}

TEST_CASE("dGamma/dzbar equals d2 log lambda / dz dzbar")
{
    for (const auto& chart : {ConformalChart::sphere(), ConformalChart::hyperbolic()}) {
        for (const Point4& p : sample_points(chart, {}, 30, 8)) {
            const BaseJets b = base_jets(chart, p);
            const cplx lhs = wirtinger(b.gamma, Wirtinger::zbar);
            const cplx rhs = wirtinger2(log(b.lambda), Wirtinger::z, Wirtinger::zbar);
            CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("lambda must be positive and real")
{
    ConformalChart bad{"bad", Expression::parse("1-abs2(z)"), Domain::plane()};
    CHECK_THROWS_AS((void)lambda_value(bad, 2.0), DomainError);
    ConformalChart cx{"complex", Expression::parse("1+i*z"), Domain::plane()};
    CHECK_THROWS_AS((void)lambda_value(cx, 0.5), RealityError);
}

TEST_CASE("chart transitions")
{
    const auto sphere = ConformalChart::sphere();
    ConformalChart overlap = sphere;
    overlap.domain = Domain::annulus(0.5, 2.0);
    const auto samples = sample_points(overlap, {}, 50, 17);

    const auto rep = verify_transition(ChartTransition::sphere_inversion(), overlap, overlap, samples);
    CHECK(rep.samples == 50);
    CHECK(rep.roundtrip < 1e-10);
    CHECK(rep.lambda_law < 1e-9);
    CHECK(rep.gamma_law < 1e-9);
    CHECK(rep.w_law < 1e-9);
    CHECK(rep.eta_law < 1e-9);

    const auto id = verify_transition(ChartTransition::identity(), sphere, sphere, sample_points(sphere, {}, 20, 3));
    CHECK(id.max() < 1e-15);

    ConformalChart doubled = overlap;
    doubled.lambda = Expression::parse("8/(1+abs2(z))^2");
    const auto wrong = verify_transition(ChartTransition::sphere_inversion(), overlap, doubled, samples);
    CHECK(std::abs(wrong.lambda_law - 1.0) < 1e-9);

    // Disk model to upper half-plane model.
    ConformalChart disk = ConformalChart::hyperbolic();
    disk.domain = Domain::disk(0.8);
    ConformalChart half = ConformalChart::hyperbolic_half_plane();
    const auto cay = verify_transition(ChartTransition::cayley(), disk, half, sample_points(disk, {}, 50, 23));
    CHECK(cay.max() < 1e-9);
}
