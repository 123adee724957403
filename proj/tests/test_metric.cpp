#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ciconia/metric.hpp"
#include "ciconia/sampling.hpp"
#include "oracles.hpp"

using namespace ciconia;

namespace {

using Row = std::array<cplx, 4>;

const cplx I(0, 1);
const Row dz{1.0, I, 0.0, 0.0};
const Row dzb{1.0, -I, 0.0, 0.0};
const Row dw{0.0, 0.0, 1.0, I};
const Row dwb{0.0, 0.0, 1.0, -I};

Row combine(cplx a, const Row& u, cplx b, const Row& v)
{
    Row r;
    for (int k = 0; k < 4; ++k) r[k] = a * u[k] + b * v[k];
    return r;
}

Row conj_row(const Row& u)
{
    Row r;
    for (int k = 0; k < 4; ++k) r[k] = std::conj(u[k]);
    return r;
}

// Symmetric product (alpha.beta)_kl = alpha_k beta_l + beta_k alpha_l.
Eigen::Matrix4cd sym(const Row& a, const Row& b)
{
    Eigen::Matrix4cd m;
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) m(k, l) = a[k] * b[l] + b[k] * a[l];
    return m;
}

// Wedge (alpha ^ beta)_kl = alpha_k beta_l - alpha_l beta_k.
Eigen::Matrix4cd wedge(const Row& a, const Row& b)
{
    Eigen::Matrix4cd m;
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) m(k, l) = a[k] * b[l] - a[l] * b[k];
    return m;
}

// Hand expansion of (lambda/2)(f dz.dzbar + a dz.etabar + abar eta.dzbar + h eta.etabar)
// with eta = w Gamma dz + dw.
Eigen::Matrix4d metric_oracle(double lambda, cplx gamma, cplx w, double f, cplx a, double h)
{
    const Row eta = combine(w * gamma, dz, 1.0, dw);
    const Row etab = conj_row(eta);
    const Eigen::Matrix4cd m = 0.5 * lambda * (f * sym(dz, dzb) + a * sym(dz, etab) + std::conj(a) * sym(eta, dzb) + h * sym(eta, etab));
    CHECK(m.imag().cwiseAbs().maxCoeff() < 1e-12);
    return m.real();
}

double max_dev(const Eigen::Matrix4d& a, const Eigen::Matrix4d& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("assembled metric: worked examples")
{
    const auto sasaki = WeightTriple::parse("1", "0", "1");
    const auto flat = assemble(ConformalChart::flat(), sasaki, {cplx(0.3, -1), cplx(2, 0.5)});
    CHECK(max_dev(flat.G, Eigen::Matrix4d::Identity()) == 0.0);
    CHECK(flat.signature == Signature::riemannian);

    const auto s0 = assemble(ConformalChart::sphere(), sasaki, {0.0, cplx(0.7, -0.2)});
    CHECK(max_dev(s0.G, 4.0 * Eigen::Matrix4d::Identity()) < 1e-14);

    // Flat chart, lambda = 1, Gamma = 0: the coordinate matrix is the frame matrix.
    const auto yano_i = assemble(ConformalChart::flat(), WeightTriple::parse("1", "i", "1"), {0.4, 1.0});
    Eigen::Matrix4d expect;
    expect << 1, 0, 0, 1, //
        0, 1, -1, 0,      //
        0, -1, 1, 0,      //
        1, 0, 0, 1;
    CHECK(max_dev(frame_matrix(1.0, I, 1.0), expect) == 0.0);
    CHECK(max_dev(yano_i.G, expect) < 1e-15);
    CHECK(yano_i.signature == Signature::degenerate); // Delta = 1 - 1 = 0
}

TEST_CASE("Sasaki reconstruction against the hand expansion")
{
    const auto sasaki = WeightTriple::parse("1", "0", "1");
    for (const auto& chart : {ConformalChart::sphere(), ConformalChart::hyperbolic()}) {
        const bool sph = chart.name == "sphere";
        for (const Point4& p : sample_points(chart, {}, 50, 31, 0.05)) {
            const auto m = assemble(chart, sasaki, p);
            const double lam = sph ? oracle::sphere_lambda(p.z) : oracle::hyperbolic_lambda(p.z);
            const cplx gam = sph ? oracle::sphere_gamma(p.z) : oracle::hyperbolic_gamma(p.z);
            const Eigen::Matrix4d ref = metric_oracle(lam, gam, p.w, 1.0, 0.0, 1.0);
            CHECK(max_dev(m.G, ref) < 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("general weights against the hand expansion and the adapted frame")
{
    const auto weights = WeightTriple::parse("2+abs2(z)", "0.3*z+0.2*i*r2", "1+r2");
    const auto chart = ConformalChart::sphere();
    for (const Point4& p : sample_points(chart, {}, 50, 5)) {
        const auto m = assemble(chart, weights, p);
        const double lam = oracle::sphere_lambda(p.z);
        const cplx gam = oracle::sphere_gamma(p.z);
        const double r2 = lam * std::norm(p.w);
        const double f = 2 + std::norm(p.z);
        const cplx a = 0.3 * p.z + 0.2 * I * r2;
        const double h = 1 + r2;
        CHECK(std::abs(m.f - f) < 1e-13);
        CHECK(std::abs(m.a - a) < 1e-13);
        CHECK(std::abs(m.h - h) < 1e-12);
        const Eigen::Matrix4d ref = metric_oracle(lam, gam, p.w, f, a, h);
        CHECK(max_dev(m.G, ref) < 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));

        // Adapted orthonormal frame: horizontal lifts of d/dx, d/dy (killed by eta)
        // and the vertical d/ds, d/dt, all scaled by 1/sqrt(lambda).
        const cplx v = -p.w * gam;
        Eigen::Matrix4d E;
        E.col(0) << 1, 0, v.real(), v.imag();
        E.col(1) << 0, 1, (I * v).real(), (I * v).imag();
        E.col(2) << 0, 0, 1, 0;
        E.col(3) << 0, 0, 0, 1;
        E /= std::sqrt(lam);
        CHECK(max_dev(E.transpose() * m.G * E, frame_matrix(f, a, h)) < 1e-11);
    }
}

TEST_CASE("signature: worked examples and eigenvalue sweep")
{
    const auto flat = ConformalChart::flat();
    const Point4 p{cplx(0.1, 0.2), cplx(-0.3, 0.4)};
    CHECK(signature(WeightTriple::parse("1", "0", "1"), flat, p) == Signature::riemannian);
    CHECK(signature(WeightTriple::parse("0", "1", "0"), flat, p) == Signature::split);
    CHECK(signature(WeightTriple::parse("-1", "0", "-1"), flat, p) == Signature::negative_definite);
    CHECK(eigen_signature(assemble(flat, WeightTriple::parse("0", "1", "0"), p).G) == Signature::split);
    CHECK(std::string(to_string(Signature::split)) == "split(2,2)");

    SplitMix rng(99);
    int used = 0;
    for (int k = 0; k < 20000; ++k) {
        const double f = rng.uniform(-3, 3), b = rng.uniform(-3, 3), c = rng.uniform(-3, 3), h = rng.uniform(-3, 3);
        const double delta = f * h - b * b - c * c;
        if (std::abs(delta) <= 1e-6) continue;
        const Signature s = eigen_signature(frame_matrix(f, {b, c}, h));
        CHECK(s != Signature::other);
        CHECK(s == classify_signature(f, delta));
        ++used;
    }
    CHECK(used > 19000);

    // Same sweep through the coordinate matrix on the sphere.
    const auto sphere = ConformalChart::sphere();
    for (const Point4& q : sample_points(sphere, {}, 200, 12)) {
        const double f = rng.uniform(-3, 3), h = rng.uniform(-3, 3);
        const cplx a(rng.uniform(-3, 3), rng.uniform(-3, 3));
        const auto w = WeightTriple{Weight::constant(f), Weight::constant(a), Weight::constant(h)};
        const auto m = assemble(sphere, w, q);
        if (std::abs(m.delta) < 1e-3) continue;
        CHECK(eigen_signature(m.G) == m.signature);
    }
}

TEST_CASE("det H = lambda^2 Delta and H from G")
{
    const std::array<std::array<const char*, 3>, 4> triples{{
        {"2+abs2(z)", "0.3*z+0.2*i*r2", "1+r2"},
        {"1", "exp(z)", "0"},
        {"3+r2", "0.5-0.25*i", "2/(1+r2)"},
        {"1+abs2(z^2)", "z^2", "1"},
    }};
    const std::array<ConformalChart, 3> charts{ConformalChart::flat(), ConformalChart::sphere(), ConformalChart::hyperbolic()};
    SplitMix rng(4);
    int n = 0;
    double worst = 0.0, worst_h = 0.0;
    while (n < 1000) {
        const auto& chart = charts[rng.next_u64() % charts.size()];
        const auto& t = triples[rng.next_u64() % triples.size()];
        const Point4 p = sample_points(chart, {0.1, 3.0}, 1, rng.next_u64(), 0.1)[0];
        const auto m = assemble(chart, WeightTriple::parse(t[0], t[1], t[2]), p);
        if (std::abs(m.delta) < 1e-3) continue;
        worst = std::max(worst, det_h_residual(m));
        CHECK((m.H - m.H.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * m.H.cwiseAbs().maxCoeff());
        CHECK((m.G - m.G.transpose()).cwiseAbs().maxCoeff() == 0.0);
        worst_h = std::max(worst_h, (hermitian_from_metric(m.G) - m.H).cwiseAbs().maxCoeff() / m.H.cwiseAbs().maxCoeff());
        ++n;
    }
    CHECK(worst < 1e-10);
    CHECK(worst_h < 1e-12);
}

TEST_CASE("symplectic form")
{
    const auto flat = assemble(ConformalChart::flat(), WeightTriple::parse("1", "0", "1"), {0.5, cplx(1, 1)});
    const Eigen::Matrix4cd ref = 0.5 * I * (wedge(dz, dzb) + wedge(dw, dwb));
    CHECK((omega_real(flat.omega) - ref.real()).cwiseAbs().maxCoeff() < 1e-15);
    // omega(d/dx, d/dy) = 1 = g(J d/dx, d/dy).
    CHECK(std::abs(omega_real(flat.omega)(0, 1) - 1.0) < 1e-15);

    const auto chart = ConformalChart::sphere();
    const auto weights = WeightTriple::parse("2+abs2(z)", "0.3*z+0.2*i*r2", "1+r2");
    SplitMix rng(8);
    for (const Point4& p : sample_points(chart, {}, 100, 21)) {
        const auto m = assemble(chart, weights, p);
        CHECK(compatibility_residual(m) < 1e-10);
        const Eigen::Matrix4d Om = omega_real(m.omega);
        CHECK((Om + Om.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (int k = 0; k < 5; ++k) {
            Eigen::Vector4d u, v;
            for (int j = 0; j < 4; ++j) {
                u(j) = rng.uniform(-1, 1);
                v(j) = rng.uniform(-1, 1);
            }
            const double lhs = u.dot(Om * v);
            const double rhs = (complex_structure() * u).dot(m.G * v);
            CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, m.G.cwiseAbs().maxCoeff()));
        }
    }

    // h-term alone: (i lambda/2) eta ^ etabar, expanded by hand.
    const auto hterm = WeightTriple::parse("0", "0", "1");
    for (const Point4& p : sample_points(chart, {}, 30, 2)) {
        const auto m = assemble(chart, hterm, p);
        const double lam = oracle::sphere_lambda(p.z);
        const cplx wg = p.w * oracle::sphere_gamma(p.z);
        const Eigen::Matrix4cd ee = std::norm(wg) * wedge(dz, dzb) + wg * wedge(dz, dwb) - std::conj(wg) * wedge(dzb, dw) + wedge(dw, dwb);
        const Eigen::Matrix4cd ref2 = 0.5 * I * lam * ee;
        CHECK((omega_real(m.omega) - ref2.real()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(ref2.imag().cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("reality of f and h is enforced")
{
    CHECK_THROWS_AS((void)assemble(ConformalChart::flat(), WeightTriple::parse("1+i*z", "0", "1"), {0.5, 1.0}), RealityError);
    CHECK_THROWS_AS((void)assemble(ConformalChart::flat(), WeightTriple::parse("1", "0", "z"), {cplx(0.5, 0.5), 1.0}), RealityError);
    CHECK_THROWS_AS((void)assemble(ConformalChart::flat(), WeightTriple::parse("1/z", "0", "1"), {0.0, 1.0}), PoleError);
}

TEST_CASE("isometry lifts")
{
    const auto flat = ConformalChart::flat();
    const auto fpts = sample_points(flat, {}, 40, 3);
    const auto rot = isometry_lift_check(flat, WeightTriple::parse("2+r2", "0.4-0.3*i", "1"), Expression::parse("(0.6+0.8*i)*z"), fpts);
    CHECK(rot.samples == 40);
    CHECK(rot.base_isometry < 1e-14);
    CHECK(rot.a_invariance < 1e-15);
    CHECK(rot.pullback < 1e-10);

    const auto shift = isometry_lift_check(flat, WeightTriple::parse("2", "z", "1"), Expression::parse("z+1"), fpts);
    CHECK(std::abs(shift.a_invariance - 1.0) < 1e-14);
    CHECK(shift.pullback > 0.1);

    auto sphere = ConformalChart::sphere();
    sphere.domain = Domain::annulus(0.5, 2.0);
    const auto inv = isometry_lift_check(sphere, WeightTriple::parse("1+r2", "0", "2/(1+r2)"), Expression::parse("1/z"),
                                         sample_points(sphere, {}, 40, 19));
    CHECK(inv.base_isometry < 1e-12);
    CHECK(inv.pullback < 1e-9);

    CHECK_THROWS_AS((void)isometry_lift_check(ConformalChart::sphere(), WeightTriple::parse("1", "0", "1"), Expression::parse("2*z"),
                                              sample_points(ConformalChart::sphere(), {}, 5, 1)),
                    NotAnIsometry);
}
