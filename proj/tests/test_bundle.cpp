#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ciconia/bundle.hpp"
#include "ciconia/sampling.hpp"

using namespace ciconia;

TEST_CASE("frame data")
{
    const auto flat = frame_at(ConformalChart::flat(), {cplx(1, 1), cplx(2, -1)});
    CHECK(flat.eta_dz_coeff == cplx(0));
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(flat.eta[k] == kDw[k]);
        CHECK(flat.X[k] == kVz[k]);
    }

    const auto s = frame_at(ConformalChart::sphere(), {1.0, 2.0});
    CHECK(std::abs(s.eta_dz_coeff - cplx(-2)) < 1e-14);
    CHECK(std::abs(s.X_vertical_coeff - cplx(2)) < 1e-14);

    for (const Point4& p : sample_points(ConformalChart::hyperbolic(), {}, 20, 4)) {
        const auto d = frame_at(ConformalChart::hyperbolic(), p);
        CHECK(pair(d.eta, d.X) == cplx(0));
        CHECK(std::abs(pair(d.eta, d.dw_vec) - 1.0) < 1e-15);
        CHECK(std::abs(d.U[2] - p.w.real()) < 1e-15);
        CHECK(std::abs(d.U[3] - p.w.imag()) < 1e-15);
        CHECK(d.U[0] == cplx(0));
    }
}

TEST_CASE("dr2 identity")
{
    CHECK(dr2_identity_residual(ConformalChart::flat(), {0.0, cplx(1, 1)}) < 1e-12);
    CHECK(dr2_identity_residual(ConformalChart::sphere(), {cplx(0.3, 0.2), 0.0}) == 0.0);
    double worst = 0.0;
    for (const Point4& p : sample_points(ConformalChart::sphere(), {}, 100, 9)) {
        worst = std::max(worst, dr2_identity_residual(ConformalChart::sphere(), p));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("nabla* tables")
{
    const auto flat = nabla_star_report(ConformalChart::flat(), {cplx(0.2, 0.1), cplx(1, 2)});
    CHECK(flat.max() == 0.0);
    for (const auto& chart : {ConformalChart::sphere(), ConformalChart::hyperbolic()}) {
        for (const Point4& p : sample_points(chart, {}, 50, 10)) {
            const auto r = nabla_star_report(chart, p);
            CHECK(r.form_table < 1e-9);
            CHECK(r.eta_derivatives < 1e-9);
            CHECK(r.parallel_base < 1e-9);
            CHECK(r.parallel_fibre < 1e-9);
            CHECK(r.parallel_mixed < 1e-9);
        }
    }
}

TEST_CASE("d eta has no (0,2) part and matches the hand expansion")
{
    for (const Point4& p : sample_points(ConformalChart::sphere(), {}, 30, 12)) {
        CHECK(d_eta_02(ConformalChart::sphere(), p) < 1e-12);
        const auto de = d_eta(ConformalChart::sphere(), p);
        const BaseJets b = base_jets(ConformalChart::sphere(), p);
        // d eta = Gamma dw ^ dz - w dGamma/dzbar dz ^ dzbar
        CHECK(std::abs(de[2][0] - b.gamma.value) < 1e-12);
        CHECK(std::abs(de[0][1] + p.w * wirtinger(b.gamma, Wirtinger::zbar)) < 1e-12);
        CHECK(std::abs(de[2][3]) < 1e-12);
        CHECK(std::abs(de[1][2]) < 1e-12);
    }
}
