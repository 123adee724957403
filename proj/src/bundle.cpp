#include "ciconia/bundle.hpp"

#include <algorithm>
#include <cmath>

namespace ciconia {

namespace {

constexpr std::size_t Z = 0, ZB = 1, W = 2, WB = 3;

constexpr std::array<Wirtinger, 4> kDirections{Wirtinger::z, Wirtinger::zbar, Wirtinger::w, Wirtinger::wbar};

using Tensor2 = std::array<std::array<Jet2, 4>, 4>;
using FormTable = std::array<std::array<std::array<cplx, 4>, 4>, 4>;

// Closed-form covariant derivatives of the coframe: F[X][mu][nu] is the
// coefficient of e^nu in nabla*_X e^mu.
FormTable closed_form_table(const BaseJets& b)
{
    const cplx g = b.gamma.value;
    const cplx gz = wirtinger(b.gamma, Wirtinger::z);
    const cplx gzb = wirtinger(b.gamma, Wirtinger::zbar);
    const cplx w = b.point.w;
    FormTable f{};
    f[Z][Z][Z] = -g;
    f[Z][W][Z] = -w * gz;
    f[Z][W][W] = -g;
    f[Z][WB][ZB] = -std::conj(w) * std::conj(gzb);
    f[W][W][Z] = -g;
    // Conjugate directions.
    f[ZB][ZB][ZB] = -std::conj(g);
    f[ZB][WB][ZB] = -std::conj(w) * std::conj(gz);
    f[ZB][WB][WB] = -std::conj(g);
    f[ZB][W][Z] = -w * gzb;
    f[WB][WB][ZB] = -std::conj(g);
    return f;
}

double covariant_residual(const Tensor2& t, const ConnectionTable& c)
{
    double scale = 1.0;
    for (const auto& row : t)
        for (const Jet2& v : row) scale = std::max(scale, std::abs(v.value));
    double worst = 0.0;
    for (std::size_t x = 0; x < 4; ++x) {
        for (std::size_t mu = 0; mu < 4; ++mu) {
            for (std::size_t nu = 0; nu < 4; ++nu) {
                cplx d = wirtinger(t[mu][nu], kDirections[x]);
                for (std::size_t al = 0; al < 4; ++al) {
                    d -= t[al][nu].value * c[x][mu][al] + t[mu][al].value * c[x][nu][al];
                }
                worst = std::max(worst, std::abs(d));
            }
        }
    }
    return worst / scale;
}

// Symmetric product alpha.beta of two coefficient rows in the complex coframe.
Tensor2 sym(const std::array<Jet2, 4>& alpha, const std::array<Jet2, 4>& beta, const Jet2& weight)
{
    Tensor2 t{};
    for (std::size_t m = 0; m < 4; ++m)
        for (std::size_t n = 0; n < 4; ++n) t[m][n] = weight * (alpha[m] * beta[n] + beta[m] * alpha[n]);
    return t;
}

} // namespace

cplx pair(const Row4& form, const Row4& vec)
{
    cplx s = 0.0;
    for (std::size_t k = 0; k < 4; ++k) s += form[k] * vec[k];
    return s;
}

FrameData frame_at(const ConformalChart& chart, const Point4& p)
{
    const BaseJets b = base_jets(chart, p);
    FrameData d;
    d.at = p;
    d.lambda = b.lambda.value;
    d.gamma = b.gamma.value;
    d.eta_dz_coeff = p.w * d.gamma;
    d.X_vertical_coeff = -p.w * d.gamma;
    for (std::size_t k = 0; k < 4; ++k) {
        d.dz[k] = kDz[k];
        d.eta[k] = d.eta_dz_coeff * kDz[k] + kDw[k];
        d.X[k] = kVz[k] + d.X_vertical_coeff * kVw[k];
        d.dw_vec[k] = kVw[k];
        d.U[k] = p.w * kVw[k] + std::conj(p.w) * kVwbar[k];
    }
    return d;
}

std::array<Jet2, 4> eta_row(const BaseJets& b)
{
    const Jet2 wg = b.w * b.gamma;
    std::array<Jet2, 4> row;
    for (std::size_t k = 0; k < 4; ++k) row[k] = wg * kDz[k] + kDw[k];
    return row;
}

double dr2_identity_residual(const ConformalChart& chart, const Point4& p)
{
    const BaseJets b = base_jets(chart, p);
    const auto eta = eta_row(b);
    const cplx lam = b.lambda.value;
    const cplx w = p.w;
    double worst = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        const cplx rhs = lam * (w * std::conj(eta[k].value) + std::conj(w) * eta[k].value);
        worst = std::max(worst, std::abs(b.r2.grad[k] - rhs));
    }
    return worst;
}

ConnectionTable connection_table(const BaseJets& b)
{
    const cplx g = b.gamma.value;
    const cplx gz = wirtinger(b.gamma, Wirtinger::z);
    const cplx gzb = wirtinger(b.gamma, Wirtinger::zbar);
    const cplx w = b.point.w;
    const cplx wb = std::conj(w);
    ConnectionTable c{};
    c[Z][Z][Z] = g;
    c[Z][Z][W] = w * gz;
    c[Z][ZB][WB] = wb * std::conj(gzb);
    c[ZB][Z][W] = w * gzb;
    c[ZB][ZB][ZB] = std::conj(g);
    c[ZB][ZB][WB] = wb * std::conj(gz);
    c[Z][W][W] = g;
    c[ZB][WB][WB] = std::conj(g);
    c[W][Z][W] = g;
    c[WB][ZB][WB] = std::conj(g);
    return c;
}

double NablaReport::max() const
{
    return std::max({form_table, eta_derivatives, parallel_base, parallel_fibre, parallel_mixed});
}

NablaReport nabla_star_report(const ConformalChart& chart, const Point4& p, cplx a_const)
{
    const BaseJets b = base_jets(chart, p);
    const ConnectionTable c = connection_table(b);
    NablaReport rep;

    const FormTable closed = closed_form_table(b);
    for (std::size_t x = 0; x < 4; ++x)
        for (std::size_t mu = 0; mu < 4; ++mu)
            for (std::size_t nu = 0; nu < 4; ++nu)
                rep.form_table = std::max(rep.form_table, std::abs(-c[x][nu][mu] - closed[x][mu][nu]));

    const Jet2 one(1.0);
    const Jet2 zero;
    const std::array<Jet2, 4> dz{one, zero, zero, zero};
    const std::array<Jet2, 4> dzb{zero, one, zero, zero};
    const std::array<Jet2, 4> eta{b.w * b.gamma, zero, one, zero};
    const std::array<Jet2, 4> etab{zero, b.wbar * conj(b.gamma), zero, one};

    for (std::size_t x = 0; x < 4; ++x) {
        for (std::size_t nu = 0; nu < 4; ++nu) {
            cplx d = wirtinger(eta[nu], kDirections[x]);
            for (std::size_t al = 0; al < 4; ++al) d -= eta[al].value * c[x][nu][al];
            if (x == Z) d += b.gamma.value * eta[nu].value;
            rep.eta_derivatives = std::max(rep.eta_derivatives, std::abs(d));
        }
    }

    rep.parallel_base = covariant_residual(sym(dz, dzb, b.lambda), c);
    rep.parallel_fibre = covariant_residual(sym(eta, etab, b.lambda), c);
    const Tensor2 ta = sym(dz, etab, b.lambda * a_const);
    const Tensor2 tb = sym(eta, dzb, b.lambda * std::conj(a_const));
    Tensor2 mixed{};
    for (std::size_t m = 0; m < 4; ++m)
        for (std::size_t n = 0; n < 4; ++n) mixed[m][n] = ta[m][n] + tb[m][n];
    rep.parallel_mixed = covariant_residual(mixed, c);
    return rep;
}

double nabla_star_table_residual(const ConformalChart& chart, const Point4& p) { return nabla_star_report(chart, p).max(); }

std::array<std::array<cplx, 4>, 4> d_eta(const ConformalChart& chart, const Point4& p)
{
    const auto eta = eta_row(base_jets(chart, p));
    std::array<std::array<cplx, 4>, 4> de{};
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t l = 0; l < 4; ++l) de[k][l] = eta[l].grad[k] - eta[k].grad[l];
    std::array<std::array<cplx, 4>, 4> out{};
    for (std::size_t mu = 0; mu < 4; ++mu) {
        for (std::size_t nu = 0; nu < 4; ++nu) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < 4; ++k)
                for (std::size_t l = 0; l < 4; ++l) s += de[k][l] * kVectorBasis[mu][k] * kVectorBasis[nu][l];
            out[mu][nu] = s;
        }
    }
    return out;
}

double d_eta_02(const ConformalChart& chart, const Point4& p) { return std::abs(d_eta(chart, p)[ZB][WB]); }

} // namespace ciconia
