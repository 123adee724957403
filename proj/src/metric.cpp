#include "ciconia/metric.hpp"

#include <algorithm>
#include <cmath>

namespace ciconia {

DependenceClass Weight::dependence() const
{
    if (const auto* e = std::get_if<Expression>(&v_)) return e->classify();
    return DependenceClass::radial;
}

std::string Weight::describe() const
{
    if (const auto* e = std::get_if<Expression>(&v_)) return e->source().empty() ? e->to_string() : e->source();
    return std::get<RadialProfile>(v_).label;
}

Jet2 Weight::eval(const BaseJets& b) const
{
    if (const auto* e = std::get_if<Expression>(&v_)) return e->eval(b.bindings());
    const auto d = std::get<RadialProfile>(v_).eval(b.r2.value.real());
    return compose(b.r2, d[0], d[1], d[2]);
}

cplx Weight::at_r2(double r2) const
{
    if (const auto* e = std::get_if<Expression>(&v_)) {
        const auto c = e->classify();
        if (c != DependenceClass::constant && c != DependenceClass::radial) {
            throw Error("weight '" + describe() + "' is not a function of r2 alone");
        }
        Bindings<cplx> b;
        b.r2 = r2;
        return e->eval(b);
    }
    return std::get<RadialProfile>(v_).eval(r2)[0];
}

WeightTriple WeightTriple::parse(std::string_view f, std::string_view a, std::string_view h)
{
    return {Weight::parse(f), Weight::parse(a), Weight::parse(h)};
}

std::string WeightTriple::describe() const
{
    return "f = " + f.describe() + ", a = " + a.describe() + ", h = " + h.describe();
}

LocalJets local_jets(const ConformalChart& chart, const WeightTriple& weights, const Point4& p)
{
    LocalJets l;
    l.base = base_jets(chart, p);
    l.f = weights.f.eval(l.base);
    l.a = weights.a.eval(l.base);
    l.h = weights.h.eval(l.base);
    auto require_real = [](const Jet2& j, const char* name) {
        if (std::abs(j.value.imag()) > 1e-9 * std::max(1.0, std::abs(j.value))) {
            throw RealityError(std::string("weight ") + name + " is not real-valued");
        }
    };
    require_real(l.f, "f");
    require_real(l.h, "h");
    return l;
}

Matrix4Of<Jet2> metric_jets(const LocalJets& l)
{
    const auto eta = eta_row(l.base);
    std::array<Jet2, 4> etab;
    for (std::size_t k = 0; k < 4; ++k) etab[k] = conj(eta[k]);
    const Jet2 abar = conj(l.a);
    const Jet2 half_lambda = l.base.lambda * 0.5;

    Matrix4Of<Jet2> G;
    for (std::size_t k = 0; k < 4; ++k) {
        for (std::size_t m = k; m < 4; ++m) {
            const cplx ff = kDz[k] * kDzbar[m] + kDzbar[k] * kDz[m];
            const Jet2 aa = etab[m] * kDz[k] + etab[k] * kDz[m];
            const Jet2 bb = eta[k] * kDzbar[m] + eta[m] * kDzbar[k];
            const Jet2 hh = eta[k] * etab[m] + etab[k] * eta[m];
            G[k][m] = half_lambda * (l.f * ff + l.a * aa + abar * bb + l.h * hh);
            G[m][k] = G[k][m];
        }
    }
    return G;
}

std::array<std::array<Jet2, 2>, 2> hermitian_jets(const LocalJets& l)
{
    const Jet2& lam = l.base.lambda;
    const Jet2 wg = l.base.w * l.base.gamma;
    const Jet2 wgb = conj(wg);
    const Jet2 abar = conj(l.a);
    std::array<std::array<Jet2, 2>, 2> H;
    H[0][0] = lam * (l.f + abar * wg + l.a * wgb + l.h * wg * wgb);
    H[0][1] = lam * (l.a + l.h * wg);
    H[1][0] = lam * (abar + l.h * wgb);
    H[1][1] = lam * l.h;
    return H;
}

const char* to_string(Signature s)
{
    switch (s) {
    case Signature::riemannian: return "riemannian";
    case Signature::negative_definite: return "negative-definite";
    case Signature::split: return "split(2,2)";
    case Signature::degenerate: return "degenerate";
    case Signature::other: return "other";
    }
    return "?";
}

MetricAtPoint assemble(const ConformalChart& chart, const WeightTriple& weights, const Point4& p)
{
    const LocalJets l = local_jets(chart, weights, p);
    const auto G = metric_jets(l);
    const auto H = hermitian_jets(l);

    MetricAtPoint m;
    m.at = p;
    m.lambda = l.base.lambda.value.real();
    m.gamma = l.base.gamma.value;
    m.f = l.f.value.real();
    m.a = l.a.value;
    m.h = l.h.value.real();
    m.delta = m.f * m.h - std::norm(m.a);
    for (int k = 0; k < 4; ++k)
        for (int n = 0; n < 4; ++n) m.G(k, n) = G[k][n].value.real();
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) m.H(j, k) = H[j][k].value;

    // omega = (i/2) sum H_jk e^j ^ conj(e^k), with e = (dz, dw) at slots 0 and 2.
    const cplx half_i(0.0, 0.5);
    m.omega.setZero();
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            const int mu = 2 * j;
            const int nu = 2 * k + 1;
            m.omega(mu, nu) += half_i * m.H(j, k);
            m.omega(nu, mu) -= half_i * m.H(j, k);
        }
    }
    m.signature = classify_signature(m.f, m.delta);
    return m;
}

Signature classify_signature(double f, double delta, double threshold)
{
    if (std::abs(delta) < threshold) return Signature::degenerate;
    if (delta < 0.0) return Signature::split;
    if (f > threshold) return Signature::riemannian;
    if (f < -threshold) return Signature::negative_definite;
    return Signature::degenerate;
}

Signature eigen_signature(const Eigen::Matrix4d& G, double rel_tol)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(G, Eigen::EigenvaluesOnly);
    const auto& mu = es.eigenvalues();
    const double tol = rel_tol * std::max(1.0, mu.cwiseAbs().maxCoeff());
    int pos = 0, neg = 0;
    for (int i = 0; i < 4; ++i) {
        if (mu(i) > tol) ++pos;
        else if (mu(i) < -tol) ++neg;
    }
    if (pos + neg < 4) return Signature::degenerate;
    if (pos == 4) return Signature::riemannian;
    if (neg == 4) return Signature::negative_definite;
    if (pos == 2) return Signature::split;
    return Signature::other;
}

Signature signature(const WeightTriple& weights, const ConformalChart& chart, const Point4& p)
{
    return assemble(chart, weights, p).signature;
}

Eigen::Matrix4d frame_matrix(double f, cplx a, double h)
{
    const double b = a.real();
    const double c = a.imag();
    Eigen::Matrix4d m;
    m << f, 0, b, c, //
        0, f, -c, b, //
        b, -c, h, 0, //
        c, b, 0, h;
    return m;
}

Eigen::Matrix4d complex_structure()
{
    Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
    J(1, 0) = 1.0;
    J(0, 1) = -1.0;
    J(3, 2) = 1.0;
    J(2, 3) = -1.0;
    return J;
}

Eigen::Matrix4d omega_real(const Eigen::Matrix4cd& omega)
{
    Eigen::Matrix4d out;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            cplx s = 0.0;
            for (int mu = 0; mu < 4; ++mu)
                for (int nu = 0; nu < 4; ++nu) s += omega(mu, nu) * kFormBasis[mu][a] * kFormBasis[nu][b];
            out(a, b) = s.real();
        }
    }
    return out;
}

double compatibility_residual(const MetricAtPoint& m)
{
    const Eigen::Matrix4d J = complex_structure();
    const double scale = std::max(1.0, m.G.cwiseAbs().maxCoeff());
    const double r1 = (omega_real(m.omega) - J.transpose() * m.G).cwiseAbs().maxCoeff();
    const double r2 = (J.transpose() * m.G * J - m.G).cwiseAbs().maxCoeff();
    return std::max(r1, r2) / scale;
}

Eigen::Matrix2cd hermitian_from_metric(const Eigen::Matrix4d& G)
{
    const std::array<Row4, 2> v{kVz, kVw};
    Eigen::Matrix2cd H;
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            cplx s = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) s += G(a, b) * v[j][a] * std::conj(v[k][b]);
            H(j, k) = 2.0 * s;
        }
    }
    return H;
}

double det_h_residual(const MetricAtPoint& m)
{
    const double expected = m.lambda * m.lambda * m.delta;
    return std::abs(m.H.determinant() - expected) / std::abs(expected);
}

IsometryLiftReport isometry_lift_check(const ConformalChart& chart, const WeightTriple& weights, const Expression& phi,
                                       const std::vector<Point4>& samples, double base_tol)
{
    IsometryLiftReport rep;
    for (const Point4& p : samples) {
        const Jet3 phi3 = phi.eval(bindings3(p));
        const Jet2 z1 = phi3.value;
        const Jet2 dphi = wirtinger(phi3, Wirtinger::z);
        const BaseJets src = base_jets(chart, p);
        const Jet2 w1 = dphi * src.w;
        const Point4 q{z1.value, w1.value};

        const double lam_p = src.lambda.value.real();
        const double lam_q = lambda_value(chart, q.z);
        const double base_dev = std::abs(std::norm(dphi.value) * lam_q - lam_p) / lam_p;
        if (base_dev > base_tol) {
            throw NotAnIsometry("base map does not preserve the conformal factor (relative deviation " +
                                std::to_string(base_dev) + ")");
        }
        rep.base_isometry = std::max(rep.base_isometry, base_dev);

        const MetricAtPoint mp = assemble(chart, weights, p);
        const MetricAtPoint mq = assemble(chart, weights, q);
        rep.a_invariance = std::max(rep.a_invariance, std::abs(mq.a - mp.a));

        Eigen::Matrix4d D;
        for (int k = 0; k < 4; ++k) {
            D(0, k) = z1.grad[k].real();
            D(1, k) = z1.grad[k].imag();
            D(2, k) = w1.grad[k].real();
            D(3, k) = w1.grad[k].imag();
        }
        const Eigen::Matrix4d pulled = D.transpose() * mq.G * D;
        const double scale = std::max(1.0, mp.G.cwiseAbs().maxCoeff());
        rep.pullback = std::max(rep.pullback, (pulled - mp.G).cwiseAbs().maxCoeff() / scale);
        ++rep.samples;
    }
    return rep;
}

} // namespace ciconia
