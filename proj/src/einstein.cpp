#include "ciconia/einstein.hpp"

#include <cmath>
#include <cstdio>

namespace ciconia {

namespace {

using W = Wirtinger;

constexpr W kHol[2] = {W::z, W::w};
constexpr W kAnti[2] = {W::zbar, W::wbar};

Jet2 log_delta(const LocalJets& l)
{
    const Jet2 d = l.delta();
    if (!(d.value.real() > 0.0)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "Delta = %.6g is not positive", d.value.real());
        throw NonPositiveDelta(buf);
    }
    return log(d);
}

FormMatrix ddbar(const Jet2& phi)
{
    FormMatrix P;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) P(j, k) = -wirtinger2(phi, kHol[j], kAnti[k]);
    return P;
}

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "(%.17g)", v);
    return buf;
}

std::string num(cplx v)
{
    char buf[80];
    std::snprintf(buf, sizeof buf, "(%.17g+%.17g*i)", v.real(), v.imag());
    return buf;
}

double chart_curvature(const ConformalChart& chart)
{
    const auto s = curvature_summary(chart, 64, 1);
    if (s.stddev > 1e-8) throw CurvatureMismatch("chart " + chart.name + " does not have constant curvature");
    return std::abs(s.mean) < 1e-12 ? 0.0 : s.mean;
}

} // namespace

FormMatrix ricci_form(const ConformalChart& chart, const WeightTriple& weights, const Point4& p, RicciRoute route)
{
    const LocalJets l = local_jets(chart, weights, p);
    const Jet2 ld = log_delta(l);
    if (route == RicciRoute::split) {
        FormMatrix P = ddbar(ld);
        P(0, 0) += l.base.lambda.value * gauss_curvature(l.base.lambda);
        return P;
    }
    const auto H = hermitian_jets(l);
    const Jet2 det = H[0][0] * H[1][1] - H[0][1] * H[1][0];
    return ddbar(log(det));
}

Eigen::Matrix4cd form_components(const FormMatrix& P)
{
    const cplx I(0, 1);
    Eigen::Matrix4cd c = Eigen::Matrix4cd::Zero();
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            c(2 * j, 2 * k + 1) += I * P(j, k);
            c(2 * k + 1, 2 * j) -= I * P(j, k);
        }
    return c;
}

EinsteinResiduals einstein_residuals(const ConformalChart& chart, const WeightTriple& weights, const Point4& p, double S)
{
    const LocalJets l = local_jets(chart, weights, p);
    const Jet2 ld = log_delta(l);
    const cplx lam = l.base.lambda.value;
    const double K = gauss_curvature(l.base.lambda);
    const cplx wg = p.w * l.base.gamma.value;
    const cplx f = l.f.value, a = l.a.value, h = l.h.value;
    const cplx c = lam * S / 8.0;

    EinsteinResiduals r;
    r.e1 = wirtinger2(ld, W::w, W::wbar) + c * h;
    r.e2 = wirtinger2(ld, W::z, W::wbar) + c * (a + h * wg);
    r.e3 = lam * K - wirtinger2(ld, W::z, W::zbar) - c * (f + std::conj(a) * wg + a * std::conj(wg) + h * std::norm(wg));
    return r;
}

RicciReport ricci_report(const ConformalChart& chart, const WeightTriple& weights, const Point4& p, double S)
{
    RicciReport r;
    r.rho_det_h = ricci_form(chart, weights, p, RicciRoute::det_h);
    r.rho_split = ricci_form(chart, weights, p, RicciRoute::split);
    r.route_deviation = (r.rho_det_h - r.rho_split).cwiseAbs().maxCoeff();
    r.hermitian_deviation = (r.rho_det_h - r.rho_det_h.adjoint()).cwiseAbs().maxCoeff();
    r.residuals = einstein_residuals(chart, weights, p, S);
    r.S = S;
    const Eigen::Matrix2cd H = assemble(chart, weights, p).H;
    const double hh = H.squaredNorm();
    r.S_fit = hh > 0.0 ? 8.0 * (H.adjoint() * r.rho_split).trace().real() / hh : 0.0;
    return r;
}

const char* to_string(FamilyKind k)
{
    switch (k) {
    case FamilyKind::general: return "ricci-flat-general";
    case FamilyKind::cy_i: return "cy-i";
    case FamilyKind::cy_ii: return "cy-ii";
    case FamilyKind::cy_iii: return "cy-iii";
    case FamilyKind::cy_iv: return "cy-iv";
    }
    return "?";
}

FamilyKind parse_family(std::string_view name)
{
    for (FamilyKind k : {FamilyKind::general, FamilyKind::cy_i, FamilyKind::cy_ii, FamilyKind::cy_iii, FamilyKind::cy_iv})
        if (name == to_string(k)) return k;
    if (name == "general") return FamilyKind::general;
    throw ConfigError("unknown family '" + std::string(name) + "' (expected ricci-flat-general, cy-i, cy-ii, cy-iii, cy-iv)");
}

double beta_plus(cplx a, double c0)
{
    const double A = std::norm(a);
    if (A == 0.0) throw ParameterGate("beta+ needs a != 0");
    // Cancellation-free form of (-c0 + sqrt(c0^2 + 4A)) / (2A).
    const double s = std::sqrt(c0 * c0 + 4.0 * A);
    return c0 >= 0.0 ? 2.0 / (c0 + s) : (-c0 + s) / (2.0 * A);
}

FibreRange SolutionFamily::interior(double margin) const
{
    FibreRange r;
    // At least `margin`, and 2% of a finite interval: det H loses digits to
    // cancellation as h blows up at a finite endpoint.
    const double m = std::isfinite(r2_hi) ? std::max(margin, 0.02 * (r2_hi - r2_lo)) : margin;
    r.r2_lo = r2_lo > 0.0 ? r2_lo + m : std::min(0.1, 0.1 * r2_hi);
    r.r2_hi = std::isfinite(r2_hi) ? r2_hi - m : std::max(10.0, 10.0 * r.r2_lo);
    if (!(r.r2_lo < r.r2_hi)) throw ParameterGate("family interval too short for the sampling margin");
    return r;
}

SolutionFamily make_family(FamilyKind kind, const FamilyParams& params, const ConformalChart& chart)
{
    SolutionFamily fam;
    fam.kind = kind;
    fam.params = params;
    fam.K = chart_curvature(chart);
    const double A = std::norm(params.a);
    const double c0 = params.c0;
    const double inf = std::numeric_limits<double>::infinity();

    auto need_k = [&](double k) {
        if (std::abs(fam.K - k) > 1e-8) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%s needs K = %g, chart %s has K = %.12g", to_string(kind), k, chart.name.c_str(), fam.K);
            throw CurvatureMismatch(buf);
        }
    };
    auto need_a = [&] {
        if (A == 0.0) throw ParameterGate(std::string(to_string(kind)) + " needs a != 0");
    };

    // The weights are written over r2; r^4 = r2^2.
    const std::string a2 = num(A);
    std::string f, h;
    switch (kind) {
    case FamilyKind::cy_i:
        need_k(0.0);
        need_a();
        [[fallthrough]];
    case FamilyKind::general:
        if (kind == FamilyKind::cy_i || std::abs(fam.K) <= 1e-8) {
            if (!(params.f > 0.0)) throw ParameterGate("f must be a positive constant");
            f = num(params.f);
            h = a2 + "/" + f + "+1/(" + f + "*r2^2)";
            fam.r2_lo = 0.0;
            fam.r2_hi = inf;
            break;
        }
        {
            // Interval where -K (A r^4 + c0 r^2 - 1) > 0.
            const bool pos = fam.K > 0.0;
            if (A > 0.0) {
                const double b = beta_plus(params.a, c0);
                fam.r2_lo = pos ? 0.0 : b;
                fam.r2_hi = pos ? b : inf;
            } else if (c0 > 0.0) {
                fam.r2_lo = pos ? 0.0 : 1.0 / c0;
                fam.r2_hi = pos ? 1.0 / c0 : inf;
            } else if (pos) {
                fam.r2_lo = 0.0;
                fam.r2_hi = inf;
            } else {
                throw ParameterGate("K < 0 with a = 0 needs c0 > 0");
            }
            f = "sqrt(" + num(-fam.K) + "*(" + a2 + "*r2^2+" + num(c0) + "*r2-1)/r2)";
            h = "(" + a2 + "*r2^2+1)/(r2^2*" + f + ")";
        }
        break;
    case FamilyKind::cy_ii:
        need_k(1.0);
        if (!(c0 > 0.0)) throw ParameterGate("cy-ii needs c0 > 0");
        fam.params.a = 0.0;
        f = "sqrt(1-" + num(c0) + "*r2)/sqrt(r2)";
        h = "1/(r2*sqrt(r2)*sqrt(1-" + num(c0) + "*r2))";
        fam.r2_lo = 0.0;
        fam.r2_hi = 1.0 / c0;
        break;
    case FamilyKind::cy_iii: {
        need_k(1.0);
        need_a();
        const std::string root = "sqrt(-" + a2 + "*r2^2-" + num(c0) + "*r2+1)";
        f = root + "/sqrt(r2)";
        h = "(" + a2 + "*r2^2+1)/(r2*sqrt(r2)*" + root + ")";
        fam.r2_lo = 0.0;
        fam.r2_hi = beta_plus(params.a, c0);
        break;
    }
    case FamilyKind::cy_iv: {
        need_k(-1.0);
        need_a();
        const std::string root = "sqrt(" + a2 + "*r2^2+" + num(c0) + "*r2-1)";
        f = root + "/sqrt(r2)";
        h = "(" + a2 + "*r2^2+1)/(r2*sqrt(r2)*" + root + ")";
        fam.r2_lo = beta_plus(params.a, c0);
        fam.r2_hi = inf;
        break;
    }
    }
    fam.weights = WeightTriple::parse(f, num(fam.params.a), h);
    return fam;
}

double psi(const SolutionFamily& fam, const ConformalChart& chart, const Point4& p)
{
    const MetricAtPoint m = assemble(chart, fam.weights, p);
    const double r2 = m.lambda * std::norm(p.w);
    return r2 * r2 * m.delta;
}

WeightTriple inverse_quartic_triple(const std::string& f, const std::string& a)
{
    const std::string h = "(abs2(" + a + ")+1/r2^2)/(" + f + ")";
    return WeightTriple::parse(f, a, h);
}

} // namespace ciconia
