#include "ciconia/surface.hpp"

#include "ciconia/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ciconia {

namespace {

const cplx I{0.0, 1.0};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void require_base_only(const ConformalChart& chart)
{
    const auto c = chart.lambda.classify();
    if (c != DependenceClass::constant && c != DependenceClass::base_only) {
        throw Error("chart '" + chart.name + "': conformal factor must depend on z only");
    }
}

void require_in_domain(const ConformalChart& chart, cplx z)
{
    if (!chart.domain.contains(z)) {
        throw DomainError("point z = (" + fmt(z.real()) + ", " + fmt(z.imag()) + ") lies outside chart '" + chart.name +
                          "' (" + chart.domain.describe() + ")");
    }
}

void require_positive(const ConformalChart& chart, cplx lam)
{
    if (std::abs(lam.imag()) > 1e-12 * std::max(1.0, std::abs(lam))) {
        throw RealityError("chart '" + chart.name + "': conformal factor is not real");
    }
    if (!(lam.real() > 0.0) || !std::isfinite(lam.real())) {
        throw DomainError("chart '" + chart.name + "': conformal factor is not positive");
    }
}

} // namespace

Bindings<Jet3> bindings3(const Point4& p)
{
    const auto v = seed_variables3(p);
    Bindings<Jet3> b;
    b.z = v[0] + v[1] * I;
    b.zbar = v[0] - v[1] * I;
    b.w = v[2] + v[3] * I;
    b.wbar = v[2] - v[3] * I;
    return b;
}

bool Domain::contains(cplx z) const
{
    switch (kind) {
    case Kind::full_plane:
    case Kind::torus: return std::isfinite(z.real()) && std::isfinite(z.imag());
    case Kind::disk: return std::abs(z) < a;
    case Kind::annulus: return std::abs(z) > a && std::abs(z) < b;
    case Kind::half_plane: return z.imag() > 0.0;
    }
    return false;
}

cplx Domain::sample(double u, double v, double margin) const
{
    const double theta = 2.0 * std::numbers::pi * v;
    switch (kind) {
    case Kind::full_plane: return std::polar(a * std::sqrt(u), theta);
    case Kind::disk: return std::polar((a - margin) * std::sqrt(u), theta);
    case Kind::annulus: {
        const double lo = (a + margin) * (a + margin);
        const double hi = (b - margin) * (b - margin);
        return std::polar(std::sqrt(lo + (hi - lo) * u), theta);
    }
    case Kind::half_plane: return {-a + 2.0 * a * u, b + (2.0 - b) * v};
    case Kind::torus: return {margin + (1.0 - 2.0 * margin) * u, margin + (1.0 - 2.0 * margin) * v};
    }
    return {};
}

std::string Domain::describe() const
{
    switch (kind) {
    case Kind::full_plane: return "full plane";
    case Kind::disk: return "disk |z| < " + fmt(a);
    case Kind::annulus: return "annulus " + fmt(a) + " < |z| < " + fmt(b);
    case Kind::half_plane: return "half-plane Im z > 0";
    case Kind::torus: return "torus C/(Z + iZ)";
    }
    return "?";
}

ConformalChart ConformalChart::flat() { return {"flat", Expression::parse("1"), Domain::plane()}; }
ConformalChart ConformalChart::flat_torus() { return {"torus", Expression::parse("1"), Domain::torus()}; }
ConformalChart ConformalChart::sphere() { return {"sphere", Expression::parse("4/(1+abs2(z))^2"), Domain::plane()}; }
ConformalChart ConformalChart::hyperbolic() { return {"hyperbolic", Expression::parse("4/(1-abs2(z))^2"), Domain::disk(1.0)}; }
ConformalChart ConformalChart::hyperbolic_half_plane()
{
    return {"half-plane", Expression::parse("-4/(z-zbar)^2"), Domain::half_plane()};
}

ConformalChart ConformalChart::model(std::string_view name)
{
    if (name == "flat") return flat();
    if (name == "torus") return flat_torus();
    if (name == "sphere") return sphere();
    if (name == "hyperbolic") return hyperbolic();
    if (name == "half-plane") return hyperbolic_half_plane();
    throw ConfigError("unknown chart model '" + std::string(name) + "'");
}

std::vector<std::string> ConformalChart::model_names() { return {"flat", "torus", "sphere", "hyperbolic", "half-plane"}; }

BaseJets base_jets(const ConformalChart& chart, const Point4& p)
{
    require_base_only(chart);
    require_in_domain(chart, p.z);
    const Jet3 lam3 = chart.lambda.eval(bindings3(p));
    require_positive(chart, lam3.value.value);

    BaseJets out;
    out.point = p;
    out.coords = seed_variables(p);
    out.z = out.coords[0] + out.coords[1] * I;
    out.zbar = out.coords[0] - out.coords[1] * I;
    out.w = out.coords[2] + out.coords[3] * I;
    out.wbar = out.coords[2] - out.coords[3] * I;
    out.lambda = lam3.value;
    out.gamma = wirtinger(lam3, Wirtinger::z) / lam3.value;
    out.r2 = out.lambda * out.w * out.wbar;
    return out;
}

Jet2 lambda_jet(const ConformalChart& chart, const Point4& p)
{
    require_base_only(chart);
    require_in_domain(chart, p.z);
    const auto v = seed_variables(p);
    Bindings<Jet2> b;
    b.z = v[0] + v[1] * I;
    b.zbar = v[0] - v[1] * I;
    b.w = v[2] + v[3] * I;
    b.wbar = v[2] - v[3] * I;
    Jet2 lam = chart.lambda.eval(b);
    require_positive(chart, lam.value);
    return lam;
}

double lambda_value(const ConformalChart& chart, cplx z)
{
    require_base_only(chart);
    require_in_domain(chart, z);
    Bindings<cplx> b{z, std::conj(z), 0.0, 0.0, 0.0};
    const cplx lam = chart.lambda.eval(b);
    require_positive(chart, lam);
    return lam.real();
}

Jet2 eval_on_chart(const Expression& e, const Point4& p, const ConformalChart& chart)
{
    const auto v = seed_variables(p);
    Bindings<Jet2> b;
    b.z = v[0] + v[1] * I;
    b.zbar = v[0] - v[1] * I;
    b.w = v[2] + v[3] * I;
    b.wbar = v[2] - v[3] * I;
    if (e.uses(Identifier::r2)) b.r2 = lambda_jet(chart, p) * b.w * b.wbar;
    return e.eval(b);
}

cplx gamma(const ConformalChart& chart, cplx z) { return base_jets(chart, {z, 0.0}).gamma.value; }

double gauss_curvature(const Jet2& lambda)
{
    const cplx k = -2.0 / lambda.value * wirtinger2(log(lambda), Wirtinger::z, Wirtinger::zbar);
    if (std::abs(k.imag()) > 1e-10 * std::max(1.0, std::abs(k))) throw RealityError("Gauss curvature is not real");
    return k.real();
}

double gauss_curvature(const ConformalChart& chart, cplx z) { return gauss_curvature(lambda_jet(chart, {z, 0.0})); }

CurvatureSummary curvature_summary(const ConformalChart& chart, std::size_t samples, std::uint64_t seed)
{
    CurvatureSummary s;
    std::vector<double> ks;
    for (cplx z : sample_base(chart, samples, seed)) ks.push_back(gauss_curvature(chart, z));
    s.samples = ks.size();
    if (ks.empty()) return s;
    double sum = 0.0;
    for (double k : ks) sum += k;
    s.mean = sum / static_cast<double>(ks.size());
    double var = 0.0;
    for (double k : ks) var += (k - s.mean) * (k - s.mean);
    s.stddev = ks.size() > 1 ? std::sqrt(var / static_cast<double>(ks.size() - 1)) : 0.0;
    return s;
}

ChartTransition ChartTransition::sphere_inversion() { return {Expression::parse("1/z"), Expression::parse("1/z")}; }
ChartTransition ChartTransition::cayley() { return {Expression::parse("i*(1+z)/(1-z)"), Expression::parse("(z-i)/(z+i)")}; }
ChartTransition ChartTransition::identity() { return {Expression::parse("z"), Expression::parse("z")}; }

double TransitionReport::max() const { return std::max({roundtrip, lambda_law, gamma_law, w_law, eta_law}); }

TransitionReport verify_transition(const ChartTransition& t, const ConformalChart& from, const ConformalChart& to,
                                   const std::vector<Point4>& samples)
{
    TransitionReport rep;
    for (const Point4& p : samples) {
        const BaseJets src = base_jets(from, p);

        // z1 = F(z) to third order, so F' is an exact Jet2 over (x, y, s, t).
        const Jet3 f3 = t.forward.eval(bindings3(p));
        const Jet2 z1 = f3.value;
        const Jet2 dz1_dz = wirtinger(f3, Wirtinger::z);
        const Jet2 w1 = dz1_dz * src.w;

        // Inverse map evaluated in the target chart's coordinate.
        const Point4 q{z1.value, w1.value};
        const Jet3 g3 = t.inverse.eval(bindings3(q));
        const Jet2 dz_dz1 = wirtinger(g3, Wirtinger::z);
        const cplx d2z_dz1 = wirtinger(dz_dz1, Wirtinger::z);

        const BaseJets dst = base_jets(to, q);

        rep.roundtrip = std::max(rep.roundtrip, std::abs(g3.value.value - p.z));

        const double expect_lambda = std::norm(dz_dz1.value) * src.lambda.value.real();
        rep.lambda_law = std::max(rep.lambda_law, std::abs(dst.lambda.value.real() - expect_lambda) / expect_lambda);

        const cplx expect_gamma = dz_dz1.value * src.gamma.value + dz1_dz.value * d2z_dz1;
        rep.gamma_law =
            std::max(rep.gamma_law, std::abs(dst.gamma.value - expect_gamma) / std::max(1.0, std::abs(expect_gamma)));

        const cplx w1_inverse = p.w / dz_dz1.value;
        const double r2_src = src.r2.value.real();
        const double r2_dst = dst.lambda.value.real() * std::norm(w1.value);
        rep.w_law = std::max({rep.w_law, std::abs(w1.value - w1_inverse) / std::max(1.0, std::abs(w1.value)),
                              std::abs(r2_dst - r2_src) / std::max(1.0, r2_src)});

        // eta1 = w1 Gamma1 dz1 + dw1, pulled back to (x, y, s, t), against (dz1/dz) eta.
        const std::array<cplx, 4> dz{1.0, I, 0.0, 0.0};
        const std::array<cplx, 4> dw{0.0, 0.0, 1.0, I};
        double eta_dev = 0.0;
        for (std::size_t k = 0; k < kDim; ++k) {
            const cplx eta1 = w1.value * dst.gamma.value * z1.grad[k] + w1.grad[k];
            const cplx eta = p.w * src.gamma.value * dz[k] + dw[k];
            eta_dev = std::max(eta_dev, std::abs(eta1 - dz1_dz.value * eta));
        }
        rep.eta_law = std::max(rep.eta_law, eta_dev / std::max(1.0, std::abs(dz1_dz.value)));
        ++rep.samples;
    }
    return rep;
}

} // namespace ciconia
