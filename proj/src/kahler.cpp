#include "ciconia/kahler.hpp"

#include "ciconia/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ciconia {

ClosednessResidual closedness_residual(const ConformalChart& chart, const WeightTriple& weights, const Point4& p)
{
    const LocalJets l = local_jets(chart, weights, p);
    const Jet2 abar = conj(l.a);
    const cplx w = p.w;
    const cplx gam = l.base.gamma.value;
    using W = Wirtinger;

    ClosednessResidual r;
    r.res1 = wirtinger(l.h, W::z) - wirtinger(l.a, W::w) - w * gam * wirtinger(l.h, W::w);
    r.res2 = wirtinger(l.f, W::w) + w * gam * wirtinger(abar, W::w) - wirtinger(abar, W::z) -
             std::conj(w) * l.h.value * wirtinger(l.base.gamma, W::zbar);
    return r;
}

namespace {

KahlerCase make(std::string id, std::string statement, std::string chart, DependenceClass f, DependenceClass a,
                DependenceClass h, CurvatureRule rule, std::map<std::string, cplx> params, std::string fs, std::string as,
                std::string hs, std::string defect)
{
    KahlerCase c;
    c.id = std::move(id);
    c.statement = std::move(statement);
    c.chart = std::move(chart);
    c.f_class = f;
    c.a_class = a;
    c.h_class = h;
    c.curvature = rule;
    c.parameters = std::move(params);
    c.f = std::move(fs);
    c.a = std::move(as);
    c.h = std::move(hs);
    c.defect = std::move(defect);
    return c;
}

std::vector<KahlerCase> build_cases()
{
    using D = DependenceClass;
    using R = CurvatureRule;
    const cplx I(0, 1);
    std::vector<KahlerCase> v;

    auto c = make("i", "f, a, h on M: K = 0, a holomorphic, h constant", "flat", D::base_only, D::base_only, D::base_only,
                  R::zero, {{"a2", 1.0}, {"h", 1.0}, {"ah", 0.0}}, "1+abs2({a2}*z^2)", "{a2}*z^2+{ah}*zbar", "{h}", "ah");
    c.a_holomorphic = c.h_constant = true;
    v.push_back(c);

    // f is taken constant: the statement leaves its dependence open.
    c = make("ii", "f, h on M, a radial: K = 0, a and h constant", "flat", D::base_only, D::radial, D::base_only, R::zero,
             {{"f", 2.0}, {"a", cplx(0.5, 0.5)}, {"h", 1.0}, {"ar", 0.0}}, "{f}", "{a}+{ar}*r2", "{h}", "ar");
    c.a_constant = c.h_constant = true;
    v.push_back(c);

    c = make("iii", "f, a on M, h radial: K = 0, a holomorphic", "flat", D::base_only, D::base_only, D::radial, R::zero,
             {{"a1", 1.0}, {"h1", 1.0}, {"ah", 0.0}}, "2+abs2(z)", "{a1}*z+{ah}*zbar", "1+{h1}*r2", "ah");
    c.a_holomorphic = true;
    v.push_back(c);

    c = make("iv", "a, h on M, f radial: f = f1 r2 + f0, K = -2 f1/h, h constant, a holomorphic", "hyperbolic",
             D::radial, D::base_only, D::base_only, R::linear_f, {{"h", 2.0}, {"f1", 1.0}, {"f0", 1.0}, {"a", 0.0}},
             "{f1}*r2+{f0}", "{a}", "{h}", "f1");
    c.a_holomorphic = c.h_constant = c.f_linear = true;
    v.push_back(c);

    c = make("v", "f on M, a, h radial: K = 0, a constant", "flat", D::base_only, D::radial, D::radial, R::zero,
             {{"a", 0.5}, {"ar", 0.0}}, "1+abs2(z)", "{a}+{ar}*r2", "1+r2", "ar");
    c.a_constant = true;
    v.push_back(c);

    c = make("vi", "a on M, f, h radial: K = -2 f'/h, a holomorphic", "sphere", D::radial, D::base_only, D::radial,
             R::radial_f, {{"f0", 3.0}, {"a", 0.0}, {"dk", 0.0}}, "", "{a}", "1+r2", "dk");
    c.a_holomorphic = true;
    c.fibre = {0.05, 2.0};
    v.push_back(c);

    c = make("vii", "h on M, f, a radial: f = f1 r2 + f0, K = -2 f1/h, a, h constant", "sphere", D::radial, D::radial,
             D::base_only, R::linear_f, {{"h", 2.0}, {"f1", -1.0}, {"f0", 2.0}, {"a", 0.3}}, "{f1}*r2+{f0}", "{a}", "{h}",
             "f1");
    c.a_constant = c.h_constant = c.f_linear = true;
    c.fibre = {0.05, 1.5};
    v.push_back(c);

    c = make("viii", "f, a, h radial: K = -2 f'/h, a constant", "hyperbolic", D::radial, D::radial, D::radial,
             R::radial_f, {{"f0", 1.0}, {"a", 0.5}, {"dk", 0.0}}, "", "{a}", "1/(1+r2)", "dk");
    c.a_constant = true;
    v.push_back(c);

    c = make("ix", "h = 0, a on M: f on M, a holomorphic", "sphere", D::base_only, D::base_only, D::base_only, R::free,
             {{"ah", 0.0}}, "1+abs2(z)", "exp(z)+{ah}*zbar", "0", "ah");
    c.pseudo = c.a_holomorphic = c.h_zero = true;
    v.push_back(c);

    c = make("x", "h = 0, a radial: f, a constant", "flat", D::base_only, D::radial, D::base_only, R::free,
             {{"f", 1.0}, {"a", 2.0 * I}, {"ar", 0.0}}, "{f}", "{a}+{ar}*r2", "0", "ar");
    c.pseudo = c.a_constant = c.f_constant = c.h_zero = true;
    v.push_back(c);

    c = make("flat-example", "f = 1 + |a|^2, a holomorphic, h = 1 on the flat chart", "flat", D::base_only,
             D::base_only, D::base_only, R::zero, {{"a2", 1.0}, {"ah", 0.0}}, "1+abs2({a2}*z^2+{ah}*zbar)",
             "{a2}*z^2+{ah}*zbar", "1", "ah");
    c.a_holomorphic = c.h_constant = true;
    v.push_back(c);
    return v;
}

std::string format_param(cplx v)
{
    char buf[96];
    if (v.imag() == 0.0) std::snprintf(buf, sizeof buf, "(%.17g)", v.real());
    else std::snprintf(buf, sizeof buf, "(%.17g+%.17g*i)", v.real(), v.imag());
    return buf;
}

std::string substitute(const std::string& tpl, const std::map<std::string, cplx>& params)
{
    std::string out;
    for (std::size_t k = 0; k < tpl.size(); ++k) {
        if (tpl[k] != '{') {
            out += tpl[k];
            continue;
        }
        const auto end = tpl.find('}', k);
        const std::string name = tpl.substr(k + 1, end - k - 1);
        out += format_param(params.at(name));
        k = end;
    }
    return out;
}

std::map<std::string, cplx> merged(const KahlerCase& c, const std::map<std::string, cplx>& params)
{
    auto all = c.parameters;
    for (const auto& [k, v] : params) {
        if (!all.count(k)) throw ConfigError("case " + c.id + " has no parameter '" + k + "'");
        all[k] = v;
    }
    return all;
}

double constant_curvature(const ConformalChart& chart)
{
    const auto s = curvature_summary(chart, 64, 1);
    if (s.stddev > 1e-8) {
        throw CurvatureMismatch("chart " + chart.name + " does not have constant curvature (stddev " + std::to_string(s.stddev) + ")");
    }
    return std::abs(s.mean) < 1e-12 ? 0.0 : s.mean;
}

Weight quadrature_profile(const Expression& h, double f0, double k)
{
    RadialProfile prof;
    prof.label = "f0 - (K/2) int_0^r2 (" + h.to_string() + ")";
    prof.eval = [h, f0, k](double r2) -> std::array<double, 3> {
        const Weight hw(h);
        const auto hd = radial_derivatives(hw, r2);
        const auto integral = integrate([&](double s) { return radial_derivatives(hw, s)[0]; }, 0.0, r2, 1e-10, 1e-13);
        return {f0 - 0.5 * k * integral.value, -0.5 * k * hd[0], -0.5 * k * hd[1]};
    };
    return Weight(prof);
}

} // namespace

const std::vector<KahlerCase>& kahler_cases()
{
    static const std::vector<KahlerCase> cases = build_cases();
    return cases;
}

const KahlerCase& kahler_case(std::string_view id)
{
    for (const auto& c : kahler_cases())
        if (c.id == id) return c;
    throw ConfigError("unknown Kaehler case '" + std::string(id) + "'");
}

std::array<double, 3> radial_derivatives(const Weight& wt, double r2)
{
    if (const RadialProfile* prof = wt.profile()) return prof->eval(r2);
    const Expression* e = wt.expression();
    const auto c = e->classify();
    if (c != DependenceClass::constant && c != DependenceClass::radial) {
        throw Error("weight '" + wt.describe() + "' is not a function of r2 alone");
    }
    Bindings<Jet2> b;
    b.r2 = seed_variables({cplx(r2, 0.0), 0.0})[0];
    const Jet2 j = e->eval(b);
    return {j.value.real(), j.grad[0].real(), j.second(0, 0).real()};
}

WeightTriple build_weights(const KahlerCase& c, const ConformalChart& chart, const std::map<std::string, cplx>& params)
{
    const auto p = merged(c, params);
    WeightTriple w;
    w.a = Weight::parse(substitute(c.a, p));
    w.h = Weight::parse(substitute(c.h, p));
    if (c.f.empty()) {
        const double k = constant_curvature(chart) + p.at("dk").real();
        w.f = quadrature_profile(*w.h.expression(), p.at("f0").real(), k);
    } else {
        w.f = Weight::parse(substitute(c.f, p));
    }
    return w;
}

CaseInstance instantiate_case(const KahlerCase& c, const ConformalChart& chart, const std::map<std::string, cplx>& params)
{
    const auto p = merged(c, params);
    CaseInstance inst;
    inst.K = constant_curvature(chart);
    inst.fibre = c.fibre;
    char buf[160];

    if (c.curvature == CurvatureRule::zero && std::abs(inst.K) > 1e-8) {
        std::snprintf(buf, sizeof buf, "case %s needs K = 0, chart %s has K = %.12g", c.id.c_str(), chart.name.c_str(), inst.K);
        throw CurvatureMismatch(buf);
    }
    if (c.curvature == CurvatureRule::linear_f) {
        const double f0 = p.at("f0").real(), f1 = p.at("f1").real(), h = p.at("h").real();
        const double need = -2.0 * f1 / h;
        if (std::abs(need - inst.K) > 1e-8) {
            std::snprintf(buf, sizeof buf, "case %s needs K = -2 f1/h = %.12g, chart %s has K = %.12g", c.id.c_str(), need,
                          chart.name.c_str(), inst.K);
            throw CurvatureMismatch(buf);
        }
        if (f1 < 0.0) {
            // Only a disk bundle r2 < -f0/f1 carries the metric.
            if (f0 <= 0.0) throw PositivityViolation("f = f1 r2 + f0 is nowhere positive (f1 < 0, f0 <= 0)");
            inst.fibre.r2_hi = std::min(inst.fibre.r2_hi, 0.99 * (-f0 / f1));
            inst.fibre.r2_lo = std::min(inst.fibre.r2_lo, 0.5 * inst.fibre.r2_hi);
        }
    }

    inst.weights = build_weights(c, chart, params);

    for (const Point4& q : sample_points(chart, inst.fibre, 64, 11, 0.05)) {
        const MetricAtPoint m = assemble(chart, inst.weights, q);
        const bool ok = c.pseudo ? (m.delta < 0.0) : (m.f > 0.0 && m.delta > 0.0);
        if (!ok) {
            std::snprintf(buf, sizeof buf, "case %s: f = %.6g, Delta = %.6g at z = %.4g%+.4gi, r2 = %.4g violates %s", c.id.c_str(),
                          m.f, m.delta, q.z.real(), q.z.imag(), m.lambda * std::norm(q.w),
                          c.pseudo ? "Delta < 0" : "f > 0, Delta > 0");
            throw PositivityViolation(buf);
        }
    }
    return inst;
}

std::vector<ConstraintCheck> check_constraints(const KahlerCase& c, const WeightTriple& weights, const ConformalChart& chart,
                                               const std::vector<Point4>& points)
{
    std::vector<ConstraintCheck> out;
    // Membership is decided numerically from the jets, so that e.g. "0.5 + 0*r2"
    // counts as constant: base-only means no w-derivatives; radial means the
    // derivatives factor through r2 = lambda |w|^2.
    std::array<double, 3> dev{};
    const std::array<DependenceClass, 3> need{c.f_class, c.a_class, c.h_class};
    for (const Point4& p : points) {
        const LocalJets l = local_jets(chart, weights, p);
        const std::array<const Jet2*, 3> js{&l.f, &l.a, &l.h};
        const cplx w = p.w, g = l.base.gamma.value;
        for (std::size_t k = 0; k < 3; ++k) {
            const Jet2& j = *js[k];
            using W = Wirtinger;
            const cplx dz = wirtinger(j, W::z), dzb = wirtinger(j, W::zbar), dw = wirtinger(j, W::w), dwb = wirtinger(j, W::wbar);
            double scale = 1.0;
            for (const cplx& gk : j.grad) scale = std::max(scale, std::abs(gk));
            double d = 0.0;
            if (need[k] == DependenceClass::base_only) d = std::abs(dw) + std::abs(dwb);
            else if (need[k] == DependenceClass::radial)
                d = std::max({std::abs(w * dw - std::conj(w) * dwb), std::abs(dz - w * g * dw), std::abs(dzb - std::conj(w * g) * dwb)});
            dev[k] = std::max(dev[k], d / scale);
        }
    }
    const char* names[] = {"f", "a", "h"};
    for (std::size_t k = 0; k < 3; ++k) {
        out.push_back({std::string(names[k]) + " is " + to_string(need[k]), dev[k] < 1e-10, dev[k]});
    }

    double a_dzbar = 0.0, a_grad = 0.0, f_grad = 0.0, h_grad = 0.0, h_abs = 0.0;
    for (const Point4& p : points) {
        const LocalJets l = local_jets(chart, weights, p);
        a_dzbar = std::max(a_dzbar, std::abs(wirtinger(l.a, Wirtinger::zbar)));
        for (std::size_t k = 0; k < 4; ++k) {
            a_grad = std::max(a_grad, std::abs(l.a.grad[k]));
            f_grad = std::max(f_grad, std::abs(l.f.grad[k]));
            h_grad = std::max(h_grad, std::abs(l.h.grad[k]));
        }
        h_abs = std::max(h_abs, std::abs(l.h.value));
    }
    auto bound = [&](bool active, const char* name, double v, double tol) {
        if (active) out.push_back({name, v < tol, v});
    };
    bound(c.a_holomorphic, "a holomorphic (|da/dzbar|)", a_dzbar, 1e-10);
    bound(c.a_constant, "a constant (|grad a|)", a_grad, 1e-10);
    bound(c.f_constant, "f constant (|grad f|)", f_grad, 1e-10);
    bound(c.h_constant, "h constant (|grad h|)", h_grad, 1e-10);
    bound(c.h_zero, "h = 0 (|h|)", h_abs, 1e-12);

    auto syntactically_radial = [](const Weight& wt) { return satisfies(wt.dependence(), DependenceClass::radial); };
    const bool radial_f = syntactically_radial(weights.f);
    const bool radial_h = syntactically_radial(weights.h);
    if (c.f_linear) {
        double f2 = radial_f ? 0.0 : INFINITY;
        if (radial_f)
            for (const Point4& p : points) {
                const double r2 = lambda_value(chart, p.z) * std::norm(p.w);
                f2 = std::max(f2, std::abs(radial_derivatives(weights.f, r2)[2]));
            }
        out.push_back({"f linear in r2 (|f''|)", f2 < 1e-10, f2});
    }

    double kdev = 0.0;
    try {
        const double K = constant_curvature(chart);
        switch (c.curvature) {
        case CurvatureRule::zero: kdev = std::abs(K); break;
        case CurvatureRule::linear_f:
        case CurvatureRule::radial_f:
            if (!radial_f || !radial_h) {
                kdev = INFINITY;
                break;
            }
            for (const Point4& p : points) {
                const double r2 = lambda_value(chart, p.z) * std::norm(p.w);
                const double fp = radial_derivatives(weights.f, r2)[1];
                const double h = radial_derivatives(weights.h, r2)[0];
                kdev = std::max(kdev, std::abs(K + 2.0 * fp / h));
            }
            break;
        case CurvatureRule::free: break;
        }
    } catch (const CurvatureMismatch&) {
        kdev = INFINITY;
    }
    out.push_back({"curvature rule", kdev < 1e-8, kdev});
    return out;
}

bool all_ok(const std::vector<ConstraintCheck>& checks)
{
    return std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.ok; });
}

WeightTriple flat_example(const Expression& a)
{
    if (!satisfies(a.classify(), DependenceClass::base_only)) {
        throw NotHolomorphic("a = " + a.to_string() + " depends on the fibre coordinate");
    }
    const auto flat = ConformalChart::flat();
    for (cplx z : sample_base(flat, 32, 5)) {
        const Jet2 j = eval_on_chart(a, {z, 0.0}, flat);
        const double d = std::abs(wirtinger(j, Wirtinger::zbar));
        if (d > 1e-10) {
            throw NotHolomorphic("a = " + a.to_string() + " has |da/dzbar| = " + std::to_string(d) + " at z = (" +
                                 std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
        }
    }
    const std::string src = a.to_string();
    return {Weight::parse("1+abs2(" + src + ")"), Weight(a), Weight::parse("1")};
}

} // namespace ciconia
