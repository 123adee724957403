#include "ciconia/geometry4d.hpp"

#include "ciconia/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace ciconia {

namespace {

using Mat = Eigen::Matrix4d;

struct MetricDerivs {
    Mat g;
    Mat gi;
    std::array<Mat, 4> dg;                 // dg[e](k, m) = d_e g_km
    std::array<std::array<Mat, 4>, 4> d2g; // only filled when asked
};

MetricDerivs metric_derivs(const ConformalChart& chart, const WeightTriple& weights, const Point4& p, bool second,
                           double degenerate_tol)
{
    const auto G = metric_jets(local_jets(chart, weights, p));
    MetricDerivs m;
    for (int k = 0; k < 4; ++k)
        for (int n = 0; n < 4; ++n) {
            m.g(k, n) = G[k][n].value.real();
            for (int e = 0; e < 4; ++e) m.dg[e](k, n) = G[k][n].grad[e].real();
            if (second)
                for (int e = 0; e < 4; ++e)
                    for (int f = 0; f < 4; ++f) m.d2g[e][f](k, n) = G[k][n].second(e, f).real();
        }
    const double det = m.g.determinant();
    if (!(std::abs(det) >= degenerate_tol)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "|det G| = %.3g below %.1g", std::abs(det), degenerate_tol);
        throw DegenerateMetric(buf);
    }
    m.gi = m.g.inverse();
    return m;
}

// Christoffel symbols of the first kind, [d][b][c] = (d_b g_dc + d_c g_db - d_d g_bc) / 2.
Array3<double> first_kind(const std::array<Mat, 4>& dg)
{
    Array3<double> c{};
    for (int d = 0; d < 4; ++d)
        for (int b = 0; b < 4; ++b)
            for (int k = 0; k < 4; ++k) c[d][b][k] = 0.5 * (dg[b](d, k) + dg[k](d, b) - dg[d](b, k));
    return c;
}

Array3<double> raise(const Mat& gi, const Array3<double>& low)
{
    Array3<double> up{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                double s = 0.0;
                for (int d = 0; d < 4; ++d) s += gi(a, d) * low[d][b][c];
                up[a][b][c] = s;
            }
    return up;
}

} // namespace

double CurvatureAtPoint::max_riemann() const
{
    double m = 0.0;
    for (const auto& a : riemann)
        for (const auto& b : a)
            for (const auto& c : b)
                for (double v : c) m = std::max(m, std::abs(v));
    return m;
}

double CurvatureAtPoint::lowered(int a, int b, int c, int d) const
{
    double s = 0.0;
    for (int e = 0; e < 4; ++e) s += G(a, e) * riemann[e][b][c][d];
    return s;
}

Array3<double> christoffel(const ConformalChart& chart, const WeightTriple& weights, const Point4& p)
{
    const auto m = metric_derivs(chart, weights, p, false, 1e-10);
    return raise(m.gi, first_kind(m.dg));
}

CurvatureAtPoint curvature(const ConformalChart& chart, const WeightTriple& weights, const Point4& p, double degenerate_tol)
{
    const auto m = metric_derivs(chart, weights, p, true, degenerate_tol);
    CurvatureAtPoint c;
    c.G = m.g;
    const auto low = first_kind(m.dg);
    c.christoffel = raise(m.gi, low);

    // d_e Gamma^a_bc from d g^-1 = -g^-1 dg g^-1 and the second derivatives of g.
    std::array<Array3<double>, 4> dgam;
    for (int e = 0; e < 4; ++e) {
        const Mat dgi = -m.gi * m.dg[e] * m.gi;
        std::array<Mat, 4> de;
        for (int f = 0; f < 4; ++f) de[f] = m.d2g[e][f];
        const auto dlow = first_kind(de);
        const auto t1 = raise(dgi, low);
        const auto t2 = raise(m.gi, dlow);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int k = 0; k < 4; ++k) dgam[e][a][b][k] = t1[a][b][k] + t2[a][b][k];
    }

    const auto& G = c.christoffel;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int k = 0; k < 4; ++k)
                for (int d = 0; d < 4; ++d) {
                    double q = 0.0;
                    for (int e = 0; e < 4; ++e) q += G[a][k][e] * G[e][d][b] - G[a][d][e] * G[e][k][b];
                    c.riemann[a][b][k][d] = dgam[k][a][d][b] - dgam[d][a][k][b] + q;
                }
    for (int b = 0; b < 4; ++b)
        for (int d = 0; d < 4; ++d) {
            double s = 0.0;
            for (int a = 0; a < 4; ++a) s += c.riemann[a][b][a][d];
            c.ricci(b, d) = s;
        }
    c.scalar = (m.gi.cwiseProduct(c.ricci)).sum();
    return c;
}

CurvatureIdentities identities(const CurvatureAtPoint& c)
{
    Array4<double> R{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int k = 0; k < 4; ++k)
                for (int d = 0; d < 4; ++d) R[a][b][k][d] = c.lowered(a, b, k, d);
    CurvatureIdentities r;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int k = 0; k < 4; ++k)
                for (int d = 0; d < 4; ++d) {
                    r.bianchi = std::max(r.bianchi, std::abs(R[a][b][k][d] + R[a][k][d][b] + R[a][d][b][k]));
                    r.antisymmetry = std::max({r.antisymmetry, std::abs(R[a][b][k][d] + R[b][a][k][d]),
                                               std::abs(R[a][b][k][d] + R[a][b][d][k])});
                    r.pair_symmetry = std::max(r.pair_symmetry, std::abs(R[a][b][k][d] - R[k][d][a][b]));
                }
    r.ricci_symmetry = (c.ricci - c.ricci.transpose()).cwiseAbs().maxCoeff();
    return r;
}

Eigen::Matrix4d ricci_two_form(const CurvatureAtPoint& c)
{
    return complex_structure().transpose() * c.ricci;
}

// ---------------------------------------------------------------- geodesics

const char* to_string(ExitReason r)
{
    switch (r) {
    case ExitReason::completed: return "completed";
    case ExitReason::domain_exit: return "domain-exit";
    case ExitReason::singularity_approach: return "singularity-approach";
    }
    return "?";
}

double Trajectory::drift_per_unit() const
{
    const double span = tau.empty() ? 0.0 : tau.back();
    return span > 0.0 ? max_energy_drift / span : 0.0;
}

void Trajectory::write_csv(std::ostream& out) const
{
    out << "tau,x,y,s,t,vx,vy,vs,vt,energy\n";
    char buf[64];
    for (std::size_t k = 0; k < tau.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", tau[k]);
        out << buf;
        for (double v : states[k].position) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out << buf;
        }
        for (double v : states[k].velocity) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g\n", states[k].energy);
        out << buf;
    }
}

namespace {

using State8 = std::array<double, 8>;

double energy_of(const Mat& g, const std::array<double, 4>& v)
{
    double e = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) e += g(a, b) * v[a] * v[b];
    return e;
}

Mat metric_value(const ConformalChart& chart, const WeightTriple& weights, const Point4& p)
{
    return assemble(chart, weights, p).G;
}

struct DomainProbe {
    const ConformalChart& chart;
    const std::optional<FibreRange>& fibre;

    bool inside(const State8& y) const
    {
        const Point4 p = Point4::from_real({y[0], y[1], y[2], y[3]});
        if (!chart.domain.contains(p.z)) return false;
        if (!fibre) return true;
        const double r2 = lambda_value(chart, p.z) * std::norm(p.w);
        return r2 > fibre->r2_lo && r2 < fibre->r2_hi;
    }

    // Relative closeness to the boundary of the admissible region.
    bool near_boundary(const State8& y, double tol = 1e-3) const
    {
        const Point4 p = Point4::from_real({y[0], y[1], y[2], y[3]});
        if (fibre) {
            const double r2 = lambda_value(chart, p.z) * std::norm(p.w);
            const double scale = std::max(1.0, std::isfinite(fibre->r2_hi) ? fibre->r2_hi : r2);
            if (std::abs(r2 - fibre->r2_lo) < tol * scale) return true;
            if (std::isfinite(fibre->r2_hi) && std::abs(fibre->r2_hi - r2) < tol * scale) return true;
        }
        if (tol < 1e-3) return false;
        // Probe a slightly displaced base point for the chart boundary.
        const double eps = 1e-6 * std::max(1.0, std::abs(p.z));
        for (cplx d : {cplx(eps, 0), cplx(-eps, 0), cplx(0, eps), cplx(0, -eps)})
            if (!chart.domain.contains(p.z + d)) return true;
        return false;
    }
};

} // namespace

GeodesicState make_state(const ConformalChart& chart, const WeightTriple& weights, const std::array<double, 4>& x,
                         const std::array<double, 4>& v)
{
    GeodesicState s;
    s.position = x;
    s.velocity = v;
    s.energy = energy_of(metric_value(chart, weights, Point4::from_real(x)), v);
    return s;
}

Trajectory geodesic(const ConformalChart& chart, const WeightTriple& weights, const GeodesicState& init, double tau_end,
                    const GeodesicOptions& opt)
{
    // Dormand-Prince 5(4) tableau.
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2, (void)c3, (void)c4, (void)c5;

    const DomainProbe probe{chart, opt.fibre};

    // Throws when the state leaves the admissible region or the metric fails there.
    struct OutOfDomain {};
    auto rhs = [&](const State8& y) {
        if (!probe.inside(y)) throw OutOfDomain{};
        const auto G = christoffel(chart, weights, Point4::from_real({y[0], y[1], y[2], y[3]}));
        State8 d{};
        for (int a = 0; a < 4; ++a) {
            d[a] = y[4 + a];
            double s = 0.0;
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c) s += G[a][b][c] * y[4 + b] * y[4 + c];
            d[4 + a] = -s;
        }
        return d;
    };
    auto axpy = [](const State8& y, double h, std::initializer_list<std::pair<double, const State8*>> terms) {
        State8 r = y;
        for (const auto& [c, k] : terms)
            for (int i = 0; i < 8; ++i) r[i] += h * c * (*k)[i];
        return r;
    };

    Trajectory tr;
    State8 y{};
    for (int i = 0; i < 4; ++i) {
        y[i] = init.position[i];
        y[4 + i] = init.velocity[i];
    }
    const double E0 = init.energy;
    tr.tau.push_back(0.0);
    tr.states.push_back(init);

    double t = 0.0;
    double h = std::min(opt.initial_step, tau_end);
    State8 k1 = rhs(y);
    bool last_reject_domain = false;

    for (int steps = 0; t < tau_end; ++steps) {
        if (steps >= opt.max_steps) {
            tr.exit = probe.near_boundary(y) ? ExitReason::domain_exit : ExitReason::singularity_approach;
            break;
        }
        if (h < opt.min_step * std::max(1.0, t)) {
            tr.exit = (last_reject_domain || probe.near_boundary(y)) ? ExitReason::domain_exit
                                                                     : ExitReason::singularity_approach;
            break;
        }
        h = std::min(h, tau_end - t);

        State8 k2, k3, k4, k5, k6, k7, y5;
        double err = std::numeric_limits<double>::infinity();
        bool domain_fail = false;
        try {
            k2 = rhs(axpy(y, h, {{a21, &k1}}));
            k3 = rhs(axpy(y, h, {{a31, &k1}, {a32, &k2}}));
            k4 = rhs(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            k5 = rhs(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            k6 = rhs(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            y5 = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            k7 = rhs(y5);
            err = 0.0;
            for (int i = 0; i < 8; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
                err = std::max(err, std::abs(e) / sc);
            }
            if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
        } catch (const OutOfDomain&) {
            domain_fail = true;
        } catch (const DomainError&) {
            domain_fail = true;
        } catch (const Error&) {
            // Pole or degenerate metric inside the step: shrink and retry.
        }

        if (err > 1.0) {
            last_reject_domain = domain_fail;
            h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
            continue;
        }
        last_reject_domain = false;
        t += h;
        y = y5;
        k1 = k7;

        GeodesicState s;
        for (int i = 0; i < 4; ++i) {
            s.position[i] = y[i];
            s.velocity[i] = y[4 + i];
        }
        s.energy = energy_of(metric_value(chart, weights, Point4::from_real(s.position)), s.velocity);
        tr.max_energy_drift = std::max(tr.max_energy_drift, std::abs(s.energy - E0));
        tr.tau.push_back(t);
        tr.states.push_back(s);
        if (opt.fibre && probe.near_boundary(y, opt.boundary_guard)) {
            tr.exit = ExitReason::domain_exit;
            break;
        }

        h *= err > 0.0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
    }
    return tr;
}

// ---------------------------------------------------------------- fibre lengths

double sqrt_h(const ConformalChart& chart, const Weight& h, cplx z, double r)
{
    double v;
    const auto dep = h.dependence();
    if (dep == DependenceClass::constant || dep == DependenceClass::radial) {
        v = h.at_r2(r * r).real();
    } else {
        const double lam = lambda_value(chart, z);
        v = h.eval(base_jets(chart, {z, cplx(r / std::sqrt(lam), 0.0)})).value.real();
    }
    if (!(v >= 0.0)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "h = %.6g is not nonnegative at r = %.6g", v, r);
        throw DomainError(buf);
    }
    return std::sqrt(v);
}

namespace {

struct PowerFit {
    double alpha = 0.0;
    double log_c = 0.0;
    double residual = 0.0;
};

PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    PowerFit f;
    f.alpha = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.log_c = (sy - f.alpha * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = y[i] - (f.log_c + f.alpha * x[i]);
        ss += d * d;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

// Fits sqrt(h) ~ C d^alpha over two decades of distance d to the endpoint.
// For the endpoint at infinity d is r itself.
std::pair<EndpointFit, PowerFit> fit_endpoint(const std::function<double(double)>& sh, double r_end, bool at_infinity,
                                              bool is_upper, double ref, const FibreLengthOptions& opt)
{
    const double scale = at_infinity ? std::max(1.0, ref) : (r_end > 0.0 ? r_end : 1.0);
    std::vector<double> x, y;
    for (int k = 0; k < opt.nodes; ++k) {
        const double frac = static_cast<double>(k) / (opt.nodes - 1);
        double d, r;
        if (at_infinity) {
            d = scale / opt.window_start * std::pow(10.0, -2.0 * frac); // [scale / ws / 100, scale / ws]
            r = d;
        } else {
            d = scale * opt.window_start * std::pow(10.0, 2.0 * frac);
            r = is_upper ? r_end - d : r_end + d;
        }
        const double v = sh(r);
        if (!(v > 0.0) || !std::isfinite(v)) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "sqrt(h) = %.3g at r = %.6g while fitting the endpoint r = %.6g", v, r, r_end);
            throw ExponentFitUnstable(buf);
        }
        x.push_back(std::log(d));
        y.push_back(std::log(v));
    }
    const PowerFit pf = fit_power(x, y);
    EndpointFit e;
    e.r = at_infinity ? std::numeric_limits<double>::infinity() : r_end;
    e.at_infinity = at_infinity;
    e.alpha = pf.alpha;
    e.fit_residual = pf.residual;
    e.divergent = at_infinity ? pf.alpha >= -1.0 : pf.alpha <= -1.0;
    if (pf.residual > opt.max_fit_residual) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "power-law fit at r = %.6g has residual %.3g (alpha = %.4g)", r_end, pf.residual,
                      pf.alpha);
        throw ExponentFitUnstable(buf);
    }
    return {e, pf};
}

} // namespace

FibreLength fibre_length(const ConformalChart& chart, const WeightTriple& weights, cplx z, double r_a, double r_b,
                         const FibreLengthOptions& opt)
{
    if (!(r_a >= 0.0) || !(r_b > r_a)) throw DomainError("fibre interval must satisfy 0 <= r_a < r_b");
    const auto sh = [&](double r) { return sqrt_h(chart, weights.h, z, r); };
    const bool inf_b = std::isinf(r_b);

    FibreLength out;
    const auto [lo, plo] = fit_endpoint(sh, r_a, false, false, r_a, opt);
    const auto [hi, phi] = fit_endpoint(sh, r_b, inf_b, true, r_a, opt);
    out.lo = lo;
    out.hi = hi;
    if (out.divergent()) {
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }

    // Cut each end where the fit window starts and add the power-law tail there.
    const double d_lo = (r_a > 0.0 ? r_a : 1.0) * opt.window_start;
    const double a = r_a + d_lo;
    double b, tail_hi;
    if (inf_b) {
        b = std::max(1.0, r_a) / opt.window_start;
        tail_hi = -std::exp(phi.log_c) * std::pow(b, phi.alpha + 1.0) / (phi.alpha + 1.0);
    } else {
        const double d_hi = r_b * opt.window_start;
        b = r_b - d_hi;
        tail_hi = std::exp(phi.log_c) * std::pow(d_hi, phi.alpha + 1.0) / (phi.alpha + 1.0);
    }
    const double tail_lo = std::exp(plo.log_c) * std::pow(d_lo, plo.alpha + 1.0) / (plo.alpha + 1.0);
    if (!(b > a)) throw DomainError("fibre interval shorter than the endpoint windows");
    const auto q = integrate(sh, a, b, 1e-10, 1e-10, 20000);
    out.value = q.value + tail_lo + tail_hi;
    out.error = q.error + 1e-2 * std::abs(tail_lo + tail_hi) * opt.window_start;
    return out;
}

const char* to_string(Completeness c)
{
    switch (c) {
    case Completeness::complete: return "complete";
    case Completeness::complete_with_boundary_added: return "complete-with-boundary-added";
    case Completeness::complete_away_from_zero_section: return "complete-away-from-zero-section";
    }
    return "?";
}

namespace {

cplx reference_base_point(const ConformalChart& chart)
{
    if (chart.domain.contains(0.0)) return 0.0;
    return chart.domain.sample(0.5, 0.5, 1e-2);
}

} // namespace

CompletenessReport completeness_report(const SolutionFamily& family, const ConformalChart& chart,
                                       const FibreLengthOptions& opt)
{
    const cplx z = reference_base_point(chart);
    const double r_lo = std::sqrt(family.r2_lo);
    const double r_hi = std::isfinite(family.r2_hi) ? std::sqrt(family.r2_hi) : family.r2_hi;
    const FibreLength fl = fibre_length(chart, family.weights, z, r_lo, r_hi, opt);

    CompletenessReport rep;
    rep.kind = family.kind;
    rep.inner = fl.lo;
    rep.outer = fl.hi;
    rep.inner_infinite = fl.lo.divergent;
    rep.outer_infinite = fl.hi.divergent;
    if (rep.inner_infinite && rep.outer_infinite) {
        rep.verdict = Completeness::complete;
    } else if (r_lo == 0.0 && rep.inner_infinite) {
        // Finite outer boundary added; the zero section stays at infinite distance.
        rep.verdict = Completeness::complete_away_from_zero_section;
    } else {
        rep.verdict = Completeness::complete_with_boundary_added;
    }
    const FibreRange in = family.interior();
    rep.interior_length = integrate([&](double r) { return sqrt_h(chart, family.weights.h, z, r); },
                                    std::sqrt(in.r2_lo), std::sqrt(in.r2_hi), 1e-10, 1e-10, 20000)
                              .value;
    return rep;
}

std::vector<LengthRow> length_profile(const SolutionFamily& family, const ConformalChart& chart, int rows)
{
    const cplx z = reference_base_point(chart);
    const FibreRange in = family.interior();
    const double a = std::sqrt(in.r2_lo), b = std::sqrt(in.r2_hi);
    const auto sh = [&](double r) { return sqrt_h(chart, family.weights.h, z, r); };
    std::vector<LengthRow> out;
    double cum = 0.0, prev = a;
    for (int k = 0; k < rows; ++k) {
        const double r = rows > 1 ? a + (b - a) * k / (rows - 1) : a;
        if (k > 0) cum += integrate(sh, prev, r, 1e-12, 1e-12, 20000).value;
        out.push_back({r, sh(r), cum});
        prev = r;
    }
    return out;
}

} // namespace ciconia
