#include "cli.hpp"

#include "ciconia/commutant.hpp"
#include "ciconia/errors.hpp"
#include "ciconia/geometry4d.hpp"

#include <cstdio>
#include <numeric>
#include <sstream>

namespace ciconia::cli {

namespace {

double max_abs(const FormMatrix& m)
{
    return m.cwiseAbs().maxCoeff();
}

// Runs `eval` on every point in parallel and folds the values into checks.
template <class F>
std::vector<Check> run_checks(const RunConfig& cfg, const std::vector<Point4>& pts,
                              const std::vector<std::pair<std::string, std::string>>& names_tol, F&& eval,
                              std::vector<SampleValues>* keep = nullptr)
{
    auto results = parallel_map(pts.size(), cfg.jobs, [&](std::size_t i) {
        SampleValues sv;
        try {
            sv.values = eval(pts[i]);
        } catch (const std::exception& e) {
            sv.error = e.what();
        }
        return sv;
    });
    std::vector<std::string> names;
    std::vector<double> tols;
    for (const auto& [n, t] : names_tol) {
        names.push_back(n);
        tols.push_back(cfg.tolerance(t));
    }
    auto checks = aggregate(names, tols, pts, results);
    if (keep) *keep = std::move(results);
    return checks;
}

json point_json(const Point4& p)
{
    return {{"x", p.z.real()}, {"y", p.z.imag()}, {"s", p.w.real()}, {"t", p.w.imag()}};
}

Report base_report(const std::string& command, const RunConfig& cfg, const Subject& s)
{
    Report r;
    r.command = command;
    r.config = cfg.echo();
    r.config["chart_resolved"] = {{"name", s.chart.name}, {"lambda", s.chart.lambda.to_string()}, {"domain", s.chart.domain.describe()}};
    if (s.has_weights) r.config["weights_resolved"] = s.weights.describe();
    r.config["fibre_resolved"] = {s.fibre.r2_lo, s.fibre.r2_hi};
    r.config["margin_resolved"] = s.margin;
    return r;
}

Report verify_kahler(const RunConfig& cfg)
{
    const Subject s = resolve_subject(cfg, true);
    Report r = base_report("verify kahler", cfg, s);
    const auto pts = sample_points(s.chart, s.fibre, cfg.samples, cfg.seed, s.margin);
    std::vector<SampleValues> vals;
    r.checks = run_checks(
        cfg, pts, {{"res1", "closedness"}, {"res2", "closedness"}},
        [&](const Point4& p) {
            const auto c = closedness_residual(s.chart, s.weights, p);
            return std::vector<double>{std::abs(c.res1), std::abs(c.res2)};
        },
        &vals);
    if (s.kcase) {
        for (const auto& c : check_constraints(*s.kcase, s.weights, s.chart, pts)) {
            Check k;
            k.name = "constraint: " + c.name;
            k.max_residual = c.value;
            k.pass = c.ok;
            k.samples = pts.size();
            k.note = "case " + s.kcase->id + " class/curvature condition";
            r.checks.push_back(k);
        }
        r.extra["case_statement"] = s.kcase->statement;
    }
    if (!r.pass()) {
        // The worst samples by |res2|, for inspection.
        std::vector<std::size_t> idx(pts.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        auto key = [&](std::size_t i) { return vals[i].error.empty() ? vals[i].values[1] : -1.0; };
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
        json table = json::array();
        for (std::size_t k = 0; k < std::min<std::size_t>(10, idx.size()); ++k) {
            const auto i = idx[k];
            if (!vals[i].error.empty()) break;
            json row = point_json(pts[i]);
            row["res1"] = vals[i].values[0];
            row["res2"] = vals[i].values[1];
            table.push_back(row);
        }
        r.extra["residual_table"] = table;
    }
    return r;
}

Report verify_ricci_flat(const RunConfig& cfg)
{
    const Subject s = resolve_subject(cfg, true);
    Report r = base_report("verify ricci-flat", cfg, s);
    const auto pts = sample_points(s.chart, s.fibre, cfg.samples, cfg.seed, s.margin);
    std::vector<std::pair<std::string, std::string>> names{{"rho_det_h", "rho"},  {"rho_split", "rho"},
                                                           {"route_agreement", "route"}, {"einstein_S0", "einstein"},
                                                           {"closedness", "closedness"}, {"ricci_4d", "ricci4d"}};
    if (s.family) names.emplace_back("psi", "psi");
    r.checks = run_checks(cfg, pts, names, [&](const Point4& p) {
        const auto rep = ricci_report(s.chart, s.weights, p, 0.0);
        std::vector<double> v{max_abs(rep.rho_det_h),
                              max_abs(rep.rho_split),
                              rep.route_deviation,
                              rep.residuals.max(),
                              closedness_residual(s.chart, s.weights, p).max(),
                              curvature(s.chart, s.weights, p).max_ricci()};
        if (s.family) v.push_back(std::abs(psi(*s.family, s.chart, p) - 1.0));
        return v;
    });
    if (s.family) {
        r.extra["family"] = {{"kind", to_string(s.family->kind)}, {"K", s.family->K}, {"r2_lo", s.family->r2_lo}};
        if (std::isfinite(s.family->r2_hi)) r.extra["family"]["r2_hi"] = s.family->r2_hi;
    }
    return r;
}

Report verify_einstein(const RunConfig& cfg)
{
    const Subject s = resolve_subject(cfg, true);
    Report r = base_report("verify einstein", cfg, s);
    const auto pts = sample_points(s.chart, s.fibre, cfg.samples, cfg.seed, s.margin);
    r.checks = run_checks(cfg, pts, {{"e1", "einstein"}, {"e2", "einstein"}, {"e3", "einstein"}}, [&](const Point4& p) {
        const auto e = einstein_residuals(s.chart, s.weights, p, cfg.S);
        return std::vector<double>{std::abs(e.e1), std::abs(e.e2), std::abs(e.e3)};
    });
    return r;
}

Report verify_transitions(const RunConfig& cfg)
{
    const Subject s = resolve_subject(cfg, false);
    ChartTransition t;
    ConformalChart from = s.chart, to = s.chart;
    if (s.chart.name == "sphere") {
        t = ChartTransition::sphere_inversion();
        from.domain = to.domain = Domain::annulus(0.5, 2.0);
    } else if (s.chart.name == "hyperbolic") {
        t = ChartTransition::cayley();
        from.domain = Domain::disk(0.8);
        to = ConformalChart::hyperbolic_half_plane();
    } else if (s.chart.name == "flat" || s.chart.name == "torus" || s.chart.name == "custom") {
        t = ChartTransition::identity();
    } else {
        throw ConfigError("no transition is defined for chart '" + s.chart.name + "'");
    }
    Report r = base_report("verify transitions", cfg, s);
    r.extra["transition"] = {{"forward", t.forward.to_string()}, {"inverse", t.inverse.to_string()},
                             {"from_domain", from.domain.describe()}, {"to_chart", to.name}};
    const auto pts = sample_points(from, s.fibre, cfg.samples, cfg.seed, s.margin);
    r.checks = run_checks(cfg, pts,
                          {{"roundtrip", "transition"}, {"lambda_law", "transition"}, {"gamma_law", "transition"},
                           {"w_law", "transition"}, {"eta_law", "transition"}},
                          [&](const Point4& p) {
                              const auto rep = verify_transition(t, from, to, {p});
                              return std::vector<double>{rep.roundtrip, rep.lambda_law, rep.gamma_law, rep.w_law, rep.eta_law};
                          });
    return r;
}

Report verify_nabla(const RunConfig& cfg)
{
    const Subject s = resolve_subject(cfg, false);
    Report r = base_report("verify nabla-tables", cfg, s);
    const auto pts = sample_points(s.chart, s.fibre, cfg.samples, cfg.seed, s.margin);
    r.checks = run_checks(cfg, pts,
                          {{"form_table", "nabla"}, {"eta_derivatives", "nabla"}, {"parallel_base", "nabla"},
                           {"parallel_fibre", "nabla"}, {"parallel_mixed", "nabla"}},
                          [&](const Point4& p) {
                              const auto n = nabla_star_report(s.chart, p);
                              return std::vector<double>{n.form_table, n.eta_derivatives, n.parallel_base, n.parallel_fibre,
                                                         n.parallel_mixed};
                          });
    return r;
}

json endpoint_json(const EndpointFit& e, bool infinite)
{
    json j;
    if (e.at_infinity) j["r"] = "inf";
    else j["r"] = e.r;
    j["alpha"] = e.alpha;
    j["fit_residual"] = e.fit_residual;
    j["distance"] = infinite ? "infinite" : "finite";
    return j;
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Report verify(const std::string& subject, const RunConfig& cfg)
{
    if (subject == "kahler") return verify_kahler(cfg);
    if (subject == "ricci-flat") return verify_ricci_flat(cfg);
    if (subject == "einstein") return verify_einstein(cfg);
    if (subject == "transitions") return verify_transitions(cfg);
    if (subject == "nabla-tables") return verify_nabla(cfg);
    throw ConfigError("unknown verify subject '" + subject + "' (kahler, ricci-flat, einstein, transitions, nabla-tables)");
}

CompletenessOutput completeness(const RunConfig& cfg, int rows)
{
    if (!cfg.family) throw ConfigError("completeness needs a family (--family)");
    const Subject s = resolve_subject(cfg, true);
    CompletenessOutput out;
    Report& r = out.report;
    r = base_report("completeness", cfg, s);
    FibreLengthOptions opt;
    opt.max_fit_residual = cfg.tolerance("fit_residual");
    try {
        const auto c = completeness_report(*s.family, s.chart, opt);
        r.extra["verdict"] = to_string(c.verdict);
        r.extra["inner"] = endpoint_json(c.inner, c.inner_infinite);
        r.extra["outer"] = endpoint_json(c.outer, c.outer_infinite);
        r.extra["interior_length"] = c.interior_length;
        for (const auto* e : {&c.inner, &c.outer}) {
            Check k;
            k.name = e == &c.inner ? "inner_fit" : "outer_fit";
            k.max_residual = e->fit_residual;
            k.tolerance = opt.max_fit_residual;
            k.pass = e->fit_residual < k.tolerance;
            k.samples = static_cast<std::size_t>(opt.nodes);
            r.checks.push_back(k);
        }
        out.rows = length_profile(*s.family, s.chart, rows);
    } catch (const ExponentFitUnstable& e) {
        Check k;
        k.name = "exponent_fit";
        k.max_residual = std::numeric_limits<double>::quiet_NaN();
        k.tolerance = opt.max_fit_residual;
        k.pass = false;
        k.note = e.what();
        r.checks.push_back(k);
    }
    return out;
}

SweepOutput sweep(const SweepSpec& spec, const RunConfig& cfg)
{
    enum class Q { K, rho, signature, scalar };
    Q q;
    if (spec.quantity == "K") q = Q::K;
    else if (spec.quantity == "rho-norm") q = Q::rho;
    else if (spec.quantity == "signature") q = Q::signature;
    else if (spec.quantity == "scalar") q = Q::scalar;
    else throw ConfigError("unknown sweep quantity '" + spec.quantity + "' (K, rho-norm, signature, scalar)");

    const Subject s = resolve_subject(cfg, q != Q::K);
    const auto xs = parse_axis(spec.x, "--x"), ys = parse_axis(spec.y, "--y");
    const auto ss = parse_axis(spec.s, "--s"), ts = parse_axis(spec.t, "--t");
    std::vector<std::array<double, 4>> cells;
    for (double x : xs)
        for (double y : ys)
            for (double sv : ss)
                for (double t : ts) cells.push_back({x, y, sv, t});

    struct Cell {
        bool ok = false;
        double value = 0.0;
        std::string label;
        bool mismatch = false;
    };
    const auto res = parallel_map(cells.size(), cfg.jobs, [&](std::size_t i) {
        Cell c;
        const Point4 p = Point4::from_real(cells[i]);
        if (!s.chart.domain.contains(p.z)) return c;
        try {
            switch (q) {
            case Q::K: c.value = gauss_curvature(s.chart, p.z); break;
            case Q::rho: c.value = max_abs(ricci_form(s.chart, s.weights, p, RicciRoute::det_h)); break;
            case Q::scalar: c.value = curvature(s.chart, s.weights, p).scalar; break;
            case Q::signature: {
                const auto m = assemble(s.chart, s.weights, p);
                c.label = to_string(m.signature);
                c.mismatch = m.signature != eigen_signature(m.G);
                break;
            }
            }
            c.ok = std::isfinite(c.value);
        } catch (const Error&) {
            c.ok = false;
        }
        return c;
    });

    std::ostringstream csv;
    csv << "x,y,s,t," << spec.quantity << "\n";
    std::size_t na = 0, mismatches = 0;
    double worst = 0.0;
    std::optional<Point4> worst_at;
    std::map<std::string, std::size_t> classes;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& v = cells[i];
        csv << fmt(v[0]) << ',' << fmt(v[1]) << ',' << fmt(v[2]) << ',' << fmt(v[3]) << ',';
        if (!res[i].ok) {
            csv << "NA\n";
            ++na;
            continue;
        }
        if (q == Q::signature) {
            // Labels such as split(2,2) carry commas.
            csv << '"' << res[i].label << "\"\n";
            ++classes[res[i].label];
            mismatches += res[i].mismatch;
        } else {
            csv << fmt(res[i].value) << "\n";
            if (!worst_at || std::abs(res[i].value) > worst) {
                worst = std::abs(res[i].value);
                worst_at = Point4::from_real(v);
            }
        }
    }

    SweepOutput out;
    out.csv = csv.str();
    Report& r = out.report;
    r = base_report("sweep " + spec.quantity, cfg, s);
    r.config["grid"] = {{"x", spec.x}, {"y", spec.y}, {"s", spec.s}, {"t", spec.t}};
    r.extra["cells"] = cells.size();
    r.extra["na"] = na;
    if (q == Q::signature) {
        r.extra["classes"] = classes;
        Check k;
        k.name = "criteria_vs_eigenvalues";
        k.max_residual = static_cast<double>(mismatches);
        k.tolerance = 0.5;
        k.pass = mismatches == 0;
        k.samples = cells.size() - na;
        k.note = "number of cells where the criteria disagree with eigenvalue signs";
        r.checks.push_back(k);
    } else if (q == Q::rho) {
        Check k;
        k.name = "rho_norm";
        k.max_residual = worst;
        k.tolerance = cfg.tolerance("rho");
        k.pass = worst < k.tolerance;
        k.samples = cells.size() - na;
        k.worst = worst_at;
        r.checks.push_back(k);
    }
    return out;
}

Report commutant(const CommutantSpec& spec, const RunConfig& cfg)
{
    const Group g = parse_group(spec.group);
    Report r;
    r.command = "commutant";
    r.config = {{"m", spec.m}, {"group", to_string(g)}, {"generators", spec.generators}, {"fresh", spec.fresh},
                {"seed", cfg.seed}, {"tolerances", cfg.tolerances}};
    CommutantBasis b;
    try {
        b = solve_commutant(make_problem(spec.m, g, cfg.seed, spec.generators));
    } catch (const RankDeficientGenerators& e) {
        Check k;
        k.name = "generator_rank";
        k.max_residual = 1.0;
        k.tolerance = 0.5;
        k.pass = false;
        k.note = e.what();
        r.checks.push_back(k);
        return r;
    }
    const auto s = structure_check(b, cfg.tolerance("structure"));
    const auto fresh = random_elements(spec.m, g, spec.fresh, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    auto add = [&](std::string name, double v, double tol, std::size_t n, std::string note = {}) {
        Check k;
        k.name = std::move(name);
        k.max_residual = v;
        k.tolerance = tol;
        k.pass = v < tol;
        k.samples = n;
        k.note = std::move(note);
        r.checks.push_back(k);
    };
    add("commutation_fresh", commutation_residual(b, fresh), cfg.tolerance("commutation"), fresh.size(),
        "fresh group elements not used as generators");
    add("diagonal_blocks", s.diagonal_deviation, cfg.tolerance("structure"), b.basis.size(), "f 1 and h 1");
    add("off_diagonal_block", s.off_diagonal_deviation, cfg.tolerance("structure"), b.basis.size());
    add("span_deficit", s.span_deficit, cfg.tolerance("structure"), b.basis.size());
    add("dimension", std::abs(s.dimension - s.predicted_dimension), 0.5, 1, "|dimension - predicted|");
    r.extra["dimension"] = s.dimension;
    r.extra["predicted_dimension"] = s.predicted_dimension;
    const bool rot = spec.m == 2 && g == Group::SO;
    r.extra["block_structure"] = {{"verdict", s.ok ? "ok" : "violated"},
                                  {"form", rot ? "(f 1, b 1 + c J; (b 1 + c J)^T, h 1)" : "(f 1, b 1; b 1, h 1)"}};
    return r;
}

GeodesicOutput geodesic(const GeodesicSpec& spec, const RunConfig& cfg)
{
    const Subject s = resolve_subject(cfg, true);
    const auto x0 = parse_vec4(spec.x0, "--x0");
    const auto v0 = parse_vec4(spec.v0, "--v0");
    if (!(spec.tau > 0.0)) throw ConfigError("--tau must be positive");
    GeodesicOptions opt;
    if (s.family) opt.fibre = FibreRange{s.family->r2_lo, s.family->r2_hi};
    GeodesicState init;
    try {
        init = make_state(s.chart, s.weights, x0, v0);
    } catch (const Error& e) {
        throw ConfigError(std::string("initial point: ") + e.what());
    }
    const Trajectory tr = ciconia::geodesic(s.chart, s.weights, init, spec.tau, opt);

    GeodesicOutput out;
    Report& r = out.report;
    r = base_report("geodesic", cfg, s);
    r.config["x0"] = spec.x0;
    r.config["v0"] = spec.v0;
    r.config["tau"] = spec.tau;
    r.extra["exit"] = to_string(tr.exit);
    r.extra["tau_end"] = tr.tau.back();
    r.extra["steps"] = tr.tau.size() - 1;
    r.extra["energy"] = init.energy;
    Check k;
    k.name = "energy_drift_per_unit";
    k.max_residual = tr.drift_per_unit();
    k.tolerance = cfg.tolerance("energy_drift");
    k.pass = k.max_residual < k.tolerance;
    k.samples = tr.tau.size();
    r.checks.push_back(k);
    std::ostringstream csv;
    tr.write_csv(csv);
    out.csv = csv.str();
    return out;
}

} // namespace ciconia::cli
