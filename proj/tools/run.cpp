#include "cli.hpp"

#include "ciconia/errors.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace ciconia::cli {

namespace {

// Flags shared by every subcommand; unset flags leave the config file values alone.
struct CommonFlags {
    std::string config, chart, lambda, domain, case_id, family, fibre, output;
    std::map<std::string, std::string> metric; // --f --a --h --f0 ... as given
    std::vector<std::string> params, tols;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double margin = 0.0, S = 0.0;
    int jobs = 0;
    bool timing = false;
};

const char* kMetricFlags[] = {"f", "a", "h", "f0", "f1", "a1", "a2", "h1", "ah", "ar", "dk", "c0"};

void add_common(CLI::App* app, CommonFlags& f)
{
    app->add_option("--config", f.config, "JSON run configuration");
    app->add_option("--chart", f.chart, "chart model: flat, torus, sphere, hyperbolic, half-plane");
    app->add_option("--lambda", f.lambda, "custom conformal factor expression");
    app->add_option("--domain", f.domain, "domain of a custom chart: plane[:r], disk:r, annulus:a:b, half-plane, torus");
    app->add_option("--case", f.case_id, "Kaehler case id (i .. x, flat-example)");
    app->add_option("--family", f.family, "Ricci-flat family: cy-i, cy-ii, cy-iii, cy-iv, ricci-flat-general");
    for (const char* name : kMetricFlags) {
        app->add_option(std::string("--") + name, f.metric[name],
                        "weight expression, case parameter or family parameter '" + std::string(name) + "'");
    }
    app->add_option("--param", f.params, "case parameter name=value")->take_all();
    app->add_option("--samples", f.samples, "number of sample points");
    app->add_option("--seed", f.seed, "sample seed (overrides CICONIA_SEED)");
    app->add_option("--tol", f.tols, "tolerance override name=value")->take_all();
    app->add_option("--fibre", f.fibre, "r2 range lo:hi");
    app->add_option("--margin", f.margin, "distance of base samples from the domain boundary");
    app->add_option("--S", f.S, "Einstein constant");
    app->add_option("-o,--output", f.output, "report path (default stdout)");
    app->add_option("--jobs", f.jobs, "worker threads (0: automatic)");
    app->add_flag("--timing", f.timing, "add wall-clock timing to the report");
}

std::pair<std::string, std::string> split_assignment(const std::string& s, const std::string& what)
{
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(what + ": expected name=value, got '" + s + "'");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

RunConfig build_config(const CLI::App* app, const CommonFlags& f)
{
    RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
    auto given = [&](const std::string& name) { return app->count(name) > 0; };

    if (given("--chart") && given("--lambda")) throw ConfigError("--chart and --lambda are exclusive");
    if (given("--chart")) c.chart = f.chart;
    if (given("--lambda")) {
        (void)Expression::parse(f.lambda);
        c.chart = {{"lambda", f.lambda}, {"domain", given("--domain") ? f.domain : std::string("plane")}};
    } else if (given("--domain")) {
        throw ConfigError("--domain applies to a custom chart given by --lambda");
    }
    if (given("--case")) c.case_id = f.case_id;
    if (given("--family")) {
        FamilySpec fs = c.family ? *c.family : FamilySpec{};
        fs.kind = f.family;
        (void)parse_family(fs.kind);
        c.family = fs;
    }

    std::map<std::string, std::string> metric;
    for (const char* name : kMetricFlags)
        if (given(std::string("--") + name)) metric[name] = f.metric.at(name);
    for (const auto& p : f.params) {
        auto [k, v] = split_assignment(p, "--param");
        metric[k] = v;
    }
    if (c.family) {
        for (const auto& [k, v] : metric) {
            if (k == "a") c.family->a = v;
            else if (k == "f") c.family->f = parse_constant(v, "--f").real();
            else if (k == "c0") c.family->c0 = parse_constant(v, "--c0").real();
            else throw ConfigError("--" + k + " does not apply to a family (a, f, c0)");
        }
    } else if (c.case_id) {
        for (const auto& [k, v] : metric) {
            if (k == "c0") throw ConfigError("--c0 applies to families only");
            (void)parse_constant(v, "parameter " + k);
            c.parameters[k] = v;
        }
    } else if (!metric.empty()) {
        std::array<std::string, 3> w = c.weights ? *c.weights : std::array<std::string, 3>{"1", "0", "1"};
        for (const auto& [k, v] : metric) {
            if (k == "f") w[0] = v;
            else if (k == "a") w[1] = v;
            else if (k == "h") w[2] = v;
            else throw ConfigError("--" + k + " needs --case (or --family for c0)");
            (void)Expression::parse(v);
        }
        c.weights = w;
    }
    if (int(bool(c.case_id)) + int(bool(c.weights)) + int(bool(c.family)) > 1) {
        throw ConfigError("exactly one of weights, case, family may be given");
    }
    if (!c.case_id && !c.parameters.empty()) throw ConfigError("case parameters given without a case");

    if (given("--samples")) {
        if (f.samples == 0) throw ConfigError("--samples must be positive");
        c.samples = f.samples;
    }
    if (auto s = env_seed()) c.seed = *s;
    if (given("--seed")) c.seed = f.seed;
    for (const auto& t : f.tols) {
        auto [k, v] = split_assignment(t, "--tol");
        if (!default_tolerances().count(k)) throw ConfigError("unknown tolerance '" + k + "'");
        const double x = parse_axis(v, "--tol " + k)[0];
        if (!(x > 0.0)) throw ConfigError("tolerance " + k + " must be positive");
        c.tolerances[k] = x;
    }
    if (given("--fibre")) {
        const auto pos = f.fibre.find(':');
        if (pos == std::string::npos) throw ConfigError("--fibre: expected lo:hi");
        const double lo = parse_axis(f.fibre.substr(0, pos), "--fibre")[0];
        const double hi = parse_axis(f.fibre.substr(pos + 1), "--fibre")[0];
        if (!(lo >= 0.0 && hi > lo)) throw ConfigError("--fibre: need 0 <= lo < hi");
        c.fibre = FibreRange{lo, hi};
    }
    if (given("--margin")) {
        if (!(f.margin >= 0.0 && f.margin < 0.5)) throw ConfigError("--margin: expected 0 <= margin < 0.5");
        c.margin = f.margin;
    }
    if (given("--S")) c.S = f.S;
    if (given("--output")) c.output = f.output;
    if (given("--jobs")) {
        if (f.jobs < 0) throw ConfigError("--jobs must be non-negative");
        c.jobs = f.jobs;
    }
    if (f.timing) c.timing = true;
    return c;
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

void print_failures(const Report& r)
{
    for (const auto& c : r.checks) {
        if (c.pass) continue;
        std::fprintf(stderr, "FAIL %-28s max %.3e  tol %.1e  samples %zu%s%s\n", c.name.c_str(), c.max_residual,
                     c.tolerance, c.samples, c.note.empty() ? "" : "  ", c.note.c_str());
    }
    if (r.extra.contains("residual_table")) {
        std::fprintf(stderr, "%12s %12s %12s %12s %12s %12s\n", "x", "y", "s", "t", "|res1|", "|res2|");
        for (const auto& row : r.extra["residual_table"]) {
            std::fprintf(stderr, "%12.5f %12.5f %12.5f %12.5f %12.4e %12.4e\n", row["x"].get<double>(),
                         row["y"].get<double>(), row["s"].get<double>(), row["t"].get<double>(),
                         row["res1"].get<double>(), row["res2"].get<double>());
        }
    }
}

template <class F>
Report timed(const RunConfig& cfg, F&& f)
{
    const auto t0 = std::chrono::steady_clock::now();
    Report r = f();
    if (cfg.timing) r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace

int run(int argc, char** argv)
{
    CLI::App app{"ciconia: metrics on the tangent bundle of a Riemann surface, checked numerically"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    CommonFlags vf, cf, sf, mf, gf;
    std::string subject;
    auto* verify_cmd = app.add_subcommand("verify", "run a residual suite");
    verify_cmd->add_option("subject", subject, "kahler | ricci-flat | einstein | transitions | nabla-tables")
        ->required()
        ->check(CLI::IsMember({"kahler", "ricci-flat", "einstein", "transitions", "nabla-tables"}));
    add_common(verify_cmd, vf);

    std::string csv_path;
    int rows = 200;
    auto* comp_cmd = app.add_subcommand("completeness", "fibre length asymptotics and completeness verdict");
    add_common(comp_cmd, cf);
    comp_cmd->add_option("--csv", csv_path, "write r, sqrt_h, cumulative length");
    comp_cmd->add_option("--rows", rows, "rows of the length profile")->check(CLI::Range(2, 100000));

    SweepSpec sweep_spec;
    std::string sweep_report;
    auto* sweep_cmd = app.add_subcommand("sweep", "evaluate a quantity on a grid of points; CSV to the output");
    sweep_cmd->add_option("quantity", sweep_spec.quantity, "K | rho-norm | signature | scalar")
        ->required()
        ->check(CLI::IsMember({"K", "rho-norm", "signature", "scalar"}));
    add_common(sweep_cmd, sf);
    sweep_cmd->add_option("--x", sweep_spec.x, "x axis lo:hi:n or value");
    sweep_cmd->add_option("--y", sweep_spec.y, "y axis");
    sweep_cmd->add_option("--s", sweep_spec.s, "s axis");
    sweep_cmd->add_option("--t", sweep_spec.t, "t axis");
    sweep_cmd->add_option("--report", sweep_report, "also write a JSON summary");

    CommutantSpec comm_spec;
    auto* comm_cmd = app.add_subcommand("commutant", "symmetric maps commuting with the diagonal group action");
    add_common(comm_cmd, mf);
    comm_cmd->add_option("--m", comm_spec.m, "dimension m")->required();
    comm_cmd->add_option("--group", comm_spec.group, "so | o");
    comm_cmd->add_option("--generators", comm_spec.generators, "number of random generators");

    GeodesicSpec geo_spec;
    std::string geo_csv;
    auto* geo_cmd = app.add_subcommand("geodesic", "integrate a geodesic; CSV trajectory");
    add_common(geo_cmd, gf);
    geo_cmd->add_option("--x0", geo_spec.x0, "start point x,y,s,t");
    geo_cmd->add_option("--v0", geo_spec.v0, "start velocity");
    geo_cmd->add_option("--tau", geo_spec.tau, "parameter length");
    geo_cmd->add_option("--csv", geo_csv, "trajectory output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Report report;
        std::string report_path;
        bool print_report = true;
        if (*verify_cmd) {
            const RunConfig cfg = build_config(verify_cmd, vf);
            report = timed(cfg, [&] { return verify(subject, cfg); });
            report_path = cfg.output;
        } else if (*comp_cmd) {
            const RunConfig cfg = build_config(comp_cmd, cf);
            std::vector<LengthRow> profile;
            report = timed(cfg, [&] {
                auto out = completeness(cfg, rows);
                profile = std::move(out.rows);
                return out.report;
            });
            report_path = cfg.output;
            if (!csv_path.empty()) {
                std::string text = "r,sqrt_h,cumulative\n";
                char buf[128];
                for (const auto& r : profile) {
                    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.r, r.sqrt_h, r.cumulative);
                    text += buf;
                }
                write_text(csv_path, text);
            }
        } else if (*sweep_cmd) {
            const RunConfig cfg = build_config(sweep_cmd, sf);
            std::string csv;
            report = timed(cfg, [&] {
                auto out = sweep(sweep_spec, cfg);
                csv = std::move(out.csv);
                return out.report;
            });
            write_text(cfg.output, csv);
            print_report = !sweep_report.empty();
            report_path = sweep_report;
        } else if (*comm_cmd) {
            const RunConfig cfg = build_config(comm_cmd, mf);
            report = timed(cfg, [&] { return commutant(comm_spec, cfg); });
            report_path = cfg.output;
        } else if (*geo_cmd) {
            const RunConfig cfg = build_config(geo_cmd, gf);
            std::string csv;
            report = timed(cfg, [&] {
                auto out = geodesic(geo_spec, cfg);
                csv = std::move(out.csv);
                return out.report;
            });
            report_path = cfg.output;
            if (!geo_csv.empty()) write_text(geo_csv, csv);
        }
        if (print_report) write_text(report_path, report.dump());
        if (!report.pass()) {
            print_failures(report);
            return 1;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace ciconia::cli
