#include "cli.hpp"

#include "ciconia/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace ciconia::cli {

const std::map<std::string, double>& default_tolerances()
{
    static const std::map<std::string, double> t{
        {"closedness", 1e-9},  {"rho", 1e-8},        {"route", 1e-9},      {"einstein", 1e-9},
        {"psi", 1e-10},        {"ricci4d", 1e-6},    {"transition", 1e-9}, {"nabla", 1e-9},
        {"energy_drift", 1e-8}, {"commutation", 1e-10}, {"structure", 1e-10}, {"fit_residual", 0.05},
    };
    return t;
}

double RunConfig::tolerance(const std::string& name) const
{
    if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
    return default_tolerances().at(name);
}

json RunConfig::echo() const
{
    json j;
    if (!chart.is_null()) j["chart"] = chart;
    if (case_id) {
        j["case"] = *case_id;
        j["parameters"] = parameters;
    }
    if (weights) j["weights"] = {{"f", (*weights)[0]}, {"a", (*weights)[1]}, {"h", (*weights)[2]}};
    if (family) j["family"] = {{"kind", family->kind}, {"a", family->a}, {"f", family->f}, {"c0", family->c0}};
    j["samples"] = samples;
    j["seed"] = seed;
    j["tolerances"] = tolerances;
    if (fibre) j["fibre"] = {fibre->r2_lo, fibre->r2_hi};
    if (margin) j["margin"] = *margin;
    j["S"] = S;
    return j;
}

namespace {

// Field-level validation failure; the caller adds the location.
struct FieldError {
    std::string pointer;
    std::string message;
};

std::string number_text(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string scalar_text(const json& v, const std::string& ptr)
{
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return number_text(v.get<double>());
    throw FieldError{ptr, "expected a string or a number"};
}

double number(const json& v, const std::string& ptr)
{
    if (!v.is_number()) throw FieldError{ptr, "expected a number"};
    return v.get<double>();
}

void check_keys(const json& obj, const std::string& ptr, const std::set<std::string>& allowed)
{
    if (!obj.is_object()) throw FieldError{ptr, "expected an object"};
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) throw FieldError{ptr + "/" + k, "unknown field"};
}

void check_expression(const std::string& src, const std::string& ptr)
{
    try {
        (void)Expression::parse(src);
    } catch (const Error& e) {
        throw FieldError{ptr, e.what()};
    }
}

RunConfig parse_fields(const json& doc)
{
    check_keys(doc, "",
               {"chart", "case", "parameters", "weights", "family", "samples", "seed", "tolerances", "fibre", "margin", "S",
                "output", "jobs", "timing"});
    RunConfig c;
    if (doc.contains("chart")) {
        const json& ch = doc["chart"];
        if (ch.is_string()) {
            c.chart = ch;
        } else {
            check_keys(ch, "/chart", {"lambda", "domain", "name"});
            if (!ch.contains("lambda") || !ch["lambda"].is_string()) throw FieldError{"/chart/lambda", "expected an expression string"};
            check_expression(ch["lambda"].get<std::string>(), "/chart/lambda");
            if (ch.contains("domain") && !ch["domain"].is_string()) throw FieldError{"/chart/domain", "expected a string"};
            c.chart = ch;
        }
    }
    if (doc.contains("case")) {
        if (!doc["case"].is_string()) throw FieldError{"/case", "expected a case id"};
        c.case_id = doc["case"].get<std::string>();
    }
    if (doc.contains("parameters")) {
        const json& p = doc["parameters"];
        if (!p.is_object()) throw FieldError{"/parameters", "expected an object"};
        for (const auto& [k, v] : p.items()) {
            c.parameters[k] = scalar_text(v, "/parameters/" + k);
            check_expression(c.parameters[k], "/parameters/" + k);
        }
    }
    if (doc.contains("weights")) {
        const json& w = doc["weights"];
        check_keys(w, "/weights", {"f", "a", "h"});
        std::array<std::string, 3> ws;
        const char* names[] = {"f", "a", "h"};
        for (int i = 0; i < 3; ++i) {
            const std::string ptr = std::string("/weights/") + names[i];
            if (!w.contains(names[i])) throw FieldError{ptr, "missing"};
            ws[i] = scalar_text(w[names[i]], ptr);
            check_expression(ws[i], ptr);
        }
        c.weights = ws;
    }
    if (doc.contains("family")) {
        const json& f = doc["family"];
        FamilySpec fs;
        if (f.is_string()) {
            fs.kind = f.get<std::string>();
        } else {
            check_keys(f, "/family", {"kind", "a", "f", "c0"});
            if (!f.contains("kind") || !f["kind"].is_string()) throw FieldError{"/family/kind", "expected a family name"};
            fs.kind = f["kind"].get<std::string>();
            if (f.contains("a")) fs.a = scalar_text(f["a"], "/family/a");
            if (f.contains("f")) fs.f = number(f["f"], "/family/f");
            if (f.contains("c0")) fs.c0 = number(f["c0"], "/family/c0");
        }
        try {
            (void)parse_family(fs.kind);
        } catch (const Error& e) {
            throw FieldError{"/family/kind", e.what()};
        }
        c.family = fs;
    }
    if (int(bool(c.case_id)) + int(bool(c.weights)) + int(bool(c.family)) > 1) {
        throw FieldError{"", "exactly one of weights, case, family may be given"};
    }
    if (!c.case_id && !c.parameters.empty()) throw FieldError{"/parameters", "parameters need a case"};
    if (doc.contains("samples")) {
        const json& s = doc["samples"];
        if (!s.is_number_integer() || s.get<long long>() <= 0) throw FieldError{"/samples", "expected a positive integer"};
        c.samples = s.get<std::size_t>();
    }
    if (doc.contains("seed")) {
        const json& s = doc["seed"];
        if (!s.is_number_unsigned()) throw FieldError{"/seed", "expected a non-negative integer"};
        c.seed = s.get<std::uint64_t>();
    }
    if (doc.contains("tolerances")) {
        const json& t = doc["tolerances"];
        if (!t.is_object()) throw FieldError{"/tolerances", "expected an object"};
        for (const auto& [k, v] : t.items()) {
            const std::string ptr = "/tolerances/" + k;
            if (!default_tolerances().count(k)) throw FieldError{ptr, "unknown tolerance"};
            const double x = number(v, ptr);
            if (!(x > 0.0)) throw FieldError{ptr, "must be positive"};
            c.tolerances[k] = x;
        }
    }
    if (doc.contains("fibre")) {
        const json& f = doc["fibre"];
        if (!f.is_array() || f.size() != 2) throw FieldError{"/fibre", "expected [r2_lo, r2_hi]"};
        const double lo = number(f[0], "/fibre/0"), hi = number(f[1], "/fibre/1");
        if (!(lo >= 0.0 && hi > lo)) throw FieldError{"/fibre", "need 0 <= r2_lo < r2_hi"};
        c.fibre = FibreRange{lo, hi};
    }
    if (doc.contains("margin")) {
        c.margin = number(doc["margin"], "/margin");
        if (!(*c.margin >= 0.0 && *c.margin < 0.5)) throw FieldError{"/margin", "expected 0 <= margin < 0.5"};
    }
    if (doc.contains("S")) c.S = number(doc["S"], "/S");
    if (doc.contains("output")) {
        const json& o = doc["output"];
        if (o.is_string()) {
            c.output = o.get<std::string>();
        } else {
            check_keys(o, "/output", {"path", "format"});
            if (o.contains("path")) c.output = scalar_text(o["path"], "/output/path");
            if (o.contains("format")) c.format = scalar_text(o["format"], "/output/format");
            if (c.format != "json") throw FieldError{"/output/format", "only json reports are supported"};
        }
    }
    if (doc.contains("jobs")) {
        if (!doc["jobs"].is_number_integer() || doc["jobs"].get<int>() < 0) throw FieldError{"/jobs", "expected a non-negative integer"};
        c.jobs = doc["jobs"].get<int>();
    }
    if (doc.contains("timing")) {
        if (!doc["timing"].is_boolean()) throw FieldError{"/timing", "expected true or false"};
        c.timing = doc["timing"].get<bool>();
    }
    return c;
}

// Line of the innermost key of a JSON pointer, found by scanning the text.
std::size_t locate(const std::string& text, const std::string& pointer)
{
    std::size_t pos = 0;
    std::stringstream ss(pointer);
    std::string token;
    while (std::getline(ss, token, '/')) {
        if (token.empty()) continue;
        const auto at = text.find('"' + token + '"', pos);
        if (at == std::string::npos) break;
        pos = at;
    }
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

} // namespace

RunConfig config_from_json(const json& doc, const std::string& where)
{
    try {
        return parse_fields(doc);
    } catch (const FieldError& e) {
        throw ConfigError(where + ": field '" + (e.pointer.empty() ? "/" : e.pointer) + "': " + e.message);
    }
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw ConfigError(path + ":" + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
    }
    try {
        return parse_fields(doc);
    } catch (const FieldError& e) {
        throw ConfigError(path + ":" + std::to_string(locate(text, e.pointer)) + ": field '" +
                          (e.pointer.empty() ? "/" : e.pointer) + "': " + e.message);
    }
}

std::optional<std::uint64_t> env_seed()
{
    const char* s = std::getenv("CICONIA_SEED");
    if (!s || !*s) return std::nullopt;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (*end != '\0' || s[0] == '-') throw ConfigError("CICONIA_SEED must be a non-negative integer, got '" + std::string(s) + "'");
    return v;
}

cplx parse_constant(const std::string& src, const std::string& what)
{
    try {
        const Expression e = Expression::parse(src);
        if (e.classify() != DependenceClass::constant) throw ConfigError(what + " must be a constant, got '" + src + "'");
        return e.eval(Bindings<cplx>{});
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

std::vector<double> parse_axis(const std::string& spec, const std::string& what)
{
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    auto num = [&](const std::string& s) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || *end != '\0' || !std::isfinite(v)) throw ConfigError(what + ": '" + s + "' is not a number");
        return v;
    };
    if (parts.size() == 1) return {num(parts[0])};
    if (parts.size() != 3) throw ConfigError(what + ": expected lo:hi:n or a single value, got '" + spec + "'");
    const double lo = num(parts[0]), hi = num(parts[1]);
    const double nd = num(parts[2]);
    if (nd < 1 || nd != std::floor(nd) || nd > 1e6) throw ConfigError(what + ": bad count '" + parts[2] + "'");
    const auto n = static_cast<int>(nd);
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return v;
}

std::array<double, 4> parse_vec4(const std::string& spec, const std::string& what)
{
    std::array<double, 4> v{};
    std::stringstream ss(spec);
    std::string tok;
    int k = 0;
    while (std::getline(ss, tok, ',')) {
        if (k == 4) throw ConfigError(what + ": expected four comma-separated numbers");
        char* end = nullptr;
        v[k] = std::strtod(tok.c_str(), &end);
        if (tok.empty() || *end != '\0') throw ConfigError(what + ": '" + tok + "' is not a number");
        ++k;
    }
    if (k != 4) throw ConfigError(what + ": expected four comma-separated numbers");
    return v;
}

namespace {

Domain parse_domain(const std::string& spec)
{
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.empty()) throw ConfigError("empty domain");
    std::vector<double> args;
    for (std::size_t i = 1; i < parts.size(); ++i) args.push_back(parse_axis(parts[i], "domain " + spec)[0]);
    const std::string& k = parts[0];
    auto arg = [&](std::size_t i, double d) { return i < args.size() ? args[i] : d; };
    if (k == "plane") return Domain::plane(arg(0, 2.0));
    if (k == "disk" && args.size() == 1) return Domain::disk(args[0]);
    if (k == "annulus" && args.size() == 2) return Domain::annulus(args[0], args[1]);
    if (k == "half-plane") return Domain::half_plane(arg(0, 2.0), arg(1, 0.25));
    if (k == "torus") return Domain::torus();
    throw ConfigError("bad domain '" + spec + "' (plane[:r], disk:r, annulus:a:b, half-plane[:w[:h]], torus)");
}

} // namespace

ConformalChart resolve_chart(const RunConfig& cfg, const std::string& fallback)
{
    if (cfg.chart.is_null()) return ConformalChart::model(fallback);
    if (cfg.chart.is_string()) return ConformalChart::model(cfg.chart.get<std::string>());
    ConformalChart c;
    c.name = cfg.chart.value("name", std::string("custom"));
    c.lambda = Expression::parse(cfg.chart["lambda"].get<std::string>());
    c.domain = parse_domain(cfg.chart.value("domain", std::string("plane")));
    return c;
}

namespace {

std::string family_chart(FamilyKind k)
{
    switch (k) {
    case FamilyKind::cy_ii:
    case FamilyKind::cy_iii: return "sphere";
    case FamilyKind::cy_iv: return "hyperbolic";
    default: return "flat";
    }
}

} // namespace

Subject resolve_subject(const RunConfig& cfg, bool need_weights)
{
    try {
        Subject s;
        if (cfg.family) {
            const FamilyKind kind = parse_family(cfg.family->kind);
            s.chart = resolve_chart(cfg, family_chart(kind));
            FamilyParams p;
            p.a = parse_constant(cfg.family->a, "family parameter a");
            p.f = cfg.family->f;
            p.c0 = cfg.family->c0;
            s.family = make_family(kind, p, s.chart);
            s.weights = s.family->weights;
            s.fibre = cfg.fibre ? *cfg.fibre : s.family->interior();
            s.has_weights = true;
        } else if (cfg.case_id) {
            s.kcase = &kahler_case(*cfg.case_id);
            s.chart = resolve_chart(cfg, s.kcase->chart);
            std::map<std::string, cplx> params;
            for (const auto& [k, v] : cfg.parameters) params[k] = parse_constant(v, "parameter " + k);
            const CaseInstance inst = instantiate_case(*s.kcase, s.chart, params);
            s.weights = inst.weights;
            s.fibre = cfg.fibre ? *cfg.fibre : inst.fibre;
            s.has_weights = true;
        } else {
            s.chart = resolve_chart(cfg, "flat");
            s.fibre = cfg.fibre ? *cfg.fibre : FibreRange{};
            if (cfg.weights) {
                s.weights = WeightTriple::parse((*cfg.weights)[0], (*cfg.weights)[1], (*cfg.weights)[2]);
                s.has_weights = true;
            } else if (need_weights) {
                throw ConfigError("no metric: give weights (--f --a --h), a case (--case) or a family (--family)");
            }
        }
        s.margin = cfg.margin.value_or(s.family ? 0.1 : 0.05);
        return s;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

json Check::to_json() const
{
    json j;
    j["name"] = name;
    j["max_residual"] = max_residual;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    j["samples"] = samples;
    if (errors) j["errors"] = errors;
    if (worst) j["worst_point"] = {{"x", worst->z.real()}, {"y", worst->z.imag()}, {"s", worst->w.real()}, {"t", worst->w.imag()}};
    if (!note.empty()) j["note"] = note;
    return j;
}

bool Report::pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

json Report::to_json() const
{
    json j;
    j["schema"] = 1;
    j["command"] = command;
    j["config"] = config;
    json cs = json::array();
    for (const auto& c : checks) cs.push_back(c.to_json());
    j["checks"] = cs;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    j["pass"] = pass();
    if (seconds) j["timing"] = {{"seconds", *seconds}};
    return j;
}

std::string Report::dump() const
{
    return to_json().dump(2) + "\n";
}

std::vector<Check> aggregate(const std::vector<std::string>& names, const std::vector<double>& tolerances,
                             const std::vector<Point4>& points, const std::vector<SampleValues>& results)
{
    std::vector<Check> out;
    for (std::size_t k = 0; k < names.size(); ++k) {
        Check c;
        c.name = names[k];
        c.tolerance = tolerances[k];
        c.samples = results.size();
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (!results[i].error.empty()) {
                if (c.errors++ == 0) c.note = "first error at sample " + std::to_string(i) + ": " + results[i].error;
                continue;
            }
            const double v = results[i].values[k];
            if (!c.worst || v > c.max_residual || std::isnan(v)) {
                if (c.worst && std::isnan(c.max_residual)) continue;
                c.max_residual = v;
                c.worst = points[i];
            }
        }
        c.pass = c.errors == 0 && !std::isnan(c.max_residual) && c.max_residual < c.tolerance;
        out.push_back(c);
    }
    return out;
}

} // namespace ciconia::cli
