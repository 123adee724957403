#pragma once

// Command-line surface: run configuration, reports, and the subcommands.

#include "ciconia/einstein.hpp"
#include "ciconia/geometry4d.hpp"
#include "ciconia/kahler.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace ciconia::cli {

using json = nlohmann::json;

struct FamilySpec {
    std::string kind;
    std::string a = "1";
    double f = 1.0;
    double c0 = 0.0;
};

/// Everything that determines a run. Exactly one of weights / case / family
/// selects the metric; the seed fixes every sample point.
struct RunConfig {
    json chart;                        // model name, or {"lambda": expr, "domain": spec}
    std::optional<std::string> case_id;
    std::map<std::string, std::string> parameters; // case parameters, as constant expressions
    std::optional<std::array<std::string, 3>> weights; // f, a, h
    std::optional<FamilySpec> family;
    std::size_t samples = 200;
    std::uint64_t seed = 1;
    std::map<std::string, double> tolerances;
    std::optional<FibreRange> fibre;
    std::optional<double> margin; // base sampling margin; 0.1 for families, else 0.05
    double S = 0.0;
    std::string output; // empty: stdout
    std::string format = "json";
    int jobs = 0;       // 0: hardware concurrency
    bool timing = false;

    bool has_metric() const { return case_id || weights || family; }
    double tolerance(const std::string& name) const;

    /// Fields that determine the result (jobs, output path and timing excluded).
    json echo() const;
};

/// Default tolerances by name; every check reads its bound from here unless overridden.
const std::map<std::string, double>& default_tolerances();

/// Validates a parsed config document. `where` names the source for messages.
RunConfig config_from_json(const json& doc, const std::string& where = "config");

/// Reads a JSON config file; parse and field errors carry line numbers.
RunConfig load_config(const std::string& path);

/// Seed from CICONIA_SEED, if set.
std::optional<std::uint64_t> env_seed();

struct Check {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    std::size_t samples = 0;
    std::size_t errors = 0; // samples where evaluation threw
    std::optional<Point4> worst;
    std::string note;

    json to_json() const;
};

struct Report {
    std::string command;
    json config;
    std::vector<Check> checks;
    json extra = json::object(); // command-specific fields
    std::optional<double> seconds;

    bool pass() const;
    json to_json() const;
    /// Pretty-printed JSON followed by a newline.
    std::string dump() const;
};

/// Resolved metric data for a run.
struct Subject {
    ConformalChart chart;
    WeightTriple weights;
    FibreRange fibre;
    const KahlerCase* kcase = nullptr;
    std::optional<SolutionFamily> family;
    bool has_weights = false;
    double margin = 0.05;
};

ConformalChart resolve_chart(const RunConfig& cfg, const std::string& fallback);

/// Throws ConfigError when `need_weights` and no metric is configured.
Subject resolve_subject(const RunConfig& cfg, bool need_weights);

/// Parses "lo:hi:n" or a single value.
std::vector<double> parse_axis(const std::string& spec, const std::string& what);

/// Parses "x,y,s,t".
std::array<double, 4> parse_vec4(const std::string& spec, const std::string& what);

cplx parse_constant(const std::string& src, const std::string& what);

/// Evaluates f(0..n-1) on a worker pool; results are returned in index order.
template <class F>
auto parallel_map(std::size_t n, int jobs, F&& f) -> std::vector<decltype(f(std::size_t{}))>
{
    using T = decltype(f(std::size_t{}));
    std::vector<T> out(n);
    unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs) : std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) out[i] = f(i);
    };
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < workers; ++k) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return out;
}

/// Per-sample residuals for a fixed list of checks; `error` set when evaluation threw.
struct SampleValues {
    std::vector<double> values;
    std::string error;
};

/// Max over samples per check, with the worst point (first in index order on ties).
std::vector<Check> aggregate(const std::vector<std::string>& names, const std::vector<double>& tolerances,
                             const std::vector<Point4>& points, const std::vector<SampleValues>& results);

Report verify(const std::string& subject, const RunConfig& cfg);

struct CompletenessOutput {
    Report report;
    std::vector<LengthRow> rows;
};
CompletenessOutput completeness(const RunConfig& cfg, int rows);

struct SweepSpec {
    std::string quantity; // K, rho-norm, signature, scalar
    std::string x = "-1:1:5", y = "0", s = "0.5", t = "0";
};

struct SweepOutput {
    std::string csv;
    Report report; // summary; not the primary output
};
SweepOutput sweep(const SweepSpec& spec, const RunConfig& cfg);

struct CommutantSpec {
    int m = 2;
    std::string group = "so";
    std::size_t generators = 6;
    std::size_t fresh = 100;
};
Report commutant(const CommutantSpec& spec, const RunConfig& cfg);

struct GeodesicSpec {
    std::string x0 = "0.1,0.1,0.5,0";
    std::string v0 = "0.3,0.2,1,0.5";
    double tau = 1.0;
};
struct GeodesicOutput {
    Report report;
    std::string csv;
};
GeodesicOutput geodesic(const GeodesicSpec& spec, const RunConfig& cfg);

/// Entry point; returns the process exit code (0 pass, 1 residual failure, 2 config error).
int run(int argc, char** argv);

} // namespace ciconia::cli
