#pragma once

// Levi-Civita geometry of the assembled 4x4 metric in (x, y, s, t), with no
// knowledge of the weight structure: Christoffel symbols, curvature, geodesics,
// and radial length integrals.

#include "ciconia/einstein.hpp"
#include "ciconia/metric.hpp"

#include <iosfwd>
#include <optional>

namespace ciconia {

template <class T>
using Array3 = std::array<std::array<std::array<T, 4>, 4>, 4>;
template <class T>
using Array4 = std::array<Array3<T>, 4>;

/// Index convention:
///   christoffel[a][b][c] = Gamma^a_{bc}
///   riemann[a][b][c][d]  = R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
///                          + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
///   ricci[b][d]          = R^a_{bad}
struct CurvatureAtPoint {
    Eigen::Matrix4d G;
    Array3<double> christoffel{};
    Array4<double> riemann{};
    Eigen::Matrix4d ricci = Eigen::Matrix4d::Zero();
    double scalar = 0.0;

    double max_riemann() const;
    double max_ricci() const { return ricci.cwiseAbs().maxCoeff(); }
    /// R_{abcd} = g_{ae} R^e_{bcd}.
    double lowered(int a, int b, int c, int d) const;
};

/// Throws DegenerateMetric when |det G| < degenerate_tol.
CurvatureAtPoint curvature(const ConformalChart& chart, const WeightTriple& weights, const Point4& p,
                           double degenerate_tol = 1e-10);

struct CurvatureIdentities {
    double bianchi = 0.0;      // max |R_{abcd} + R_{acdb} + R_{adbc}|
    double antisymmetry = 0.0; // max |R_{abcd} + R_{bacd}|, |R_{abcd} + R_{abdc}|
    double pair_symmetry = 0.0; // max |R_{abcd} - R_{cdab}|
    double ricci_symmetry = 0.0;
};

CurvatureIdentities identities(const CurvatureAtPoint& c);

/// Ric(J., .) as a real antisymmetric matrix, to compare with the Ricci form.
Eigen::Matrix4d ricci_two_form(const CurvatureAtPoint& c);

/// Christoffel symbols only (first derivatives of G).
Array3<double> christoffel(const ConformalChart& chart, const WeightTriple& weights, const Point4& p);

struct GeodesicState {
    std::array<double, 4> position{}; // (x, y, s, t)
    std::array<double, 4> velocity{};
    double energy = 0.0; // g(v, v)
};

enum class ExitReason { completed, domain_exit, singularity_approach };
const char* to_string(ExitReason r);

struct GeodesicOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-13;
    double initial_step = 1e-2;
    double min_step = 1e-12;
    int max_steps = 50000;
    /// Optional admissible r^2 interval (exclusive); leaving it ends the integration.
    std::optional<FibreRange> fibre;
    /// Relative r^2 distance to a finite fibre endpoint counted as having reached it.
    double boundary_guard = 1e-5;
};

struct Trajectory {
    std::vector<double> tau;
    std::vector<GeodesicState> states;
    ExitReason exit = ExitReason::completed;
    double max_energy_drift = 0.0; // max |E(tau) - E(0)|
    double drift_per_unit() const;
    void write_csv(std::ostream& out) const;
};

GeodesicState make_state(const ConformalChart& chart, const WeightTriple& weights, const std::array<double, 4>& x,
                         const std::array<double, 4>& v);

/// Adaptive Dormand-Prince 5(4) integration of the geodesic equation on [0, tau_end].
Trajectory geodesic(const ConformalChart& chart, const WeightTriple& weights, const GeodesicState& init,
                    double tau_end, const GeodesicOptions& opt = {});

struct EndpointFit {
    double r = 0.0; // endpoint in r (infinity allowed)
    bool at_infinity = false;
    double alpha = 0.0; // sqrt(h) ~ C d^alpha, d = distance to the endpoint (or r at infinity)
    double fit_residual = 0.0; // RMS residual of log sqrt(h), i.e. a relative error
    bool divergent = false;    // finite endpoint: alpha <= -1; infinity: alpha >= -1
};

struct FibreLength {
    double value = 0.0; // +inf when an endpoint is at infinite distance
    double error = 0.0;
    EndpointFit lo, hi;
    bool divergent() const { return lo.divergent || hi.divergent; }
};

struct FibreLengthOptions {
    /// Fit window: distance to the endpoint in [window_start, 100 window_start] times the
    /// endpoint scale; towards infinity r in [1/(100 window_start), 1/window_start].
    double window_start = 1e-7;
    int nodes = 32;
    double max_fit_residual = 0.05;
};

/// sqrt(h) at radius r over the point z; h evaluated with w = r / sqrt(lambda(z)).
double sqrt_h(const ConformalChart& chart, const Weight& h, cplx z, double r);

/// Length of the radial fibre segment r in [r_a, r_b] over z, with power-law
/// fits of the integrand at both ends. Throws ExponentFitUnstable.
FibreLength fibre_length(const ConformalChart& chart, const WeightTriple& weights, cplx z, double r_a, double r_b,
                         const FibreLengthOptions& opt = {});

enum class Completeness { complete, complete_with_boundary_added, complete_away_from_zero_section };
const char* to_string(Completeness c);

struct CompletenessReport {
    FamilyKind kind = FamilyKind::general;
    EndpointFit inner, outer;
    bool inner_infinite = false;
    bool outer_infinite = false;
    Completeness verdict = Completeness::complete;
    double interior_length = 0.0; // length across the sampling interior
};

CompletenessReport completeness_report(const SolutionFamily& family, const ConformalChart& chart,
                                       const FibreLengthOptions& opt = {});

struct LengthRow {
    double r = 0.0;
    double sqrt_h = 0.0;
    double cumulative = 0.0;
};

/// Integrand and running length on the family's interior, for plotting.
std::vector<LengthRow> length_profile(const SolutionFamily& family, const ConformalChart& chart, int rows = 200);

} // namespace ciconia
