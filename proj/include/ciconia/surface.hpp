#pragma once

#include "ciconia/expr.hpp"
#include "ciconia/jets.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ciconia {

/// Coordinate domain of a chart, together with the box used for sampling.
///
///   full_plane : all of C; samples lie in the disk |z| <= a
///   disk       : |z| < a
///   annulus    : a < |z| < b
///   half_plane : Im z > 0; samples lie in |Re z| <= a, b <= Im z <= 2
///   torus      : fundamental square [0, 1)^2 of the lattice Z + iZ
struct Domain {
    enum class Kind { full_plane, disk, annulus, half_plane, torus };

    Kind kind = Kind::full_plane;
    double a = 2.0;
    double b = 0.0;

    static Domain plane(double sample_radius = 2.0) { return {Kind::full_plane, sample_radius, 0.0}; }
    static Domain disk(double radius) { return {Kind::disk, radius, 0.0}; }
    static Domain annulus(double inner, double outer) { return {Kind::annulus, inner, outer}; }
    static Domain half_plane(double half_width = 2.0, double min_height = 0.25) { return {Kind::half_plane, half_width, min_height}; }
    static Domain torus() { return {Kind::torus, 1.0, 0.0}; }

    bool contains(cplx z) const;

    /// Maps (u, v) in [0,1)^2 into the sampling region, keeping `margin` away from the boundary.
    cplx sample(double u, double v, double margin) const;

    std::string describe() const;
};

/// A local isothermal chart g = lambda dz dzbar of the base surface.
struct ConformalChart {
    std::string name;
    Expression lambda;
    Domain domain;

    static ConformalChart flat();
    static ConformalChart flat_torus();
    static ConformalChart sphere();
    static ConformalChart hyperbolic();
    static ConformalChart hyperbolic_half_plane();

    /// Built-in model by name: flat, torus, sphere, hyperbolic, half-plane.
    static ConformalChart model(std::string_view name);
    static std::vector<std::string> model_names();
};

/// Coordinate jets at a point together with the base data. lambda is
/// evaluated to third order internally so that gamma is an exact Jet2.
struct BaseJets {
    Point4 point;
    std::array<Jet2, 4> coords;
    Jet2 z, zbar, w, wbar;
    Jet2 lambda;
    Jet2 gamma;
    Jet2 r2;

    Bindings<Jet2> bindings() const { return {z, zbar, w, wbar, r2}; }
};

/// z, zbar, w, wbar at p as third-order jets (r2 left unset).
Bindings<Jet3> bindings3(const Point4& p);

/// Throws DomainError outside the chart domain and RealityError/DomainError
/// if lambda is not a positive real number at p.
BaseJets base_jets(const ConformalChart& chart, const Point4& p);

/// lambda alone as a Jet2 (cheaper than base_jets).
Jet2 lambda_jet(const ConformalChart& chart, const Point4& p);

double lambda_value(const ConformalChart& chart, cplx z);

/// Evaluates an expression at p, with r2 expanded to lambda(z) |w|^2.
Jet2 eval_on_chart(const Expression& e, const Point4& p, const ConformalChart& chart);

/// Gamma = (1/lambda) d lambda / dz.
cplx gamma(const ConformalChart& chart, cplx z);

/// K = -(2/lambda) d^2 log(lambda) / dz dzbar.
double gauss_curvature(const ConformalChart& chart, cplx z);
double gauss_curvature(const Jet2& lambda);

struct CurvatureSummary {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t samples = 0;
};

/// Samples K over the chart; a constant-curvature model has stddev ~ 0.
CurvatureSummary curvature_summary(const ConformalChart& chart, std::size_t samples, std::uint64_t seed);

/// Holomorphic change of base coordinate z1 = forward(z), z = inverse(z1).
/// Both expressions use the identifier z for their argument.
struct ChartTransition {
    Expression forward;
    Expression inverse;

    static ChartTransition sphere_inversion();
    static ChartTransition cayley();
    static ChartTransition identity();
};

struct TransitionReport {
    double roundtrip = 0.0; ///< |inverse(forward(z)) - z|
    double lambda_law = 0.0; ///< relative |lambda1 - |dz/dz1|^2 lambda|
    double gamma_law = 0.0; ///< |Gamma1 - (dz/dz1) Gamma - (dz1/dz) d2z/dz1^2|
    double w_law = 0.0; ///< |w1 - (dz1/dz) w| with w1 from the inverse map, plus r2 invariance
    double eta_law = 0.0; ///< |eta1 - (dz1/dz) eta| on every coordinate direction
    std::size_t samples = 0;

    double max() const;
};

/// Compares the transition laws of the base and fibre data at each sample (z, w).
TransitionReport verify_transition(const ChartTransition& t, const ConformalChart& from, const ConformalChart& to,
                                   const std::vector<Point4>& samples);

} // namespace ciconia
