#pragma once

#include "ciconia/bundle.hpp"
#include "ciconia/expr.hpp"
#include "ciconia/surface.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace ciconia {

/// A function of r^2 given numerically, with its first two derivatives in r^2.
/// Used where a weight is defined by quadrature rather than a closed form.
struct RadialProfile {
    std::string label;
    std::function<std::array<double, 3>(double)> eval;
};

/// One weight function: either an expression or a radial profile.
class Weight {
public:
    Weight() = default;
    Weight(Expression e) : v_(std::move(e)) {}   // NOLINT(google-explicit-constructor)
    Weight(RadialProfile p) : v_(std::move(p)) {} // NOLINT(google-explicit-constructor)

    static Weight parse(std::string_view src) { return Weight(Expression::parse(src)); }
    static Weight constant(cplx c) { return Weight(Expression::constant(c)); }

    DependenceClass dependence() const;
    std::string describe() const;

    /// Value and derivatives at the point described by b (r2 taken from b).
    Jet2 eval(const BaseJets& b) const;

    /// Value at a given r^2; only for constant or radial weights.
    cplx at_r2(double r2) const;

    const Expression* expression() const { return std::get_if<Expression>(&v_); }
    const RadialProfile* profile() const { return std::get_if<RadialProfile>(&v_); }

private:
    std::variant<Expression, RadialProfile> v_;
};

struct WeightTriple {
    Weight f;
    Weight a;
    Weight h;

    static WeightTriple parse(std::string_view f, std::string_view a, std::string_view h);
    std::string describe() const;
};

/// Base data plus the three weights as jets at one point.
struct LocalJets {
    BaseJets base;
    Jet2 f, a, h;

    Jet2 delta() const { return f * h - a * conj(a); }
};

/// Throws RealityError if f or h has an imaginary part above 1e-9.
LocalJets local_jets(const ConformalChart& chart, const WeightTriple& weights, const Point4& p);

template <class T>
using Matrix4Of = std::array<std::array<T, 4>, 4>;

/// The metric (lambda/2)(f dz.dzbar + a dz.etabar + abar eta.dzbar + h eta.etabar)
/// in the real coordinates (x, y, s, t), as jets.
Matrix4Of<Jet2> metric_jets(const LocalJets& l);

/// H on the holomorphic frame (d/dz, d/dw), as jets.
std::array<std::array<Jet2, 2>, 2> hermitian_jets(const LocalJets& l);

enum class Signature { riemannian, negative_definite, split, degenerate, other };
const char* to_string(Signature s);

struct MetricAtPoint {
    Point4 at;
    double lambda = 0.0;
    cplx gamma;
    double f = 0.0;
    cplx a;
    double h = 0.0;
    double delta = 0.0;

    Eigen::Matrix4d G;  // (x, y, s, t)
    Eigen::Matrix2cd H; // (d/dz, d/dw)
    Eigen::Matrix4cd omega; // omega = sum omega(mu, nu) e^mu (x) e^nu on (dz, dzbar, dw, dwbar)
    Signature signature = Signature::degenerate;
};

MetricAtPoint assemble(const ConformalChart& chart, const WeightTriple& weights, const Point4& p);

/// Signature from the (f, Delta) criteria; degenerate below the threshold.
Signature classify_signature(double f, double delta, double threshold = 1e-12);

/// Signature read off the eigenvalue signs of a symmetric matrix.
Signature eigen_signature(const Eigen::Matrix4d& G, double rel_tol = 1e-12);

Signature signature(const WeightTriple& weights, const ConformalChart& chart, const Point4& p);

/// The metric on an adapted orthonormal frame (a = b + ic):
///   [[f, 0, b, c], [0, f, -c, b], [b, -c, h, 0], [c, b, 0, h]].
Eigen::Matrix4d frame_matrix(double f, cplx a, double h);

/// Complex structure on (x, y, s, t): J d/dx = d/dy, J d/ds = d/dt.
Eigen::Matrix4d complex_structure();

/// omega as a real antisymmetric matrix, Omega(u, v) = u^T Omega v.
Eigen::Matrix4d omega_real(const Eigen::Matrix4cd& omega);

/// max of |Omega - J^T G| and |J^T G J - G|.
double compatibility_residual(const MetricAtPoint& m);

/// H recomputed from G: H_jk = 2 G(v_j, conj v_k) with v = d/dz, d/dw.
Eigen::Matrix2cd hermitian_from_metric(const Eigen::Matrix4d& G);

/// |det H - lambda^2 Delta| / |lambda^2 Delta|.
double det_h_residual(const MetricAtPoint& m);

struct IsometryLiftReport {
    double base_isometry = 0.0; // relative | |phi'|^2 lambda(phi) - lambda |
    double a_invariance = 0.0;  // |a(phi(z)) - a(z)|
    double pullback = 0.0;      // max |Phi^* G - G| / max(1, |G|)
    std::size_t samples = 0;
};

/// Lifts a holomorphic base map phi to Phi(z, w) = (phi(z), phi'(z) w) and compares
/// Phi^* g_{f,a,h} with g_{f,a,h}. Throws NotAnIsometry if phi does not preserve lambda.
IsometryLiftReport isometry_lift_check(const ConformalChart& chart, const WeightTriple& weights, const Expression& phi,
                                       const std::vector<Point4>& samples, double base_tol = 1e-9);

} // namespace ciconia
