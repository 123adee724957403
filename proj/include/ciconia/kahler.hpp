#pragma once

#include "ciconia/metric.hpp"
#include "ciconia/sampling.hpp"

#include <map>
#include <string>
#include <vector>

namespace ciconia {

/// The two component equations of d omega = 0:
///   res1 = dh/dz - da/dw - w Gamma dh/dw
///   res2 = df/dw + w Gamma d(abar)/dw - d(abar)/dz - wbar h dGamma/dzbar
struct ClosednessResidual {
    cplx res1;
    cplx res2;

    double max() const { return std::max(std::abs(res1), std::abs(res2)); }
};

ClosednessResidual closedness_residual(const ConformalChart& chart, const WeightTriple& weights, const Point4& p);

/// How a case ties the base curvature to its weights.
enum class CurvatureRule {
    zero,       // K = 0
    linear_f,   // f = f1 r^2 + f0 and K = -2 f1 / h
    radial_f,   // K = -2 f'/h with f obtained by quadrature from h
    free,       // no condition (h = 0 pseudo-Kaehler cases)
};

/// One solution case of the closedness system, stored as data. Weight templates
/// refer to parameters as {name}. An empty f template means f is integrated
/// from h:  f(r^2) = f0 - ((K + dk)/2) int_0^{r^2} h.
struct KahlerCase {
    std::string id;
    std::string statement;
    bool pseudo = false;
    std::string chart;
    DependenceClass f_class = DependenceClass::base_only;
    DependenceClass a_class = DependenceClass::base_only;
    DependenceClass h_class = DependenceClass::base_only;
    bool a_holomorphic = false;
    bool a_constant = false;
    bool f_constant = false;
    bool f_linear = false;
    bool h_constant = false;
    bool h_zero = false;
    CurvatureRule curvature = CurvatureRule::zero;
    std::map<std::string, cplx> parameters;
    std::string f, a, h;
    FibreRange fibre;
    std::string defect; // parameter whose shift leaves the solution set
};

/// Cases i..viii (Kaehler), ix, x (pseudo-Kaehler with h = 0) and flat-example.
const std::vector<KahlerCase>& kahler_cases();

/// Throws ConfigError for an unknown id.
const KahlerCase& kahler_case(std::string_view id);

/// Substitutes parameters (defaults overridden by `params`); no gates. Throws
/// ConfigError on unknown parameter names.
WeightTriple build_weights(const KahlerCase& c, const ConformalChart& chart, const std::map<std::string, cplx>& params = {});

struct CaseInstance {
    WeightTriple weights;
    FibreRange fibre;
    double K = 0.0;
};

/// Gated construction: the chart must have constant curvature satisfying the
/// case's rule (CurvatureMismatch), and the sampled weights must satisfy
/// f > 0, Delta > 0 (Kaehler) or Delta < 0 (pseudo) (PositivityViolation).
/// For f = f1 r^2 + f0 with f1 < 0 the fibre range is cut below -f0/f1.
CaseInstance instantiate_case(const KahlerCase& c, const ConformalChart& chart, const std::map<std::string, cplx>& params = {});

struct ConstraintCheck {
    std::string name;
    bool ok = false;
    double value = 0.0; // worst sampled deviation, 0 for class checks
};

/// Checks the case's structural constraints on arbitrary weights at the given points.
std::vector<ConstraintCheck> check_constraints(const KahlerCase& c, const WeightTriple& weights, const ConformalChart& chart,
                                               const std::vector<Point4>& points);

bool all_ok(const std::vector<ConstraintCheck>& checks);

/// Value, first and second r^2-derivative of a radial (or constant) weight.
std::array<double, 3> radial_derivatives(const Weight& wt, double r2);

/// f = 1 + |a|^2, a, h = 1 on the flat chart. Throws NotHolomorphic unless a
/// depends on z only with |da/dzbar| < 1e-10 at sampled points.
WeightTriple flat_example(const Expression& a);

} // namespace ciconia
