#pragma once

#include "ciconia/metric.hpp"
#include "ciconia/sampling.hpp"

#include <limits>
#include <string>

namespace ciconia {

/// rho = i sum P_jk e^j ^ conj(e^k) with e = (dz, dw).
using FormMatrix = Eigen::Matrix2cd;

enum class RicciRoute { det_h, split };

/// det_h:  P = -d_j dbar_k log det H.
/// split:  P = lambda K [z zbar] - d_j dbar_k log Delta.
/// Throws NonPositiveDelta when Delta <= 0.
FormMatrix ricci_form(const ConformalChart& chart, const WeightTriple& weights, const Point4& p, RicciRoute route);

/// (1,1)-form coefficients as a component table on (dz, dzbar, dw, dwbar), the
/// layout used by omega_real.
Eigen::Matrix4cd form_components(const FormMatrix& P);

struct EinsteinResiduals {
    cplx e1; // d2 log Delta / dw dwbar + lambda S h / 8
    cplx e2; // d2 log Delta / dz dwbar + (lambda S / 8)(a + h w Gamma)
    cplx e3; // lambda K - d2 log Delta / dz dzbar - (lambda S / 8)(f + abar w Gamma + a wbar Gammabar + h |w Gamma|^2)

    double max() const { return std::max({std::abs(e1), std::abs(e2), std::abs(e3)}); }
};

EinsteinResiduals einstein_residuals(const ConformalChart& chart, const WeightTriple& weights, const Point4& p, double S);

struct RicciReport {
    FormMatrix rho_det_h;
    FormMatrix rho_split;
    double route_deviation = 0.0; // max |rho_det_h - rho_split|
    double hermitian_deviation = 0.0; // max |P - P^*|
    EinsteinResiduals residuals;
    double S = 0.0;
    double S_fit = 0.0; // least-squares S in P = (S/8) H
};

RicciReport ricci_report(const ConformalChart& chart, const WeightTriple& weights, const Point4& p, double S = 0.0);

enum class FamilyKind { general, cy_i, cy_ii, cy_iii, cy_iv };

const char* to_string(FamilyKind k);
/// "ricci-flat-general", "cy-i", ... ; throws ConfigError.
FamilyKind parse_family(std::string_view name);

struct FamilyParams {
    cplx a = 1.0;
    double c0 = 0.0;
    double f = 1.0; // the constant f of cy-i (and of the general family on K = 0)
};

/// beta+ = (-c0 + sqrt(c0^2 + 4|a|^2)) / (2|a|^2), the positive root of |a|^2 x^2 + c0 x - 1.
double beta_plus(cplx a, double c0);

/// A Ricci-flat Kaehler family with Delta = 1/r^4 and its r^2 interval.
/// general: K = 0 gives f const, h = |a|^2/f + 1/(f r^4); K != 0 gives
///   f^2 = -K(|a|^2 r^4 + c0 r^2 - 1)/r^2, h = (|a|^2 r^4 + 1)/(r^4 f).
/// cy-i..cy-iv are the complete representatives.
struct SolutionFamily {
    FamilyKind kind = FamilyKind::general;
    FamilyParams params;
    double K = 0.0;
    double r2_lo = 0.0;
    double r2_hi = std::numeric_limits<double>::infinity();
    WeightTriple weights;

    /// Sampling range kept max(margin, 2% of the interval) inside finite endpoints;
    /// r2 from min(0.1, r2_hi/10) at 0 and up to 10 (or 10 r2_lo) towards infinity.
    FibreRange interior(double margin = 1e-2) const;
};

/// Throws CurvatureMismatch (chart K vs family) or ParameterGate.
SolutionFamily make_family(FamilyKind kind, const FamilyParams& params, const ConformalChart& chart);

/// psi = r^4 Delta; equals 1 on every family.
double psi(const SolutionFamily& fam, const ConformalChart& chart, const Point4& p);

/// A Delta = 1/r^4 triple that is not Kaehler: f base-only (given), a arbitrary,
/// h = (|a|^2 + 1/r^4)/f. rho vanishes, but rho is then not the Ricci tensor.
WeightTriple inverse_quartic_triple(const std::string& f, const std::string& a);

} // namespace ciconia
