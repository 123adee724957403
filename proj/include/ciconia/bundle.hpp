#pragma once

#include "ciconia/surface.hpp"

#include <array>

namespace ciconia {

/// Complex row of components over the real coordinates (x, y, s, t).
using Row4 = std::array<cplx, 4>;

// Coordinate one-forms and Wirtinger vectors in real components.
inline constexpr Row4 kDz{cplx(1, 0), cplx(0, 1), cplx(0), cplx(0)};
inline constexpr Row4 kDzbar{cplx(1, 0), cplx(0, -1), cplx(0), cplx(0)};
inline constexpr Row4 kDw{cplx(0), cplx(0), cplx(1, 0), cplx(0, 1)};
inline constexpr Row4 kDwbar{cplx(0), cplx(0), cplx(1, 0), cplx(0, -1)};

inline constexpr Row4 kVz{cplx(0.5, 0), cplx(0, -0.5), cplx(0), cplx(0)};
inline constexpr Row4 kVzbar{cplx(0.5, 0), cplx(0, 0.5), cplx(0), cplx(0)};
inline constexpr Row4 kVw{cplx(0), cplx(0), cplx(0.5, 0), cplx(0, -0.5)};
inline constexpr Row4 kVwbar{cplx(0), cplx(0), cplx(0.5, 0), cplx(0, 0.5)};

/// Complex frame (dz, dzbar, dw, dwbar) and its dual (d/dz, d/dzbar, d/dw, d/dwbar),
/// indexed in the order of the Wirtinger enum.
inline constexpr std::array<Row4, 4> kFormBasis{kDz, kDzbar, kDw, kDwbar};
inline constexpr std::array<Row4, 4> kVectorBasis{kVz, kVzbar, kVw, kVwbar};

cplx pair(const Row4& form, const Row4& vec);

/// Horizontal/vertical apparatus at a point of T_U:
///   eta = w Gamma dz + dw,   X = d/dz - w Gamma d/dw,   U = s d/ds + t d/dt.
struct FrameData {
    Point4 at;
    cplx eta_dz_coeff;     // w Gamma
    cplx X_vertical_coeff; // -w Gamma
    cplx lambda;
    cplx gamma;

    Row4 dz;  // one-forms over (x, y, s, t)
    Row4 eta;
    Row4 X;   // vectors over (x, y, s, t)
    Row4 dw_vec;
    Row4 U;
};

FrameData frame_at(const ConformalChart& chart, const Point4& p);

/// eta over (x, y, s, t) with jet coefficients.
std::array<Jet2, 4> eta_row(const BaseJets& b);

/// max_k |dr2(e_k) - lambda (w etabar + wbar eta)(e_k)|.
double dr2_identity_residual(const ConformalChart& chart, const Point4& p);

/// Connection coefficients of nabla* on the complex coordinate frame:
/// nabla*_{e_X} e_Y = sum_mu C[X][Y][mu] e_mu, indices in the order (z, zbar, w, wbar).
using ConnectionTable = std::array<std::array<std::array<cplx, 4>, 4>, 4>;

ConnectionTable connection_table(const BaseJets& b);

struct NablaReport {
    double form_table = 0.0;       // dual table derived from C against the closed-form table
    double eta_derivatives = 0.0;  // nabla*_z eta + Gamma eta, nabla*_zbar eta, nabla*_w eta, nabla*_wbar eta
    double parallel_base = 0.0;    // nabla*(lambda dz.dzbar)
    double parallel_fibre = 0.0;   // nabla*(lambda eta.etabar)
    double parallel_mixed = 0.0;   // nabla*(lambda (a dz.etabar + abar eta.dzbar)), a constant

    double max() const;
};

NablaReport nabla_star_report(const ConformalChart& chart, const Point4& p, cplx a_const = cplx(0.7, -0.4));
double nabla_star_table_residual(const ConformalChart& chart, const Point4& p);

/// d eta evaluated on pairs of complex frame vectors, D[mu][nu] = d eta(e_mu, e_nu).
std::array<std::array<cplx, 4>, 4> d_eta(const ConformalChart& chart, const Point4& p);

/// |d eta(d/dzbar, d/dwbar)|, the (0,2)-part.
double d_eta_02(const ConformalChart& chart, const Point4& p);

} // namespace ciconia
