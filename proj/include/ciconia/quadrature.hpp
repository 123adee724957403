#pragma once

// Adaptive Gauss-Kronrod (7, 15) quadrature on a finite interval.

#include <functional>

namespace ciconia {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

/// Integrates f over [a, b], bisecting the worst interval until the summed
/// error estimate falls below max(abs_tol, rel_tol |value|). Throws Error if
/// max_intervals is exhausted first.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-10,
                           double rel_tol = 1e-12, int max_intervals = 2000);

} // namespace ciconia
