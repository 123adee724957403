#include "ciconia/quadrature.hpp"

#include "ciconia/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

namespace ciconia {

namespace {

// Kronrod nodes on [0, 1] (positive half); odd indices are the Gauss nodes.
constexpr std::array<double, 8> kXk{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const std::function<double(double)>& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kWk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXk[j];
        const double s = f(c - x) + f(c + x);
        kron += kWk[j] * s;
        if (j % 2 == 1) gauss += kWg[j / 2] * s;
    }
    const double value = kron * h;
    const double err = std::abs((kron - gauss) * h);
    if (!std::isfinite(value)) throw Error("integrand not finite on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    return {a, b, value, err};
}

} // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol,
                           int max_intervals)
{
    if (a == b) return {};
    std::priority_queue<Piece> heap;
    heap.push(gk15(f, a, b));
    double value = heap.top().value;
    double error = heap.top().error;
    int n = 1;
    while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
        if (n >= max_intervals) throw Error("quadrature did not converge (error estimate " + std::to_string(error) + ")");
        const Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Piece l = gk15(f, worst.a, mid);
        const Piece r = gk15(f, mid, worst.b);
        value += l.value + r.value - worst.value;
        error += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        ++n;
    }
    // Re-sum to shed the drift of the running totals.
    double sum = 0.0, err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {sum, err, n};
}

} // namespace ciconia
