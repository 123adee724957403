#pragma once

// Second-order forward-mode jets over the real coordinates (x, y, s, t) of the
// tangent manifold, with z = x + iy the base coordinate and w = s + it the
// fibre coordinate. Wirtinger derivatives are assembled on demand from the
// real partials, so functions that depend on zbar or wbar need no special
// bookkeeping.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>

namespace ciconia {

using cplx = std::complex<double>;

inline constexpr std::size_t kDim = 4;
inline constexpr std::size_t kHessSize = 10;

/// A point of the chart T_U = { (z, w) : z in U, w in C }.
struct Point4 {
    cplx z;
    cplx w;

    std::array<double, 4> real() const { return {z.real(), z.imag(), w.real(), w.imag()}; }
    static Point4 from_real(const std::array<double, 4>& c) { return {{c[0], c[1]}, {c[2], c[3]}}; }
};

enum class Wirtinger { z, zbar, w, wbar };

/// Coefficients of a Wirtinger operator on (d/dx, d/dy, d/ds, d/dt).
inline std::array<cplx, 4> wirtinger_coefficients(Wirtinger which)
{
    const cplx half{0.5, 0.0};
    const cplx ihalf{0.0, 0.5};
    switch (which) {
    case Wirtinger::z: return {half, -ihalf, 0.0, 0.0};
    case Wirtinger::zbar: return {half, ihalf, 0.0, 0.0};
    case Wirtinger::w: return {0.0, 0.0, half, -ihalf};
    case Wirtinger::wbar: return {0.0, 0.0, half, ihalf};
    }
    return {};
}

/// Packed index of the symmetric pair (i, j) in the upper triangle.
constexpr std::size_t hess_index(std::size_t i, std::size_t j)
{
    if (i > j) {
        const std::size_t k = i;
        i = j;
        j = k;
    }
    return i * kDim - (i * (i - 1)) / 2 + (j - i);
}

static_assert(hess_index(0, 0) == 0 && hess_index(0, 3) == 3 && hess_index(1, 1) == 4 && hess_index(3, 3) == 9);
static_assert(hess_index(2, 1) == hess_index(1, 2));

/// Complex value with exact first and second partials in (x, y, s, t).
/// The Hessian is stored once per unordered pair, so it is symmetric by construction.
struct Jet2 {
    cplx value{};
    std::array<cplx, kDim> grad{};
    std::array<cplx, kHessSize> hess{};

    Jet2() = default;
    Jet2(cplx v) : value(v) {} // NOLINT(google-explicit-constructor)
    Jet2(double v) : value(v) {} // NOLINT(google-explicit-constructor)

    static Jet2 variable(double v, std::size_t slot)
    {
        Jet2 j{cplx(v)};
        j.grad[slot] = 1.0;
        return j;
    }

    cplx second(std::size_t i, std::size_t j) const { return hess[hess_index(i, j)]; }

    Jet2& operator+=(const Jet2& o)
    {
        value += o.value;
        for (std::size_t i = 0; i < kDim; ++i) grad[i] += o.grad[i];
        for (std::size_t i = 0; i < kHessSize; ++i) hess[i] += o.hess[i];
        return *this;
    }
    Jet2& operator-=(const Jet2& o)
    {
        value -= o.value;
        for (std::size_t i = 0; i < kDim; ++i) grad[i] -= o.grad[i];
        for (std::size_t i = 0; i < kHessSize; ++i) hess[i] -= o.hess[i];
        return *this;
    }
    Jet2& operator*=(cplx c)
    {
        value *= c;
        for (auto& g : grad) g *= c;
        for (auto& h : hess) h *= c;
        return *this;
    }
};

inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
inline Jet2 operator-(Jet2 a)
{
    a *= -1.0;
    return a;
}
inline Jet2 operator*(Jet2 a, cplx c) { return a *= c; }
inline Jet2 operator*(cplx c, Jet2 a) { return a *= c; }
inline Jet2 operator+(Jet2 a, cplx c)
{
    a.value += c;
    return a;
}
inline Jet2 operator+(cplx c, Jet2 a) { return a + c; }
inline Jet2 operator-(Jet2 a, cplx c)
{
    a.value -= c;
    return a;
}
inline Jet2 operator-(cplx c, const Jet2& a) { return -a + c; }

inline Jet2 operator*(const Jet2& a, const Jet2& b)
{
    Jet2 r;
    r.value = a.value * b.value;
    for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = a.value * b.grad[i] + a.grad[i] * b.value;
    for (std::size_t i = 0; i < kDim; ++i) {
        for (std::size_t j = i; j < kDim; ++j) {
            const std::size_t k = hess_index(i, j);
            r.hess[k] = a.value * b.hess[k] + a.hess[k] * b.value + a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i];
        }
    }
    return r;
}

/// Chain rule for a scalar holomorphic function with derivatives d0, d1, d2 at a.value.
inline Jet2 compose(const Jet2& a, cplx d0, cplx d1, cplx d2)
{
    Jet2 r;
    r.value = d0;
    for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = d1 * a.grad[i];
    for (std::size_t i = 0; i < kDim; ++i) {
        for (std::size_t j = i; j < kDim; ++j) {
            const std::size_t k = hess_index(i, j);
            r.hess[k] = d1 * a.hess[k] + d2 * a.grad[i] * a.grad[j];
        }
    }
    return r;
}

inline Jet2 inv(const Jet2& a)
{
    const cplx r = 1.0 / a.value;
    return compose(a, r, -r * r, 2.0 * r * r * r);
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * inv(b); }
inline Jet2 operator/(Jet2 a, cplx c) { return a *= (1.0 / c); }
inline Jet2 operator/(cplx c, const Jet2& b) { return inv(b) * c; }

// Real scalars would otherwise be ambiguous between the cplx and Jet2 overloads.
inline Jet2 operator+(const Jet2& a, double c) { return a + cplx(c); }
inline Jet2 operator+(double c, const Jet2& a) { return a + cplx(c); }
inline Jet2 operator-(const Jet2& a, double c) { return a - cplx(c); }
inline Jet2 operator-(double c, const Jet2& a) { return cplx(c) - a; }
inline Jet2 operator*(const Jet2& a, double c) { return a * cplx(c); }
inline Jet2 operator*(double c, const Jet2& a) { return a * cplx(c); }
inline Jet2 operator/(const Jet2& a, double c) { return a / cplx(c); }
inline Jet2 operator/(double c, const Jet2& a) { return cplx(c) / a; }

inline Jet2 exp(const Jet2& a)
{
    const cplx e = std::exp(a.value);
    return compose(a, e, e, e);
}
inline Jet2 log(const Jet2& a)
{
    const cplx r = 1.0 / a.value;
    return compose(a, std::log(a.value), r, -r * r);
}
inline Jet2 sqrt(const Jet2& a)
{
    const cplx s = std::sqrt(a.value);
    return compose(a, s, 0.5 / s, -0.25 / (s * a.value));
}
/// Complex conjugate; derivatives are taken in real coordinates so they conjugate entrywise.
inline Jet2 conj(const Jet2& a)
{
    Jet2 r;
    r.value = std::conj(a.value);
    for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = std::conj(a.grad[i]);
    for (std::size_t i = 0; i < kHessSize; ++i) r.hess[i] = std::conj(a.hess[i]);
    return r;
}

inline cplx primal(cplx v) { return v; }
inline cplx primal(const Jet2& j) { return j.value; }

/// First Wirtinger derivative, e.g. d/dz = (d/dx - i d/dy) / 2.
inline cplx wirtinger(const Jet2& j, Wirtinger which)
{
    const auto c = wirtinger_coefficients(which);
    cplx r = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) r += c[i] * j.grad[i];
    return r;
}

/// Second Wirtinger derivative, e.g. d2/dz dzbar = (d2/dx2 + d2/dy2) / 4.
inline cplx wirtinger2(const Jet2& j, Wirtinger a, Wirtinger b)
{
    const auto ca = wirtinger_coefficients(a);
    const auto cb = wirtinger_coefficients(b);
    cplx r = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) {
        if (ca[i] == 0.0) continue;
        for (std::size_t k = 0; k < kDim; ++k) {
            if (cb[k] == 0.0) continue;
            r += ca[i] * cb[k] * j.second(i, k);
        }
    }
    return r;
}

/// First-order jet over an arbitrary scalar S. Jet1<Jet2> carries derivatives up
/// to order three; differentiating once (grad entry) lowers it back to a Jet2.
template <class S>
struct Jet1 {
    S value{};
    std::array<S, kDim> grad{};

    Jet1() = default;
    Jet1(cplx v) : value(v) {} // NOLINT(google-explicit-constructor)
    Jet1(double v) : value(cplx(v)) {} // NOLINT(google-explicit-constructor)
    Jet1(S v, std::array<S, kDim> g) : value(std::move(v)), grad(std::move(g)) {}
};

template <class S>
Jet1<S> operator+(const Jet1<S>& a, const Jet1<S>& b)
{
    Jet1<S> r{a.value + b.value, {}};
    for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = a.grad[i] + b.grad[i];
    return r;
}
template <class S>
Jet1<S> operator-(const Jet1<S>& a, const Jet1<S>& b)
{
    Jet1<S> r{a.value - b.value, {}};
    for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = a.grad[i] - b.grad[i];
    return r;
}
template <class S>
Jet1<S> operator-(const Jet1<S>& a)
{
    Jet1<S> r{-a.value, {}};
    for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = -a.grad[i];
    return r;
}
template <class S>
Jet1<S> operator*(const Jet1<S>& a, const Jet1<S>& b)
{
    Jet1<S> r{a.value * b.value, {}};
    for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = a.value * b.grad[i] + a.grad[i] * b.value;
    return r;
}
template <class S>
Jet1<S> operator*(const Jet1<S>& a, cplx c)
{
    Jet1<S> r{a.value * c, {}};
    for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = a.grad[i] * c;
    return r;
}
template <class S>
Jet1<S> operator*(cplx c, const Jet1<S>& a)
{
    return a * c;
}
template <class S>
Jet1<S> operator+(Jet1<S> a, cplx c)
{
    a.value = a.value + c;
    return a;
}
template <class S>
Jet1<S> operator+(cplx c, const Jet1<S>& a)
{
    return a + c;
}
template <class S>
Jet1<S> operator-(Jet1<S> a, cplx c)
{
    a.value = a.value - c;
    return a;
}
template <class S>
Jet1<S> operator-(cplx c, const Jet1<S>& a)
{
    return -a + c;
}
template <class S>
Jet1<S> operator/(const Jet1<S>& a, const Jet1<S>& b)
{
    const S q = a.value / b.value;
    Jet1<S> r{q, {}};
    for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = (a.grad[i] - q * b.grad[i]) / b.value;
    return r;
}
template <class S>
Jet1<S> operator/(const Jet1<S>& a, cplx c)
{
    return a * (1.0 / c);
}
template <class S>
Jet1<S> operator/(cplx c, const Jet1<S>& b)
{
    return Jet1<S>(c) / b;
}
template <class S>
Jet1<S> operator+(const Jet1<S>& a, double c) { return a + cplx(c); }
template <class S>
Jet1<S> operator+(double c, const Jet1<S>& a) { return a + cplx(c); }
template <class S>
Jet1<S> operator-(const Jet1<S>& a, double c) { return a - cplx(c); }
template <class S>
Jet1<S> operator-(double c, const Jet1<S>& a) { return cplx(c) - a; }
template <class S>
Jet1<S> operator*(const Jet1<S>& a, double c) { return a * cplx(c); }
template <class S>
Jet1<S> operator*(double c, const Jet1<S>& a) { return a * cplx(c); }
template <class S>
Jet1<S> operator/(const Jet1<S>& a, double c) { return a / cplx(c); }
template <class S>
Jet1<S> operator/(double c, const Jet1<S>& a) { return cplx(c) / a; }
template <class S>
Jet1<S> exp(const Jet1<S>& a)
{
    const S e = exp(a.value);
    Jet1<S> r{e, {}};
    for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = e * a.grad[i];
    return r;
}
template <class S>
Jet1<S> log(const Jet1<S>& a)
{
    Jet1<S> r{log(a.value), {}};
    for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = a.grad[i] / a.value;
    return r;
}
template <class S>
Jet1<S> sqrt(const Jet1<S>& a)
{
    const S s = sqrt(a.value);
    const S twice = s * cplx(2.0);
    Jet1<S> r{s, {}};
    for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = a.grad[i] / twice;
    return r;
}
template <class S>
Jet1<S> conj(const Jet1<S>& a)
{
    Jet1<S> r{conj(a.value), {}};
    for (std::size_t i = 0; i < kDim; ++i) r.grad[i] = conj(a.grad[i]);
    return r;
}
template <class S>
cplx primal(const Jet1<S>& a)
{
    return primal(a.value);
}

template <class S>
S wirtinger(const Jet1<S>& j, Wirtinger which)
{
    const auto c = wirtinger_coefficients(which);
    S r{};
    for (std::size_t i = 0; i < kDim; ++i) {
        if (c[i] != 0.0) r = r + j.grad[i] * c[i];
    }
    return r;
}

using Jet3 = Jet1<Jet2>;

/// Independent variables x, y, s, t at p.
std::array<Jet2, 4> seed_variables(const Point4& p);

/// Same variables carried to third order.
std::array<Jet3, 4> seed_variables3(const Point4& p);

using JetFunction = std::function<Jet2(const std::array<Jet2, 4>&)>;

struct FdOptions {
    double step = 1e-4;
    /// Step for second partials; 0 selects max(step, 0.1 sqrt(step)).
    double second_step = 0.0;
    /// Deviation above which the Richardson-extrapolated stencil is tried.
    double threshold = 1e-6;
    bool richardson = true;
};

/// Max deviation |jet - fd| / max(1, |jet|) over all first and second partials.
/// Throws FdEvaluationError if any stencil evaluation fails or is non-finite.
double fd_crosscheck(const JetFunction& f, const Point4& p, const FdOptions& opts = {});

} // namespace ciconia
