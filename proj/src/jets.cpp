#include "ciconia/jets.hpp"

#include "ciconia/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ciconia {

std::array<Jet2, 4> seed_variables(const Point4& p)
{
    const auto c = p.real();
    return {Jet2::variable(c[0], 0), Jet2::variable(c[1], 1), Jet2::variable(c[2], 2), Jet2::variable(c[3], 3)};
}

std::array<Jet3, 4> seed_variables3(const Point4& p)
{
    const auto c = p.real();
    std::array<Jet3, 4> out;
    for (std::size_t i = 0; i < kDim; ++i) {
        out[i].value = Jet2::variable(c[i], i);
        out[i].grad[i] = Jet2(1.0);
    }
    return out;
}

namespace {

cplx evaluate_at(const JetFunction& f, std::array<double, 4> c)
{
    cplx v;
    try {
        v = f(seed_variables(Point4::from_real(c))).value;
    } catch (const Error& e) {
        throw FdEvaluationError(std::string("stencil evaluation failed: ") + e.what());
    }
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw FdEvaluationError("stencil evaluation produced a non-finite value");
    }
    return v;
}

struct FdDerivatives {
    std::array<cplx, kDim> grad{};
    std::array<cplx, kHessSize> hess{};
};

FdDerivatives central_differences(const JetFunction& f, const std::array<double, 4>& base, cplx f0, double h, double h2)
{
    FdDerivatives d;
    auto shifted = [&](std::size_t i, double di, std::size_t j, double dj) {
        auto c = base;
        c[i] += di;
        c[j] += dj;
        return evaluate_at(f, c);
    };
    for (std::size_t i = 0; i < kDim; ++i) {
        d.grad[i] = (shifted(i, h, i, 0.0) - shifted(i, -h, i, 0.0)) / (2.0 * h);
        d.hess[hess_index(i, i)] = (shifted(i, h2, i, 0.0) - 2.0 * f0 + shifted(i, -h2, i, 0.0)) / (h2 * h2);
        for (std::size_t j = i + 1; j < kDim; ++j) {
            const cplx fpp = shifted(i, h2, j, h2);
            const cplx fpm = shifted(i, h2, j, -h2);
            const cplx fmp = shifted(i, -h2, j, h2);
            const cplx fmm = shifted(i, -h2, j, -h2);
            d.hess[hess_index(i, j)] = (fpp - fpm - fmp + fmm) / (4.0 * h2 * h2);
        }
    }
    return d;
}

double deviation(const Jet2& jet, const FdDerivatives& fd)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) {
        worst = std::max(worst, std::abs(jet.grad[i] - fd.grad[i]) / std::max(1.0, std::abs(jet.grad[i])));
    }
    for (std::size_t k = 0; k < kHessSize; ++k) {
        worst = std::max(worst, std::abs(jet.hess[k] - fd.hess[k]) / std::max(1.0, std::abs(jet.hess[k])));
    }
    return worst;
}

} // namespace

double fd_crosscheck(const JetFunction& f, const Point4& p, const FdOptions& opts)
{
    if (!(opts.step > 0.0)) throw Error("fd_crosscheck: step must be positive");
    Jet2 jet;
    try {
        jet = f(seed_variables(p));
    } catch (const Error& e) {
        throw FdEvaluationError(std::string("jet evaluation failed: ") + e.what());
    }
    const auto base = p.real();
    const cplx f0 = evaluate_at(f, base);
    // Second differences lose two orders of magnitude to rounding per decade of
    // step, so they use a wider stencil than the first differences.
    const double h2 = opts.second_step > 0.0 ? opts.second_step : std::max(opts.step, 0.1 * std::sqrt(opts.step));
    const FdDerivatives coarse = central_differences(f, base, f0, opts.step, h2);
    const double dev = deviation(jet, coarse);
    if (dev <= opts.threshold || !opts.richardson) return dev;

    // Richardson: (4 D(h/2) - D(h)) / 3 cancels the O(h^2) truncation term.
    const FdDerivatives fine = central_differences(f, base, f0, opts.step / 2.0, h2 / 2.0);
    FdDerivatives extrapolated;
    for (std::size_t i = 0; i < kDim; ++i) extrapolated.grad[i] = (4.0 * fine.grad[i] - coarse.grad[i]) / 3.0;
    for (std::size_t k = 0; k < kHessSize; ++k) extrapolated.hess[k] = (4.0 * fine.hess[k] - coarse.hess[k]) / 3.0;
    return std::min(dev, deviation(jet, extrapolated));
}

} // namespace ciconia
