#include "ciconia/sampling.hpp"

#include "ciconia/surface.hpp"

#include <cmath>
#include <numbers>

namespace ciconia {

namespace {

double radical_inverse(std::uint64_t n, std::uint64_t base)
{
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double r = 0.0;
    while (n > 0) {
        r += f * static_cast<double>(n % base);
        n /= base;
        f *= inv;
    }
    return r;
}

} // namespace

std::uint64_t SplitMix::next_u64()
{
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix::normal()
{
    // Box-Muller; u1 in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

LowDiscrepancy::LowDiscrepancy(std::uint64_t seed)
{
    SplitMix rng(seed);
    for (auto& s : shift_) s = rng.uniform();
}

std::array<double, 4> LowDiscrepancy::next()
{
    static constexpr std::array<std::uint64_t, 4> bases{2, 3, 5, 7};
    ++index_;
    std::array<double, 4> out{};
    for (std::size_t d = 0; d < 4; ++d) {
        double v = radical_inverse(index_, bases[d]) + shift_[d];
        out[d] = v - std::floor(v);
    }
    return out;
}

std::vector<Point4> sample_points(const ConformalChart& chart, const FibreRange& fibre, std::size_t count,
                                  std::uint64_t seed, double margin)
{
    LowDiscrepancy seq(seed);
    std::vector<Point4> out;
    out.reserve(count);
    while (out.size() < count) {
        const auto u = seq.next();
        const cplx z = chart.domain.sample(u[0], u[1], margin);
        const double r2 = fibre.r2_lo + (fibre.r2_hi - fibre.r2_lo) * u[2];
        const double theta = 2.0 * std::numbers::pi * u[3];
        const double lam = lambda_value(chart, z);
        const double modulus = std::sqrt(r2 / lam);
        out.push_back({z, std::polar(modulus, theta)});
    }
    return out;
}

std::vector<cplx> sample_base(const ConformalChart& chart, std::size_t count, std::uint64_t seed, double margin)
{
    LowDiscrepancy seq(seed);
    std::vector<cplx> out;
    out.reserve(count);
    while (out.size() < count) {
        const auto u = seq.next();
        out.push_back(chart.domain.sample(u[0], u[1], margin));
    }
    return out;
}

} // namespace ciconia
