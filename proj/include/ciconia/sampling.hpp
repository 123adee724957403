#pragma once

#include "ciconia/jets.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace ciconia {

struct ConformalChart;

/// Shifted Halton sequence in four dimensions. The seed fixes the
/// Cranley-Patterson shift, so a seed determines every sample.
class LowDiscrepancy {
public:
    explicit LowDiscrepancy(std::uint64_t seed);

    std::array<double, 4> next();

private:
    std::array<double, 4> shift_{};
    std::uint64_t index_ = 0;
};

/// Deterministic uniform doubles in [0, 1) derived from a splitmix64 stream.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();

private:
    std::uint64_t state_;
};

struct FibreRange {
    double r2_lo = 0.1;
    double r2_hi = 4.0;
};

/// Points (z, w) with z spread over the chart's sampling region and
/// r^2 = lambda(z) |w|^2 uniform in the fibre range.
std::vector<Point4> sample_points(const ConformalChart& chart, const FibreRange& fibre, std::size_t count,
                                  std::uint64_t seed, double margin = 1e-3);

std::vector<cplx> sample_base(const ConformalChart& chart, std::size_t count, std::uint64_t seed, double margin = 1e-3);

} // namespace ciconia
