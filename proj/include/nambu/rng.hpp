#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace nambu {

using State = std::vector<double>;

/// Per-axis sampling box. Empty means [-1,1] on every axis.
struct Box {
    std::vector<std::pair<double, double>> axes;

    static Box unit(int n) {
        Box b;
        b.axes.assign(static_cast<std::size_t>(n), {-1.0, 1.0});
        return b;
    }
    static Box uniform(int n, double lo, double hi) {
        Box b;
        b.axes.assign(static_cast<std::size_t>(n), {lo, hi});
        return b;
    }
};

// Deterministic RNG: mt19937_64 output mapped to doubles by hand so that
// sequences are identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0,1).
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo,hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Uniform integer in [0,n).
    std::uint64_t next_below(std::uint64_t n) { return engine_() % n; }

    /// Independent child generator (for parallelizable sweeps).
    Rng fork() { return Rng(engine_()); }

private:
    std::mt19937_64 engine_;
};

inline std::vector<State> sample_points(const Box& box, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<State> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int p = 0; p < count; ++p) {
        State x(box.axes.size());
        for (std::size_t i = 0; i < box.axes.size(); ++i)
            x[i] = rng.uniform(box.axes[i].first, box.axes[i].second);
        pts.push_back(std::move(x));
    }
    return pts;
}

} // namespace nambu
