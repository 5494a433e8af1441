// rng.hpp — deterministic random streams.
// std::mt19937 plus the standard distributions would tie output bytes to the
// standard-library implementation; experiment reruns must be byte-identical,
// so the generator and the uniform/normal maps are spelled out here.

#pragma once

#include <cmath>
#include <cstdint>

namespace fraclab {

// SplitMix64: passes BigCrush for this purpose, two lines of state-free math.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int lo, int hi) { // inclusive range
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    // Box-Muller; one value per call keeps the stream layout obvious.
    double gaussian() {
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Derive an independent stream, e.g. one per sweep trial.
    Rng fork(std::uint64_t stream) {
        Rng r(state_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
        r.next_u64();
        return r;
    }

  private:
    std::uint64_t state_;
};

} // namespace fraclab
