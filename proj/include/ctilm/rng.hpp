#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ctilm {

// All stochastic code in the library draws from this generator: a standard
// mt19937_64 stream (bit-exact across platforms) combined with the explicit
// samplers below. The standard-library distributions are deliberately not
// used, since their output is implementation defined; with these samplers a
// seed reproduces the same results on any conforming compiler.
//
// Substreams (chains, replicates, sweep cells) are seeded with
// derive_seed(master, stream_index), the splitmix64 finalizer applied to
// master + (stream_index + 1) * 0x9E3779B97F4A7C15.
inline std::uint64_t splitmix64_mix(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_index) {
    return splitmix64_mix(master + (stream_index + 1) * 0x9E3779B97F4A7C15ull);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // (0, 1]
    double uniform01_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // unbiased integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x < threshold);
        return x % n;
    }

    double exponential(double rate) { return -std::log(uniform01_pos()) / rate; }

    // Box-Muller; consumes exactly two uniforms per variate.
    double normal(double mean, double sd) {
        const double u1 = uniform01_pos();
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
        return mean + sd * z;
    }

    // Marsaglia-Tsang squeeze method; rate parametrization.
    double gamma(double shape, double rate) {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0, 1.0);
            const double u = uniform01_pos();
            return g * std::pow(u, 1.0 / shape) / rate;
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / (3.0 * std::sqrt(d));
        for (;;) {
            double x, v;
            do {
                x = normal(0.0, 1.0);
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

private:
    std::mt19937_64 gen_;
};

} // namespace ctilm
