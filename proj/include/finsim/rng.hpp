#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace finsim {

// Deterministic pseudo-random stream. One stream per run, with per-subsystem
// sub-streams derived from fixed labels so adding an adversary to a scenario
// does not perturb unrelated draws.
//
// Bounded draws use rejection sampling on the raw 64-bit output rather than
// std::uniform_int_distribution, whose output is implementation-defined.
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : engine_(seed) {}

    DetRng(std::uint64_t run_seed, std::string_view label)
        : engine_(mix(run_seed, label)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
    }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return next_double() < p;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next_below(i)]);
        }
    }

private:
    static std::uint64_t mix(std::uint64_t seed, std::string_view label) {
        // FNV-1a over the label, xor-folded with the run seed.
        std::uint64_t h = 1469598103934665603ull;
        for (char c : label) {
            h ^= static_cast<std::uint8_t>(c);
            h *= 1099511628211ull;
        }
        return h ^ seed;
    }

    std::mt19937_64 engine_;
};

} // namespace finsim
