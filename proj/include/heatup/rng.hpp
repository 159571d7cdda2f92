#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace heatup {

// Deterministic 64-bit generator with a portable, documented stream.
//
// State update is xorshift64*:
//     s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27;
//     output = s * 0x2545F4914F6CDD1D
//
// The seed is mixed through one round of splitmix64 first so that small
// seeds (0, 1, 2, ...) start from well-spread states. The raw integer
// stream is identical on every platform for a given seed; double-valued
// helpers only apply exact arithmetic on top of it, except normal(),
// which goes through libm (log/cos/sqrt) and may differ in the last ulp
// across C libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) { set_seed(seed); }

    void set_seed(std::uint64_t seed) {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z ^= z >> 31;
        state_ = z != 0 ? z : 0x9E3779B97F4A7C15ull;
    }

    std::uint64_t next_u64() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1Dull;
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Box-Muller; consumes exactly two uniforms per call.
    double normal() {
        double u1 = 1.0 - next_double();  // (0, 1]
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Uniform integer in [0, n) via 128-bit multiply-shift.
    std::size_t next_below(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Fisher-Yates, back to front.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = next_below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s != 0 ? s : 0x9E3779B97F4A7C15ull; }

private:
    std::uint64_t state_;
};

}  // namespace heatup
