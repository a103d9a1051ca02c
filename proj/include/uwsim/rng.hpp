#pragma once

#include <cstdint>

namespace uwsim {

/**
 * Counter-based uniform generator.
 *
 * Every draw is a pure function of (seed, stream_id, counter): the three
 * 64-bit words are folded through chained splitmix64 finalizer rounds and
 * the top 53 bits of the result become a double in [0, 1). There is no
 * hidden state, so a stream replays exactly no matter how many other
 * streams exist or on which worker it is consumed, and any draw can be
 * addressed directly through uniform_at().
 */
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter = 0)
        : seed_(seed), stream_id_(stream_id), counter_(counter) {}

    /// Uniform double in [0,1); advances the counter by one.
    double next() { return uniform_at(seed_, stream_id_, counter_++); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    std::uint64_t counter() const { return counter_; }

    /// splitmix64 output finalizer (Steele et al.), used as the mixing round.
    static constexpr std::uint64_t mix64(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static double uniform_at(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter) {
        const std::uint64_t word = mix64(mix64(mix64(seed) ^ stream_id) ^ counter);
        return static_cast<double>(word >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t counter_;
};

} // namespace uwsim
