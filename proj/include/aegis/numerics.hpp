// Deterministic random-number streams and the special functions shared by
// the channel, PHY and learning code. Every stochastic quantity in a run is
// drawn from a RandomStream so that a (seed, label) pair pins the full
// sequence of draws.

#pragma once

#include <cstdint>
#include <string_view>
#include <string>

namespace aegis {

// SplitMix64 step. Used to expand seeds and to derive child stream material.
std::uint64_t splitmix64(std::uint64_t& state);

// FNV-1a over a byte string, used for stream labels and config digests.
std::uint64_t fnv1a64(std::string_view bytes);

// Seedable PRNG stream: SplitMix64 expands the seed material into the
// 256-bit state of a xoshiro256++ generator. Streams are single-owner;
// split() derives an independent child without consuming parent state.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::string label = "root");

    RandomStream(const RandomStream&) = delete;
    RandomStream& operator=(const RandomStream&) = delete;
    RandomStream(RandomStream&&) = default;
    RandomStream& operator=(RandomStream&&) = default;

    // Next raw 64-bit output.
    std::uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01();

    // Uniform in [lo, hi).
    double uniform(double lo, double hi);

    // Uniform index in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    // Child stream derived from (this stream's seed material, label).
    // Deterministic, label-sensitive, and does not advance this stream.
    RandomStream split(std::string_view label) const;

    const std::string& label() const { return label_; }

    // True when a Box-Muller spare is pending (see gaussian()).
    bool has_cached_gaussian() const { return has_spare_; }

private:
    friend double gaussian(RandomStream&, double, double);

    std::uint64_t state_[4];
    std::uint64_t material_;
    std::string label_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Complementary error function, absolute error < 1e-10 on |x| <= 6.
// Throws std::domain_error on non-finite input.
double erfc(double x);

// Draw from N(mu, sigma^2) via Box-Muller; both transform outputs are
// consumed in order (the second is cached on the stream). sigma = 0
// returns mu exactly. Throws std::domain_error if sigma < 0.
double gaussian(RandomStream& stream, double mu, double sigma);

// Log-normal shadowing draw: 10^((mean_db + X)/10) with X ~ N(0, sigma_db^2).
// Always strictly positive. Throws std::domain_error if sigma_db < 0.
double lognormal_db(RandomStream& stream, double mean_db, double sigma_db);

}  // namespace aegis
