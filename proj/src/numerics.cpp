#include "aegis/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace aegis {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::string label)
    : material_(seed), label_(std::move(label)) {
    std::uint64_t sm = material_;
    for (auto& s : state_) s = splitmix64(sm);
}

std::uint64_t RandomStream::next_u64() {
    // xoshiro256++ (Blackman & Vigna).
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RandomStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
    return lo + uniform01() * (hi - lo);
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n) {
    // Multiply-shift; bias is < n / 2^64 and irrelevant at simulation scale.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

RandomStream RandomStream::split(std::string_view label) const {
    std::uint64_t child = material_ ^ rotl(fnv1a64(label), 1);
    std::uint64_t sm = child;
    child = splitmix64(sm);
    return RandomStream(child, label_ + "/" + std::string(label));
}

namespace {

constexpr double kTwoOverSqrtPi = 1.1283791670955126;  // 2/sqrt(pi)
constexpr double kInvSqrtPi = 0.5641895835477563;      // 1/sqrt(pi)

// erf via its Maclaurin series; terms fall below 1e-18 within ~30 terms
// for |x| <= 1.
double erf_series(double x) {
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 64; ++n) {
        term *= -x2 / n;
        const double add = term / (2 * n + 1);
        sum += add;
        if (std::fabs(add) < 1e-18) break;
    }
    return kTwoOverSqrtPi * sum;
}

// Continued fraction sqrt(pi) e^{x^2} erfc(x) = 1/(x+ (1/2)/(x+ 1/(x+ ...)))
// evaluated with the modified Lentz algorithm; valid for x >= 1.
double erfc_cf(double x) {
    const double tiny = 1e-300;
    double f = x;
    double c = x;
    double d = 0.0;
    for (int k = 1; k < 300; ++k) {
        const double a = 0.5 * k;
        d = x + a * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = x + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    return std::exp(-x * x) * kInvSqrtPi / f;
}

}  // namespace

double erfc(double x) {
    if (!std::isfinite(x)) throw std::domain_error("erfc: non-finite input");
    if (x < 0.0) return 2.0 - erfc(-x);
    if (x < 1.0) return 1.0 - erf_series(x);
    return erfc_cf(x);
}

double gaussian(RandomStream& stream, double mu, double sigma) {
    if (sigma < 0.0) throw std::domain_error("gaussian: sigma < 0");
    double z;
    if (stream.has_spare_) {
        stream.has_spare_ = false;
        z = stream.spare_;
    } else {
        // u1 in (0, 1] keeps the log finite.
        const double u1 =
            (static_cast<double>(stream.next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = stream.uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        z = r * std::cos(a);
        stream.spare_ = r * std::sin(a);
        stream.has_spare_ = true;
    }
    return mu + sigma * z;
}

double lognormal_db(RandomStream& stream, double mean_db, double sigma_db) {
    if (sigma_db < 0.0) throw std::domain_error("lognormal_db: sigma_db < 0");
    const double db = gaussian(stream, mean_db, sigma_db);
    return std::pow(10.0, db / 10.0);
}

}  // namespace aegis
