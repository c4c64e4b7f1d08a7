#include "oracles.hpp"

#include <cmath>

namespace oracles {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                double fa, double fm, double fb, double whole, double tol,
                int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    return adaptive(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb), tol, 48);
}

}  // namespace

double erfc_quadrature(double x) {
    // e^{-t^2} < 1e-175 beyond t = 20; the truncated tail is negligible.
    auto f = [](double t) { return std::exp(-t * t); };
    const double two_over_sqrt_pi = 2.0 / std::sqrt(M_PI);
    // Split at 0 so the integrand's peak is always an interval endpoint.
    if (x < 0.0) {
        return two_over_sqrt_pi *
               (integrate(f, x, 0.0, 1e-14) + integrate(f, 0.0, 20.0, 1e-14));
    }
    return two_over_sqrt_pi * integrate(f, x, 20.0, 1e-14);
}

double mc_qpsk_ber(double sinr, std::uint64_t symbols, aegis::RandomStream& stream) {
    // Per dimension: signal +-sqrt(Eb), noise N(0, N0/2) with N0 = 1 and
    // Eb = sinr. A bit error is a sign flip.
    const double amp = std::sqrt(sinr);
    const double noise_sigma = std::sqrt(0.5);
    std::uint64_t errors = 0;
    for (std::uint64_t i = 0; i < symbols; ++i) {
        for (int dim = 0; dim < 2; ++dim) {
            const bool bit = stream.next_u64() & 1u;
            const double s = bit ? -amp : amp;
            const double r = s + aegis::gaussian(stream, 0.0, noise_sigma);
            const bool decided = r < 0.0;
            if (decided != bit) ++errors;
        }
    }
    return static_cast<double>(errors) / (2.0 * static_cast<double>(symbols));
}

std::vector<std::vector<double>> value_iteration(
    const std::vector<std::vector<int>>& next_state,
    const std::vector<std::vector<double>>& reward, double gamma, int sweeps) {
    const std::size_t ns = next_state.size();
    const std::size_t na = next_state[0].size();
    std::vector<std::vector<double>> q(ns, std::vector<double>(na, 0.0));
    for (int it = 0; it < sweeps; ++it) {
        for (std::size_t s = 0; s < ns; ++s) {
            for (std::size_t a = 0; a < na; ++a) {
                const int sn = next_state[s][a];
                double best = q[sn][0];
                for (std::size_t b = 1; b < na; ++b) best = std::max(best, q[sn][b]);
                q[s][a] = reward[s][a] + gamma * best;
            }
        }
    }
    return q;
}

}  // namespace oracles
