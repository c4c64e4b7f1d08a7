// Independent test oracles. These deliberately avoid the library's own
// numeric paths: erfc comes from adaptive quadrature, BER from bit-level
// Monte Carlo, MDP values from value iteration.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "aegis/numerics.hpp"

namespace oracles {

// (2/sqrt(pi)) * integral_x^inf e^{-t^2} dt via adaptive Simpson quadrature,
// absolute tolerance ~1e-13.
double erfc_quadrature(double x);

// Empirical QPSK bit error rate in AWGN at the given SINR (= Eb/N0):
// per-dimension amplitude sqrt(sinr), unit-variance-scaled noise, hard
// decisions, `symbols` QPSK symbols (2 bits each).
double mc_qpsk_ber(double sinr, std::uint64_t symbols, aegis::RandomStream& stream);

// Value iteration on a deterministic finite MDP: next_state[s][a],
// reward[s][a]. Returns optimal Q-values.
std::vector<std::vector<double>> value_iteration(
    const std::vector<std::vector<int>>& next_state,
    const std::vector<std::vector<double>>& reward, double gamma, int sweeps);

}  // namespace oracles
