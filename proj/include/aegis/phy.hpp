// QPSK/AWGN bit error rates, the relay-game utilities, and energy
// accounting. Everything here is a pure function of powers and gains.

#pragma once

#include "aegis/channel.hpp"

namespace aegis {

// Radio and cost constants for one scenario.
struct RadioConfig {
    double user_power_mw = 50.0;   // P
    double noise_mw = 1.0;         // receiver noise power
    double relay_cost = 1e-4;      // C_U, utility per mW of relay power
    double jam_cost = 1e-5;        // C_J, utility per mW of jamming power
    double max_uav_mw = 150.0;     // P_U^M
    double max_jam_mw = 80.0;      // P_J^M
    double slot_s = 1e-3;          // slot duration tau
};

struct BerVector {
    double rho1 = 0.5;  // user -> BS0 message
    double rho2 = 0.5;  // user -> UAV message
    double rho3 = 0.5;  // UAV -> BS1 relayed message
};

// 0.5 * erfc(sqrt(sinr)). Decreasing in sinr; 0.5 at sinr = 0.
// Throws std::domain_error for negative sinr.
double ber_from_sinr(double sinr);

// The three per-link BERs under user power P, relay power x, jamming power y.
// rho3 is 0.5 when the UAV keeps silent: an absent signal conveys nothing.
BerVector ber_vector(double user_mw, double relay_mw, double jam_mw,
                     const ChannelGains& h, double noise_mw);

// BER of the user message: best of the direct path and the two-hop relay
// path, the latter limited by its weaker hop. relay_mw = 0 zeroes the relay
// branch argument.
double message_ber(double user_mw, double relay_mw, double jam_mw,
                   const ChannelGains& h, double noise_mw);

// u = -message_ber - x * C_U.
double uav_utility(double user_mw, double relay_mw, double jam_mw,
                   const ChannelGains& h, double noise_mw, double relay_cost);

// u_J = -u_uav - y * C_J.
double jammer_utility(double uav_util, double jam_mw, double jam_cost);

// (P + x) * tau in mJ; the user always transmits, the UAV adds x when relaying.
double slot_energy(double user_mw, double relay_mw, double slot_s);

}  // namespace aegis
