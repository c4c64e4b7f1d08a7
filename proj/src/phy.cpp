#include "aegis/phy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aegis {

double ber_from_sinr(double sinr) {
    if (std::isnan(sinr) || sinr < 0.0) {
        throw std::domain_error("ber_from_sinr: negative sinr");
    }
    return 0.5 * erfc(std::sqrt(sinr));
}

BerVector ber_vector(double user_mw, double relay_mw, double jam_mw,
                     const ChannelGains& h, double noise_mw) {
    BerVector rho;
    rho.rho1 = ber_from_sinr(user_mw * h.h1 / (noise_mw + jam_mw * h.h3));
    rho.rho2 = ber_from_sinr(user_mw * h.h2 / (noise_mw + jam_mw * h.h4));
    rho.rho3 = relay_mw > 0.0 ? ber_from_sinr(relay_mw * h.h5 / noise_mw) : 0.5;
    return rho;
}

double message_ber(double user_mw, double relay_mw, double jam_mw,
                   const ChannelGains& h, double noise_mw) {
    const double direct = std::sqrt(user_mw * h.h1 / (noise_mw + jam_mw * h.h3));
    const double uphop = std::sqrt(user_mw * h.h2 / (noise_mw + jam_mw * h.h4));
    const double downhop = std::sqrt(relay_mw * h.h5 / noise_mw);
    return 0.5 * erfc(std::max(direct, std::min(uphop, downhop)));
}

double uav_utility(double user_mw, double relay_mw, double jam_mw,
                   const ChannelGains& h, double noise_mw, double relay_cost) {
    return -message_ber(user_mw, relay_mw, jam_mw, h, noise_mw) -
           relay_mw * relay_cost;
}

double jammer_utility(double uav_util, double jam_mw, double jam_cost) {
    return -uav_util - jam_mw * jam_cost;
}

double slot_energy(double user_mw, double relay_mw, double slot_s) {
    return (user_mw + relay_mw) * slot_s;
}

}  // namespace aegis
