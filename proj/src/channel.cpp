#include "aegis/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aegis {

double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double distance(const Vec2& ground, const Vec3& air) {
    return std::sqrt((ground.x - air.x) * (ground.x - air.x) +
                     (ground.y - air.y) * (ground.y - air.y) + air.z * air.z);
}

Vec2 uniform_in_disc(const Vec2& center, double radius, RandomStream& stream) {
    const double r = radius * std::sqrt(stream.uniform01());
    const double theta = 2.0 * M_PI * stream.uniform01();
    return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

MobilityState step_random_waypoint(const MobilityState& state, const Vec2& center,
                                   double cell_radius, const SpeedRange& speed,
                                   double dt, RandomStream& stream) {
    if (dt <= 0.0) throw std::domain_error("step_random_waypoint: dt <= 0");
    MobilityState next = state;
    const double dx = state.waypoint.x - state.position.x;
    const double dy = state.waypoint.y - state.position.y;
    const double dist = std::hypot(dx, dy);
    const double travel = state.speed * dt;
    if (travel >= dist) {
        // Land exactly on the waypoint, then draw the next leg.
        next.position = state.waypoint;
        next.waypoint = uniform_in_disc(center, cell_radius, stream);
        next.speed = stream.uniform(speed.lo, speed.hi);
    } else {
        next.position.x += travel * dx / dist;
        next.position.y += travel * dy / dist;
    }
    return next;
}

namespace {

double link_gain(double dist, const LinkParams& p, RandomStream& stream) {
    const double d = std::max(dist, 1.0);
    const double mean_db =
        p.mean_db_at_ref - 10.0 * p.pathloss_exp * std::log10(d / p.ref_dist);
    return lognormal_db(stream, mean_db, p.shadow_sigma_db);
}

}  // namespace

ChannelGains gains_from_geometry(const Geometry& geom, const LinkModel& links,
                                 RandomStream& stream) {
    ChannelGains g;
    g.h1 = link_gain(distance(geom.user_pos, geom.bs0_pos), links.user_bs0, stream);
    g.h2 = link_gain(distance(geom.user_pos, geom.uav_pos), links.user_uav, stream);
    g.h3 = link_gain(distance(geom.jammer_pos, geom.bs0_pos), links.jammer_bs0, stream);
    g.h4 = link_gain(distance(geom.jammer_pos, geom.uav_pos), links.jammer_uav, stream);
    g.h5 = link_gain(distance(geom.bs1_pos, geom.uav_pos), links.uav_bs1, stream);
    return g;
}

std::optional<UavObservation> observe(const std::vector<ChannelGains>& gain_history,
                                      const std::vector<double>& jam_history, int k,
                                      const ObservationModel& model,
                                      RandomStream& stream) {
    const int lag = model.obs_case == ObsCase::Ideal ? 1 : 2;
    const int origin = k - lag;
    if (origin < 1 || origin > static_cast<int>(gain_history.size()) ||
        origin > static_cast<int>(jam_history.size())) {
        return std::nullopt;  // cold start
    }

    const ChannelGains& g = gain_history[origin - 1];
    UavObservation obs;
    obs.slot_of_origin = origin;
    obs.est_gains = g.as_array();
    obs.est_jam_power = jam_history[origin - 1];

    if (model.obs_case == ObsCase::NoisyDelayed) {
        // Noise lives on the normalized [0,1] feature scale; clamp there and
        // map back so downstream consumers keep raw units.
        for (auto& gain : obs.est_gains) {
            double norm = gain / model.gain_norm;
            norm = std::clamp(norm + gaussian(stream, 0.0, model.noise_sigma), 0.0, 1.0);
            gain = norm * model.gain_norm;
        }
        double jam_norm = obs.est_jam_power / model.max_jam_mw;
        jam_norm = std::clamp(jam_norm + gaussian(stream, 0.0, model.noise_sigma), 0.0, 1.0);
        obs.est_jam_power = jam_norm * model.max_jam_mw;
    }

    // Declared ranges hold in both cases.
    for (auto& gain : obs.est_gains) gain = std::max(gain, 1e-300);
    obs.est_jam_power = std::clamp(obs.est_jam_power, 0.0, model.max_jam_mw);
    return obs;
}

}  // namespace aegis
