// Node geometry, random-waypoint user mobility, per-slot log-normal channel
// gains for the five links (user-BS0, user-UAV, jammer-BS0, jammer-UAV,
// UAV-BS1), and the relay's delayed / noisy view of gains and jamming power.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "aegis/numerics.hpp"

namespace aegis {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

double distance(const Vec2& a, const Vec2& b);
double distance(const Vec2& ground, const Vec3& air);

// Network layout. The user roams inside BS0's coverage disc; the UAV hovers
// at a fixed point farther from the jammer; BS1 is out of the jammer's reach.
struct Geometry {
    Vec2 user_pos;
    Vec2 bs0_pos;
    Vec2 bs1_pos;
    Vec2 jammer_pos;
    Vec3 uav_pos;          // altitude > 0
    double cell_radius = 200.0;
};

// Distance-power law with log-normal shadowing around the mean.
struct LinkParams {
    double mean_db_at_ref = -30.0;
    double pathloss_exp = 2.0;     // in [1.5, 6]
    double shadow_sigma_db = 0.0;  // in [0, 12]
    double ref_dist = 1.0;         // meters, > 0
};

// Per-link parameter set, indexed like ChannelGains.
struct LinkModel {
    LinkParams user_bs0;
    LinkParams user_uav;
    LinkParams jammer_bs0;
    LinkParams jammer_uav;
    LinkParams uav_bs1;
};

// Linear power gains of the five links, constant within one slot.
struct ChannelGains {
    double h1 = 0.0;  // user -> BS0
    double h2 = 0.0;  // user -> UAV
    double h3 = 0.0;  // jammer -> BS0
    double h4 = 0.0;  // jammer -> UAV
    double h5 = 0.0;  // UAV -> BS1

    std::array<double, 5> as_array() const { return {h1, h2, h3, h4, h5}; }
};

// Random-waypoint state: head to the waypoint at the drawn speed, then draw
// a fresh uniform waypoint in the disc and a fresh uniform speed.
struct MobilityState {
    Vec2 position;
    Vec2 waypoint;
    double speed = 0.0;  // m/s
};

struct SpeedRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Uniform point in the disc of given radius around `center`.
Vec2 uniform_in_disc(const Vec2& center, double radius, RandomStream& stream);

// One mobility step of duration dt around disc center `center`.
// Throws std::domain_error if dt <= 0.
MobilityState step_random_waypoint(const MobilityState& state, const Vec2& center,
                                   double cell_radius, const SpeedRange& speed,
                                   double dt, RandomStream& stream);

// Sample the five gains from geometry. Distances clamp at 1 m. Draw order is
// fixed (h1..h5) so traces replay.
ChannelGains gains_from_geometry(const Geometry& geom, const LinkModel& links,
                                 RandomStream& stream);

// What the UAV believes about slot `slot_of_origin`.
struct UavObservation {
    std::array<double, 5> est_gains{};  // clamped positive
    double est_jam_power = 0.0;         // mW, clamped to [0, max_jam_mw]
    int slot_of_origin = 0;
};

enum class ObsCase { Ideal, NoisyDelayed };

// Observation model: Case 1 reports slot k-1 exactly; Case 2 reports slot
// k-2 with N(0, noise_sigma^2) added per component on its normalized [0,1]
// scale, then clamped. gain_norm / max_jam_mw set those scales.
struct ObservationModel {
    ObsCase obs_case = ObsCase::Ideal;
    double noise_sigma = 0.0;
    double gain_norm = 1.0;   // linear gain mapped to 1.0
    double max_jam_mw = 80.0;
};

// Build the UAV's observation for slot k from the true per-slot histories
// (index i holds slot i+1). Returns nullopt when the origin slot does not
// exist yet (cold start); the caller substitutes mid-scale neutral values.
std::optional<UavObservation> observe(const std::vector<ChannelGains>& gain_history,
                                      const std::vector<double>& jam_history, int k,
                                      const ObservationModel& model,
                                      RandomStream& stream);

}  // namespace aegis
