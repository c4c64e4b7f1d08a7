// Scenario files: line-based `section.key = value` text with sections
// radio, channel, uav, jammer, run. Unknown keys are rejected; every key
// has a default. Parsing yields an immutable, validated ScenarioConfig.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "aegis/agents.hpp"
#include "aegis/channel.hpp"
#include "aegis/phy.hpp"

namespace aegis {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ChannelMode { Abstract, Geometry };
enum class UavKind { Drlur, Hpur, Qlearn, Fixed };
enum class JammerKind { Static, Reactive, Smart };

struct ChannelConfig {
    ChannelMode mode = ChannelMode::Abstract;

    // Abstract mode: per-link dB means and shadowing sigmas (h1..h5).
    std::array<double, 5> mean_db{-17.0, -17.0, -40.0, -20.0, -40.0};
    std::array<double, 5> sigma_db{0.0, 0.0, 0.0, 0.0, 0.0};

    // Geometry mode.
    Geometry geometry{{0.0, 100.0}, {0.0, 0.0}, {400.0, 0.0}, {30.0, 0.0},
                      {200.0, 50.0, 100.0}, 200.0};
    LinkParams ground{-30.0, 3.0, 6.0, 1.0};   // h1, h3
    LinkParams uav_link{-30.0, 2.05, 3.0, 1.0};  // h2, h4, h5
    bool mobility = false;
    SpeedRange speed{1.0, 10.0};
    double dt_s = 1.0;

    // Observation model.
    ObsCase obs_case = ObsCase::Ideal;
    double obs_noise_sigma = 1.5;
    double gain_norm = 1.0;
};

struct UavConfig {
    UavKind kind = UavKind::Drlur;
    double fixed_mw = 0.0;
    // Deep agent.
    int seq_len = 13;
    int batch = 16;
    double gamma = 0.95;
    double learning_rate = 0.01;
    std::uint64_t replay_capacity = 10000;
    int target_sync = 0;
    // Tabular agents.
    double alpha = 0.1;
    double tab_gamma = 0.95;
    double delta = 0.01;
    int rho_bins = 5;
    EpsSchedule eps{};
};

struct JammerConfig {
    JammerKind kind = JammerKind::Static;
    double static_mw = 0.0;
    double reactive_mw = 80.0;
    double alpha = 0.1;
    double gamma = 0.95;
    int rho_bins = 10;
    EpsSchedule eps{};
};

struct RunConfig {
    int slots = 2000;
    std::uint64_t seed = 1;
    int window = 50;
};

struct ScenarioConfig {
    RadioConfig radio;
    ChannelConfig channel;
    UavConfig uav;
    JammerConfig jammer;
    RunConfig run;

    ActionGrid uav_grid() const { return ActionGrid::uav(radio.max_uav_mw); }
    ActionGrid jammer_grid() const { return ActionGrid::jammer(radio.max_jam_mw); }
    ObservationModel observation_model() const {
        return {channel.obs_case, channel.obs_noise_sigma, channel.gain_norm,
                radio.max_jam_mw};
    }
    FeatureScales feature_scales() const {
        return {channel.gain_norm, radio.max_jam_mw};
    }
};

// Parse + validate. Throws ConfigError with a line reference on unknown
// keys, malformed lines or invalid values.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

// Consistency checks independent of parsing (also run on programmatic
// configs). Throws ConfigError.
void validate(const ScenarioConfig& cfg);

// Canonical text: every key with its resolved value, sorted, one per line.
std::string canonical_text(const ScenarioConfig& cfg);

// Digest over the full canonical text (identifies a run configuration).
std::string config_digest(const ScenarioConfig& cfg);

// Digest over radio+channel+uav+jammer only (identifies a scenario for the
// hotboot store, independent of seed / slot count).
std::string scenario_hash(const ScenarioConfig& cfg);

// Shortest round-trip decimal formatting (via std::to_chars).
std::string format_double(double v);

// Write-temp-then-rename; never leaves a partial file at `path`.
void write_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

std::string to_string(UavKind k);
std::string to_string(JammerKind k);
UavKind uav_kind_from(const std::string& s);

}  // namespace aegis
