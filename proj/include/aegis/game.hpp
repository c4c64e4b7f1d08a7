// The per-slot event loop binding mobility, channel, PHY and both learners
// into episodes, with full trace logging, multi-seed batches, and the
// transfer-learning pretrainer (hotboot).

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aegis/agents.hpp"
#include "aegis/phy.hpp"
#include "aegis/scenario.hpp"

namespace aegis {

struct SlotRecord {
    int slot = 0;
    double x_mw = 0.0;
    double y_mw = 0.0;
    double rho1 = 0.5, rho2 = 0.5, rho3 = 0.5;
    double pe = 0.5;
    double u_uav = 0.0;
    double u_jam = 0.0;
    double energy_mj = 0.0;
    double eps = 0.0;  // UAV epsilon in force
    ChannelGains h;
};

struct Trace {
    std::string config_digest;
    std::vector<SlotRecord> records;
    std::string weights_digest;  // digest of the final agent artifacts
};

// CSV with header slot,x_mW,y_mW,rho1,rho2,rho3,pe,u_uav,u_jam,energy_mJ,
// eps,h1,h2,h3,h4,h5; floats as shortest round-trip decimals.
std::string trace_to_csv(const Trace& trace);

// Learned artifacts carried into a run (hotboot) or out of pretraining.
struct AgentArtifacts {
    std::optional<CnnWeights> weights;                       // drlur
    std::optional<std::pair<QTable, MixedPolicy>> tables;    // hpur
    std::optional<QTable> qtable;                            // qlearn
};

// One simulation world. Owns channel state, both agents and all random
// streams; an external UAV agent may be supplied (used by the pretrainer to
// carry one agent across scenarios).
class World {
public:
    explicit World(const ScenarioConfig& cfg, UavAgent* external_uav = nullptr,
                   const AgentArtifacts* warm = nullptr);

    SlotRecord run_slot();
    int slot() const { return k_; }
    const UavAgent& uav() const { return *uav_; }
    const Jammer& jammer() const { return *jammer_; }
    // The observation the relay saw this slot (raw scale); for tests.
    const UavObservation& last_uav_observation() const { return last_obs_; }

private:
    UavObservation neutral_observation() const;
    UavObservation next_observation();

    ScenarioConfig cfg_;
    RandomStream root_, mobility_stream_, channel_stream_, obs_stream_,
        jammer_stream_, uav_stream_;
    std::unique_ptr<UavAgent> owned_uav_;
    UavAgent* uav_ = nullptr;
    std::unique_ptr<Jammer> jammer_;
    MobilityState mob_;
    Geometry geom_;
    std::vector<ChannelGains> gain_hist_;
    std::vector<double> jam_hist_;
    std::vector<double> x_hist_;
    std::vector<BerVector> rho_hist_;
    std::optional<UavObservation> stashed_obs_;
    UavObservation last_obs_;
    int k_ = 0;
};

// Validates, runs run.slots slots, returns the full trace. Throws
// ConfigError before any slot runs on an inconsistent config and
// NumericError if a non-finite value shows up in a record.
Trace run_episode(const ScenarioConfig& cfg, const AgentArtifacts* warm = nullptr);

// Independent runs over distinct seeds (ConfigError on duplicates).
// max_threads <= 0 picks hardware concurrency capped by AEGIS_THREADS.
// Results are in seed order regardless of execution interleaving.
std::vector<Trace> run_batch(const ScenarioConfig& cfg,
                             std::span<const std::uint64_t> seeds,
                             int max_threads = 0);

int resolve_thread_cap(int requested);

// Pretraining: gamma_scenarios perturbed episodes of `slots` slots each
// (channel means jittered +-3 dB, geometry positions +-10%), training one
// fresh agent across them sequentially. gamma_scenarios < 1 falls back to
// fresh initialization with a warning on stderr. When store_dir is
// non-empty the artifacts are persisted there as
// <kind>-<scenario_hash>.uavq/.uavt.
AgentArtifacts hotboot(const ScenarioConfig& base, int gamma_scenarios, int slots,
                       std::uint64_t seed, const std::string& store_dir = "");

// Load the artifacts for cfg's agent kind from a hotboot store directory.
// Throws IoError when the expected file is missing.
AgentArtifacts load_hotboot(const ScenarioConfig& cfg, const std::string& store_dir);

std::string hotboot_file_name(const ScenarioConfig& cfg);

std::string digest_artifacts(const AgentArtifacts& a);

}  // namespace aegis
