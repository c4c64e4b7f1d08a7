// Decision-making wrappers around the learning primitives: the deep-RL
// relay agent (CNN + experience replay), the PHC and Q-learning benchmark
// relays, a fixed-power relay, and the static / reactive / smart jammers.

#pragma once

#include <array>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aegis/channel.hpp"
#include "aegis/nn.hpp"
#include "aegis/tabular.hpp"

namespace aegis {

// Uniform power grid from 0 to max inclusive.
struct ActionGrid {
    double max_mw = 150.0;
    int levels = 31;

    double step() const { return max_mw / (levels - 1); }
    double value(int index) const { return index * step(); }
    double normalized(int index) const { return value(index) / max_mw; }
    int index_of_normalized(double a) const {
        return static_cast<int>(std::lround(a * (levels - 1)));
    }
    // Snap an arbitrary power to the nearest grid level.
    int nearest_index(double mw) const;

    static ActionGrid uav(double max_mw = 150.0) { return {max_mw, 31}; }
    static ActionGrid jammer(double max_mw = 80.0) { return {max_mw, 17}; }
};

// The nine-scalar observation the relay agents act on: previous BER vector,
// previous estimated gains (normalized to [0,1]) and previous estimated
// jamming power (normalized).
struct UavState {
    std::array<double, 3> rho_prev{0.25, 0.25, 0.25};
    std::array<double, 5> gains_norm{};
    double jam_norm = 0.0;

    std::array<double, 9> flat() const {
        return {rho_prev[0], rho_prev[1], rho_prev[2], gains_norm[0], gains_norm[1],
                gains_norm[2], gains_norm[3], gains_norm[4], jam_norm};
    }
};

// Scales mapping raw observations onto [0,1] features.
struct FeatureScales {
    double gain_norm = 1.0;
    double max_jam_mw = 80.0;
};

UavState make_uav_state(const std::array<double, 3>& rho_prev,
                        const UavObservation& obs, const FeatureScales& scales);

// The last seq_len states interleaved with the seq_len-1 normalized actions
// between them (s,a,s,...,a,s, oldest first), zero-padded to a square
// input_side x input_side matrix in row-major order. Histories shorter than
// the window are laid out from the front and zero-filled behind.
std::vector<double> build_sequence_matrix(std::span<const UavState> states,
                                          std::span<const double> actions_norm,
                                          int seq_len, int input_side);

// Epsilon schedule: linear start -> end over the first decay_slots, held at
// end until zero_start, annealed linearly to zero by zero_end, zero after.
// zero_start <= 0 disables the final anneal (constant tail).
struct EpsSchedule {
    double start = 0.9;
    double end = 0.01;
    int decay_slots = 1000;
    int zero_start = 1500;
    int zero_end = 1750;

    double at(int slot) const;
};

// Per-slot inputs handed to a relay agent by the event loop. Observation
// fields are raw-scale and already clamped; cold-start slots carry the
// neutral mid-scale values.
struct UavInputs {
    int slot = 1;
    std::array<double, 3> rho_prev{0.25, 0.25, 0.25};
    UavObservation obs;
};

struct UavFeedback {
    double utility = 0.0;
    std::array<double, 3> next_rho{0.25, 0.25, 0.25};
    UavObservation next_obs;
};

class UavAgent {
public:
    virtual ~UavAgent() = default;
    virtual double act(const UavInputs& in, double eps, RandomStream& stream) = 0;
    virtual void learn(const UavFeedback& fb, RandomStream& stream) = 0;
    // Clears per-episode histories; learned parameters survive.
    virtual void reset_episode() = 0;
    virtual std::string kind() const = 0;
    virtual const ActionGrid& grid() const = 0;
};

struct DrlurConfig {
    CnnArchitecture arch;
    int seq_len = 13;          // E
    int batch = 16;            // M
    double gamma = 0.95;
    double learning_rate = 0.01;
    std::size_t replay_capacity = 10000;
    int target_sync = 0;       // >0: frozen target copied every N slots
};

struct Experience {
    std::vector<double> seq;
    int action = 0;
    double utility = 0.0;
    std::vector<double> next_seq;
};

// Bounded FIFO of experiences, strictly oldest-first eviction.
class ReplayPool {
public:
    explicit ReplayPool(std::size_t capacity) : capacity_(capacity) {}
    void push(Experience e);
    std::size_t size() const { return pool_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Experience& at(std::size_t i) const { return pool_[i]; }

private:
    std::size_t capacity_;
    std::deque<Experience> pool_;
};

// Deep-RL relay agent: uniform-random play for the first E slots, then
// epsilon-greedy over the CNN's Q-values of the experience-sequence matrix.
// Each learn() appends the slot's experience, samples `batch` experiences
// with replacement and takes one SGD step on the MSE toward the bootstrap
// targets.
class DrlurAgent : public UavAgent {
public:
    DrlurAgent(DrlurConfig cfg, ActionGrid grid, FeatureScales scales,
               RandomStream& init_stream);
    DrlurAgent(DrlurConfig cfg, ActionGrid grid, FeatureScales scales,
               CnnWeights warm_start);

    double act(const UavInputs& in, double eps, RandomStream& stream) override;
    void learn(const UavFeedback& fb, RandomStream& stream) override;
    void reset_episode() override;
    std::string kind() const override { return "drlur"; }
    const ActionGrid& grid() const override { return grid_; }

    const CnnWeights& weights() const { return weights_; }
    const ReplayPool& pool() const { return pool_; }
    const DrlurConfig& config() const { return cfg_; }
    double last_loss() const { return last_loss_; }
    std::vector<double> q_values(std::span<const double> seq_matrix) const;

private:
    std::vector<double> sequence_now() const;
    std::vector<double> sequence_with(const UavState& next_state) const;
    void trim_history();

    DrlurConfig cfg_;
    ActionGrid grid_;
    FeatureScales scales_;
    CnnWeights weights_;
    CnnWeights target_;
    bool use_target_ = false;
    int since_sync_ = 0;
    ReplayPool pool_;
    CnnWorkspace ws_;
    CnnWorkspace fwd_ws_;
    CnnWeights grads_;
    std::vector<UavState> states_;
    std::vector<double> actions_norm_;
    int slot_count_ = 0;
    bool pending_ = false;
    std::vector<double> pending_seq_;
    int pending_action_ = 0;
    double last_loss_ = 0.0;
};

struct TabularUavConfig {
    double alpha = 0.1;
    double gamma = 0.95;
    double delta = 0.01;  // PHC step
    int rho_bins = 5;     // per BER component, over [0, 0.5]
};

// PHC relay: acts from its mixed policy at the discretized BER state, then
// q_update + phc_update on the reward.
class HpurAgent : public UavAgent {
public:
    HpurAgent(TabularUavConfig cfg, ActionGrid grid);
    HpurAgent(TabularUavConfig cfg, ActionGrid grid, QTable table, MixedPolicy policy);

    double act(const UavInputs& in, double eps, RandomStream& stream) override;
    void learn(const UavFeedback& fb, RandomStream& stream) override;
    void reset_episode() override;
    std::string kind() const override { return "hpur"; }
    const ActionGrid& grid() const override { return grid_; }

    const QTable& table() const { return table_; }
    const MixedPolicy& policy() const { return policy_; }

private:
    StateKey state_key(const std::array<double, 3>& rho) const;

    TabularUavConfig cfg_;
    ActionGrid grid_;
    Discretizer disc_;
    QTable table_;
    MixedPolicy policy_;
    bool pending_ = false;
    StateKey pending_key_ = 0;
    int pending_action_ = 0;
};

// Plain epsilon-greedy tabular Q-learning relay.
class QlearnAgent : public UavAgent {
public:
    QlearnAgent(TabularUavConfig cfg, ActionGrid grid);
    QlearnAgent(TabularUavConfig cfg, ActionGrid grid, QTable table);

    double act(const UavInputs& in, double eps, RandomStream& stream) override;
    void learn(const UavFeedback& fb, RandomStream& stream) override;
    void reset_episode() override;
    std::string kind() const override { return "qlearn"; }
    const ActionGrid& grid() const override { return grid_; }

    const QTable& table() const { return table_; }

private:
    StateKey state_key(const std::array<double, 3>& rho) const;

    TabularUavConfig cfg_;
    ActionGrid grid_;
    Discretizer disc_;
    QTable table_;
    bool pending_ = false;
    StateKey pending_key_ = 0;
    int pending_action_ = 0;
};

// Constant relay power, snapped to the grid.
class FixedAgent : public UavAgent {
public:
    FixedAgent(double mw, ActionGrid grid);
    double act(const UavInputs&, double, RandomStream&) override { return mw_; }
    void learn(const UavFeedback&, RandomStream&) override {}
    void reset_episode() override {}
    std::string kind() const override { return "fixed"; }
    const ActionGrid& grid() const override { return grid_; }

private:
    ActionGrid grid_;
    double mw_;
};

class Jammer {
public:
    virtual ~Jammer() = default;
    // rho1_prev / uav_relayed_prev describe slot k-1 (neutral on slot 1).
    virtual double act(double rho1_prev, bool uav_relayed_prev, double eps,
                       RandomStream& stream) = 0;
    virtual void learn(double jam_utility, double rho1_next) = 0;
    virtual void reset_episode() {}
    virtual std::string kind() const = 0;
    virtual const ActionGrid& grid() const = 0;
};

class StaticJammer : public Jammer {
public:
    StaticJammer(double mw, ActionGrid grid);
    double act(double, bool, double, RandomStream&) override { return mw_; }
    void learn(double, double) override {}
    std::string kind() const override { return "static"; }
    const ActionGrid& grid() const override { return grid_; }

private:
    ActionGrid grid_;
    double mw_;
};

// Jams at the configured level only when the relay transmitted last slot.
class ReactiveJammer : public Jammer {
public:
    ReactiveJammer(double mw, ActionGrid grid);
    double act(double, bool uav_relayed_prev, double, RandomStream&) override {
        return uav_relayed_prev ? mw_ : 0.0;
    }
    void learn(double, double) override {}
    std::string kind() const override { return "reactive"; }
    const ActionGrid& grid() const override { return grid_; }

private:
    ActionGrid grid_;
    double mw_;
};

struct SmartJammerConfig {
    double alpha = 0.1;
    double gamma = 0.95;
    int rho_bins = 10;  // previous-slot rho1 quantized over [0, 0.5]
};

// Q-learning jammer keyed by the binned BER of the previous slot.
class SmartJammer : public Jammer {
public:
    SmartJammer(SmartJammerConfig cfg, ActionGrid grid);

    double act(double rho1_prev, bool, double eps, RandomStream& stream) override;
    void learn(double jam_utility, double rho1_next) override;
    std::string kind() const override { return "smart"; }
    const ActionGrid& grid() const override { return grid_; }

    const QTable& table() const { return table_; }

private:
    SmartJammerConfig cfg_;
    ActionGrid grid_;
    Discretizer disc_;
    QTable table_;
    bool pending_ = false;
    StateKey pending_key_ = 0;
    int pending_action_ = 0;
};

}  // namespace aegis
