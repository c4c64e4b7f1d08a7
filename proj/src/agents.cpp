#include "aegis/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aegis {

int ActionGrid::nearest_index(double mw) const {
    const int i = static_cast<int>(std::lround(mw / step()));
    return std::clamp(i, 0, levels - 1);
}

UavState make_uav_state(const std::array<double, 3>& rho_prev,
                        const UavObservation& obs, const FeatureScales& scales) {
    UavState s;
    s.rho_prev = rho_prev;
    for (int i = 0; i < 5; ++i) {
        s.gains_norm[i] = std::clamp(obs.est_gains[i] / scales.gain_norm, 0.0, 1.0);
    }
    s.jam_norm = std::clamp(obs.est_jam_power / scales.max_jam_mw, 0.0, 1.0);
    return s;
}

std::vector<double> build_sequence_matrix(std::span<const UavState> states,
                                          std::span<const double> actions_norm,
                                          int seq_len, int input_side) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(input_side) * input_side);

    const std::size_t m = std::min<std::size_t>(states.size(), seq_len);
    const std::size_t s0 = states.size() - m;
    // Actions between the selected states: the action taken after state i
    // sits at the same history index i.
    for (std::size_t i = 0; i < m; ++i) {
        const auto f = states[s0 + i].flat();
        flat.insert(flat.end(), f.begin(), f.end());
        if (i + 1 < m) flat.push_back(actions_norm[s0 + i]);
    }
    flat.resize(static_cast<std::size_t>(input_side) * input_side, 0.0);
    return flat;
}

double EpsSchedule::at(int slot) const {
    if (slot <= decay_slots) {
        if (decay_slots <= 1) return end;
        const double t = static_cast<double>(slot - 1) / (decay_slots - 1);
        return start + t * (end - start);
    }
    if (zero_start <= 0 || slot <= zero_start) return end;
    if (slot >= zero_end) return 0.0;
    const double t = static_cast<double>(slot - zero_start) / (zero_end - zero_start);
    return end * (1.0 - t);
}

void ReplayPool::push(Experience e) {
    pool_.push_back(std::move(e));
    while (pool_.size() > capacity_) pool_.pop_front();
}

DrlurAgent::DrlurAgent(DrlurConfig cfg, ActionGrid grid, FeatureScales scales,
                       RandomStream& init_stream)
    : cfg_(cfg), grid_(grid), scales_(scales),
      weights_(init_weights(cfg.arch, init_stream)), pool_(cfg.replay_capacity) {
    if (grid_.levels != cfg_.arch.outputs) {
        throw std::invalid_argument("DrlurAgent: grid size != CNN output width");
    }
    if (cfg_.target_sync > 0) {
        target_ = weights_;
        use_target_ = true;
    }
}

DrlurAgent::DrlurAgent(DrlurConfig cfg, ActionGrid grid, FeatureScales scales,
                       CnnWeights warm_start)
    : cfg_(cfg), grid_(grid), scales_(scales), weights_(std::move(warm_start)),
      pool_(cfg.replay_capacity) {
    if (grid_.levels != cfg_.arch.outputs) {
        throw std::invalid_argument("DrlurAgent: grid size != CNN output width");
    }
    if (weights_.data.size() != cfg_.arch.param_count()) {
        throw std::invalid_argument("DrlurAgent: warm-start shape mismatch");
    }
    if (cfg_.target_sync > 0) {
        target_ = weights_;
        use_target_ = true;
    }
}

std::vector<double> DrlurAgent::sequence_now() const {
    return build_sequence_matrix(states_, actions_norm_, cfg_.seq_len,
                                 cfg_.arch.input_side);
}

std::vector<double> DrlurAgent::sequence_with(const UavState& next_state) const {
    std::vector<UavState> ext(states_.begin(), states_.end());
    ext.push_back(next_state);
    return build_sequence_matrix(ext, actions_norm_, cfg_.seq_len,
                                 cfg_.arch.input_side);
}

void DrlurAgent::trim_history() {
    // Only the trailing window feeds the sequence matrix.
    const std::size_t keep = static_cast<std::size_t>(4) * cfg_.seq_len;
    if (states_.size() > keep) {
        const std::size_t drop = states_.size() - cfg_.seq_len;
        states_.erase(states_.begin(), states_.begin() + drop);
        actions_norm_.erase(actions_norm_.begin(), actions_norm_.begin() + drop);
    }
}

std::vector<double> DrlurAgent::q_values(std::span<const double> seq_matrix) const {
    return forward(cfg_.arch, weights_, seq_matrix);
}

double DrlurAgent::act(const UavInputs& in, double eps, RandomStream& stream) {
    ++slot_count_;
    states_.push_back(make_uav_state(in.rho_prev, in.obs, scales_));
    trim_history();
    pending_seq_ = sequence_now();

    int idx;
    if (slot_count_ <= cfg_.seq_len) {
        idx = static_cast<int>(stream.uniform_index(grid_.levels));
    } else {
        forward_ws(cfg_.arch, weights_, pending_seq_, fwd_ws_);
        idx = epsilon_greedy(fwd_ws_.q, eps, stream);
    }
    pending_action_ = idx;
    pending_ = true;
    actions_norm_.push_back(grid_.normalized(idx));
    return grid_.value(idx);
}

void DrlurAgent::learn(const UavFeedback& fb, RandomStream& stream) {
    if (!pending_) throw std::logic_error("DrlurAgent::learn before act");
    pending_ = false;

    const UavState next_state = make_uav_state(fb.next_rho, fb.next_obs, scales_);
    Experience e;
    e.seq = std::move(pending_seq_);
    e.action = pending_action_;
    e.utility = fb.utility;
    e.next_seq = sequence_with(next_state);
    pool_.push(std::move(e));

    // Uniform sampling with replacement from whatever the pool holds.
    const CnnWeights& bootstrap = use_target_ ? target_ : weights_;
    std::vector<TrainSample> batch(cfg_.batch);
    for (int m = 0; m < cfg_.batch; ++m) {
        const Experience& ex = pool_.at(stream.uniform_index(pool_.size()));
        forward_ws(cfg_.arch, bootstrap, ex.next_seq, fwd_ws_);
        const double target =
            ex.utility +
            cfg_.gamma * *std::max_element(fwd_ws_.q.begin(), fwd_ws_.q.end());
        batch[m] = TrainSample{ex.seq, ex.action, target};
    }
    last_loss_ = loss_and_gradients(cfg_.arch, weights_, batch, grads_, ws_);
    sgd_step(weights_, grads_, cfg_.learning_rate);

    if (use_target_ && ++since_sync_ >= cfg_.target_sync) {
        target_ = weights_;
        since_sync_ = 0;
    }
}

void DrlurAgent::reset_episode() {
    states_.clear();
    actions_norm_.clear();
    slot_count_ = 0;
    pending_ = false;
}

namespace {

Discretizer rho_discretizer(int bins) {
    return Discretizer({{0.0, 0.5, bins}, {0.0, 0.5, bins}, {0.0, 0.5, bins}});
}

}  // namespace

HpurAgent::HpurAgent(TabularUavConfig cfg, ActionGrid grid)
    : cfg_(cfg), grid_(grid), disc_(rho_discretizer(cfg.rho_bins)),
      table_(grid.levels), policy_(grid.levels) {}

HpurAgent::HpurAgent(TabularUavConfig cfg, ActionGrid grid, QTable table,
                     MixedPolicy policy)
    : cfg_(cfg), grid_(grid), disc_(rho_discretizer(cfg.rho_bins)),
      table_(std::move(table)), policy_(std::move(policy)) {
    if (table_.action_count() != grid.levels || policy_.action_count() != grid.levels) {
        throw std::invalid_argument("HpurAgent: table action count mismatch");
    }
}

StateKey HpurAgent::state_key(const std::array<double, 3>& rho) const {
    return disc_.key({rho[0], rho[1], rho[2]});
}

double HpurAgent::act(const UavInputs& in, double, RandomStream& stream) {
    pending_key_ = state_key(in.rho_prev);
    pending_action_ = policy_.sample(pending_key_, stream);
    pending_ = true;
    return grid_.value(pending_action_);
}

void HpurAgent::learn(const UavFeedback& fb, RandomStream&) {
    if (!pending_) throw std::logic_error("HpurAgent::learn before act");
    pending_ = false;
    const StateKey next = state_key(fb.next_rho);
    q_update(table_, pending_key_, pending_action_, fb.utility, next, cfg_.alpha,
             cfg_.gamma);
    phc_update(policy_, table_, pending_key_, cfg_.delta);
}

void HpurAgent::reset_episode() { pending_ = false; }

QlearnAgent::QlearnAgent(TabularUavConfig cfg, ActionGrid grid)
    : cfg_(cfg), grid_(grid), disc_(rho_discretizer(cfg.rho_bins)),
      table_(grid.levels) {}

QlearnAgent::QlearnAgent(TabularUavConfig cfg, ActionGrid grid, QTable table)
    : cfg_(cfg), grid_(grid), disc_(rho_discretizer(cfg.rho_bins)),
      table_(std::move(table)) {
    if (table_.action_count() != grid.levels) {
        throw std::invalid_argument("QlearnAgent: table action count mismatch");
    }
}

StateKey QlearnAgent::state_key(const std::array<double, 3>& rho) const {
    return disc_.key({rho[0], rho[1], rho[2]});
}

double QlearnAgent::act(const UavInputs& in, double eps, RandomStream& stream) {
    pending_key_ = state_key(in.rho_prev);
    pending_action_ = epsilon_greedy(table_.row(pending_key_), eps, stream);
    pending_ = true;
    return grid_.value(pending_action_);
}

void QlearnAgent::learn(const UavFeedback& fb, RandomStream&) {
    if (!pending_) throw std::logic_error("QlearnAgent::learn before act");
    pending_ = false;
    const StateKey next = state_key(fb.next_rho);
    q_update(table_, pending_key_, pending_action_, fb.utility, next, cfg_.alpha,
             cfg_.gamma);
}

void QlearnAgent::reset_episode() { pending_ = false; }

FixedAgent::FixedAgent(double mw, ActionGrid grid)
    : grid_(grid), mw_(grid.value(grid.nearest_index(mw))) {}

StaticJammer::StaticJammer(double mw, ActionGrid grid)
    : grid_(grid), mw_(grid.value(grid.nearest_index(mw))) {}

ReactiveJammer::ReactiveJammer(double mw, ActionGrid grid)
    : grid_(grid), mw_(grid.value(grid.nearest_index(mw))) {}

SmartJammer::SmartJammer(SmartJammerConfig cfg, ActionGrid grid)
    : cfg_(cfg), grid_(grid), disc_({{0.0, 0.5, cfg.rho_bins}}),
      table_(grid.levels) {}

double SmartJammer::act(double rho1_prev, bool, double eps, RandomStream& stream) {
    pending_key_ = disc_.key({rho1_prev});
    pending_action_ = epsilon_greedy(table_.row(pending_key_), eps, stream);
    pending_ = true;
    return grid_.value(pending_action_);
}

void SmartJammer::learn(double jam_utility, double rho1_next) {
    if (!pending_) return;
    pending_ = false;
    const StateKey next = disc_.key({rho1_next});
    q_update(table_, pending_key_, pending_action_, jam_utility, next, cfg_.alpha,
             cfg_.gamma);
}

}  // namespace aegis
