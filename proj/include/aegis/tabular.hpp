// Tabular Q-learning and policy-hill-climbing primitives shared by the
// smart jammer and the benchmark relay agents.

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "aegis/numerics.hpp"

namespace aegis {

using StateKey = std::int64_t;

// Uniform per-feature binning onto a single integer key. Inputs outside
// [lo, hi] land in the edge bins, so every input maps to exactly one key.
class Discretizer {
public:
    struct Feature {
        double lo = 0.0;
        double hi = 1.0;
        int bins = 1;
    };

    Discretizer() = default;
    explicit Discretizer(std::vector<Feature> features);

    StateKey key(const std::vector<double>& values) const;
    int bin(std::size_t feature, double value) const;
    std::size_t feature_count() const { return features_.size(); }

private:
    std::vector<Feature> features_;
};

// Q-values keyed by state; missing rows read as all-zero. Entries stay
// finite by construction of q_update.
class QTable {
public:
    explicit QTable(int action_count) : actions_(action_count) {}

    int action_count() const { return actions_; }
    double value(StateKey s, int a) const;
    const std::vector<double>& row(StateKey s) const;  // zeros if absent
    double max_value(StateKey s) const;
    int argmax(StateKey s) const;  // lowest index on ties
    void set(StateKey s, int a, double v);
    std::size_t state_count() const { return table_.size(); }
    const std::unordered_map<StateKey, std::vector<double>>& raw() const { return table_; }
    void assign_row(StateKey s, std::vector<double> row);

private:
    int actions_;
    std::unordered_map<StateKey, std::vector<double>> table_;
    std::vector<double> zeros_ = {};
    mutable std::vector<double> scratch_;
};

// Per-state mixed policy over A actions; rows default to uniform.
class MixedPolicy {
public:
    explicit MixedPolicy(int action_count) : actions_(action_count) {}

    int action_count() const { return actions_; }
    const std::vector<double>& row(StateKey s) const;  // uniform if absent
    std::vector<double>& mutable_row(StateKey s);
    int sample(StateKey s, RandomStream& stream) const;
    std::size_t state_count() const { return rows_.size(); }
    const std::unordered_map<StateKey, std::vector<double>>& raw() const { return rows_; }
    void assign_row(StateKey s, std::vector<double> row);

private:
    int actions_;
    std::unordered_map<StateKey, std::vector<double>> rows_;
    mutable std::vector<double> uniform_;
};

// Q(s,a) <- (1-alpha) Q(s,a) + alpha (reward + gamma max_b Q(s',b)).
// Requires alpha in (0,1], gamma in [0,1).
void q_update(QTable& table, StateKey s, int a, double reward, StateKey s_next,
              double alpha, double gamma);

// Greedy with probability 1-eps (lowest index on ties), else uniform over
// all actions. Always consumes the explore draw, plus one more when
// exploring. Throws std::invalid_argument on an empty value list.
int epsilon_greedy(const std::vector<double>& values, double eps, RandomStream& stream);

// Move delta probability mass toward the table's greedy action in state s:
// greedy += delta (capped at 1), others -= delta/(A-1) (floored at 0), then
// the non-greedy entries are rescaled so the row sums to one. The greedy
// entry is never changed by the rescale.
void phc_update(MixedPolicy& policy, const QTable& table, StateKey s, double delta);

// Table persistence, header magic "UAVT", version 1. kind 0 stores a lone
// QTable, kind 1 a QTable plus a MixedPolicy over the same action count.
void save_qtable(const QTable& table, const std::string& path);
void save_qtable_policy(const QTable& table, const MixedPolicy& policy,
                        const std::string& path);
QTable load_qtable(const std::string& path);
std::pair<QTable, MixedPolicy> load_qtable_policy(const std::string& path);

}  // namespace aegis
