#include "aegis/tabular.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace aegis {

Discretizer::Discretizer(std::vector<Feature> features)
    : features_(std::move(features)) {
    for (const auto& f : features_) {
        if (f.bins < 1 || !(f.hi > f.lo)) {
            throw std::invalid_argument("Discretizer: bad feature spec");
        }
    }
}

int Discretizer::bin(std::size_t feature, double value) const {
    const Feature& f = features_.at(feature);
    const double t = (value - f.lo) / (f.hi - f.lo);
    const int b = static_cast<int>(std::floor(t * f.bins));
    return std::clamp(b, 0, f.bins - 1);
}

StateKey Discretizer::key(const std::vector<double>& values) const {
    if (values.size() != features_.size()) {
        throw std::invalid_argument("Discretizer: feature count mismatch");
    }
    StateKey k = 0;
    for (std::size_t i = 0; i < features_.size(); ++i) {
        k = k * features_[i].bins + bin(i, values[i]);
    }
    return k;
}

double QTable::value(StateKey s, int a) const {
    auto it = table_.find(s);
    return it == table_.end() ? 0.0 : it->second.at(a);
}

const std::vector<double>& QTable::row(StateKey s) const {
    auto it = table_.find(s);
    if (it != table_.end()) return it->second;
    scratch_.assign(actions_, 0.0);
    return scratch_;
}

double QTable::max_value(StateKey s) const {
    auto it = table_.find(s);
    if (it == table_.end()) return 0.0;
    return *std::max_element(it->second.begin(), it->second.end());
}

int QTable::argmax(StateKey s) const {
    auto it = table_.find(s);
    if (it == table_.end()) return 0;
    return static_cast<int>(std::max_element(it->second.begin(), it->second.end()) -
                            it->second.begin());
}

void QTable::set(StateKey s, int a, double v) {
    auto it = table_.find(s);
    if (it == table_.end()) {
        it = table_.emplace(s, std::vector<double>(actions_, 0.0)).first;
    }
    it->second.at(a) = v;
}

void QTable::assign_row(StateKey s, std::vector<double> row) {
    if (static_cast<int>(row.size()) != actions_) {
        throw std::invalid_argument("QTable: row size mismatch");
    }
    table_[s] = std::move(row);
}

const std::vector<double>& MixedPolicy::row(StateKey s) const {
    auto it = rows_.find(s);
    if (it != rows_.end()) return it->second;
    uniform_.assign(actions_, 1.0 / actions_);
    return uniform_;
}

std::vector<double>& MixedPolicy::mutable_row(StateKey s) {
    auto it = rows_.find(s);
    if (it == rows_.end()) {
        it = rows_.emplace(s, std::vector<double>(actions_, 1.0 / actions_)).first;
    }
    return it->second;
}

int MixedPolicy::sample(StateKey s, RandomStream& stream) const {
    const std::vector<double>& p = row(s);
    double u = stream.uniform01();
    for (int a = 0; a < actions_; ++a) {
        u -= p[a];
        if (u < 0.0) return a;
    }
    return actions_ - 1;  // guard against rounding at the top end
}

void MixedPolicy::assign_row(StateKey s, std::vector<double> row) {
    if (static_cast<int>(row.size()) != actions_) {
        throw std::invalid_argument("MixedPolicy: row size mismatch");
    }
    rows_[s] = std::move(row);
}

void q_update(QTable& table, StateKey s, int a, double reward, StateKey s_next,
              double alpha, double gamma) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("q_update: alpha");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::domain_error("q_update: gamma");
    const double target = reward + gamma * table.max_value(s_next);
    table.set(s, a, (1.0 - alpha) * table.value(s, a) + alpha * target);
}

int epsilon_greedy(const std::vector<double>& values, double eps, RandomStream& stream) {
    if (values.empty()) throw std::invalid_argument("epsilon_greedy: empty values");
    const bool explore = stream.uniform01() < eps;
    if (explore) {
        return static_cast<int>(stream.uniform_index(values.size()));
    }
    return static_cast<int>(std::max_element(values.begin(), values.end()) -
                            values.begin());
}

void phc_update(MixedPolicy& policy, const QTable& table, StateKey s, double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::domain_error("phc_update: delta");
    const int A = policy.action_count();
    const int greedy = table.argmax(s);
    std::vector<double>& p = policy.mutable_row(s);

    p[greedy] = std::min(1.0, p[greedy] + delta);
    const double cut = A > 1 ? delta / (A - 1) : 0.0;
    double rest = 0.0;
    for (int a = 0; a < A; ++a) {
        if (a == greedy) continue;
        p[a] = std::max(0.0, p[a] - cut);
        rest += p[a];
    }
    // Rescale the non-greedy mass to 1 - p[greedy].
    const double want = 1.0 - p[greedy];
    if (rest > 0.0) {
        const double scale = want / rest;
        for (int a = 0; a < A; ++a) {
            if (a != greedy) p[a] *= scale;
        }
    } else {
        p[greedy] = 1.0;
    }
}

namespace {

constexpr char kMagic[4] = {'U', 'A', 'V', 'T'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::ofstream& out, std::uint16_t v) {
    const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                                static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ofstream& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint16_t get_u16(std::ifstream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint64_t get_u64(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::ifstream& in) { return std::bit_cast<double>(get_u64(in)); }

void write_map(std::ofstream& out, int actions,
               const std::unordered_map<StateKey, std::vector<double>>& map) {
    // Keys sorted so identical tables serialize to identical bytes.
    std::vector<StateKey> keys;
    keys.reserve(map.size());
    for (const auto& [k, v] : map) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    put_u64(out, keys.size());
    for (StateKey k : keys) {
        put_u64(out, static_cast<std::uint64_t>(k));
        const auto& row = map.at(k);
        for (int a = 0; a < actions; ++a) put_f64(out, row[a]);
    }
}

void save_tables(const QTable& table, const MixedPolicy* policy,
                 const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_qtable: cannot open " + path);
    out.write(kMagic, 4);
    put_u16(out, kVersion);
    put_u16(out, policy ? 1 : 0);
    put_u16(out, static_cast<std::uint16_t>(table.action_count()));
    write_map(out, table.action_count(), table.raw());
    if (policy) write_map(out, policy->action_count(), policy->raw());
    if (!out) throw std::runtime_error("save_qtable: write failed for " + path);
}

}  // namespace

void save_qtable(const QTable& table, const std::string& path) {
    save_tables(table, nullptr, path);
}

void save_qtable_policy(const QTable& table, const MixedPolicy& policy,
                        const std::string& path) {
    if (policy.action_count() != table.action_count()) {
        throw std::invalid_argument("save_qtable_policy: action count mismatch");
    }
    save_tables(table, &policy, path);
}

namespace {

std::pair<QTable, MixedPolicy> load_tables(const std::string& path, bool want_policy) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_qtable: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::invalid_argument("load_qtable: bad magic in " + path);
    }
    if (get_u16(in) != kVersion) {
        throw std::invalid_argument("load_qtable: unsupported version in " + path);
    }
    const std::uint16_t kind = get_u16(in);
    const int actions = get_u16(in);
    if (!in || actions < 1) {
        throw std::invalid_argument("load_qtable: invalid header in " + path);
    }
    if (want_policy && kind != 1) {
        throw std::invalid_argument("load_qtable: file has no policy: " + path);
    }

    QTable table(actions);
    const std::uint64_t n = get_u64(in);
    for (std::uint64_t i = 0; i < n; ++i) {
        const StateKey k = static_cast<StateKey>(get_u64(in));
        std::vector<double> row(actions);
        for (auto& v : row) v = get_f64(in);
        table.assign_row(k, std::move(row));
    }
    MixedPolicy policy(actions);
    if (kind == 1) {
        const std::uint64_t m = get_u64(in);
        for (std::uint64_t i = 0; i < m; ++i) {
            const StateKey k = static_cast<StateKey>(get_u64(in));
            std::vector<double> row(actions);
            for (auto& v : row) v = get_f64(in);
            policy.assign_row(k, std::move(row));
        }
    }
    if (!in) throw std::runtime_error("load_qtable: truncated file " + path);
    return {std::move(table), std::move(policy)};
}

}  // namespace

QTable load_qtable(const std::string& path) {
    return load_tables(path, false).first;
}

std::pair<QTable, MixedPolicy> load_qtable_policy(const std::string& path) {
    return load_tables(path, true);
}

}  // namespace aegis
