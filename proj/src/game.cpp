#include "aegis/game.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

namespace aegis {

namespace {

std::unique_ptr<Jammer> make_jammer(const ScenarioConfig& cfg) {
    const ActionGrid grid = cfg.jammer_grid();
    switch (cfg.jammer.kind) {
        case JammerKind::Static:
            return std::make_unique<StaticJammer>(cfg.jammer.static_mw, grid);
        case JammerKind::Reactive:
            return std::make_unique<ReactiveJammer>(cfg.jammer.reactive_mw, grid);
        case JammerKind::Smart:
            return std::make_unique<SmartJammer>(
                SmartJammerConfig{cfg.jammer.alpha, cfg.jammer.gamma, cfg.jammer.rho_bins},
                grid);
    }
    throw ConfigError("unknown jammer kind");
}

std::unique_ptr<UavAgent> make_uav(const ScenarioConfig& cfg, RandomStream& init_stream,
                                   const AgentArtifacts* warm) {
    const ActionGrid grid = cfg.uav_grid();
    const FeatureScales scales = cfg.feature_scales();
    switch (cfg.uav.kind) {
        case UavKind::Drlur: {
            DrlurConfig dc;
            dc.seq_len = cfg.uav.seq_len;
            dc.batch = cfg.uav.batch;
            dc.gamma = cfg.uav.gamma;
            dc.learning_rate = cfg.uav.learning_rate;
            dc.replay_capacity = cfg.uav.replay_capacity;
            dc.target_sync = cfg.uav.target_sync;
            if (warm && warm->weights) {
                return std::make_unique<DrlurAgent>(dc, grid, scales, *warm->weights);
            }
            return std::make_unique<DrlurAgent>(dc, grid, scales, init_stream);
        }
        case UavKind::Hpur: {
            TabularUavConfig tc{cfg.uav.alpha, cfg.uav.tab_gamma, cfg.uav.delta,
                                cfg.uav.rho_bins};
            if (warm && warm->tables) {
                return std::make_unique<HpurAgent>(tc, grid, warm->tables->first,
                                                   warm->tables->second);
            }
            return std::make_unique<HpurAgent>(tc, grid);
        }
        case UavKind::Qlearn: {
            TabularUavConfig tc{cfg.uav.alpha, cfg.uav.tab_gamma, cfg.uav.delta,
                                cfg.uav.rho_bins};
            if (warm && warm->qtable) {
                return std::make_unique<QlearnAgent>(tc, grid, *warm->qtable);
            }
            return std::make_unique<QlearnAgent>(tc, grid);
        }
        case UavKind::Fixed:
            return std::make_unique<FixedAgent>(cfg.uav.fixed_mw, grid);
    }
    throw ConfigError("unknown uav kind");
}

constexpr double kNeutralBer = 0.25;  // mid of the BER range [0, 0.5]

}  // namespace

World::World(const ScenarioConfig& cfg, UavAgent* external_uav,
             const AgentArtifacts* warm)
    : cfg_(cfg),
      root_(cfg.run.seed),
      mobility_stream_(root_.split("mobility")),
      channel_stream_(root_.split("channel")),
      obs_stream_(root_.split("observe")),
      jammer_stream_(root_.split("jammer")),
      uav_stream_(root_.split("uav")),
      geom_(cfg.channel.geometry) {
    validate(cfg_);
    if (external_uav) {
        uav_ = external_uav;
    } else {
        RandomStream init = root_.split("uav-init");
        owned_uav_ = make_uav(cfg_, init, warm);
        uav_ = owned_uav_.get();
    }
    jammer_ = make_jammer(cfg_);
    if (cfg_.channel.mode == ChannelMode::Geometry) {
        mob_.position = geom_.user_pos;
        mob_.waypoint = uniform_in_disc(geom_.bs0_pos, geom_.cell_radius, mobility_stream_);
        mob_.speed = mobility_stream_.uniform(cfg_.channel.speed.lo, cfg_.channel.speed.hi);
    }
    last_obs_ = neutral_observation();
}

UavObservation World::neutral_observation() const {
    UavObservation obs;
    for (auto& g : obs.est_gains) g = 0.5 * cfg_.channel.gain_norm;
    obs.est_jam_power = 0.5 * cfg_.radio.max_jam_mw;
    obs.slot_of_origin = 0;
    return obs;
}

UavObservation World::next_observation() {
    // Observation content for slot k_+1, computed once per slot boundary.
    auto obs = observe(gain_hist_, jam_hist_, k_ + 1, cfg_.observation_model(),
                       obs_stream_);
    return obs ? *obs : neutral_observation();
}

SlotRecord World::run_slot() {
    const int k = ++k_;

    // (1) mobility
    if (cfg_.channel.mode == ChannelMode::Geometry && cfg_.channel.mobility) {
        mob_ = step_random_waypoint(mob_, cfg_.channel.geometry.bs0_pos,
                                    geom_.cell_radius, cfg_.channel.speed,
                                    cfg_.channel.dt_s, mobility_stream_);
        geom_.user_pos = mob_.position;
    }

    // (2) true gains for this slot
    ChannelGains h;
    if (cfg_.channel.mode == ChannelMode::Abstract) {
        double* fields[5] = {&h.h1, &h.h2, &h.h3, &h.h4, &h.h5};
        for (int i = 0; i < 5; ++i) {
            *fields[i] = lognormal_db(channel_stream_, cfg_.channel.mean_db[i],
                                      cfg_.channel.sigma_db[i]);
        }
    } else {
        LinkModel links{cfg_.channel.ground, cfg_.channel.uav_link, cfg_.channel.ground,
                        cfg_.channel.uav_link, cfg_.channel.uav_link};
        h = gains_from_geometry(geom_, links, channel_stream_);
    }
    gain_hist_.push_back(h);

    // (3) jammer acts on slot k-1 information
    const double eps_j = cfg_.jammer.eps.at(k);
    const double rho1_prev = k >= 2 ? rho_hist_[k - 2].rho1 : kNeutralBer;
    const bool relayed_prev = k >= 2 && x_hist_[k - 2] > 0.0;
    const double y = jammer_->act(rho1_prev, relayed_prev, eps_j, jammer_stream_);
    jam_hist_.push_back(y);

    // (4) relay observes (delayed / noisy per case) and acts
    const double eps_u = cfg_.uav.eps.at(k);
    UavInputs in;
    in.slot = k;
    in.rho_prev = k >= 2 ? std::array<double, 3>{rho_hist_[k - 2].rho1,
                                                 rho_hist_[k - 2].rho2,
                                                 rho_hist_[k - 2].rho3}
                         : std::array<double, 3>{kNeutralBer, kNeutralBer, kNeutralBer};
    in.obs = stashed_obs_ ? *stashed_obs_ : neutral_observation();
    last_obs_ = in.obs;
    const double x = uav_->act(in, eps_u, uav_stream_);

    // (5) PHY truths for slot k
    const BerVector rho = ber_vector(cfg_.radio.user_power_mw, x, y, h, cfg_.radio.noise_mw);
    const double pe = message_ber(cfg_.radio.user_power_mw, x, y, h, cfg_.radio.noise_mw);
    const double uu = uav_utility(cfg_.radio.user_power_mw, x, y, h, cfg_.radio.noise_mw,
                                  cfg_.radio.relay_cost);
    const double uj = jammer_utility(uu, y, cfg_.radio.jam_cost);
    const double energy = slot_energy(cfg_.radio.user_power_mw, x, cfg_.radio.slot_s);
    rho_hist_.push_back(rho);
    x_hist_.push_back(x);

    // (6) learners update on the slot-k reward; the relay also receives the
    // observation that will form its next state.
    jammer_->learn(uj, rho.rho1);
    UavFeedback fb;
    fb.utility = uu;
    fb.next_rho = {rho.rho1, rho.rho2, rho.rho3};
    stashed_obs_ = next_observation();
    fb.next_obs = *stashed_obs_;
    uav_->learn(fb, uav_stream_);

    // (7) record
    SlotRecord rec;
    rec.slot = k;
    rec.x_mw = x;
    rec.y_mw = y;
    rec.rho1 = rho.rho1;
    rec.rho2 = rho.rho2;
    rec.rho3 = rho.rho3;
    rec.pe = pe;
    rec.u_uav = uu;
    rec.u_jam = uj;
    rec.energy_mj = energy;
    rec.eps = eps_u;
    rec.h = h;
    return rec;
}

namespace {

void check_finite(const SlotRecord& r) {
    const double fields[] = {r.x_mw, r.y_mw,      r.rho1, r.rho2, r.rho3, r.pe,
                             r.u_uav, r.u_jam,    r.energy_mj, r.eps,
                             r.h.h1, r.h.h2, r.h.h3, r.h.h4, r.h.h5};
    for (double f : fields) {
        if (!std::isfinite(f)) {
            throw NumericError("non-finite value in slot " + std::to_string(r.slot));
        }
    }
}

}  // namespace

Trace run_episode(const ScenarioConfig& cfg, const AgentArtifacts* warm) {
    validate(cfg);
    Trace trace;
    trace.config_digest = config_digest(cfg);
    World world(cfg, nullptr, warm);
    trace.records.reserve(cfg.run.slots);
    for (int k = 0; k < cfg.run.slots; ++k) {
        SlotRecord rec = world.run_slot();
        check_finite(rec);
        trace.records.push_back(rec);
    }
    // Digest of the final learned artifacts for reproducibility reports.
    if (cfg.uav.kind == UavKind::Drlur) {
        const auto& agent = static_cast<const DrlurAgent&>(world.uav());
        const auto& data = agent.weights().data;
        std::string_view bytes(reinterpret_cast<const char*>(data.data()),
                               data.size() * sizeof(double));
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(bytes)));
        trace.weights_digest = buf;
    }
    return trace;
}

std::string trace_to_csv(const Trace& trace) {
    std::string out =
        "slot,x_mW,y_mW,rho1,rho2,rho3,pe,u_uav,u_jam,energy_mJ,eps,h1,h2,h3,h4,h5\n";
    for (const SlotRecord& r : trace.records) {
        out += std::to_string(r.slot);
        for (double v : {r.x_mw, r.y_mw, r.rho1, r.rho2, r.rho3, r.pe, r.u_uav,
                         r.u_jam, r.energy_mj, r.eps, r.h.h1, r.h.h2, r.h.h3,
                         r.h.h4, r.h.h5}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

int resolve_thread_cap(int requested) {
    int cap = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (cap < 1) cap = 1;
    if (const char* env = std::getenv("AEGIS_THREADS")) {
        const int limit = std::atoi(env);
        if (limit >= 1) cap = std::min(cap, limit);
    }
    return cap;
}

std::vector<Trace> run_batch(const ScenarioConfig& cfg,
                             std::span<const std::uint64_t> seeds, int max_threads) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        for (std::size_t j = i + 1; j < seeds.size(); ++j) {
            if (seeds[i] == seeds[j]) {
                throw ConfigError("run_batch: duplicate seed " + std::to_string(seeds[i]));
            }
        }
    }
    validate(cfg);
    std::vector<Trace> traces(seeds.size());
    const int threads = std::min<int>(resolve_thread_cap(max_threads),
                                      static_cast<int>(seeds.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            ScenarioConfig cell = cfg;
            cell.run.seed = seeds[i];
            traces[i] = run_episode(cell);
        }
        return traces;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= seeds.size()) break;
                    ScenarioConfig cell = cfg;
                    cell.run.seed = seeds[i];
                    traces[i] = run_episode(cell);
                }
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return traces;
}

namespace {

ScenarioConfig jitter_scenario(const ScenarioConfig& base, RandomStream& stream) {
    ScenarioConfig cfg = base;
    if (cfg.channel.mode == ChannelMode::Abstract) {
        for (auto& m : cfg.channel.mean_db) m += stream.uniform(-3.0, 3.0);
    } else {
        cfg.channel.ground.mean_db_at_ref += stream.uniform(-3.0, 3.0);
        cfg.channel.uav_link.mean_db_at_ref += stream.uniform(-3.0, 3.0);
        auto jig = [&stream](double& v) { v *= 1.0 + stream.uniform(-0.1, 0.1); };
        Geometry& g = cfg.channel.geometry;
        jig(g.user_pos.x); jig(g.user_pos.y);
        jig(g.bs1_pos.x);  jig(g.bs1_pos.y);
        jig(g.jammer_pos.x); jig(g.jammer_pos.y);
        jig(g.uav_pos.x);  jig(g.uav_pos.y);  jig(g.uav_pos.z);
    }
    return cfg;
}

}  // namespace

std::string hotboot_file_name(const ScenarioConfig& cfg) {
    const std::string ext = cfg.uav.kind == UavKind::Drlur ? ".uavq" : ".uavt";
    return to_string(cfg.uav.kind) + "-" + scenario_hash(cfg) + ext;
}

AgentArtifacts hotboot(const ScenarioConfig& base, int gamma_scenarios, int slots,
                       std::uint64_t seed, const std::string& store_dir) {
    validate(base);
    RandomStream root(seed, "hotboot");
    RandomStream init = root.split("agent-init");
    RandomStream jitter = root.split("jitter");

    std::unique_ptr<UavAgent> agent = make_uav(base, init, nullptr);
    if (gamma_scenarios < 1) {
        std::cerr << "hotboot: gamma_scenarios < 1, falling back to fresh initialization\n";
    } else {
        for (int g = 0; g < gamma_scenarios; ++g) {
            ScenarioConfig cfg = jitter_scenario(base, jitter);
            cfg.run.slots = slots;
            cfg.run.seed = root.split("episode-" + std::to_string(g)).next_u64();
            // Tabular exploration defaults derive from the episode length.
            World world(cfg, agent.get());
            for (int k = 0; k < slots; ++k) world.run_slot();
            agent->reset_episode();
        }
    }

    AgentArtifacts out;
    switch (base.uav.kind) {
        case UavKind::Drlur:
            out.weights = static_cast<DrlurAgent*>(agent.get())->weights();
            break;
        case UavKind::Hpur: {
            auto* h = static_cast<HpurAgent*>(agent.get());
            out.tables = std::make_pair(h->table(), h->policy());
            break;
        }
        case UavKind::Qlearn:
            out.qtable = static_cast<QlearnAgent*>(agent.get())->table();
            break;
        case UavKind::Fixed:
            break;
    }

    if (!store_dir.empty()) {
        std::filesystem::create_directories(store_dir);
        const std::string path = store_dir + "/" + hotboot_file_name(base);
        if (out.weights) {
            CnnArchitecture arch;
            save_weights(*out.weights, arch, path);
        } else if (out.tables) {
            save_qtable_policy(out.tables->first, out.tables->second, path);
        } else if (out.qtable) {
            save_qtable(*out.qtable, path);
        }
    }
    return out;
}

AgentArtifacts load_hotboot(const ScenarioConfig& cfg, const std::string& store_dir) {
    const std::string path = store_dir + "/" + hotboot_file_name(cfg);
    if (!std::filesystem::exists(path)) {
        throw IoError("hotboot artifact not found: " + path);
    }
    AgentArtifacts out;
    switch (cfg.uav.kind) {
        case UavKind::Drlur: {
            CnnArchitecture arch;
            out.weights = load_weights(path, arch);
            break;
        }
        case UavKind::Hpur:
            out.tables = load_qtable_policy(path);
            break;
        case UavKind::Qlearn:
            out.qtable = load_qtable(path);
            break;
        case UavKind::Fixed:
            break;
    }
    return out;
}

std::string digest_artifacts(const AgentArtifacts& a) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::string_view bytes) {
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    if (a.weights) {
        mix(std::string_view(reinterpret_cast<const char*>(a.weights->data.data()),
                             a.weights->data.size() * sizeof(double)));
    }
    auto mix_map = [&](const std::unordered_map<StateKey, std::vector<double>>& m) {
        std::vector<StateKey> ks;
        for (const auto& [k, v] : m) ks.push_back(k);
        std::sort(ks.begin(), ks.end());
        for (StateKey k : ks) {
            mix(std::string_view(reinterpret_cast<const char*>(&k), sizeof(k)));
            const auto& row = m.at(k);
            mix(std::string_view(reinterpret_cast<const char*>(row.data()),
                                 row.size() * sizeof(double)));
        }
    };
    if (a.tables) {
        mix_map(a.tables->first.raw());
        mix_map(a.tables->second.raw());
    }
    if (a.qtable) mix_map(a.qtable->raw());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace aegis
