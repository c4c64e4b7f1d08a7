#include "aegis/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace aegis {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw NumericError("format_double failed");
    return std::string(buf, ptr);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for " + key + ": '" + v + "'");
    }
}

std::int64_t parse_int(const std::string& v, const std::string& key) {
    const double d = parse_number(v, key);
    const auto i = static_cast<std::int64_t>(d);
    if (static_cast<double>(i) != d) {
        throw ConfigError("expected integer for " + key + ": '" + v + "'");
    }
    return i;
}

// Key table: binds each documented key to its setter and its canonical
// printer so parsing and digesting cannot drift apart.
struct KeyBinding {
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

std::map<std::string, KeyBinding> key_table() {
    std::map<std::string, KeyBinding> t;
    auto bind_double = [&t](const std::string& key,
                            std::function<double&(ScenarioConfig&)> ref) {
        t[key] = {[ref, key](ScenarioConfig& c, const std::string& v) {
                      ref(c) = parse_number(v, key);
                  },
                  [ref](const ScenarioConfig& c) {
                      return format_double(ref(const_cast<ScenarioConfig&>(c)));
                  }};
    };
    auto bind_int = [&t](const std::string& key,
                         std::function<std::int64_t(ScenarioConfig&, bool, std::int64_t)> access) {
        t[key] = {[access, key](ScenarioConfig& c, const std::string& v) {
                      access(c, true, parse_int(v, key));
                  },
                  [access](const ScenarioConfig& c) {
                      auto& mut = const_cast<ScenarioConfig&>(c);
                      return std::to_string(access(mut, false, 0));
                  }};
    };

    // radio
    bind_double("radio.user_power_mw", [](ScenarioConfig& c) -> double& { return c.radio.user_power_mw; });
    bind_double("radio.noise_mw", [](ScenarioConfig& c) -> double& { return c.radio.noise_mw; });
    bind_double("radio.relay_cost", [](ScenarioConfig& c) -> double& { return c.radio.relay_cost; });
    bind_double("radio.jam_cost", [](ScenarioConfig& c) -> double& { return c.radio.jam_cost; });
    bind_double("radio.max_uav_mw", [](ScenarioConfig& c) -> double& { return c.radio.max_uav_mw; });
    bind_double("radio.max_jam_mw", [](ScenarioConfig& c) -> double& { return c.radio.max_jam_mw; });
    bind_double("radio.slot_s", [](ScenarioConfig& c) -> double& { return c.radio.slot_s; });

    // channel
    t["channel.mode"] = {
        [](ScenarioConfig& c, const std::string& v) {
            if (v == "abstract") c.channel.mode = ChannelMode::Abstract;
            else if (v == "geometry") c.channel.mode = ChannelMode::Geometry;
            else throw ConfigError("channel.mode must be abstract|geometry");
        },
        [](const ScenarioConfig& c) {
            return c.channel.mode == ChannelMode::Abstract ? "abstract" : "geometry";
        }};
    for (int i = 0; i < 5; ++i) {
        const std::string base = "channel.h" + std::to_string(i + 1);
        bind_double(base + "_mean_db",
                    [i](ScenarioConfig& c) -> double& { return c.channel.mean_db[i]; });
        bind_double(base + "_sigma_db",
                    [i](ScenarioConfig& c) -> double& { return c.channel.sigma_db[i]; });
    }
    bind_double("channel.user_x", [](ScenarioConfig& c) -> double& { return c.channel.geometry.user_pos.x; });
    bind_double("channel.user_y", [](ScenarioConfig& c) -> double& { return c.channel.geometry.user_pos.y; });
    bind_double("channel.bs0_x", [](ScenarioConfig& c) -> double& { return c.channel.geometry.bs0_pos.x; });
    bind_double("channel.bs0_y", [](ScenarioConfig& c) -> double& { return c.channel.geometry.bs0_pos.y; });
    bind_double("channel.bs1_x", [](ScenarioConfig& c) -> double& { return c.channel.geometry.bs1_pos.x; });
    bind_double("channel.bs1_y", [](ScenarioConfig& c) -> double& { return c.channel.geometry.bs1_pos.y; });
    bind_double("channel.jammer_x", [](ScenarioConfig& c) -> double& { return c.channel.geometry.jammer_pos.x; });
    bind_double("channel.jammer_y", [](ScenarioConfig& c) -> double& { return c.channel.geometry.jammer_pos.y; });
    bind_double("channel.uav_x", [](ScenarioConfig& c) -> double& { return c.channel.geometry.uav_pos.x; });
    bind_double("channel.uav_y", [](ScenarioConfig& c) -> double& { return c.channel.geometry.uav_pos.y; });
    bind_double("channel.uav_z", [](ScenarioConfig& c) -> double& { return c.channel.geometry.uav_pos.z; });
    bind_double("channel.cell_radius_m", [](ScenarioConfig& c) -> double& { return c.channel.geometry.cell_radius; });
    bind_double("channel.ground_ref_mean_db", [](ScenarioConfig& c) -> double& { return c.channel.ground.mean_db_at_ref; });
    bind_double("channel.ground_pathloss_exp", [](ScenarioConfig& c) -> double& { return c.channel.ground.pathloss_exp; });
    bind_double("channel.ground_shadow_db", [](ScenarioConfig& c) -> double& { return c.channel.ground.shadow_sigma_db; });
    bind_double("channel.ground_ref_dist_m", [](ScenarioConfig& c) -> double& { return c.channel.ground.ref_dist; });
    bind_double("channel.uav_ref_mean_db", [](ScenarioConfig& c) -> double& { return c.channel.uav_link.mean_db_at_ref; });
    bind_double("channel.uav_pathloss_exp", [](ScenarioConfig& c) -> double& { return c.channel.uav_link.pathloss_exp; });
    bind_double("channel.uav_shadow_db", [](ScenarioConfig& c) -> double& { return c.channel.uav_link.shadow_sigma_db; });
    bind_double("channel.uav_ref_dist_m", [](ScenarioConfig& c) -> double& { return c.channel.uav_link.ref_dist; });
    t["channel.mobility"] = {
        [](ScenarioConfig& c, const std::string& v) {
            if (v == "static") c.channel.mobility = false;
            else if (v == "waypoint") c.channel.mobility = true;
            else throw ConfigError("channel.mobility must be static|waypoint");
        },
        [](const ScenarioConfig& c) { return c.channel.mobility ? "waypoint" : "static"; }};
    bind_double("channel.speed_min_mps", [](ScenarioConfig& c) -> double& { return c.channel.speed.lo; });
    bind_double("channel.speed_max_mps", [](ScenarioConfig& c) -> double& { return c.channel.speed.hi; });
    bind_double("channel.dt_s", [](ScenarioConfig& c) -> double& { return c.channel.dt_s; });
    t["channel.obs_case"] = {
        [](ScenarioConfig& c, const std::string& v) {
            if (v == "1") c.channel.obs_case = ObsCase::Ideal;
            else if (v == "2") c.channel.obs_case = ObsCase::NoisyDelayed;
            else throw ConfigError("channel.obs_case must be 1|2");
        },
        [](const ScenarioConfig& c) {
            return c.channel.obs_case == ObsCase::Ideal ? "1" : "2";
        }};
    bind_double("channel.obs_noise_sigma", [](ScenarioConfig& c) -> double& { return c.channel.obs_noise_sigma; });
    bind_double("channel.gain_norm", [](ScenarioConfig& c) -> double& { return c.channel.gain_norm; });

    // uav
    t["uav.kind"] = {
        [](ScenarioConfig& c, const std::string& v) { c.uav.kind = uav_kind_from(v); },
        [](const ScenarioConfig& c) { return to_string(c.uav.kind); }};
    bind_double("uav.fixed_mw", [](ScenarioConfig& c) -> double& { return c.uav.fixed_mw; });
    bind_int("uav.seq_len", [](ScenarioConfig& c, bool w, std::int64_t v) -> std::int64_t {
        if (w) c.uav.seq_len = static_cast<int>(v);
        return c.uav.seq_len;
    });
    bind_int("uav.batch", [](ScenarioConfig& c, bool w, std::int64_t v) -> std::int64_t {
        if (w) c.uav.batch = static_cast<int>(v);
        return c.uav.batch;
    });
    bind_double("uav.gamma", [](ScenarioConfig& c) -> double& { return c.uav.gamma; });
    bind_double("uav.learning_rate", [](ScenarioConfig& c) -> double& { return c.uav.learning_rate; });
    bind_int("uav.replay_capacity", [](ScenarioConfig& c, bool w, std::int64_t v) -> std::int64_t {
        if (w) c.uav.replay_capacity = static_cast<std::uint64_t>(v);
        return static_cast<std::int64_t>(c.uav.replay_capacity);
    });
    bind_int("uav.target_sync", [](ScenarioConfig& c, bool w, std::int64_t v) -> std::int64_t {
        if (w) c.uav.target_sync = static_cast<int>(v);
        return c.uav.target_sync;
    });
    bind_double("uav.alpha", [](ScenarioConfig& c) -> double& { return c.uav.alpha; });
    bind_double("uav.tab_gamma", [](ScenarioConfig& c) -> double& { return c.uav.tab_gamma; });
    bind_double("uav.delta", [](ScenarioConfig& c) -> double& { return c.uav.delta; });
    bind_int("uav.rho_bins", [](ScenarioConfig& c, bool w, std::int64_t v) -> std::int64_t {
        if (w) c.uav.rho_bins = static_cast<int>(v);
        return c.uav.rho_bins;
    });

    // Shared eps-schedule keys for both learners.
    auto bind_eps = [&](const std::string& prefix,
                        std::function<EpsSchedule&(ScenarioConfig&)> eps) {
        bind_double(prefix + ".eps_start",
                    [eps](ScenarioConfig& c) -> double& { return eps(c).start; });
        bind_double(prefix + ".eps_end",
                    [eps](ScenarioConfig& c) -> double& { return eps(c).end; });
        bind_int(prefix + ".eps_decay_slots",
                 [eps](ScenarioConfig& c, bool w, std::int64_t v) -> std::int64_t {
                     if (w) eps(c).decay_slots = static_cast<int>(v);
                     return eps(c).decay_slots;
                 });
        bind_int(prefix + ".eps_zero_start",
                 [eps](ScenarioConfig& c, bool w, std::int64_t v) -> std::int64_t {
                     if (w) eps(c).zero_start = static_cast<int>(v);
                     return eps(c).zero_start;
                 });
        bind_int(prefix + ".eps_zero_end",
                 [eps](ScenarioConfig& c, bool w, std::int64_t v) -> std::int64_t {
                     if (w) eps(c).zero_end = static_cast<int>(v);
                     return eps(c).zero_end;
                 });
    };
    bind_eps("uav", [](ScenarioConfig& c) -> EpsSchedule& { return c.uav.eps; });
    bind_eps("jammer", [](ScenarioConfig& c) -> EpsSchedule& { return c.jammer.eps; });

    // jammer
    t["jammer.kind"] = {
        [](ScenarioConfig& c, const std::string& v) {
            if (v == "static") c.jammer.kind = JammerKind::Static;
            else if (v == "reactive") c.jammer.kind = JammerKind::Reactive;
            else if (v == "smart") c.jammer.kind = JammerKind::Smart;
            else throw ConfigError("jammer.kind must be static|reactive|smart");
        },
        [](const ScenarioConfig& c) { return to_string(c.jammer.kind); }};
    bind_double("jammer.static_mw", [](ScenarioConfig& c) -> double& { return c.jammer.static_mw; });
    bind_double("jammer.reactive_mw", [](ScenarioConfig& c) -> double& { return c.jammer.reactive_mw; });
    bind_double("jammer.alpha", [](ScenarioConfig& c) -> double& { return c.jammer.alpha; });
    bind_double("jammer.gamma", [](ScenarioConfig& c) -> double& { return c.jammer.gamma; });
    bind_int("jammer.rho_bins", [](ScenarioConfig& c, bool w, std::int64_t v) -> std::int64_t {
        if (w) c.jammer.rho_bins = static_cast<int>(v);
        return c.jammer.rho_bins;
    });

    // run
    bind_int("run.slots", [](ScenarioConfig& c, bool w, std::int64_t v) -> std::int64_t {
        if (w) c.run.slots = static_cast<int>(v);
        return c.run.slots;
    });
    bind_int("run.seed", [](ScenarioConfig& c, bool w, std::int64_t v) -> std::int64_t {
        if (w) c.run.seed = static_cast<std::uint64_t>(v);
        return static_cast<std::int64_t>(c.run.seed);
    });
    bind_int("run.window", [](ScenarioConfig& c, bool w, std::int64_t v) -> std::int64_t {
        if (w) c.run.window = static_cast<int>(v);
        return c.run.window;
    });
    return t;
}

const std::map<std::string, KeyBinding>& keys() {
    static const std::map<std::string, KeyBinding> t = key_table();
    return t;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
    ScenarioConfig cfg;
    const auto& table = keys();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = table.find(key);
        if (it == table.end()) {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        try {
            it->second.set(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    validate(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    return parse_scenario(read_file(path));
}

void validate(const ScenarioConfig& cfg) {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError("invalid scenario: " + what);
    };
    require(cfg.radio.user_power_mw > 0, "radio.user_power_mw must be > 0");
    require(cfg.radio.noise_mw > 0, "radio.noise_mw must be > 0");
    require(cfg.radio.relay_cost > 0, "radio.relay_cost must be > 0");
    require(cfg.radio.jam_cost >= 0, "radio.jam_cost must be >= 0");
    require(cfg.radio.max_uav_mw > 0, "radio.max_uav_mw must be > 0");
    require(cfg.radio.max_jam_mw > 0, "radio.max_jam_mw must be > 0");
    require(cfg.radio.slot_s > 0, "radio.slot_s must be > 0");
    require(cfg.run.slots >= 0, "run.slots must be >= 0");
    require(cfg.run.window >= 1, "run.window must be >= 1");
    require(cfg.channel.gain_norm > 0, "channel.gain_norm must be > 0");
    require(cfg.channel.obs_noise_sigma >= 0, "channel.obs_noise_sigma must be >= 0");
    for (double s : cfg.channel.sigma_db) require(s >= 0, "channel sigma_db must be >= 0");
    if (cfg.channel.mode == ChannelMode::Geometry) {
        require(cfg.channel.geometry.uav_pos.z > 0, "uav altitude must be > 0");
        require(cfg.channel.geometry.cell_radius > 0, "cell radius must be > 0");
        for (const LinkParams* p : {&cfg.channel.ground, &cfg.channel.uav_link}) {
            require(p->pathloss_exp >= 1.5 && p->pathloss_exp <= 6.0,
                    "pathloss_exp must lie in [1.5, 6]");
            require(p->shadow_sigma_db >= 0.0 && p->shadow_sigma_db <= 12.0,
                    "shadow_sigma_db must lie in [0, 12]");
            require(p->ref_dist > 0, "ref_dist must be > 0");
        }
        // Scenario precondition: the backup BS sits farther from the jammer.
        require(distance(cfg.channel.geometry.jammer_pos, cfg.channel.geometry.bs1_pos) >
                    distance(cfg.channel.geometry.jammer_pos, cfg.channel.geometry.bs0_pos),
                "bs1 must be farther from the jammer than bs0");
        require(cfg.channel.speed.hi >= cfg.channel.speed.lo && cfg.channel.speed.lo >= 0,
                "speed range must satisfy 0 <= min <= max");
        require(cfg.channel.dt_s > 0, "channel.dt_s must be > 0");
    }
    if (cfg.uav.kind == UavKind::Drlur) {
        CnnArchitecture arch;
        require(arch.outputs == cfg.uav_grid().levels,
                "UAV grid length must equal the CNN output width");
        require(cfg.uav.seq_len >= 1, "uav.seq_len must be >= 1");
        // The flattened window must fit the CNN input.
        require(9 * cfg.uav.seq_len + (cfg.uav.seq_len - 1) <=
                    arch.input_side * arch.input_side,
                "uav.seq_len too large for the CNN input");
        require(cfg.uav.batch >= 1, "uav.batch must be >= 1");
        require(cfg.uav.replay_capacity >= 1, "uav.replay_capacity must be >= 1");
        require(cfg.uav.gamma >= 0 && cfg.uav.gamma < 1, "uav.gamma must lie in [0,1)");
        require(cfg.uav.learning_rate > 0, "uav.learning_rate must be > 0");
    }
    if (cfg.uav.kind == UavKind::Hpur || cfg.uav.kind == UavKind::Qlearn) {
        require(cfg.uav.alpha > 0 && cfg.uav.alpha <= 1, "uav.alpha must lie in (0,1]");
        require(cfg.uav.tab_gamma >= 0 && cfg.uav.tab_gamma < 1,
                "uav.tab_gamma must lie in [0,1)");
        require(cfg.uav.delta > 0 && cfg.uav.delta <= 1, "uav.delta must lie in (0,1]");
        require(cfg.uav.rho_bins >= 1, "uav.rho_bins must be >= 1");
    }
    if (cfg.jammer.kind == JammerKind::Smart) {
        require(cfg.jammer.alpha > 0 && cfg.jammer.alpha <= 1,
                "jammer.alpha must lie in (0,1]");
        require(cfg.jammer.gamma >= 0 && cfg.jammer.gamma < 1,
                "jammer.gamma must lie in [0,1)");
        require(cfg.jammer.rho_bins >= 1, "jammer.rho_bins must be >= 1");
    }
    for (const EpsSchedule* e : {&cfg.uav.eps, &cfg.jammer.eps}) {
        require(e->start >= 0 && e->start <= 1 && e->end >= 0 && e->end <= 1,
                "eps bounds must lie in [0,1]");
        require(e->decay_slots >= 1, "eps_decay_slots must be >= 1");
        if (e->zero_start > 0) {
            require(e->zero_end > e->zero_start, "eps_zero_end must exceed eps_zero_start");
        }
    }
}

std::string canonical_text(const ScenarioConfig& cfg) {
    std::string out;
    for (const auto& [key, binding] : keys()) {
        out += key;
        out += " = ";
        out += binding.get(cfg);
        out += "\n";
    }
    return out;
}

namespace {

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::string config_digest(const ScenarioConfig& cfg) {
    return hex16(fnv1a64(canonical_text(cfg)));
}

std::string scenario_hash(const ScenarioConfig& cfg) {
    std::string filtered;
    std::istringstream in(canonical_text(cfg));
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("run.", 0) != 0) filtered += line + "\n";
    }
    return hex16(fnv1a64(filtered));
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed for " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string to_string(UavKind k) {
    switch (k) {
        case UavKind::Drlur: return "drlur";
        case UavKind::Hpur: return "hpur";
        case UavKind::Qlearn: return "qlearn";
        case UavKind::Fixed: return "fixed";
    }
    return "?";
}

std::string to_string(JammerKind k) {
    switch (k) {
        case JammerKind::Static: return "static";
        case JammerKind::Reactive: return "reactive";
        case JammerKind::Smart: return "smart";
    }
    return "?";
}

UavKind uav_kind_from(const std::string& s) {
    if (s == "drlur") return UavKind::Drlur;
    if (s == "hpur") return UavKind::Hpur;
    if (s == "qlearn") return UavKind::Qlearn;
    if (s == "fixed") return UavKind::Fixed;
    throw ConfigError("uav.kind must be drlur|hpur|qlearn|fixed");
}

}  // namespace aegis
