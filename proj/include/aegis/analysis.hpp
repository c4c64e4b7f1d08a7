// Closed-form equilibrium BER bounds, exhaustive stage-game solving on the
// power grids, and trace metrics (moving-average BER/utility, energy,
// convergence detection).

#pragma once

#include <string>
#include <vector>

#include "aegis/agents.hpp"
#include "aegis/game.hpp"
#include "aegis/phy.hpp"

namespace aegis {

// BER when neither side transmits beyond the user: 0.5 erfc(sqrt(P h1 / sigma)).
double ne_ber_weak(double user_mw, double h1, double noise_mw);

// BER at maximum relay and jamming power.
double ne_ber_smart(double user_mw, double max_uav_mw, double max_jam_mw,
                    const ChannelGains& h, double noise_mw);

// One-shot game at fixed gains.
struct StageGame {
    ChannelGains h;
    RadioConfig radio;
    ActionGrid uav_grid;
    ActionGrid jammer_grid;
};

struct PureNash {
    double x_mw = 0.0;
    double y_mw = 0.0;
    double uav_value = 0.0;
    double jam_value = 0.0;
};

// Every grid pair that is a mutual best response (within a tiny tolerance
// for floating-point ties). Possibly empty.
std::vector<PureNash> solve_stage_game(const StageGame& game);

struct RunSummary {
    int window = 1;
    // Full-window moving averages; entry i covers slots i+1 .. i+window.
    std::vector<double> ma_ber;
    std::vector<double> ma_util;
    // Window medians of utility (robust convergence detector).
    std::vector<double> med_util;
    std::vector<double> energy_per_slot;
    std::vector<double> energy_cum;
    double total_energy_mj = 0.0;
    // First slot whose utility window (median) is inside the band
    // |u - ne_utility| <= eta |ne_utility| and stays inside to the end;
    // -1 when never.
    int convergence_slot = -1;
    double terminal_ber = 0.5;   // last MA-BER entry
    double terminal_util = 0.0;  // last MA-utility entry
    double ne_gap = 0.0;         // |terminal_ber - ne_ber|
};

// Windows longer than the trace collapse to a single whole-trace window.
RunSummary summarize(const Trace& trace, int window, double ne_utility,
                     double ne_ber, double eta = 0.1);

// Median helper used by the sweep aggregation (odd/even by lower-middle
// average). Not defined for empty input.
double median(std::vector<double> values);

// Plot-ready two-column "slot value" text for one metric series whose first
// entry corresponds to `first_slot`.
std::string series_to_dat(const std::vector<double>& series, int first_slot);

// Human-readable per-run report.
std::string summary_report(const Trace& trace, const RunSummary& s);

}  // namespace aegis
