#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "uavnav/agent.hpp"
#include "uavnav/channel.hpp"
#include "uavnav/sim.hpp"
#include "uavnav/world.hpp"

namespace uavnav::experiment {

/// Parameter grid for a Monte Carlo sweep. Cells are the cross product of
/// the five axis lists; every cell runs `episodes_per_cell` episodes whose
/// seeds derive deterministically from `base_seed` and the cell's
/// coordinate values, so a cell's episodes do not depend on which other
/// cells the grid happens to contain.
struct SweepGrid {
    std::vector<double> epochs_s = {0.5, 1.0, 2.0, 4.0, 8.0};
    std::vector<double> velocities_mps = {2.0, 5.0, 10.0};
    std::vector<agent::LearningRateSchedule> schedules = {
        agent::LearningRateSchedule::varying(0.2, 0.9),
        agent::LearningRateSchedule::fixed(1.0)};
    std::vector<double> epsilons = {0.1};
    std::vector<agent::AgentMode> modes = {agent::AgentMode::TenState,
                                           agent::AgentMode::SingleState};
    int episodes_per_cell = 200;
    std::uint64_t base_seed = 1;

    // Episode knobs shared by every cell.
    std::string map_path;
    double tx_power_dbm = 0.0;
    double carrier_hz = 2.4e9;
    double rss_sample_interval_s = 0.001;
    int smoothing_epochs = 3;
    double timeout_s = 3600.0;
    double gamma = 0.9;
    bool fading_enabled = true;
    sim::AverageDomain average_domain = sim::AverageDomain::LinearMw;

    void validate() const;

    /// Parses a "key = value" configuration (one pair per line, '#'
    /// comments, lists comma-separated). Keys match the field names above.
    static SweepGrid parse_config(std::string_view text);
};

/// Convergence-time statistics of one grid cell. Location statistics are
/// computed over converged episodes only; censored (timed-out) episodes
/// are counted in `timeout_rate`. `has_stats` is false when nothing
/// converged, in which case the statistic fields are meaningless and the
/// CSV renders them as NA.
struct CellStats {
    double epoch_s = 0.0;
    double velocity_mps = 0.0;
    std::string schedule;
    double epsilon = 0.0;
    std::string mode;

    int n = 0;
    int n_converged = 0;
    bool has_stats = false;
    double mean_s = 0.0;
    double median_s = 0.0;
    double p5_s = 0.0;
    double p95_s = 0.0;
    double ci95_lo_s = 0.0;
    double ci95_hi_s = 0.0;
    double timeout_rate = 0.0;
};

struct SweepResult {
    SweepGrid grid;
    std::vector<CellStats> cells;
    double total_wall_time_s = 0.0;  // informational; never serialized
};

/// Derived seed of one episode; pure function of the cell coordinates.
std::uint64_t episode_seed(std::uint64_t base_seed, double epoch_s, double velocity_mps,
                           const agent::LearningRateSchedule& schedule, double epsilon,
                           agent::AgentMode mode, int episode_index);

/// Runs the full grid. Episodes are distributed over `workers` threads;
/// aggregation is order-independent, so the result is byte-identical for
/// any worker count. Throws on invalid grids; episode failures are
/// reported with the offending cell's coordinates.
SweepResult run_sweep(const SweepGrid& grid, const world::OccupancyMap& map, int workers = 1);

/// Aggregates one cell: mean/median/p5/p95 over converged times, 95%
/// bootstrap CI of the mean (2000 resamples, seeded), timeout rate.
CellStats summarize(std::vector<double> converged_times_s, int n_timeouts,
                    std::uint64_t bootstrap_seed);

/// CSV with the fixed header
/// T_S_s,velocity_mps,schedule,epsilon,mode,n,n_converged,mean_s,median_s,
/// p5_s,p95_s,ci95_lo_s,ci95_hi_s,timeout_rate
/// one row per cell, reals at 6 significant digits, rows sorted by the
/// coordinate tuple. Byte-stable for identical results.
void write_csv(const SweepResult& result, std::ostream& out);

/// Reads cells back from the CSV schema above (used by `plot`).
SweepResult read_csv(std::istream& in);

/// Self-contained SVG: one panel per (schedule, mode) pair, mean
/// convergence time vs T_S with CI whiskers, one polyline per velocity.
/// Throws std::invalid_argument when fewer than two T_S values are
/// present (no line to draw; write the CSV instead).
void emit_plot(const SweepResult& result, std::ostream& out);

}  // namespace uavnav::experiment
