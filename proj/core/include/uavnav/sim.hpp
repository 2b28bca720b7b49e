#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uavnav/agent.hpp"
#include "uavnav/channel.hpp"
#include "uavnav/world.hpp"

namespace uavnav::sim {

/// Domain in which RSS samples are averaged. Power (linear milliwatt)
/// averaging is the physically meaningful default; dB-domain averaging is
/// kept as a switch for sensitivity studies.
enum class AverageDomain { LinearMw, Db };

std::string_view to_string(AverageDomain d);
AverageDomain parse_average_domain(std::string_view text);  // "linear" | "db"

/// Everything one episode needs. The map is borrowed, not owned.
struct EpisodeConfig {
    double velocity_mps = 5.0;
    double epoch_s = 2.0;                  // decision epoch T_S
    double rss_sample_interval_s = 0.001;  // RSS sampling period within an epoch
    int smoothing_epochs = 3;              // K-epoch moving average fed to the agent
    agent::AgentConfig agent;
    channel::ChannelParams channel;
    const world::OccupancyMap* map = nullptr;
    std::string map_ref = "<unset>";  // echoed into the log, e.g. the map path
    std::uint64_t seed = 1;
    double timeout_s = 3600.0;
    bool fading_enabled = true;
    AverageDomain average_domain = AverageDomain::LinearMw;

    void validate() const;  // throws std::invalid_argument

    /// RSS samples per epoch: floor(epoch_s / rss_sample_interval_s).
    int samples_per_epoch() const;
};

/// The action slot of an epoch in which the UAV held position: epoch 0
/// (the initial sensing epoch, before any action has been selected) and
/// epochs where all eight candidate segments were blocked.
inline constexpr int kHoldAction = -1;

/// Everything recorded about one decision epoch. `state`, `reward` and
/// `smoothed_rss_dbm` are the values at the end of the epoch; `pose` and
/// `true_distance_m` refer to the end-of-epoch position. `true_distance_m`
/// is ground truth for logging only and is never visible to the agent.
struct StepRecord {
    int epoch_index = 0;
    double time_s = 0.0;  // epoch start time
    world::Pose pose;
    int action = kHoldAction;  // 0..7, or kHoldAction
    int retried_actions = 0;   // candidates rejected by the collision pre-check
    double raw_epoch_rss_dbm = 0.0;
    double smoothed_rss_dbm = 0.0;
    int state = 10;
    double reward = 0.0;
    double alpha_used = 0.0;  // 0 when no Q-update happened this epoch
    double true_distance_m = 0.0;
};

struct Outcome {
    bool converged = false;
    double time_s = 0.0;            // meaningful when converged
    double final_distance_m = 0.0;  // meaningful when converged
};

struct EpisodeLog {
    EpisodeConfig config;
    std::vector<StepRecord> steps;
    Outcome outcome;

    /// Line-delimited JSON: one config-echo record, one record per step
    /// with the StepRecord field names in declaration order, then one
    /// outcome record. Byte-stable for identical runs.
    std::string to_jsonl() const;
};

/// Power-mean of a set of RSS observations: converts each sample to linear
/// milliwatts, averages, converts back to dBm. Throws std::domain_error on
/// an empty sequence.
double epoch_average_rss(std::span<const channel::RssSample> samples);

/// Moving average over the last min(k, available) epoch averages, in the
/// linear power domain. history holds epoch averages in dBm, oldest first.
double smoothed_rss(std::span<const double> history_dbm, int k);

/// Runs one full episode: per decision epoch the UAV flies its chosen
/// segment while RSS is sampled, the epoch average is smoothed over the
/// last K epochs, the reward (smoothed-RSS delta) updates the Q-table, and
/// an epsilon-greedy action with collision retry is selected for the next
/// epoch. Terminates when the smoothed RSS enters the strongest state bin
/// or at timeout. Identical configs produce bit-identical logs.
EpisodeLog run_episode(const EpisodeConfig& config);

/// Same simulation without retaining per-step records (for sweeps).
Outcome run_episode_outcome(const EpisodeConfig& config);

}  // namespace uavnav::sim
