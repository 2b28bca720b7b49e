#include "uavnav/sim.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "uavnav/rng.hpp"

namespace uavnav::sim {

namespace {

constexpr double kLog10Div10 = 0.23025850929940457;  // ln(10)/10

double dbm_to_mw(double dbm) { return std::exp(dbm * kLog10Div10); }
double mw_to_dbm(double mw) { return std::log(mw) / kLog10Div10; }

// Linear path gain 10^(-PL(d)/10) expressed through the squared distance:
// 10^(-12.81) * (d^2 / 1e6)^(-1.88). Saves the sqrt in the sampling loop.
double path_gain_from_d2(double d2_m2) {
    constexpr double kRef = 1.5488166189124813e-13;  // 10^(-12.81)
    return kRef * std::exp(-1.88 * std::log(d2_m2 * 1e-6));
}

struct EpochMeasurement {
    double avg_dbm;  // this epoch's average RSS
};

}  // namespace

std::string_view to_string(AverageDomain d) {
    return d == AverageDomain::LinearMw ? "linear" : "db";
}

AverageDomain parse_average_domain(std::string_view text) {
    if (text == "linear") {
        return AverageDomain::LinearMw;
    }
    if (text == "db") {
        return AverageDomain::Db;
    }
    throw std::invalid_argument("average domain must be 'linear' or 'db', got '" +
                                std::string(text) + "'");
}

void EpisodeConfig::validate() const {
    if (map == nullptr) {
        throw std::invalid_argument("EpisodeConfig: no map");
    }
    if (!(velocity_mps > 0.0) || !std::isfinite(velocity_mps)) {
        throw std::invalid_argument("EpisodeConfig: velocity_mps must be > 0");
    }
    if (!(epoch_s > 0.0) || !std::isfinite(epoch_s)) {
        throw std::invalid_argument("EpisodeConfig: epoch_s must be > 0");
    }
    if (!(rss_sample_interval_s > 0.0) || rss_sample_interval_s > epoch_s) {
        throw std::invalid_argument(
            "EpisodeConfig: rss_sample_interval_s must be in (0, epoch_s]");
    }
    if (smoothing_epochs < 1) {
        throw std::invalid_argument("EpisodeConfig: smoothing_epochs must be >= 1");
    }
    if (!(timeout_s > epoch_s)) {
        throw std::invalid_argument("EpisodeConfig: timeout_s must exceed epoch_s");
    }
    agent.validate();
    channel.validate();
}

int EpisodeConfig::samples_per_epoch() const {
    return static_cast<int>(std::floor(epoch_s / rss_sample_interval_s));
}

double epoch_average_rss(std::span<const channel::RssSample> samples) {
    if (samples.empty()) {
        throw std::domain_error("epoch_average_rss: empty sample sequence");
    }
    double sum_mw = 0.0;
    for (const auto& s : samples) {
        sum_mw += dbm_to_mw(s.rss_dbm);
    }
    return mw_to_dbm(sum_mw / static_cast<double>(samples.size()));
}

double smoothed_rss(std::span<const double> history_dbm, int k) {
    if (history_dbm.empty()) {
        throw std::domain_error("smoothed_rss: empty history");
    }
    if (k < 1) {
        throw std::invalid_argument("smoothed_rss: k must be >= 1");
    }
    const std::size_t take = std::min<std::size_t>(history_dbm.size(), static_cast<std::size_t>(k));
    double sum_mw = 0.0;
    for (std::size_t i = history_dbm.size() - take; i < history_dbm.size(); ++i) {
        sum_mw += dbm_to_mw(history_dbm[i]);
    }
    return mw_to_dbm(sum_mw / static_cast<double>(take));
}

namespace {

// dB-domain variant of the two averaging helpers, enabled by
// AverageDomain::Db.
double smoothed_rss_db_domain(std::span<const double> history_dbm, int k) {
    const std::size_t take = std::min<std::size_t>(history_dbm.size(), static_cast<std::size_t>(k));
    double sum = 0.0;
    for (std::size_t i = history_dbm.size() - take; i < history_dbm.size(); ++i) {
        sum += history_dbm[i];
    }
    return sum / static_cast<double>(take);
}

class EpisodeRunner {
public:
    EpisodeRunner(const EpisodeConfig& config, bool keep_steps)
        : cfg_(config), keep_steps_(keep_steps) {
        cfg_.validate();
    }

    EpisodeLog run() {
        const world::OccupancyMap& map = *cfg_.map;
        const double epoch_len_m = cfg_.velocity_mps * cfg_.epoch_s;
        const int n_samples = cfg_.samples_per_epoch();
        const double dt = cfg_.rss_sample_interval_s;
        const double tx_mw = dbm_to_mw(cfg_.channel.tx_power_dbm);
        const double min_d2 =
            channel::kMinPathDistanceM * channel::kMinPathDistanceM;

        // One episode seed deterministically expands into the fading draw
        // and the policy stream.
        const std::uint64_t fading_seed = seed_combine(cfg_.seed, 1);
        const std::uint64_t policy_seed = seed_combine(cfg_.seed, 2);
        const channel::FadingProcess fading =
            cfg_.fading_enabled
                ? channel::create_fading(cfg_.velocity_mps, cfg_.channel, fading_seed)
                : channel::FadingProcess::unit();
        Rng rng(policy_seed);

        agent::QTable qtable(cfg_.agent.mode);
        world::Pose pose = map.start_xy();
        const world::Pose source = map.source_xy();

        const int max_epochs = static_cast<int>(std::floor(cfg_.timeout_s / cfg_.epoch_s + 1e-9));

        EpisodeLog log;
        log.config = cfg_;
        if (keep_steps_) {
            log.steps.reserve(static_cast<std::size_t>(std::min(max_epochs, 1 << 20)));
        }

        std::vector<double> history_dbm;
        history_dbm.reserve(static_cast<std::size_t>(max_epochs));
        double prev_smoothed = 0.0;
        agent::StateId state{10};

        int action = kHoldAction;  // epoch 0 senses in place
        int retried = 0;
        world::Pose epoch_end = pose;

        for (int epoch = 0; epoch < max_epochs; ++epoch) {
            const double t0 = epoch * cfg_.epoch_s;

            // Fly the epoch segment while sampling the channel.
            auto sampler = fading.sampler(t0 + dt, dt);
            const double step_x = epoch_end.x_m - pose.x_m;
            const double step_y = epoch_end.y_m - pose.y_m;
            const double inv_epoch = 1.0 / cfg_.epoch_s;
            double acc = 0.0;
            for (int k = 1; k <= n_samples; ++k) {
                const double frac = (k * dt) * inv_epoch;
                const double px = pose.x_m + frac * step_x;
                const double py = pose.y_m + frac * step_y;
                const double dx = px - source.x_m;
                const double dy = py - source.y_m;
                const double d2 = std::max(dx * dx + dy * dy, min_d2);
                const double env2 = sampler.next_envelope2();
                if (cfg_.average_domain == AverageDomain::LinearMw) {
                    acc += tx_mw * path_gain_from_d2(d2) * env2;
                } else {
                    acc += mw_to_dbm(tx_mw * path_gain_from_d2(d2) * env2);
                }
            }
            const double avg_dbm = cfg_.average_domain == AverageDomain::LinearMw
                                       ? mw_to_dbm(acc / n_samples)
                                       : acc / n_samples;
            pose = epoch_end;

            history_dbm.push_back(avg_dbm);
            const double smoothed =
                cfg_.average_domain == AverageDomain::LinearMw
                    ? smoothed_rss(history_dbm, cfg_.smoothing_epochs)
                    : smoothed_rss_db_domain(history_dbm, cfg_.smoothing_epochs);

            const double r = epoch == 0 ? 0.0 : agent::reward(prev_smoothed, smoothed);
            const agent::StateId next_state = agent::quantize_state(smoothed);

            double alpha_used = 0.0;
            if (epoch >= 1 && action != kHoldAction) {
                alpha_used = cfg_.agent.lr_schedule.alpha_for(next_state);
                qtable.update(state, action, r, next_state, alpha_used, cfg_.agent.gamma);
            }

            const double true_distance = world::distance_m(pose, source);
            if (keep_steps_) {
                log.steps.push_back(StepRecord{epoch, t0, pose, action, retried, avg_dbm,
                                               smoothed, next_state.index, r, alpha_used,
                                               true_distance});
            }

            prev_smoothed = smoothed;
            state = next_state;

            if (agent::is_terminal(state)) {
                log.outcome = {true, (epoch + 1) * cfg_.epoch_s, true_distance};
                return log;
            }

            // Select the next epoch's action; re-draw uniformly among the
            // untried ones while the candidate segment is blocked.
            action = agent::select_action(qtable, state, cfg_.agent.epsilon, rng);
            retried = 0;
            bool tried[world::ActionId::kCount] = {};
            tried[action] = true;
            int num_tried = 1;
            epoch_end = pose;
            while (true) {
                const auto moved =
                    world::apply_action(map, pose, world::ActionId{action}, epoch_len_m);
                if (moved) {
                    epoch_end = *moved;
                    break;
                }
                ++retried;
                if (num_tried == world::ActionId::kCount) {
                    action = kHoldAction;  // everything blocked: hold for one epoch
                    epoch_end = pose;
                    break;
                }
                int pick = static_cast<int>(
                    rng.below(static_cast<std::uint32_t>(world::ActionId::kCount - num_tried)));
                for (int a = 0; a < world::ActionId::kCount; ++a) {
                    if (!tried[a] && pick-- == 0) {
                        action = a;
                        break;
                    }
                }
                tried[action] = true;
                ++num_tried;
            }
        }

        log.outcome = {false, 0.0, 0.0};
        return log;
    }

private:
    EpisodeConfig cfg_;
    bool keep_steps_;
};

}  // namespace

EpisodeLog run_episode(const EpisodeConfig& config) {
    return EpisodeRunner(config, true).run();
}

Outcome run_episode_outcome(const EpisodeConfig& config) {
    return EpisodeRunner(config, false).run().outcome;
}

std::string EpisodeLog::to_jsonl() const {
    using json = nlohmann::ordered_json;
    std::string out;

    json cfg;
    cfg["velocity_mps"] = config.velocity_mps;
    cfg["epoch_s"] = config.epoch_s;
    cfg["rss_sample_interval_s"] = config.rss_sample_interval_s;
    cfg["smoothing_epochs"] = config.smoothing_epochs;
    cfg["agent"] = {{"epsilon", config.agent.epsilon},
                    {"gamma", config.agent.gamma},
                    {"lr_schedule", config.agent.lr_schedule.to_string()},
                    {"mode", std::string(agent::to_string(config.agent.mode))}};
    cfg["channel"] = {{"tx_power_dbm", config.channel.tx_power_dbm},
                      {"carrier_hz", config.channel.carrier_hz}};
    cfg["map"] = config.map_ref;
    cfg["seed"] = config.seed;
    cfg["timeout_s"] = config.timeout_s;
    cfg["fading_enabled"] = config.fading_enabled;
    cfg["average_domain"] = std::string(to_string(config.average_domain));
    out += cfg.dump();
    out += '\n';

    for (const auto& s : steps) {
        json rec;
        rec["epoch_index"] = s.epoch_index;
        rec["time_s"] = s.time_s;
        rec["pose"] = {{"x_m", s.pose.x_m}, {"y_m", s.pose.y_m}};
        rec["action"] = s.action;
        rec["retried_actions"] = s.retried_actions;
        rec["raw_epoch_rss_dbm"] = s.raw_epoch_rss_dbm;
        rec["smoothed_rss_dbm"] = s.smoothed_rss_dbm;
        rec["state"] = s.state;
        rec["reward"] = s.reward;
        rec["alpha_used"] = s.alpha_used;
        rec["true_distance_m"] = s.true_distance_m;
        out += rec.dump();
        out += '\n';
    }

    json end;
    if (outcome.converged) {
        end["outcome"] = "converged";
        end["time_s"] = outcome.time_s;
        end["final_distance_m"] = outcome.final_distance_m;
    } else {
        end["outcome"] = "timed_out";
    }
    out += end.dump();
    out += '\n';
    return out;
}

}  // namespace uavnav::sim
