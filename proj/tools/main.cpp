// uavnav: command-line front end for the UAV source-seeking simulator.
//
// Subcommands:
//   validate-map   parse a map file and report its stats
//   run            run one episode and write its JSONL log
//   sweep          run a seeded Monte Carlo parameter sweep (CSV + SVG)
//   channel-trace  dump a fading gain trace as CSV
//   plot           re-render an SVG figure from a saved sweep CSV
//
// Exit codes: 0 success, 1 usage error, 2 validation/data error. All
// diagnostics go to stderr; data goes to the requested file or stdout.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "uavnav/channel.hpp"
#include "uavnav/experiment.hpp"
#include "uavnav/sim.hpp"
#include "uavnav/world.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

struct RunOptions {
    std::string map_path;
    std::uint64_t seed = 1;
    double velocity = 5.0;
    double epoch = 2.0;
    double epsilon = 0.1;
    double gamma = 0.9;
    std::string schedule = "varying:0.2:0.9";
    std::string mode = "tenstate";
    std::string out_path;  // empty: stdout
    double sample_interval = 0.001;
    int smoothing = 3;
    double timeout = 3600.0;
    double tx_power = 0.0;
    double carrier = 2.4e9;
    bool no_fading = false;
    std::string avg_domain = "linear";
};

int cmd_validate_map(const std::string& map_path) {
    const auto map = uavnav::world::OccupancyMap::parse(read_file(map_path));
    int walls = 0;
    for (int y = 0; y < map.height_cells(); ++y) {
        for (int x = 0; x < map.width_cells(); ++x) {
            walls += map.is_wall(x, y) ? 1 : 0;
        }
    }
    std::printf("map: %s\n", map_path.c_str());
    std::printf("grid: %d x %d cells at %g m -> extent %g m x %g m\n", map.width_cells(),
                map.height_cells(), map.cell_size_m(), map.width_m(), map.height_m());
    std::printf("wall cells: %d (%.1f%%)\n", walls,
                100.0 * walls / (map.width_cells() * map.height_cells()));
    std::printf("start U: (%g, %g) m\n", map.start_xy().x_m, map.start_xy().y_m);
    std::printf("source S: (%g, %g) m\n", map.source_xy().x_m, map.source_xy().y_m);
    std::printf("start-source distance: %.2f m\n",
                uavnav::world::distance_m(map.start_xy(), map.source_xy()));
    std::printf("connectivity OK\n");
    return kExitOk;
}

int cmd_run(const RunOptions& opt) {
    const auto map = uavnav::world::OccupancyMap::parse(read_file(opt.map_path));
    uavnav::sim::EpisodeConfig cfg;
    cfg.velocity_mps = opt.velocity;
    cfg.epoch_s = opt.epoch;
    cfg.rss_sample_interval_s = opt.sample_interval;
    cfg.smoothing_epochs = opt.smoothing;
    cfg.agent.epsilon = opt.epsilon;
    cfg.agent.gamma = opt.gamma;
    cfg.agent.lr_schedule = uavnav::agent::LearningRateSchedule::parse(opt.schedule);
    cfg.agent.mode = uavnav::agent::parse_agent_mode(opt.mode);
    cfg.channel.tx_power_dbm = opt.tx_power;
    cfg.channel.carrier_hz = opt.carrier;
    cfg.map = &map;
    cfg.map_ref = opt.map_path;
    cfg.seed = opt.seed;
    cfg.timeout_s = opt.timeout;
    cfg.fading_enabled = !opt.no_fading;
    cfg.average_domain = uavnav::sim::parse_average_domain(opt.avg_domain);

    const auto log = uavnav::sim::run_episode(cfg);
    const std::string jsonl = log.to_jsonl();
    if (opt.out_path.empty()) {
        std::cout << jsonl;
    } else {
        write_file(opt.out_path, jsonl);
    }
    if (log.outcome.converged) {
        std::fprintf(stderr, "converged at %.3f s (final distance %.2f m, %zu epochs)\n",
                     log.outcome.time_s, log.outcome.final_distance_m, log.steps.size());
    } else {
        std::fprintf(stderr, "timed out after %zu epochs\n", log.steps.size());
    }
    return kExitOk;
}

int cmd_channel_trace(double velocity, std::uint64_t seed, double duration, double interval,
                      double carrier, const std::string& out_path) {
    if (!(duration > 0.0) || !(interval > 0.0)) {
        throw std::invalid_argument("duration and interval must be positive");
    }
    uavnav::channel::ChannelParams params;
    params.carrier_hz = carrier;
    const auto fading = uavnav::channel::create_fading(velocity, params, seed);
    auto sampler = fading.sampler(0.0, interval);
    const auto n = static_cast<std::size_t>(duration / interval) + 1;
    std::string csv = "time_s,gain_db\n";
    char buf[80];
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * interval;
        const double gain_db = 10.0 * std::log10(sampler.next_envelope2());
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", t, gain_db);
        csv += buf;
    }
    write_file(out_path, csv);
    std::fprintf(stderr, "wrote %zu samples (doppler %.3f Hz) to %s\n", n, fading.doppler_hz(),
                 out_path.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV RSS source-seeking simulator"};
    app.require_subcommand(1);

    // validate-map
    auto* validate = app.add_subcommand("validate-map", "Parse and validate a map file");
    std::string vm_map;
    validate->add_option("--map", vm_map, "map file")->required();

    // run
    auto* run = app.add_subcommand("run", "Run a single episode");
    RunOptions ro;
    run->add_option("--map", ro.map_path, "map file")->required();
    run->add_option("--seed", ro.seed, "episode seed");
    run->add_option("--velocity", ro.velocity, "UAV velocity in m/s");
    run->add_option("--epoch", ro.epoch, "decision epoch T_S in seconds");
    run->add_option("--epsilon", ro.epsilon, "exploration probability");
    run->add_option("--gamma", ro.gamma, "discount factor");
    run->add_option("--schedule", ro.schedule, "fixed:A or varying:LO:HI");
    run->add_option("--mode", ro.mode, "tenstate or singlestate");
    run->add_option("--out", ro.out_path, "episode log path (default: stdout)");
    run->add_option("--sample-interval", ro.sample_interval, "RSS sampling period in s");
    run->add_option("--k-smooth", ro.smoothing, "epochs in the RSS moving average");
    run->add_option("--timeout", ro.timeout, "episode timeout in simulated s");
    run->add_option("--tx-power", ro.tx_power, "source transmit power in dBm");
    run->add_option("--carrier", ro.carrier, "carrier frequency in Hz");
    run->add_flag("--no-fading", ro.no_fading, "disable Rayleigh fading (unit gain)");
    run->add_option("--avg-domain", ro.avg_domain, "RSS averaging domain: linear or db");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run a Monte Carlo parameter sweep");
    std::string sw_config, sw_out_csv, sw_out_svg, sw_map;
    int sw_workers = 1;
    std::string sw_epochs, sw_velocities, sw_schedules, sw_epsilons, sw_modes;
    int sw_episodes = -1;
    std::int64_t sw_base_seed = -1;
    sweep->add_option("--config", sw_config, "key = value sweep configuration file");
    sweep->add_option("--out-csv", sw_out_csv, "output CSV path")->required();
    sweep->add_option("--out-svg", sw_out_svg, "optional output SVG path");
    sweep->add_option("--workers", sw_workers, "worker threads (never changes the output)");
    sweep->add_option("--map", sw_map, "map file (overrides the config file)");
    sweep->add_option("--epochs_s", sw_epochs, "comma-separated T_S list");
    sweep->add_option("--velocities_mps", sw_velocities, "comma-separated velocity list");
    sweep->add_option("--schedules", sw_schedules, "comma-separated schedule list");
    sweep->add_option("--epsilons", sw_epsilons, "comma-separated epsilon list");
    sweep->add_option("--modes", sw_modes, "comma-separated mode list");
    sweep->add_option("--episodes_per_cell", sw_episodes, "episodes per grid cell");
    sweep->add_option("--base_seed", sw_base_seed, "sweep base seed");

    // channel-trace
    auto* trace = app.add_subcommand("channel-trace", "Dump a fading gain trace as CSV");
    double tr_velocity = 5.0, tr_duration = 10.0, tr_interval = 0.001, tr_carrier = 2.4e9;
    std::uint64_t tr_seed = 1;
    std::string tr_out;
    trace->add_option("--velocity", tr_velocity, "UAV velocity in m/s")->required();
    trace->add_option("--seed", tr_seed, "fading seed")->required();
    trace->add_option("--duration", tr_duration, "trace duration in s")->required();
    trace->add_option("--out", tr_out, "output CSV path")->required();
    trace->add_option("--interval", tr_interval, "sample interval in s");
    trace->add_option("--carrier", tr_carrier, "carrier frequency in Hz");

    // plot
    auto* plot = app.add_subcommand("plot", "Render an SVG from a saved sweep CSV");
    std::string pl_in, pl_out;
    plot->add_option("--in-csv", pl_in, "sweep CSV input")->required();
    plot->add_option("--out-svg", pl_out, "SVG output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate->parsed()) {
            return cmd_validate_map(vm_map);
        }
        if (run->parsed()) {
            return cmd_run(ro);
        }
        if (sweep->parsed()) {
            uavnav::experiment::SweepGrid grid;
            if (!sw_config.empty()) {
                grid = uavnav::experiment::SweepGrid::parse_config(read_file(sw_config));
            }
            auto override_list = [](const std::string& text, std::vector<double>& dst) {
                if (text.empty()) {
                    return;
                }
                dst.clear();
                std::istringstream ss(text);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    dst.push_back(std::stod(item));
                }
            };
            override_list(sw_epochs, grid.epochs_s);
            override_list(sw_velocities, grid.velocities_mps);
            override_list(sw_epsilons, grid.epsilons);
            if (!sw_schedules.empty()) {
                grid.schedules.clear();
                std::istringstream ss(sw_schedules);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    grid.schedules.push_back(uavnav::agent::LearningRateSchedule::parse(item));
                }
            }
            if (!sw_modes.empty()) {
                grid.modes.clear();
                std::istringstream ss(sw_modes);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    grid.modes.push_back(uavnav::agent::parse_agent_mode(item));
                }
            }
            if (sw_episodes > 0) {
                grid.episodes_per_cell = sw_episodes;
            }
            if (sw_base_seed >= 0) {
                grid.base_seed = static_cast<std::uint64_t>(sw_base_seed);
            }
            if (!sw_map.empty()) {
                grid.map_path = sw_map;
            }
            if (grid.map_path.empty()) {
                throw std::invalid_argument("sweep needs a map (config 'map = ...' or --map)");
            }
            const auto map = uavnav::world::OccupancyMap::parse(read_file(grid.map_path));
            const auto result = uavnav::experiment::run_sweep(grid, map, sw_workers);
            {
                std::ostringstream csv;
                uavnav::experiment::write_csv(result, csv);
                write_file(sw_out_csv, csv.str());
            }
            if (!sw_out_svg.empty()) {
                std::ostringstream svg;
                uavnav::experiment::emit_plot(result, svg);
                write_file(sw_out_svg, svg.str());
            }
            std::fprintf(stderr, "%zu cells x %d episodes in %.1f s\n", result.cells.size(),
                         grid.episodes_per_cell, result.total_wall_time_s);
            return kExitOk;
        }
        if (trace->parsed()) {
            return cmd_channel_trace(tr_velocity, tr_seed, tr_duration, tr_interval, tr_carrier,
                                     tr_out);
        }
        if (plot->parsed()) {
            std::istringstream csv(read_file(pl_in));
            const auto result = uavnav::experiment::read_csv(csv);
            std::ostringstream svg;
            uavnav::experiment::emit_plot(result, svg);
            write_file(pl_out, svg.str());
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return kExitUsage;
}
