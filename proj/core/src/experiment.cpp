#include "uavnav/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "uavnav/rng.hpp"

namespace uavnav::experiment {

namespace {

std::uint64_t combine_double(std::uint64_t state, double v) {
    return seed_combine(state, std::bit_cast<std::uint64_t>(v));
}

std::uint64_t combine_string(std::uint64_t state, const std::string& s) {
    for (const char c : s) {
        state = seed_combine(state, static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    }
    return state;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Type-7 (linear interpolation) percentile of a sorted sample, q in [0,1].
double percentile_sorted(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) {
        return sorted[0];
    }
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) {
        return sorted[n - 1];
    }
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[lo + 1] - sorted[lo]) * frac;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        std::size_t comma = value.find(',', pos);
        if (comma == std::string::npos) {
            comma = value.size();
        }
        std::string item = value.substr(pos, comma - pos);
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        parts.push_back(first == std::string::npos ? std::string()
                                                   : item.substr(first, last - first + 1));
        if (comma == value.size()) {
            break;
        }
        pos = comma + 1;
    }
    return parts;
}

double parse_real(const std::string& text, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad numeric value '" + text + "' for key '" + key + "'");
    }
}

std::string cell_label(const CellStats& c) {
    return "T_S=" + format_real(c.epoch_s) + ", v=" + format_real(c.velocity_mps) +
           ", schedule=" + c.schedule + ", epsilon=" + format_real(c.epsilon) +
           ", mode=" + c.mode;
}

}  // namespace

void SweepGrid::validate() const {
    if (epochs_s.empty() || velocities_mps.empty() || schedules.empty() || epsilons.empty() ||
        modes.empty()) {
        throw std::invalid_argument("SweepGrid: all axis lists must be non-empty");
    }
    if (episodes_per_cell < 1) {
        throw std::invalid_argument("SweepGrid: episodes_per_cell must be >= 1");
    }
    for (const auto& s : schedules) {
        s.validate();
    }
    for (const double e : epsilons) {
        if (!(e >= 0.0 && e <= 1.0)) {
            throw std::invalid_argument("SweepGrid: epsilon must be in [0,1]");
        }
    }
}

SweepGrid SweepGrid::parse_config(std::string_view text) {
    SweepGrid grid;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("sweep config line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) {
            throw std::invalid_argument("sweep config: empty value for key '" + key + "'");
        }

        if (key == "epochs_s" || key == "velocities_mps" || key == "epsilons") {
            std::vector<double> vals;
            for (const auto& item : split_list(value)) {
                vals.push_back(parse_real(item, key));
            }
            if (key == "epochs_s") {
                grid.epochs_s = vals;
            } else if (key == "velocities_mps") {
                grid.velocities_mps = vals;
            } else {
                grid.epsilons = vals;
            }
        } else if (key == "schedules") {
            grid.schedules.clear();
            for (const auto& item : split_list(value)) {
                grid.schedules.push_back(agent::LearningRateSchedule::parse(item));
            }
        } else if (key == "modes") {
            grid.modes.clear();
            for (const auto& item : split_list(value)) {
                grid.modes.push_back(agent::parse_agent_mode(item));
            }
        } else if (key == "episodes_per_cell") {
            grid.episodes_per_cell = static_cast<int>(parse_real(value, key));
        } else if (key == "base_seed") {
            grid.base_seed = static_cast<std::uint64_t>(std::stoull(value));
        } else if (key == "map") {
            grid.map_path = value;
        } else if (key == "tx_power_dbm") {
            grid.tx_power_dbm = parse_real(value, key);
        } else if (key == "carrier_hz") {
            grid.carrier_hz = parse_real(value, key);
        } else if (key == "rss_sample_interval_s") {
            grid.rss_sample_interval_s = parse_real(value, key);
        } else if (key == "smoothing_epochs") {
            grid.smoothing_epochs = static_cast<int>(parse_real(value, key));
        } else if (key == "timeout_s") {
            grid.timeout_s = parse_real(value, key);
        } else if (key == "gamma") {
            grid.gamma = parse_real(value, key);
        } else if (key == "fading") {
            if (value == "true" || value == "1") {
                grid.fading_enabled = true;
            } else if (value == "false" || value == "0") {
                grid.fading_enabled = false;
            } else {
                throw std::invalid_argument("sweep config: 'fading' must be true or false");
            }
        } else if (key == "average_domain") {
            grid.average_domain = sim::parse_average_domain(value);
        } else {
            throw std::invalid_argument("sweep config line " + std::to_string(line_no) +
                                        ": unknown key '" + key + "'");
        }
    }
    grid.validate();
    return grid;
}

std::uint64_t episode_seed(std::uint64_t base_seed, double epoch_s, double velocity_mps,
                           const agent::LearningRateSchedule& schedule, double epsilon,
                           agent::AgentMode mode, int episode_index) {
    std::uint64_t h = splitmix64_mix(base_seed);
    h = combine_double(h, epoch_s);
    h = combine_double(h, velocity_mps);
    h = combine_string(h, schedule.to_string());
    h = combine_double(h, epsilon);
    h = seed_combine(h, mode == agent::AgentMode::TenState ? 0u : 1u);
    h = seed_combine(h, static_cast<std::uint64_t>(episode_index));
    return h;
}

CellStats summarize(std::vector<double> converged_times_s, int n_timeouts,
                    std::uint64_t bootstrap_seed) {
    CellStats stats;
    stats.n_converged = static_cast<int>(converged_times_s.size());
    stats.n = stats.n_converged + n_timeouts;
    stats.timeout_rate = stats.n == 0 ? 0.0 : static_cast<double>(n_timeouts) / stats.n;
    if (converged_times_s.empty()) {
        stats.has_stats = false;
        return stats;
    }
    std::sort(converged_times_s.begin(), converged_times_s.end());
    const std::size_t n = converged_times_s.size();
    double sum = 0.0;
    for (const double t : converged_times_s) {
        sum += t;
    }
    stats.has_stats = true;
    stats.mean_s = sum / static_cast<double>(n);
    stats.median_s = percentile_sorted(converged_times_s, 0.5);
    stats.p5_s = percentile_sorted(converged_times_s, 0.05);
    stats.p95_s = percentile_sorted(converged_times_s, 0.95);

    constexpr int kResamples = 2000;
    std::vector<double> boot_means;
    boot_means.reserve(kResamples);
    Rng rng(bootstrap_seed);
    for (int b = 0; b < kResamples; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += converged_times_s[rng.below(static_cast<std::uint32_t>(n))];
        }
        boot_means.push_back(s / static_cast<double>(n));
    }
    std::sort(boot_means.begin(), boot_means.end());
    stats.ci95_lo_s = std::min(percentile_sorted(boot_means, 0.025), stats.mean_s);
    stats.ci95_hi_s = std::max(percentile_sorted(boot_means, 0.975), stats.mean_s);
    return stats;
}

SweepResult run_sweep(const SweepGrid& grid, const world::OccupancyMap& map, int workers) {
    grid.validate();
    if (workers < 1) {
        throw std::invalid_argument("run_sweep: workers must be >= 1");
    }
    const auto t_begin = std::chrono::steady_clock::now();

    struct Cell {
        double epoch_s;
        double velocity;
        agent::LearningRateSchedule schedule;
        double epsilon;
        agent::AgentMode mode;
        std::uint64_t stats_seed;
    };
    std::vector<Cell> cells;
    for (const double ts : grid.epochs_s) {
        for (const double v : grid.velocities_mps) {
            for (const auto& sch : grid.schedules) {
                for (const double eps : grid.epsilons) {
                    for (const auto mode : grid.modes) {
                        const std::uint64_t stats_seed = seed_combine(
                            episode_seed(grid.base_seed, ts, v, sch, eps, mode, -1),
                            0xb007u);
                        cells.push_back({ts, v, sch, eps, mode, stats_seed});
                    }
                }
            }
        }
    }

    // Derived episode seeds must be pairwise distinct within the sweep.
    {
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(cells.size() * static_cast<std::size_t>(grid.episodes_per_cell));
        for (const auto& c : cells) {
            for (int e = 0; e < grid.episodes_per_cell; ++e) {
                const std::uint64_t s =
                    episode_seed(grid.base_seed, c.epoch_s, c.velocity, c.schedule, c.epsilon,
                                 c.mode, e);
                if (!seen.insert(s).second) {
                    throw std::logic_error("run_sweep: derived episode seed collision");
                }
            }
        }
    }

    auto make_config = [&](const Cell& c, int episode) {
        sim::EpisodeConfig cfg;
        cfg.velocity_mps = c.velocity;
        cfg.epoch_s = c.epoch_s;
        cfg.rss_sample_interval_s = grid.rss_sample_interval_s;
        cfg.smoothing_epochs = grid.smoothing_epochs;
        cfg.agent.epsilon = c.epsilon;
        cfg.agent.gamma = grid.gamma;
        cfg.agent.lr_schedule = c.schedule;
        cfg.agent.mode = c.mode;
        cfg.channel.tx_power_dbm = grid.tx_power_dbm;
        cfg.channel.carrier_hz = grid.carrier_hz;
        cfg.map = &map;
        cfg.map_ref = grid.map_path.empty() ? "<in-memory>" : grid.map_path;
        cfg.seed = episode_seed(grid.base_seed, c.epoch_s, c.velocity, c.schedule, c.epsilon,
                                c.mode, episode);
        cfg.timeout_s = grid.timeout_s;
        cfg.fading_enabled = grid.fading_enabled;
        cfg.average_domain = grid.average_domain;
        return cfg;
    };

    // Validate every cell up front so configuration errors surface with
    // their cell identified rather than mid-sweep from a worker.
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        try {
            make_config(cells[ci], 0).validate();
        } catch (const std::exception& e) {
            CellStats id;
            id.epoch_s = cells[ci].epoch_s;
            id.velocity_mps = cells[ci].velocity;
            id.schedule = cells[ci].schedule.to_string();
            id.epsilon = cells[ci].epsilon;
            id.mode = std::string(agent::to_string(cells[ci].mode));
            throw std::invalid_argument("sweep cell [" + cell_label(id) + "]: " + e.what());
        }
    }

    const int per_cell = grid.episodes_per_cell;
    const std::size_t total_jobs = cells.size() * static_cast<std::size_t>(per_cell);
    std::vector<sim::Outcome> outcomes(total_jobs);
    std::atomic<std::size_t> next_job{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker_fn = [&]() {
        while (true) {
            const std::size_t job = next_job.fetch_add(1, std::memory_order_relaxed);
            if (job >= total_jobs) {
                return;
            }
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) {
                    return;
                }
            }
            const std::size_t ci = job / static_cast<std::size_t>(per_cell);
            const int e = static_cast<int>(job % static_cast<std::size_t>(per_cell));
            try {
                outcomes[job] = sim::run_episode_outcome(make_config(cells[ci], e));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                return;
            }
        }
    };

    if (workers == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(worker_fn);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    SweepResult result;
    result.grid = grid;
    result.cells.reserve(cells.size());
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        std::vector<double> times;
        int timeouts = 0;
        for (int e = 0; e < per_cell; ++e) {
            const auto& o = outcomes[ci * static_cast<std::size_t>(per_cell) + e];
            if (o.converged) {
                times.push_back(o.time_s);
            } else {
                ++timeouts;
            }
        }
        CellStats stats = summarize(std::move(times), timeouts, cells[ci].stats_seed);
        stats.epoch_s = cells[ci].epoch_s;
        stats.velocity_mps = cells[ci].velocity;
        stats.schedule = cells[ci].schedule.to_string();
        stats.epsilon = cells[ci].epsilon;
        stats.mode = std::string(agent::to_string(cells[ci].mode));
        result.cells.push_back(std::move(stats));
    }

    result.total_wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return result;
}

void write_csv(const SweepResult& result, std::ostream& out) {
    std::vector<const CellStats*> rows;
    rows.reserve(result.cells.size());
    for (const auto& c : result.cells) {
        rows.push_back(&c);
    }
    std::sort(rows.begin(), rows.end(), [](const CellStats* a, const CellStats* b) {
        if (a->epoch_s != b->epoch_s) return a->epoch_s < b->epoch_s;
        if (a->velocity_mps != b->velocity_mps) return a->velocity_mps < b->velocity_mps;
        if (a->schedule != b->schedule) return a->schedule < b->schedule;
        if (a->epsilon != b->epsilon) return a->epsilon < b->epsilon;
        return a->mode < b->mode;
    });

    out << "T_S_s,velocity_mps,schedule,epsilon,mode,n,n_converged,mean_s,median_s,p5_s,p95_s,"
           "ci95_lo_s,ci95_hi_s,timeout_rate\n";
    for (const CellStats* c : rows) {
        out << format_real(c->epoch_s) << ',' << format_real(c->velocity_mps) << ','
            << c->schedule << ',' << format_real(c->epsilon) << ',' << c->mode << ',' << c->n
            << ',' << c->n_converged << ',';
        if (c->has_stats) {
            out << format_real(c->mean_s) << ',' << format_real(c->median_s) << ','
                << format_real(c->p5_s) << ',' << format_real(c->p95_s) << ','
                << format_real(c->ci95_lo_s) << ',' << format_real(c->ci95_hi_s);
        } else {
            out << "NA,NA,NA,NA,NA,NA";
        }
        out << ',' << format_real(c->timeout_rate) << '\n';
    }
}

SweepResult read_csv(std::istream& in) {
    SweepResult result;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("sweep CSV: empty input");
    }
    const std::string expected =
        "T_S_s,velocity_mps,schedule,epsilon,mode,n,n_converged,mean_s,median_s,p5_s,p95_s,"
        "ci95_lo_s,ci95_hi_s,timeout_rate";
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != expected) {
        throw std::invalid_argument("sweep CSV: unexpected header");
    }
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split_list(line);
        if (fields.size() != 14) {
            throw std::invalid_argument("sweep CSV line " + std::to_string(line_no) +
                                        ": expected 14 fields");
        }
        CellStats c;
        c.epoch_s = parse_real(fields[0], "T_S_s");
        c.velocity_mps = parse_real(fields[1], "velocity_mps");
        c.schedule = fields[2];
        c.epsilon = parse_real(fields[3], "epsilon");
        c.mode = fields[4];
        c.n = static_cast<int>(parse_real(fields[5], "n"));
        c.n_converged = static_cast<int>(parse_real(fields[6], "n_converged"));
        c.has_stats = fields[7] != "NA";
        if (c.has_stats) {
            c.mean_s = parse_real(fields[7], "mean_s");
            c.median_s = parse_real(fields[8], "median_s");
            c.p5_s = parse_real(fields[9], "p5_s");
            c.p95_s = parse_real(fields[10], "p95_s");
            c.ci95_lo_s = parse_real(fields[11], "ci95_lo_s");
            c.ci95_hi_s = parse_real(fields[12], "ci95_hi_s");
        }
        c.timeout_rate = parse_real(fields[13], "timeout_rate");
        result.cells.push_back(std::move(c));
    }
    return result;
}

}  // namespace uavnav::experiment
