#include "uavnav/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace uavnav::agent {

StateId quantize_state(double rss_dbm) {
    if (!std::isfinite(rss_dbm)) {
        throw std::domain_error("quantize_state: rss must be finite");
    }
    if (rss_dbm >= -40.0) {
        return {1};
    }
    for (int k = 2; k <= 9; ++k) {
        const double lower = -40.0 - 10.0 * (k - 1);
        if (rss_dbm >= lower) {
            return {k};
        }
    }
    return {10};
}

bool is_terminal(StateId s) {
    return s.index == 1;
}

std::string_view to_string(AgentMode mode) {
    return mode == AgentMode::TenState ? "tenstate" : "singlestate";
}

AgentMode parse_agent_mode(std::string_view text) {
    if (text == "tenstate") {
        return AgentMode::TenState;
    }
    if (text == "singlestate") {
        return AgentMode::SingleState;
    }
    throw std::invalid_argument("agent mode must be 'tenstate' or 'singlestate', got '" +
                                std::string(text) + "'");
}

LearningRateSchedule LearningRateSchedule::fixed(double alpha) {
    LearningRateSchedule s;
    s.kind = Kind::Fixed;
    s.alpha = alpha;
    s.validate();
    return s;
}

LearningRateSchedule LearningRateSchedule::varying(double alpha_min, double alpha_max) {
    LearningRateSchedule s;
    s.kind = Kind::Varying;
    s.alpha_min = alpha_min;
    s.alpha_max = alpha_max;
    s.validate();
    return s;
}

LearningRateSchedule LearningRateSchedule::parse(std::string_view text) {
    auto parse_real = [&](std::string_view part) {
        try {
            return std::stod(std::string(part));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad learning-rate value '" + std::string(part) +
                                        "' in schedule '" + std::string(text) + "'");
        }
    };
    if (text.starts_with("fixed:")) {
        return fixed(parse_real(text.substr(6)));
    }
    if (text.starts_with("varying:")) {
        const std::string_view rest = text.substr(8);
        const std::size_t sep = rest.find(':');
        if (sep == std::string_view::npos) {
            throw std::invalid_argument("varying schedule needs 'varying:LO:HI', got '" +
                                        std::string(text) + "'");
        }
        return varying(parse_real(rest.substr(0, sep)), parse_real(rest.substr(sep + 1)));
    }
    throw std::invalid_argument("schedule must be 'fixed:A' or 'varying:LO:HI', got '" +
                                std::string(text) + "'");
}

void LearningRateSchedule::validate() const {
    auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    if (kind == Kind::Fixed) {
        if (!in_unit(alpha)) {
            throw std::invalid_argument("fixed learning rate must be in [0,1]");
        }
    } else {
        if (!in_unit(alpha_min) || !in_unit(alpha_max) || alpha_min > alpha_max) {
            throw std::invalid_argument(
                "varying learning rate needs 0 <= alpha_min <= alpha_max <= 1");
        }
    }
}

double LearningRateSchedule::alpha_for(StateId s_next) const {
    if (kind == Kind::Fixed) {
        return alpha;
    }
    return alpha_min + (alpha_max - alpha_min) * (kNumStates - s_next.index) / 9.0;
}

std::string LearningRateSchedule::to_string() const {
    char buf[64];
    if (kind == Kind::Fixed) {
        std::snprintf(buf, sizeof(buf), "fixed:%g", alpha);
    } else {
        std::snprintf(buf, sizeof(buf), "varying:%g:%g", alpha_min, alpha_max);
    }
    return buf;
}

void AgentConfig::validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("epsilon must be in [0,1]");
    }
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("gamma must be in [0,1]");
    }
    lr_schedule.validate();
}

QTable::QTable(AgentMode mode)
    : mode_(mode),
      rows_(mode == AgentMode::TenState ? kNumStates : 1),
      values_(static_cast<std::size_t>(rows_) * world::ActionId::kCount, 0.0) {}

int QTable::row_of(StateId s) const {
    if (s.index < 1 || s.index > kNumStates) {
        throw std::out_of_range("QTable: state index out of range");
    }
    return mode_ == AgentMode::TenState ? s.index - 1 : 0;
}

double QTable::at(StateId s, int action) const {
    return row(s)[action];
}

const double* QTable::row(StateId s) const {
    return values_.data() + static_cast<std::size_t>(row_of(s)) * world::ActionId::kCount;
}

double QTable::max_value(StateId s) const {
    const double* r = row(s);
    return *std::max_element(r, r + world::ActionId::kCount);
}

void QTable::update(StateId s, int action, double reward, StateId s_next,
                    double alpha, double gamma) {
    if (action < 0 || action >= world::ActionId::kCount) {
        throw std::out_of_range("QTable: action index out of range");
    }
    const double target = reward + gamma * max_value(s_next);
    double& q = values_[static_cast<std::size_t>(row_of(s)) * world::ActionId::kCount + action];
    q += alpha * (target - q);
}

std::string QTable::to_csv() const {
    std::string out;
    char buf[32];
    for (int r = 0; r < rows_; ++r) {
        for (int a = 0; a < world::ActionId::kCount; ++a) {
            std::snprintf(buf, sizeof(buf), "%.9g",
                          values_[static_cast<std::size_t>(r) * world::ActionId::kCount + a]);
            out += buf;
            out += (a + 1 < world::ActionId::kCount) ? ',' : '\n';
        }
    }
    return out;
}

int select_action(const QTable& table, StateId s, double epsilon, Rng& rng) {
    if (epsilon > 0.0 && rng.u01() < epsilon) {
        return static_cast<int>(rng.below(world::ActionId::kCount));
    }
    const double* row = table.row(s);
    double best = row[0];
    int ties[world::ActionId::kCount];
    int num_ties = 1;
    ties[0] = 0;
    for (int a = 1; a < world::ActionId::kCount; ++a) {
        if (row[a] > best) {
            best = row[a];
            ties[0] = a;
            num_ties = 1;
        } else if (row[a] == best) {
            ties[num_ties++] = a;
        }
    }
    if (num_ties == 1) {
        return ties[0];
    }
    return ties[rng.below(static_cast<std::uint32_t>(num_ties))];
}

double reward(double prev_avg_rss_dbm, double cur_avg_rss_dbm) {
    return cur_avg_rss_dbm - prev_avg_rss_dbm;
}

}  // namespace uavnav::agent
