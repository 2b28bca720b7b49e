#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "uavnav/rng.hpp"
#include "uavnav/world.hpp"

namespace uavnav::agent {

/// One of the ten RSS bins, 1 = strongest (> -40 dBm), 10 = weakest
/// (< -120 dBm).
struct StateId {
    int index = 10;  // 1..10
};

inline constexpr int kNumStates = 10;

/// Maps a finite RSS reading to its bin. Bins are half-open, 10 dB wide,
/// with each boundary assigned to the stronger-signal state: s=1 covers
/// rss >= -40, s=k covers [-40-10(k-1), -40-10(k-2)) for k in 2..9, and
/// s=10 covers rss < -120. Throws std::domain_error on non-finite input.
StateId quantize_state(double rss_dbm);

/// Terminal means the strongest bin was reached (vicinity of the source).
bool is_terminal(StateId s);

enum class AgentMode { TenState, SingleState };

std::string_view to_string(AgentMode mode);
AgentMode parse_agent_mode(std::string_view text);  // "tenstate" | "singlestate"

/// Fixed alpha, or an alpha that grows linearly as the UAV nears the
/// source: s=10 gets alpha_min, s=1 gets alpha_max.
struct LearningRateSchedule {
    enum class Kind { Fixed, Varying };

    static LearningRateSchedule fixed(double alpha);
    static LearningRateSchedule varying(double alpha_min, double alpha_max);

    /// Parses "fixed:A" or "varying:LO:HI".
    static LearningRateSchedule parse(std::string_view text);

    double alpha_for(StateId s_next) const;
    std::string to_string() const;
    void validate() const;

    Kind kind = Kind::Fixed;
    double alpha = 0.5;
    double alpha_min = 0.2;
    double alpha_max = 0.9;
};

struct AgentConfig {
    double epsilon = 0.1;
    double gamma = 0.9;
    LearningRateSchedule lr_schedule = LearningRateSchedule::varying(0.2, 0.9);
    AgentMode mode = AgentMode::TenState;

    void validate() const;
};

/// Zero-initialized state-action value table, 10x8 in TenState mode and
/// 1x8 in SingleState mode (the baseline collapses every observation onto
/// one row; the update rule is unchanged).
class QTable {
public:
    explicit QTable(AgentMode mode = AgentMode::TenState);

    int rows() const { return rows_; }
    AgentMode mode() const { return mode_; }

    /// Row index the given state maps to under this table's mode.
    int row_of(StateId s) const;

    double at(StateId s, int action) const;
    const double* row(StateId s) const;

    /// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)).
    /// Touches exactly one entry.
    void update(StateId s, int action, double reward, StateId s_next,
                double alpha, double gamma);

    double max_value(StateId s) const;

    /// 10x8 (or 1x8) CSV snapshot: one row per state, one column per action.
    std::string to_csv() const;

private:
    AgentMode mode_;
    int rows_;
    std::vector<double> values_;  // rows_ x 8, row-major
};

/// Epsilon-greedy: with probability epsilon a uniformly random action,
/// otherwise the argmax of the state's row with ties broken uniformly at
/// random among the maximizers.
int select_action(const QTable& table, StateId s, double epsilon, Rng& rng);

/// Immediate reward: the change in smoothed RSS, positive when the signal
/// improved.
double reward(double prev_avg_rss_dbm, double cur_avg_rss_dbm);

}  // namespace uavnav::agent
