#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "teachlab/env.hpp"

namespace teachlab::oracle {

/// Thrown by normalized_q when the per-state Q sum is zero.
class DegenerateStateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Dense (pose, action) value table. Every one of the 3500 pairs is present
/// and defaults to zero.
class ValueTable {
public:
    ValueTable();

    double value(const env::GridPose& s, env::Action a) const;
    void set(const env::GridPose& s, env::Action a, double v);
    std::array<double, env::kNumActions> row(const env::GridPose& s) const;

    std::uint64_t visits(const env::GridPose& s, env::Action a) const;
    void add_visit(const env::GridPose& s, env::Action a);
    void set_visits(const env::GridPose& s, env::Action a, std::uint64_t n);

    /// max over actions of the row.
    double state_value(const env::GridPose& s) const;
    /// argmax with ties broken by action order (Left first).
    env::Action greedy(const env::GridPose& s) const;

    friend bool operator==(const ValueTable&, const ValueTable&) = default;

private:
    static std::size_t slot(const env::GridPose& s, env::Action a);

    std::vector<double> values_;
    std::vector<std::uint64_t> visits_;
};

using QTable = ValueTable;

struct QLearningParams {
    int episodes = 50000;
    double alpha = 0.1;
    double gamma = 0.9;
    double epsilon = 0.2;
    /// Step size for the n-th visit of a pair is alpha * n^-alpha_decay;
    /// 0 keeps it constant.
    double alpha_decay = 0.0;
};

/// Tabular Q-learning with exploring starts over all non-terminal poses.
/// Deterministic given the rng state.
QTable train_q(const env::EnvConfig& config, const QLearningParams& params, env::Rng& rng);

/// Continues training an existing table for `episodes` more episodes.
void continue_training(QTable& q, const env::EnvConfig& config, const QLearningParams& params,
                       int episodes, env::Rng& rng);

/// A(s,a) = Q(s,a) - V(s) with V(s) = max_a Q(s,a).
double advantage(const QTable& q, const env::GridPose& s, env::Action a);

/// Q(s,a) / sum_i Q(s,a_i). Throws DegenerateStateError on a zero sum.
double normalized_q(const QTable& q, const env::GridPose& s, env::Action a);

/// 0 for the largest Q(s,.), ties broken by action order.
int action_rank(const QTable& q, const env::GridPose& s, env::Action a);

/// Greedy action with probability 1 - epsilon, otherwise uniform.
env::Policy epsilon_greedy_policy(const QTable& q, double epsilon);
env::Policy greedy_policy(const QTable& q);

/// Fraction of `rollouts` episodes from the start pose that end in a press.
double success_rate(const env::Policy& policy, const env::EnvConfig& config, int rollouts,
                    env::Rng& rng);

struct PartialTrainingParams {
    QLearningParams q;
    int chunk_episodes = 1;
    int max_episodes = 2000;  // per attempt
    int max_attempts = 500;
    double behaviour_epsilon = 0.2;
    double min_success = 0.4;
    double max_success = 0.6;
    int eval_rollouts = 1000;
};

struct PartialCheckpoint {
    QTable q;
    int episodes = 0;
    int attempt = 0;
    double success_rate = 0.0;
};

/// Trains in chunks until the epsilon-greedy behaviour policy's success rate
/// falls in [min_success, max_success]. Shaped rewards make the rate jump
/// sharply, so an attempt that overshoots max_success restarts from an empty
/// table. Throws std::runtime_error when every attempt fails.
PartialCheckpoint train_partial(const env::EnvConfig& config, const PartialTrainingParams& params,
                                env::Rng& rng);

/// CSV rows: x,y,z,action,value,visits
void write_csv(const QTable& q, std::ostream& out);
QTable read_csv(std::istream& in);

}  // namespace teachlab::oracle
