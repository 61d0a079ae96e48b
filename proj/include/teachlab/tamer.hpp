#pragma once

#include <span>
#include <utility>
#include <vector>

#include "teachlab/env.hpp"
#include "teachlab/oracle.hpp"

namespace teachlab::tamer {

/// Tabular human-reinforcement model H(s, a). Same layout as the Q table.
class HTable {
public:
    explicit HTable(double alpha = 0.5);

    double alpha() const { return alpha_; }
    const oracle::ValueTable& values() const { return table_; }
    double value(const env::GridPose& s, env::Action a) const { return table_.value(s, a); }

    /// h(s,a) <- h + alpha * (signal - h). Throws std::invalid_argument for a
    /// non-finite signal.
    void update(const env::Transition& t, double signal);

    /// Greedy action, ties broken by action order.
    env::Action act(const env::GridPose& s) const { return table_.greedy(s); }

    friend bool operator==(const HTable&, const HTable&) = default;

private:
    double alpha_;
    oracle::ValueTable table_;
};

using FeedbackLogEntry = std::pair<env::Transition, double>;

/// Folds update over the log in order, starting from the all-zero table.
HTable train_from_log(std::span<const FeedbackLogEntry> log, double alpha = 0.5);

struct Evaluation {
    std::vector<double> returns;
    double mean = 0.0;
};

/// Greedy rollouts with the environment's slip noise active.
Evaluation evaluate(const HTable& h, const env::EnvConfig& config, int runs, env::Rng& rng);

}  // namespace teachlab::tamer
