#pragma once

#include <algorithm>
#include <cmath>

#include "teachlab/env.hpp"
#include "teachlab/oracle.hpp"

namespace teachlab::reference {

// Synchronous value iteration on the slip MDP. The step cap is ignored, which
// matches Q-learning that bootstraps through truncation.
inline oracle::QTable value_iteration(const env::EnvConfig& config, double gamma,
                                      double tolerance = 1e-12, int max_sweeps = 100000) {
    oracle::QTable q;
    const double p = config.slip_prob;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        oracle::QTable next;
        double delta = 0.0;
        for (const auto& s : env::enumerate_states(config)) {
            if (env::is_terminal_pose(s)) continue;
            const double v_here = q.state_value(s);
            for (env::Action a : env::kAllActions) {
                const env::Transition t = env::step_deterministic(config, s, a);
                const double moved = t.env_reward + (t.terminal ? 0.0 : gamma * q.state_value(t.next_state));
                const double value = p * gamma * v_here + (1.0 - p) * moved;
                delta = std::max(delta, std::abs(value - q.value(s, a)));
                next.set(s, a, value);
            }
        }
        q = next;
        if (delta < tolerance) break;
    }
    return q;
}

}  // namespace teachlab::reference
