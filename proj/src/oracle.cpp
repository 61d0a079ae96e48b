#include "teachlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace teachlab::oracle {

using env::Action;
using env::GridPose;

ValueTable::ValueTable()
    : values_(static_cast<std::size_t>(env::kNumStates * env::kNumActions), 0.0),
      visits_(static_cast<std::size_t>(env::kNumStates * env::kNumActions), 0) {}

std::size_t ValueTable::slot(const GridPose& s, Action a) {
    if (!env::in_bounds(s)) throw std::out_of_range("pose out of bounds");
    return static_cast<std::size_t>(env::pose_index(s)) * env::kNumActions +
           static_cast<std::size_t>(a);
}

double ValueTable::value(const GridPose& s, Action a) const { return values_[slot(s, a)]; }

void ValueTable::set(const GridPose& s, Action a, double v) { values_[slot(s, a)] = v; }

std::array<double, env::kNumActions> ValueTable::row(const GridPose& s) const {
    std::array<double, env::kNumActions> r{};
    const std::size_t base = slot(s, Action::Left);
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(base), env::kNumActions, r.begin());
    return r;
}

std::uint64_t ValueTable::visits(const GridPose& s, Action a) const { return visits_[slot(s, a)]; }

void ValueTable::add_visit(const GridPose& s, Action a) { ++visits_[slot(s, a)]; }

void ValueTable::set_visits(const GridPose& s, Action a, std::uint64_t n) { visits_[slot(s, a)] = n; }

double ValueTable::state_value(const GridPose& s) const {
    const auto r = row(s);
    return *std::max_element(r.begin(), r.end());
}

Action ValueTable::greedy(const GridPose& s) const {
    const auto r = row(s);
    // max_element returns the first maximum, which is the tie order.
    return static_cast<Action>(std::max_element(r.begin(), r.end()) - r.begin());
}

namespace {

std::vector<GridPose> start_poses() {
    std::vector<GridPose> out;
    for (int i = 0; i < env::kNumStates; ++i) {
        const GridPose p = env::pose_from_index(i);
        if (!env::is_terminal_pose(p)) out.push_back(p);
    }
    return out;
}

Action epsilon_greedy(const QTable& q, const GridPose& s, double epsilon, env::Rng& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (epsilon > 0.0 && coin(rng) < epsilon) {
        std::uniform_int_distribution<int> pick(0, env::kNumActions - 1);
        return static_cast<Action>(pick(rng));
    }
    return q.greedy(s);
}

void check_params(const QLearningParams& p) {
    if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0,1]");
    if (!(p.gamma > 0.0 && p.gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0,1]");
    if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0))
        throw std::invalid_argument("epsilon must be in [0,1]");
    if (!(p.alpha_decay >= 0.0 && p.alpha_decay <= 1.0))
        throw std::invalid_argument("alpha_decay must be in [0,1]");
    if (p.episodes < 0) throw std::invalid_argument("episodes must be non-negative");
}

}  // namespace

void continue_training(QTable& q, const env::EnvConfig& config, const QLearningParams& params,
                       int episodes, env::Rng& rng) {
    check_params(params);
    config.validate();
    static const std::vector<GridPose> starts = start_poses();
    std::uniform_int_distribution<std::size_t> pick_start(0, starts.size() - 1);

    for (int ep = 0; ep < episodes; ++ep) {
        GridPose s = starts[pick_start(rng)];
        for (int k = 0; k < config.step_cap; ++k) {
            const Action a = epsilon_greedy(q, s, params.epsilon, rng);
            const env::Transition t = env::step(config, s, a, rng);
            // Hitting the step cap is a truncation, so it still bootstraps.
            const double target =
                t.env_reward + (t.terminal ? 0.0 : params.gamma * q.state_value(t.next_state));
            q.add_visit(s, a);
            const double step_size =
                params.alpha_decay == 0.0
                    ? params.alpha
                    : params.alpha * std::pow(static_cast<double>(q.visits(s, a)), -params.alpha_decay);
            const double old = q.value(s, a);
            q.set(s, a, old + step_size * (target - old));
            if (t.terminal) break;
            s = t.next_state;
        }
    }
}

QTable train_q(const env::EnvConfig& config, const QLearningParams& params, env::Rng& rng) {
    QTable q;
    continue_training(q, config, params, params.episodes, rng);
    return q;
}

double advantage(const QTable& q, const GridPose& s, Action a) {
    return q.value(s, a) - q.state_value(s);
}

double normalized_q(const QTable& q, const GridPose& s, Action a) {
    const auto r = q.row(s);
    const double sum = std::accumulate(r.begin(), r.end(), 0.0);
    if (sum == 0.0) throw DegenerateStateError("Q row sums to zero; normalized Q undefined");
    return q.value(s, a) / sum;
}

int action_rank(const QTable& q, const GridPose& s, Action a) {
    const auto r = q.row(s);
    const auto ai = static_cast<std::size_t>(a);
    int rank = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] > r[ai] || (r[i] == r[ai] && i < ai)) ++rank;
    }
    return rank;
}

env::Policy epsilon_greedy_policy(const QTable& q, double epsilon) {
    return [q, epsilon](const GridPose& s, env::Rng& rng) { return epsilon_greedy(q, s, epsilon, rng); };
}

env::Policy greedy_policy(const QTable& q) {
    return [q](const GridPose& s, env::Rng&) { return q.greedy(s); };
}

double success_rate(const env::Policy& policy, const env::EnvConfig& config, int rollouts,
                    env::Rng& rng) {
    if (rollouts <= 0) throw std::invalid_argument("rollouts must be positive");
    int wins = 0;
    for (int i = 0; i < rollouts; ++i) {
        if (env::generate_trajectory(policy, config, rng).success) ++wins;
    }
    return static_cast<double>(wins) / rollouts;
}

PartialCheckpoint train_partial(const env::EnvConfig& config, const PartialTrainingParams& params,
                                env::Rng& rng) {
    for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
        PartialCheckpoint cp;
        cp.attempt = attempt;
        while (cp.episodes <= params.max_episodes) {
            const double rate = success_rate(epsilon_greedy_policy(cp.q, params.behaviour_epsilon),
                                             config, params.eval_rollouts, rng);
            if (rate >= params.min_success && rate <= params.max_success) {
                cp.success_rate = rate;
                return cp;
            }
            if (rate > params.max_success) break;
            continue_training(cp.q, config, params.q, params.chunk_episodes, rng);
            cp.episodes += params.chunk_episodes;
        }
    }
    throw std::runtime_error("partial-training checkpoint not reached within max_attempts");
}

void write_csv(const QTable& q, std::ostream& out) {
    out << "x,y,z,action,value,visits\n";
    out.precision(17);
    for (int i = 0; i < env::kNumStates; ++i) {
        const GridPose p = env::pose_from_index(i);
        for (Action a : env::kAllActions) {
            out << p.x << ',' << p.y << ',' << p.z << ',' << env::to_string(a) << ','
                << q.value(p, a) << ',' << q.visits(p, a) << '\n';
        }
    }
}

QTable read_csv(std::istream& in) {
    QTable q;
    std::string line;
    if (!std::getline(in, line) || line != "x,y,z,action,value,visits")
        throw std::runtime_error("Q-table CSV: unexpected header");
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string fx, fy, fz, fa, fv, fn;
        if (!std::getline(ss, fx, ',') || !std::getline(ss, fy, ',') ||
            !std::getline(ss, fz, ',') || !std::getline(ss, fa, ',') ||
            !std::getline(ss, fv, ',') || !std::getline(ss, fn, ','))
            throw std::runtime_error("Q-table CSV: row " + std::to_string(row) + " has too few columns");
        const GridPose p{std::stoi(fx), std::stoi(fy), std::stoi(fz)};
        const Action a = env::action_from_string(fa);
        q.set(p, a, std::stod(fv));
        q.set_visits(p, a, std::stoull(fn));
    }
    return q;
}

}  // namespace teachlab::oracle
