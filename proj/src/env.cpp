#include "teachlab/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace teachlab::env {

namespace {

constexpr std::array<std::string_view, kNumActions> kActionNames{"left", "right", "backward",
                                                                 "forward", "down"};
constexpr std::array<std::string_view, 4> kOutcomeNames{"none", "press", "wrong_down", "cap"};

GridPose moved(const GridPose& p, Action a) {
    GridPose n = p;
    switch (a) {
        case Action::Left: n.x -= 1; break;
        case Action::Right: n.x += 1; break;
        case Action::Backward: n.y -= 1; break;
        case Action::Forward: n.y += 1; break;
        case Action::Down: n.z -= 1; break;
    }
    n.x = std::clamp(n.x, 0, kGridX - 1);
    n.y = std::clamp(n.y, 0, kGridY - 1);
    n.z = std::clamp(n.z, 0, kGridZ - 1);
    return n;
}

}  // namespace

std::string_view to_string(Action a) { return kActionNames[static_cast<std::size_t>(a)]; }

Action action_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kActionNames.size(); ++i) {
        if (kActionNames[i] == name) return static_cast<Action>(i);
    }
    throw std::invalid_argument("unknown action '" + std::string(name) + "'");
}

std::string_view to_string(Outcome o) { return kOutcomeNames[static_cast<std::size_t>(o)]; }

Outcome outcome_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kOutcomeNames.size(); ++i) {
        if (kOutcomeNames[i] == name) return static_cast<Outcome>(i);
    }
    throw std::invalid_argument("unknown outcome '" + std::string(name) + "'");
}

bool in_bounds(const GridPose& p) {
    return p.x >= 0 && p.x < kGridX && p.y >= 0 && p.y < kGridY && p.z >= 0 && p.z < kGridZ;
}

int pose_index(const GridPose& p) { return (p.x * kGridY + p.y) * kGridZ + p.z; }

GridPose pose_from_index(int index) {
    if (index < 0 || index >= kNumStates) throw std::out_of_range("pose index out of range");
    return GridPose{index / (kGridY * kGridZ), (index / kGridZ) % kGridY, index % kGridZ};
}

bool is_terminal_pose(const GridPose& p) { return p.z == 0; }

void EnvConfig::validate() const {
    if (!in_bounds(button_pose) || button_pose.z != 0)
        throw std::invalid_argument("button_pose must lie on the table (z = 0)");
    if (!in_bounds(start_pose) || is_terminal_pose(start_pose))
        throw std::invalid_argument("start_pose must be in bounds with z >= 1");
    if (step_cap <= 0) throw std::invalid_argument("step_cap must be positive");
    if (!(slip_prob >= 0.0 && slip_prob < 1.0))
        throw std::invalid_argument("slip_prob must lie in [0, 1)");
}

double Trajectory::total_return() const {
    double sum = 0.0;
    for (const auto& t : transitions) sum += t.env_reward;
    return sum;
}

Policy deterministic_policy(std::function<Action(const GridPose&)> fn) {
    return [fn = std::move(fn)](const GridPose& p, Rng&) { return fn(p); };
}

std::vector<GridPose> enumerate_states(const EnvConfig& config) {
    config.validate();
    std::vector<GridPose> out;
    out.reserve(kNumStates);
    for (int i = 0; i < kNumStates; ++i) out.push_back(pose_from_index(i));
    return out;
}

double distance_to_button(const EnvConfig& config, const GridPose& p) {
    const double dx = p.x - config.button_pose.x;
    const double dy = p.y - config.button_pose.y;
    const double dz = p.z - config.button_pose.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

int moves_to_button(const EnvConfig& config, const GridPose& p) {
    return std::abs(p.x - config.button_pose.x) + std::abs(p.y - config.button_pose.y) +
           std::abs(p.z - config.button_pose.z);
}

double shaping_magnitude(const EnvConfig& config, int level) {
    if (level < 1) throw std::invalid_argument("shaping level must be positive");
    const double ref = moves_to_button(config, config.start_pose);
    return 0.4 + 0.1 * std::min(1.0, ref / level);
}

Transition step_deterministic(const EnvConfig& config, const GridPose& state, Action action) {
    if (!in_bounds(state)) throw std::out_of_range("state out of bounds");
    if (is_terminal_pose(state)) throw std::logic_error("cannot step from a terminal pose");

    Transition t;
    t.state = state;
    t.action = action;
    t.next_state = moved(state, action);

    if (action == Action::Down) {
        const bool aligned = state.x == config.button_pose.x && state.y == config.button_pose.y;
        if (!aligned) {
            t.env_reward = -1.0;
            t.terminal = true;
            t.outcome = Outcome::WrongDown;
            return t;
        }
        if (t.next_state.z == 0) {
            t.env_reward = 10.0;
            t.terminal = true;
            t.outcome = Outcome::Press;
            return t;
        }
    }

    const int l_old = moves_to_button(config, state);
    const int l_new = moves_to_button(config, t.next_state);
    t.env_reward = l_new < l_old ? shaping_magnitude(config, l_old) : -0.5;
    return t;
}

Transition step(const EnvConfig& config, const GridPose& state, Action action, Rng& rng) {
    if (is_terminal_pose(state)) throw std::logic_error("cannot step from a terminal pose");
    std::bernoulli_distribution slip(config.slip_prob);
    if (config.slip_prob > 0.0 && slip(rng)) {
        Transition t;
        t.state = state;
        t.action = action;
        t.next_state = state;
        return t;
    }
    return step_deterministic(config, state, action);
}

Trajectory generate_trajectory(const Policy& policy, const EnvConfig& config, Rng& rng,
                               std::uint64_t first_id) {
    config.validate();
    Trajectory traj;
    GridPose s = config.start_pose;
    for (int k = 0; k < config.step_cap; ++k) {
        Transition t = step(config, s, policy(s, rng), rng);
        t.id = first_id + static_cast<std::uint64_t>(k);
        if (!t.terminal && k + 1 == config.step_cap) {
            t.terminal = true;
            t.outcome = Outcome::Cap;
        }
        traj.transitions.push_back(t);
        if (t.terminal) break;
        s = t.next_state;
    }
    traj.success = !traj.transitions.empty() && traj.transitions.back().outcome == Outcome::Press;
    return traj;
}

std::vector<Transition> generate_session(const Policy& policy, const EnvConfig& config, Rng& rng,
                                         const SessionOptions& options) {
    const int n_traj = options.successes + options.failures;
    if (n_traj <= 0 || options.clips_per_session < n_traj)
        throw std::invalid_argument("session needs at least one clip per trajectory");

    // Cap-terminated failures can never fit next to five other trajectories,
    // so failures are drawn from WrongDown episodes only.
    const auto max_len = static_cast<std::size_t>(options.clips_per_session - (n_traj - 1));
    std::vector<Trajectory> wins;
    std::vector<Trajectory> losses;
    for (int i = 0; i < options.pool_size; ++i) {
        Trajectory t = generate_trajectory(policy, config, rng);
        if (t.transitions.size() > max_len) continue;
        if (t.success) {
            wins.push_back(std::move(t));
        } else if (t.transitions.back().outcome == Outcome::WrongDown) {
            losses.push_back(std::move(t));
        }
    }
    if (static_cast<int>(wins.size()) < options.successes ||
        static_cast<int>(losses.size()) < options.failures)
        throw std::runtime_error("trajectory pool cannot meet the success/failure quota");

    auto pick = [&rng](std::size_t n, std::size_t k) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::uniform_int_distribution<std::size_t> u(i, n - 1);
            std::swap(idx[i], idx[u(rng)]);
        }
        idx.resize(k);
        return idx;
    };

    // Choose all but one trajectory at random, then look for a last one whose
    // length closes the gap to exactly clips_per_session.
    const bool last_is_failure = options.failures > 0;
    auto& last_pool = last_is_failure ? losses : wins;
    for (int attempt = 0; attempt < options.max_retries; ++attempt) {
        const auto w = pick(wins.size(), static_cast<std::size_t>(options.successes -
                                                                  (last_is_failure ? 0 : 1)));
        const auto l = pick(losses.size(), static_cast<std::size_t>(options.failures -
                                                                    (last_is_failure ? 1 : 0)));
        std::size_t used = 0;
        for (auto i : w) used += wins[i].transitions.size();
        for (auto i : l) used += losses[i].transitions.size();
        if (used >= static_cast<std::size_t>(options.clips_per_session)) continue;
        const std::size_t need = static_cast<std::size_t>(options.clips_per_session) - used;

        const auto& taken = last_is_failure ? l : w;
        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < last_pool.size(); ++i) {
            if (last_pool[i].transitions.size() != need) continue;
            if (std::find(taken.begin(), taken.end(), i) != taken.end()) continue;
            candidates.push_back(i);
        }
        if (candidates.empty()) continue;
        std::uniform_int_distribution<std::size_t> u(0, candidates.size() - 1);
        const std::size_t last = candidates[u(rng)];

        std::vector<const Trajectory*> chosen;
        for (auto i : w) chosen.push_back(&wins[i]);
        for (auto i : l) chosen.push_back(&losses[i]);
        chosen.push_back(&last_pool[last]);
        std::shuffle(chosen.begin(), chosen.end(), rng);

        std::vector<Transition> session;
        session.reserve(2 * static_cast<std::size_t>(options.clips_per_session));
        std::uint64_t id = 0;
        for (const Trajectory* t : chosen) {
            for (Transition tr : t->transitions) {
                tr.id = id++;
                session.push_back(tr);
            }
        }
        const std::size_t half = session.size();
        for (std::size_t i = 0; i < half; ++i) session.push_back(session[i]);
        return session;
    }
    throw std::runtime_error("could not assemble a session of exactly " +
                             std::to_string(options.clips_per_session) + " clips");
}

Action reference_action(const EnvConfig& config, const GridPose& p) {
    if (p.x < config.button_pose.x) return Action::Right;
    if (p.x > config.button_pose.x) return Action::Left;
    if (p.y < config.button_pose.y) return Action::Forward;
    if (p.y > config.button_pose.y) return Action::Backward;
    return Action::Down;
}

}  // namespace teachlab::env
