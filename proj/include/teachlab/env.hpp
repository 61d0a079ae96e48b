#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace teachlab::env {

inline constexpr int kGridX = 10;
inline constexpr int kGridY = 10;
inline constexpr int kGridZ = 7;
inline constexpr int kNumStates = kGridX * kGridY * kGridZ;  // 700
inline constexpr int kNumActions = 5;

/// Gripper position on the discretized workspace. z = 0 is table height.
struct GridPose {
    int x = 0;
    int y = 0;
    int z = 0;

    friend bool operator==(const GridPose&, const GridPose&) = default;
};

enum class Action : std::uint8_t { Left = 0, Right, Backward, Forward, Down };

inline constexpr std::array<Action, kNumActions> kAllActions{
    Action::Left, Action::Right, Action::Backward, Action::Forward, Action::Down};

std::string_view to_string(Action a);
Action action_from_string(std::string_view name);

enum class Outcome : std::uint8_t { None = 0, Press, WrongDown, Cap };

std::string_view to_string(Outcome o);
Outcome outcome_from_string(std::string_view name);

bool in_bounds(const GridPose& p);
/// x-major, then y, then z. Index of (0,0,0) is 0.
int pose_index(const GridPose& p);
GridPose pose_from_index(int index);
/// Poses at table height end an episode; nothing may be stepped from them.
bool is_terminal_pose(const GridPose& p);

struct EnvConfig {
    GridPose button_pose{5, 6, 0};
    GridPose start_pose{2, 4, 4};
    int step_cap = 100;
    double slip_prob = 0.1;
    std::uint64_t rng_seed = 7;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

struct Transition {
    std::uint64_t id = 0;
    GridPose state;
    Action action = Action::Left;
    GridPose next_state;
    double env_reward = 0.0;
    bool terminal = false;
    Outcome outcome = Outcome::None;

    friend bool operator==(const Transition&, const Transition&) = default;
};

struct Trajectory {
    std::vector<Transition> transitions;
    bool success = false;

    double total_return() const;
};

using Rng = std::mt19937_64;
/// Behaviour policies may be stochastic, so they receive the rollout rng.
using Policy = std::function<Action(const GridPose&, Rng&)>;

/// Wraps a deterministic state -> action map as a Policy.
Policy deterministic_policy(std::function<Action(const GridPose&)> fn);

std::vector<GridPose> enumerate_states(const EnvConfig& config);

/// Euclidean distance in cells from a pose to the button.
double distance_to_button(const EnvConfig& config, const GridPose& p);

/// Manhattan distance in cells from a pose to the button. Every axis move
/// changes it by exactly one, in the same direction as the Euclidean distance.
int moves_to_button(const EnvConfig& config, const GridPose& p);

/// Reward for a move toward the button that crosses from Manhattan level
/// `level` to `level - 1`: 0.4 + 0.1 * min(1, L / level), L being the start
/// pose's level. Moves away and wall bumps always cost 0.5, never less than
/// the reverse move earns, so no detour can beat the shortest path.
double shaping_magnitude(const EnvConfig& config, int level);

/// Noise-free dynamics: the pure function of (state, action) that `step`
/// applies when no slip occurs. Returned transition has id 0.
Transition step_deterministic(const EnvConfig& config, const GridPose& state, Action action);

/// One stochastic step. With probability slip_prob the pose is unchanged and
/// the reward is 0. Throws std::logic_error when `state` is terminal.
Transition step(const EnvConfig& config, const GridPose& state, Action action, Rng& rng);

/// Rolls out from config.start_pose until a terminal outcome or step_cap.
/// Transition ids are first_id, first_id + 1, ...
Trajectory generate_trajectory(const Policy& policy, const EnvConfig& config, Rng& rng,
                               std::uint64_t first_id = 0);

struct SessionOptions {
    int clips_per_session = 100;
    int successes = 3;
    int failures = 3;
    int pool_size = 400;
    int max_retries = 20000;
};

/// Builds one 100-clip session of exactly three successful and three failed
/// trajectories, then appends an identical copy (200 transitions total).
/// Throws std::runtime_error if the quota cannot be met within the retry bound.
std::vector<Transition> generate_session(const Policy& policy, const EnvConfig& config, Rng& rng,
                                         const SessionOptions& options = {});

/// Optimal shortest-path action toward the button (used as the reference
/// policy): align x, then y, then descend.
Action reference_action(const EnvConfig& config, const GridPose& p);

}  // namespace teachlab::env
