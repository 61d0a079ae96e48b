#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "teachlab/env.hpp"
#include "teachlab/feedback.hpp"
#include "teachlab/oracle.hpp"
#include "teachlab/teachers.hpp"

namespace teachlab::harness {

enum class Condition { Binary, RawScalar, Midpoint, SlidingWindow, Steady, EnvCeiling };

inline constexpr std::array<Condition, 6> kAllConditions{
    Condition::Binary,        Condition::RawScalar, Condition::Midpoint,
    Condition::SlidingWindow, Condition::Steady,    Condition::EnvCeiling};

std::string_view to_string(Condition c);
Condition condition_from_string(std::string_view name);

struct ExperimentConfig {
    env::EnvConfig env;
    oracle::QLearningParams oracle{200000, 1.0, 0.9, 0.5, 0.8};
    oracle::PartialTrainingParams behaviour;
    env::SessionOptions session;
    teachers::CohortParams cohort;
    int teachers_per_modality = 45;
    std::vector<Condition> conditions{kAllConditions.begin(), kAllConditions.end()};
    int eval_runs = 10;
    double tamer_alpha = 0.5;
    double target_scale = teachers::kDefaultTargetScale;
    std::size_t steady_k = 20;
    std::size_t window_capacity = 20;
    /// Redraw the session until a model trained on its environment rewards
    /// reaches the button, giving up after this many draws. 0 disables the
    /// check.
    int session_attempts = 200;
    std::uint64_t master_seed = 1;
    unsigned threads = 0;  // 0 = hardware concurrency

    /// Throws std::invalid_argument on an empty condition list or eval_runs < 1.
    void validate() const;
};

/// Independent, reproducible seed for a named stream under a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0);

/// Everything a comparison needs besides the feedback itself.
struct World {
    oracle::QTable oracle;          // fully trained: teacher targets and correlations
    oracle::PartialCheckpoint behaviour;
    std::vector<env::Transition> session;  // 200 clips
    int session_draws = 1;
};

/// True when TAMER trained on the clips' environment rewards presses the
/// button from the start pose with slip disabled.
bool session_learnable(std::span<const env::Transition> clips, const ExperimentConfig& config);

World build_world(const ExperimentConfig& config);

/// Converts one teacher's log into TAMER reward signals for a condition.
/// Binary logs feed the Binary condition; scalar logs feed the four scalar
/// conditions. EnvCeiling ignores the values and uses the clips' rewards.
/// Throws std::invalid_argument on a modality/condition mismatch.
std::vector<double> transform_log(Condition c, const FeedbackLog& log,
                                  std::span<const env::Transition> clips,
                                  const ExperimentConfig& config);

struct ResultRow {
    Condition condition = Condition::Steady;
    std::string teacher_id;
    int pair_index = 0;
    double mean_return = 0.0;
    std::vector<double> returns;
};

struct ConditionSummary {
    Condition condition = Condition::Steady;
    int models = 0;
    double mean = 0.0;
    double sd = 0.0;
};

struct ResultsTable {
    std::vector<ResultRow> rows;  // sorted by (condition, pair_index)

    std::vector<ConditionSummary> summary() const;
    std::optional<double> cohort_mean(Condition c) const;
    const ResultRow* find(Condition c, int pair_index) const;
};

/// Simulated cohort: teachers are generated from the config and rate the
/// world's session.
ResultsTable run_experiment(const ExperimentConfig& config);

/// Same comparison on supplied logs (e.g. collected from people). Binary and
/// scalar logs are paired by their order within each modality.
ResultsTable run_experiment(const ExperimentConfig& config, std::span<const env::Transition> clips,
                            std::span<const FeedbackLog> logs);

/// Thrown for CSV inputs that do not match the canonical schema.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kFeedbackCsvHeader =
    "teacher_id,modality,clip_index,session,transition_id,value,timestamp_ms";

void write_feedback_csv(std::span<const FeedbackLog> logs, std::ostream& out);
/// Parses canonical feedback CSV. Columns may come in any order; missing
/// columns and bad cells raise SchemaError with row/column details. Logs are
/// validated only when `require_complete` is set.
std::vector<FeedbackLog> read_feedback_csv(std::istream& in, bool require_complete = true);
/// Reads a feedback CSV file and validates every teacher's log (200 events).
std::vector<FeedbackLog> ingest_log(const std::filesystem::path& path);

void write_transitions_csv(std::span<const env::Transition> clips, std::ostream& out);
std::vector<env::Transition> read_transitions_csv(std::istream& in);

enum class ResultFormat { Csv, Json };

/// Writes `condition,teacher_id,mean_return` rows plus per-condition
/// cohort_mean / cohort_sd rows. Throws std::invalid_argument on an empty
/// table.
void emit_results(const ResultsTable& table, ResultFormat format, std::ostream& out);
void emit_results(const ResultsTable& table, ResultFormat format, const std::filesystem::path& path);

}  // namespace teachlab::harness
