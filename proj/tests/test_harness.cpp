#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "teachlab/baselines.hpp"
#include "teachlab/harness.hpp"
#include "teachlab/steady.hpp"

using namespace teachlab;
using harness::Condition;

namespace {

harness::ExperimentConfig small_config() {
    harness::ExperimentConfig c;
    c.teachers_per_modality = 3;
    c.eval_runs = 2;
    return c;
}

const harness::World& world() {
    static const harness::World w = harness::build_world(small_config());
    return w;
}

FeedbackLog log_of(Modality m, const std::string& id, int seed) {
    FeedbackLog log{id, m, {}};
    std::mt19937 rng(seed);
    for (int i = 0; i < kClipsPerLog; ++i) {
        const int v = m == Modality::Binary ? static_cast<int>(rng() % 2) : static_cast<int>(rng() % 11);
        log.events.push_back({id, m, i, i < kClipsPerSession ? 1 : 2, world().session[i].id, v, 1000 + i});
    }
    return log;
}

std::string csv_of(std::span<const FeedbackLog> logs) {
    std::ostringstream out;
    harness::write_feedback_csv(logs, out);
    return out.str();
}

std::string emitted(const harness::ResultsTable& t, harness::ResultFormat f) {
    std::ostringstream out;
    harness::emit_results(t, f, out);
    return out.str();
}

}  // namespace

TEST(Harness, DeriveSeedSeparatesStreams) {
    EXPECT_EQ(harness::derive_seed(1, "oracle"), harness::derive_seed(1, "oracle"));
    EXPECT_NE(harness::derive_seed(1, "oracle"), harness::derive_seed(2, "oracle"));
    EXPECT_NE(harness::derive_seed(1, "oracle"), harness::derive_seed(1, "cohort"));
    EXPECT_NE(harness::derive_seed(1, "eval", 0), harness::derive_seed(1, "eval", 1));
}

TEST(Harness, ConfigValidation) {
    auto c = small_config();
    c.conditions.clear();
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = small_config();
    c.eval_runs = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    EXPECT_THROW(harness::run_experiment(c), std::invalid_argument);
}

TEST(Harness, ConditionNames) {
    for (Condition c : harness::kAllConditions) EXPECT_EQ(harness::condition_from_string(harness::to_string(c)), c);
    EXPECT_EQ(harness::to_string(Condition::EnvCeiling), "env_reward_ceiling");
    EXPECT_THROW(harness::condition_from_string("oracle"), std::invalid_argument);
}

TEST(Harness, WorldShape) {
    const auto& w = world();
    ASSERT_EQ(w.session.size(), 200u);
    EXPECT_GE(w.behaviour.success_rate, 0.4);
    EXPECT_LE(w.behaviour.success_rate, 0.6);
    EXPECT_TRUE(harness::session_learnable(w.session, small_config()));
}

TEST(Transform, EachConditionUsesItsFilter) {
    const auto cfg = small_config();
    const auto scalar = log_of(Modality::Scalar, "S00", 1);
    const auto binary = log_of(Modality::Binary, "B00", 1);
    const auto& clips = world().session;

    const auto raw = harness::transform_log(Condition::RawScalar, scalar, clips, cfg);
    const auto mid = harness::transform_log(Condition::Midpoint, scalar, clips, cfg);
    const auto win = harness::transform_log(Condition::SlidingWindow, scalar, clips, cfg);
    const auto ste = harness::transform_log(Condition::Steady, scalar, clips, cfg);
    const auto bin = harness::transform_log(Condition::Binary, binary, clips, cfg);
    const auto env = harness::transform_log(Condition::EnvCeiling, scalar, clips, cfg);

    baselines::WindowState window(cfg.window_capacity);
    steady::SteadyState filter({cfg.steady_k, 0.0, 10.0});
    for (int i = 0; i < kClipsPerLog; ++i) {
        const double f = scalar.events[i].value;
        EXPECT_EQ(raw[i], f - 5.0);
        EXPECT_EQ(mid[i], f > 5 ? 1.0 : -1.0);
        EXPECT_EQ(win[i], window.classify(f));
        EXPECT_EQ(ste[i], filter.process(f).shaped_reward);
        EXPECT_EQ(bin[i], binary.events[i].value ? 1.0 : -1.0);
        EXPECT_EQ(env[i], clips[i].env_reward);
    }
}

TEST(Transform, ModalityMismatchThrows) {
    const auto cfg = small_config();
    EXPECT_THROW(harness::transform_log(Condition::Steady, log_of(Modality::Binary, "B00", 1), world().session, cfg),
                 std::invalid_argument);
    EXPECT_THROW(harness::transform_log(Condition::Binary, log_of(Modality::Scalar, "S00", 1), world().session, cfg),
                 std::invalid_argument);
}

TEST(RunExperiment, SingleConditionSingleTeacher) {
    auto c = small_config();
    c.conditions = {Condition::Steady};
    c.teachers_per_modality = 1;
    c.eval_runs = 1;
    const auto t = harness::run_experiment(c);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0].teacher_id, "S00");
    EXPECT_EQ(t.rows[0].returns.size(), 1u);
}

TEST(RunExperiment, DefaultConfigHasSixConditionsPerTeacher) {
    const auto t = harness::run_experiment(harness::ExperimentConfig{});
    EXPECT_EQ(t.rows.size(), 6u * 45u);
    for (const auto& r : t.rows) {
        EXPECT_GE(r.mean_return, -50.0);
        EXPECT_LE(r.mean_return, 14.0);
        EXPECT_EQ(r.returns.size(), 10u);
    }
    EXPECT_EQ(t.summary().size(), 6u);
    EXPECT_EQ(t.find(Condition::EnvCeiling, 44)->teacher_id, "E44");
}

TEST(RunExperiment, SameSeedSameBytes) {
    const auto a = harness::run_experiment(small_config());
    const auto b = harness::run_experiment(small_config());
    EXPECT_EQ(emitted(a, harness::ResultFormat::Csv), emitted(b, harness::ResultFormat::Csv));
    EXPECT_EQ(emitted(a, harness::ResultFormat::Json), emitted(b, harness::ResultFormat::Json));
}

TEST(RunExperiment, ThreadCountDoesNotChangeResults) {
    auto one = small_config();
    one.threads = 1;
    auto four = small_config();
    four.threads = 4;
    EXPECT_EQ(emitted(harness::run_experiment(one), harness::ResultFormat::Csv),
              emitted(harness::run_experiment(four), harness::ResultFormat::Csv));
}

TEST(RunExperiment, SuppliedLogs) {
    const std::vector<FeedbackLog> logs{log_of(Modality::Binary, "B", 1), log_of(Modality::Scalar, "S", 2)};
    const auto t = harness::run_experiment(small_config(), world().session, logs);
    EXPECT_EQ(t.rows.size(), 6u);
    EXPECT_EQ(t.find(Condition::Steady, 0)->teacher_id, "S");

    auto shifted = logs;
    shifted[1].events[7].transition_id += 1000;
    EXPECT_THROW(harness::run_experiment(small_config(), world().session, shifted), std::invalid_argument);
}

TEST(FeedbackCsv, RoundTrip) {
    const std::vector<FeedbackLog> logs{log_of(Modality::Binary, "B00", 1), log_of(Modality::Scalar, "S00", 2)};
    const auto text = csv_of(logs);
    EXPECT_EQ(text.substr(0, text.find('\n')), harness::kFeedbackCsvHeader);
    EXPECT_NE(text.find(",good,"), std::string::npos);
    std::istringstream in(text);
    EXPECT_EQ(harness::read_feedback_csv(in), logs);
}

TEST(FeedbackCsv, ColumnOrderIsFree) {
    const std::vector<FeedbackLog> logs{log_of(Modality::Scalar, "S00", 2)};
    std::ostringstream out;
    out << "value,teacher_id,timestamp_ms,session,modality,transition_id,clip_index\n";
    for (const auto& e : logs[0].events)
        out << e.value << ',' << e.teacher_id << ',' << e.timestamp_ms << ',' << e.session << ",scalar,"
            << e.transition_id << ',' << e.clip_index << '\n';
    std::istringstream in(out.str());
    EXPECT_EQ(harness::read_feedback_csv(in), logs);
}

TEST(FeedbackCsv, MissingColumnNamed) {
    std::istringstream in("teacher_id,modality,clip_index,session,transition_id,timestamp_ms\nS,scalar,0,1,0,0\n");
    try {
        harness::read_feedback_csv(in);
        FAIL() << "expected SchemaError";
    } catch (const harness::SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("'value'"), std::string::npos) << e.what();
    }
}

TEST(FeedbackCsv, BadCellNamesRowAndColumn) {
    std::istringstream in(std::string(harness::kFeedbackCsvHeader) + "\nS,scalar,0,1,0,eleven,0\n");
    try {
        harness::read_feedback_csv(in, false);
        FAIL() << "expected SchemaError";
    } catch (const harness::SchemaError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
        EXPECT_NE(msg.find("'value'"), std::string::npos) << msg;
    }
}

TEST(FeedbackCsv, IncompleteTeacherRejectedOnIngest) {
    auto log = log_of(Modality::Scalar, "S00", 3);
    log.events.pop_back();
    const auto path = std::filesystem::temp_directory_path() / "teachlab_short.csv";
    {
        std::ofstream out(path);
        harness::write_feedback_csv(std::span<const FeedbackLog>(&log, 1), out);
    }
    EXPECT_THROW(harness::ingest_log(path), std::exception);
    std::istringstream partial(csv_of(std::span<const FeedbackLog>(&log, 1)));
    EXPECT_EQ(harness::read_feedback_csv(partial, false).at(0).events.size(), 199u);
    std::filesystem::remove(path);
}

TEST(TransitionsCsv, RoundTrip) {
    std::stringstream ss;
    harness::write_transitions_csv(world().session, ss);
    EXPECT_EQ(harness::read_transitions_csv(ss), world().session);
}

TEST(EmitResults, CsvAndJsonShapes) {
    auto c = small_config();
    c.conditions = {Condition::Steady, Condition::Binary};
    const auto t = harness::run_experiment(c);
    const auto csv = emitted(t, harness::ResultFormat::Csv);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "condition,teacher_id,mean_return");
    EXPECT_NE(csv.find("steady,cohort_mean,"), std::string::npos);
    EXPECT_NE(csv.find("binary,cohort_sd,"), std::string::npos);
    const auto json = emitted(t, harness::ResultFormat::Json);
    EXPECT_NE(json.find("\"schema_version\": 1"), std::string::npos);
    EXPECT_THROW(emitted(harness::ResultsTable{}, harness::ResultFormat::Csv), std::invalid_argument);
}
