#include "teachlab/json_io.hpp"

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

using nlohmann::json;

namespace teachlab {
namespace {

// Rejects keys outside `allowed` so typos in config files surface early.
void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || item.key() == k;
        if (!known) throw std::invalid_argument(std::string(what) + ": unknown key '" + item.key() + "'");
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) it->get_to(out);
}

}  // namespace

namespace env {

void to_json(json& j, const GridPose& p) { j = json::array({p.x, p.y, p.z}); }

void from_json(const json& j, GridPose& p) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("pose: expected [x, y, z]");
    p = {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

void to_json(json& j, const EnvConfig& c) {
    j = {{"button_pose", c.button_pose}, {"start_pose", c.start_pose}, {"step_cap", c.step_cap},
         {"slip_prob", c.slip_prob},     {"rng_seed", c.rng_seed}};
}

void from_json(const json& j, EnvConfig& c) {
    check_keys(j, {"button_pose", "start_pose", "step_cap", "slip_prob", "rng_seed"}, "env");
    read(j, "button_pose", c.button_pose);
    read(j, "start_pose", c.start_pose);
    read(j, "step_cap", c.step_cap);
    read(j, "slip_prob", c.slip_prob);
    read(j, "rng_seed", c.rng_seed);
}

void to_json(json& j, const SessionOptions& o) {
    j = {{"clips_per_session", o.clips_per_session}, {"successes", o.successes},
         {"failures", o.failures}, {"pool_size", o.pool_size}, {"max_retries", o.max_retries}};
}

void from_json(const json& j, SessionOptions& o) {
    check_keys(j, {"clips_per_session", "successes", "failures", "pool_size", "max_retries"}, "session");
    read(j, "clips_per_session", o.clips_per_session);
    read(j, "successes", o.successes);
    read(j, "failures", o.failures);
    read(j, "pool_size", o.pool_size);
    read(j, "max_retries", o.max_retries);
}

void to_json(json& j, const Transition& t) {
    j = {{"id", t.id},
         {"state", t.state},
         {"action", to_string(t.action)},
         {"next_state", t.next_state},
         {"env_reward", t.env_reward},
         {"terminal", t.terminal},
         {"outcome", to_string(t.outcome)}};
}

}  // namespace env

namespace oracle {

void to_json(json& j, const QLearningParams& p) {
    j = {{"episodes", p.episodes}, {"alpha", p.alpha}, {"gamma", p.gamma},
         {"epsilon", p.epsilon},   {"alpha_decay", p.alpha_decay}};
}

void from_json(const json& j, QLearningParams& p) {
    check_keys(j, {"episodes", "alpha", "gamma", "epsilon", "alpha_decay"}, "q-learning");
    read(j, "episodes", p.episodes);
    read(j, "alpha", p.alpha);
    read(j, "gamma", p.gamma);
    read(j, "epsilon", p.epsilon);
    read(j, "alpha_decay", p.alpha_decay);
}

void to_json(json& j, const PartialTrainingParams& p) {
    j = {{"q", p.q},
         {"chunk_episodes", p.chunk_episodes},
         {"max_episodes", p.max_episodes},
         {"max_attempts", p.max_attempts},
         {"behaviour_epsilon", p.behaviour_epsilon},
         {"min_success", p.min_success},
         {"max_success", p.max_success},
         {"eval_rollouts", p.eval_rollouts}};
}

void from_json(const json& j, PartialTrainingParams& p) {
    check_keys(j,
               {"q", "chunk_episodes", "max_episodes", "max_attempts", "behaviour_epsilon",
                "min_success", "max_success", "eval_rollouts"},
               "behaviour");
    read(j, "q", p.q);
    read(j, "chunk_episodes", p.chunk_episodes);
    read(j, "max_episodes", p.max_episodes);
    read(j, "max_attempts", p.max_attempts);
    read(j, "behaviour_epsilon", p.behaviour_epsilon);
    read(j, "min_success", p.min_success);
    read(j, "max_success", p.max_success);
    read(j, "eval_rollouts", p.eval_rollouts);
}

}  // namespace oracle

namespace teachers {

void to_json(json& j, const CohortParams& p) {
    j = {{"gain_min", p.gain_min},       {"gain_max", p.gain_max},     {"offset_mean", p.offset_mean},
         {"offset_sd", p.offset_sd},     {"drift_mean", p.drift_mean}, {"drift_sd", p.drift_sd},
         {"noise_min", p.noise_min},     {"noise_max", p.noise_max},   {"flip_min", p.flip_min},
         {"flip_max", p.flip_max}};
}

void from_json(const json& j, CohortParams& p) {
    check_keys(j,
               {"gain_min", "gain_max", "offset_mean", "offset_sd", "drift_mean", "drift_sd",
                "noise_min", "noise_max", "flip_min", "flip_max"},
               "cohort");
    read(j, "gain_min", p.gain_min);
    read(j, "gain_max", p.gain_max);
    read(j, "offset_mean", p.offset_mean);
    read(j, "offset_sd", p.offset_sd);
    read(j, "drift_mean", p.drift_mean);
    read(j, "drift_sd", p.drift_sd);
    read(j, "noise_min", p.noise_min);
    read(j, "noise_max", p.noise_max);
    read(j, "flip_min", p.flip_min);
    read(j, "flip_max", p.flip_max);
}

void to_json(json& j, const TeacherProfile& p) {
    j = {{"id", p.id},
         {"modality", to_string(p.modality)},
         {"gain", p.gain},
         {"offset", p.offset},
         {"session_drift", p.session_drift},
         {"noise_sigma", p.noise_sigma},
         {"flip_prob", p.flip_prob},
         {"rng_seed", p.rng_seed}};
}

void from_json(const json& j, TeacherProfile& p) {
    check_keys(j,
               {"id", "modality", "gain", "offset", "session_drift", "noise_sigma", "flip_prob",
                "rng_seed"},
               "teacher");
    read(j, "id", p.id);
    if (auto it = j.find("modality"); it != j.end())
        p.modality = modality_from_string(it->get<std::string>());
    read(j, "gain", p.gain);
    read(j, "offset", p.offset);
    read(j, "session_drift", p.session_drift);
    read(j, "noise_sigma", p.noise_sigma);
    read(j, "flip_prob", p.flip_prob);
    read(j, "rng_seed", p.rng_seed);
}

void to_json(json& j, const CalibrationReport& r) {
    auto counts = [](const std::array<int, 3>& c) {
        return json{{"positive", c[0]}, {"negative", c[1]}, {"non_biased", c[2]}};
    };
    j = {{"binary_agreement", r.binary_agreement},
         {"scalar_agreement", r.scalar_agreement},
         {"binary_delta", r.binary_delta},
         {"scalar_delta", r.scalar_delta},
         {"binary_mean_bias", r.binary_mean_bias},
         {"scalar_mean_bias", r.scalar_mean_bias},
         {"binary_teachers", r.binary_teachers},
         {"scalar_teachers", r.scalar_teachers},
         {"binary_bias", counts(r.binary_bias_counts)},
         {"scalar_bias", counts(r.scalar_bias_counts)},
         {"positively_biased", r.positively_biased()}};
}

}  // namespace teachers

namespace steady {

namespace {

std::string_view case_name(ConfidenceCase c) {
    switch (c) {
        case ConfidenceCase::Warmup: return "warmup";
        case ConfidenceCase::Increase: return "increase";
        case ConfidenceCase::Decrease: return "decrease";
    }
    return "warmup";
}

json distribution_json(const EmpDistribution& d) {
    return {{"samples", std::vector<double>(d.sorted().begin(), d.sorted().end())},
            {"mean", d.mean()},
            {"stddev", d.stddev()}};
}

}  // namespace

void to_json(json& j, const LabeledFeedback& f) {
    j = {{"raw", f.raw},
         {"label", f.label},
         {"confidence", f.confidence},
         {"shaped_reward", f.shaped_reward},
         {"case", case_name(f.kind)}};
}

void to_json(json& j, const SteadyState& s) {
    j = {{"k", s.config().k},
         {"min_value", s.config().min_value},
         {"max_value", s.config().max_value},
         {"initialized", s.initialized()},
         {"processed", s.processed()},
         {"anomalies", s.anomalies()},
         {"positive", distribution_json(s.positive())},
         {"negative", distribution_json(s.negative())},
         {"init_buffer", std::vector<double>(s.init_buffer().begin(), s.init_buffer().end())},
         {"init_labels", std::vector<int>(s.init_labels().begin(), s.init_labels().end())}};
}

SteadyState steady_from_json(const json& j) {
    SteadyConfig config;
    read(j, "k", config.k);
    read(j, "min_value", config.min_value);
    read(j, "max_value", config.max_value);
    std::vector<double> pos, neg, buffer;
    if (j.contains("positive")) j.at("positive").at("samples").get_to(pos);
    if (j.contains("negative")) j.at("negative").at("samples").get_to(neg);
    read(j, "init_buffer", buffer);
    std::size_t anomalies = 0;
    read(j, "anomalies", anomalies);
    std::vector<int> labels;
    read(j, "init_labels", labels);
    return SteadyState::restore(config, std::move(pos), std::move(neg), std::move(buffer), anomalies,
                                std::move(labels));
}

}  // namespace steady

namespace analysis {

void to_json(json& j, const AgreementReport& r) {
    j = json::object();
    j["thresholds"] = r.thresholds;
    j["cohort_mean"] = r.cohort_mean;
    j["teachers"] = json::array();
    for (std::size_t i = 0; i < r.teacher_ids.size(); ++i)
        j["teachers"].push_back({{"teacher_id", r.teacher_ids[i]}, {"agreement", r.per_teacher[i]}});
}

void to_json(json& j, const CorrelationReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    j = {{"teacher_id", r.teacher_id},
         {"normalized_q", opt(r.normalized_q)},
         {"action_rank", opt(r.action_rank)},
         {"advantage", opt(r.advantage)},
         {"degenerate_states", r.degenerate_states}};
}

}  // namespace analysis

namespace harness {

void to_json(json& j, const ExperimentConfig& c) {
    json conditions = json::array();
    for (Condition cond : c.conditions) conditions.push_back(to_string(cond));
    j = {{"env", c.env},
         {"oracle", c.oracle},
         {"behaviour", c.behaviour},
         {"session", c.session},
         {"cohort", c.cohort},
         {"teachers_per_modality", c.teachers_per_modality},
         {"conditions", conditions},
         {"eval_runs", c.eval_runs},
         {"tamer_alpha", c.tamer_alpha},
         {"target_scale", c.target_scale},
         {"steady_k", c.steady_k},
         {"window_capacity", c.window_capacity},
         {"session_attempts", c.session_attempts},
         {"master_seed", c.master_seed},
         {"threads", c.threads}};
}

void from_json(const json& j, ExperimentConfig& c) {
    check_keys(j,
               {"env", "oracle", "behaviour", "session", "cohort", "teachers_per_modality",
                "conditions", "eval_runs", "tamer_alpha", "target_scale", "steady_k",
                "window_capacity", "session_attempts", "master_seed", "threads"},
               "experiment");
    read(j, "env", c.env);
    read(j, "oracle", c.oracle);
    read(j, "behaviour", c.behaviour);
    read(j, "session", c.session);
    read(j, "cohort", c.cohort);
    read(j, "teachers_per_modality", c.teachers_per_modality);
    if (auto it = j.find("conditions"); it != j.end()) {
        c.conditions.clear();
        for (const auto& name : *it) c.conditions.push_back(condition_from_string(name.get<std::string>()));
    }
    read(j, "eval_runs", c.eval_runs);
    read(j, "tamer_alpha", c.tamer_alpha);
    read(j, "target_scale", c.target_scale);
    read(j, "steady_k", c.steady_k);
    read(j, "window_capacity", c.window_capacity);
    read(j, "session_attempts", c.session_attempts);
    read(j, "master_seed", c.master_seed);
    read(j, "threads", c.threads);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    try {
        ExperimentConfig c = json::parse(in).get<ExperimentConfig>();
        c.validate();
        return c;
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

}  // namespace harness
}  // namespace teachlab
