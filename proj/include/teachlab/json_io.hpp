#pragma once

#include <filesystem>

#include "json.hpp"

#include "teachlab/analysis.hpp"
#include "teachlab/env.hpp"
#include "teachlab/harness.hpp"
#include "teachlab/oracle.hpp"
#include "teachlab/steady.hpp"
#include "teachlab/teachers.hpp"

// JSON mappings for configs, reports and snapshots. Readers treat every field
// as optional and keep the default for anything missing, so a config file
// only needs the values it changes. Unknown keys are rejected.

namespace teachlab::env {
void to_json(nlohmann::json& j, const GridPose& p);
void from_json(const nlohmann::json& j, GridPose& p);
void to_json(nlohmann::json& j, const EnvConfig& c);
void from_json(const nlohmann::json& j, EnvConfig& c);
void to_json(nlohmann::json& j, const SessionOptions& o);
void from_json(const nlohmann::json& j, SessionOptions& o);
void to_json(nlohmann::json& j, const Transition& t);
}  // namespace teachlab::env

namespace teachlab::oracle {
void to_json(nlohmann::json& j, const QLearningParams& p);
void from_json(const nlohmann::json& j, QLearningParams& p);
void to_json(nlohmann::json& j, const PartialTrainingParams& p);
void from_json(const nlohmann::json& j, PartialTrainingParams& p);
}  // namespace teachlab::oracle

namespace teachlab::teachers {
void to_json(nlohmann::json& j, const CohortParams& p);
void from_json(const nlohmann::json& j, CohortParams& p);
void to_json(nlohmann::json& j, const TeacherProfile& p);
void from_json(const nlohmann::json& j, TeacherProfile& p);
void to_json(nlohmann::json& j, const CalibrationReport& r);
}  // namespace teachlab::teachers

namespace teachlab::steady {
void to_json(nlohmann::json& j, const LabeledFeedback& f);
/// Both sample lists, the warm-up buffer and summary statistics.
void to_json(nlohmann::json& j, const SteadyState& s);
SteadyState steady_from_json(const nlohmann::json& j);
}  // namespace teachlab::steady

namespace teachlab::analysis {
void to_json(nlohmann::json& j, const AgreementReport& r);
void to_json(nlohmann::json& j, const CorrelationReport& r);
}  // namespace teachlab::analysis

namespace teachlab::harness {
void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

/// Reads a JSON experiment config. Throws std::runtime_error naming the file
/// for unreadable or malformed input.
ExperimentConfig load_config(const std::filesystem::path& path);
}  // namespace teachlab::harness
