#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "teachlab/env.hpp"
#include "teachlab/feedback.hpp"
#include "teachlab/oracle.hpp"

namespace teachlab::analysis {

/// Fraction of clips i in [0, 99] with |value(i) - value(i + 100)| <= threshold.
/// Binary values are compared in their 0/1 encoding. Throws
/// std::invalid_argument for a malformed log or negative threshold.
double self_agreement(const FeedbackLog& log, double threshold);

enum class BiasClass { Positive, Negative, NonBiased };

std::string_view to_string(BiasClass c);

struct SessionBias {
    double delta = 0.0;  // mean(session 2) - mean(session 1)
    BiasClass kind = BiasClass::NonBiased;
};

/// Scalar logs are biased when |delta| > 0.5, binary logs when |delta| > 0.05.
SessionBias session_bias(const FeedbackLog& log);

/// Spearman rank correlation: Pearson correlation of average ranks. Throws
/// std::invalid_argument for mismatched or short inputs and std::domain_error
/// when either side is constant.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Average (fractional) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> xs);

struct AgreementReport {
    std::vector<std::string> teacher_ids;
    std::vector<double> thresholds;
    /// per_teacher[i][k] is teacher i's agreement at thresholds[k].
    std::vector<std::vector<double>> per_teacher;
    std::vector<double> cohort_mean;
};

AgreementReport agreement_report(std::span<const FeedbackLog> logs,
                                 std::span<const double> thresholds);

inline constexpr double kAdvantageTieTolerance = 0.02;

struct CorrelationReport {
    std::string teacher_id;
    std::optional<double> normalized_q;
    std::optional<double> action_rank;
    std::optional<double> advantage;
    std::size_t degenerate_states = 0;
};

/// Correlates each feedback value with the oracle's targets for the clip's
/// transition. Rank 0 is the best action, so rank correlations are negative
/// for teachers that track the oracle. Targets that are undefined for a log
/// (constant inputs) come back empty. Throws std::invalid_argument when the
/// transitions do not line up with the log's clips.
///
/// A learned table splits truly tied actions by sampling noise, so
/// advantages within `tie_tolerance` of zero are treated as zero.
CorrelationReport correlation_report(const FeedbackLog& log, const oracle::QTable& q,
                                     std::span<const env::Transition> transitions,
                                     double tie_tolerance = kAdvantageTieTolerance);

}  // namespace teachlab::analysis
