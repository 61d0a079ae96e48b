#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "teachlab/env.hpp"
#include "teachlab/feedback.hpp"
#include "teachlab/oracle.hpp"

namespace teachlab::teachers {

/// Parameters of one synthetic teacher. The latent score for a clip is
///   5 + gain * target(advantage) + offset + [session 2] drift + N(0, noise_sigma)
/// Scalar teachers report clamp(round(latent), 0, 10); binary teachers say
/// "good" iff latent > 5, then flip the answer with probability flip_prob.
struct TeacherProfile {
    std::string id;
    Modality modality = Modality::Scalar;
    double gain = 4.0;
    double offset = 0.0;
    double session_drift = 0.0;
    double noise_sigma = 0.0;
    double flip_prob = 0.0;
    std::uint64_t rng_seed = 0;

    friend bool operator==(const TeacherProfile&, const TeacherProfile&) = default;
};

/// Maps an advantage (always <= 0) onto [-1, 1]: the greedy action scores +1
/// and mistakes fall toward -1 as 1 - 2 tanh(|A| / scale). `scale` is fixed
/// per experiment, so gain means the same thing for every teacher.
double normalized_target(double advantage, double scale);

inline constexpr double kDefaultTargetScale = 0.69;

/// Draws one feedback value: 0..10 for scalar teachers, 1/0 (good/bad) for
/// binary ones. Consumes exactly two variates from rng so teachers that share
/// a seed see the same noise whatever their modality.
int sample_feedback(const TeacherProfile& p, const env::Transition& t, const oracle::QTable& q,
                    int session, env::Rng& rng, double target_scale = kDefaultTargetScale);

/// Rates a 200-clip session pair in order. The rng is seeded from the profile.
FeedbackLog simulate_log(const TeacherProfile& p, std::span<const env::Transition> clips,
                         const oracle::QTable& q, double target_scale = kDefaultTargetScale);

/// Ranges the cohort generator samples teacher parameters from.
struct CohortParams {
    double gain_min = 2.16;
    double gain_max = 4.0;
    double offset_mean = -0.43;
    double offset_sd = 1.91;
    double drift_mean = 1.2;
    double drift_sd = 0.82;
    double noise_min = 0.72;
    double noise_max = 1.64;
    double flip_min = 0.023;
    double flip_max = 0.176;
};

/// n binary and n scalar teachers. Binary teacher i and scalar teacher i are
/// drawn from the same seed and differ only in modality, so results can be
/// compared pairwise. Ids are "B00".."B<n-1>" and "S00".."S<n-1>".
std::vector<TeacherProfile> generate_cohort(int n_per_modality, std::uint64_t seed,
                                            const CohortParams& params = {});

struct CalibrationTargets {
    double binary_agreement = 0.763;
    std::array<double, 3> scalar_agreement{0.252, 0.582, 0.777};  // thresholds 0, 1, 2
    double tolerance = 0.05;
};

struct CalibrationReport {
    double binary_agreement = 0.0;
    std::array<double, 3> scalar_agreement{};
    double binary_mean_bias = 0.0;
    double scalar_mean_bias = 0.0;
    int binary_teachers = 0;
    int scalar_teachers = 0;
    std::array<int, 3> binary_bias_counts{};  // positive, negative, non-biased
    std::array<int, 3> scalar_bias_counts{};
    double binary_delta = 0.0;
    std::array<double, 3> scalar_delta{};

    int positively_biased() const { return binary_bias_counts[0] + scalar_bias_counts[0]; }
    int teachers() const { return binary_teachers + scalar_teachers; }
    bool agreement_within(const CalibrationTargets& targets) const;
};

/// Cohort self-agreement and bias statistics against the reference targets.
/// Throws std::invalid_argument if either modality is missing.
CalibrationReport verify_calibration(std::span<const FeedbackLog> logs,
                                     const CalibrationTargets& targets = {});

}  // namespace teachlab::teachers
