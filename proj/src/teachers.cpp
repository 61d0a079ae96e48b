#include "teachlab/teachers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "teachlab/analysis.hpp"

namespace teachlab::teachers {

double normalized_target(double advantage, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("target scale must be positive");
    return 1.0 - 2.0 * std::tanh(std::abs(advantage) / scale);
}

int sample_feedback(const TeacherProfile& p, const env::Transition& t, const oracle::QTable& q,
                    int session, env::Rng& rng, double target_scale) {
    if (session != 1 && session != 2) throw std::invalid_argument("session must be 1 or 2");
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const double z = noise(rng);
    const double u = coin(rng);

    const double target = normalized_target(oracle::advantage(q, t.state, t.action), target_scale);
    const double latent = 5.0 + p.gain * target + p.offset +
                          (session == 2 ? p.session_drift : 0.0) + p.noise_sigma * z;
    if (p.modality == Modality::Scalar)
        return static_cast<int>(std::clamp(std::round(latent), 0.0, 10.0));
    const bool good = latent > 5.0;
    return (u < p.flip_prob) != good ? 1 : 0;
}

FeedbackLog simulate_log(const TeacherProfile& p, std::span<const env::Transition> clips,
                         const oracle::QTable& q, double target_scale) {
    if (clips.size() != static_cast<std::size_t>(kClipsPerLog))
        throw std::invalid_argument("simulate_log expects " + std::to_string(kClipsPerLog) + " clips");
    env::Rng rng(p.rng_seed);
    FeedbackLog log;
    log.teacher_id = p.id;
    log.modality = p.modality;
    log.events.reserve(clips.size());
    for (std::size_t i = 0; i < clips.size(); ++i) {
        FeedbackEvent e;
        e.teacher_id = p.id;
        e.modality = p.modality;
        e.clip_index = static_cast<int>(i);
        e.session = i < static_cast<std::size_t>(kClipsPerSession) ? 1 : 2;
        e.transition_id = clips[i].id;
        e.value = sample_feedback(p, clips[i], q, e.session, rng, target_scale);
        // Clips are three seconds long; feedback arrives as each one ends.
        e.timestamp_ms = static_cast<std::int64_t>(i + 1) * 3000;
        log.events.push_back(std::move(e));
    }
    return log;
}

std::vector<TeacherProfile> generate_cohort(int n_per_modality, std::uint64_t seed,
                                            const CohortParams& params) {
    if (n_per_modality < 1) throw std::invalid_argument("cohort needs at least one teacher per group");
    env::Rng rng(seed);
    std::uniform_real_distribution<double> gain(params.gain_min, params.gain_max);
    std::normal_distribution<double> offset(params.offset_mean, params.offset_sd);
    std::normal_distribution<double> drift(params.drift_mean, params.drift_sd);
    std::uniform_real_distribution<double> noise(params.noise_min, params.noise_max);
    std::uniform_real_distribution<double> flip(params.flip_min, params.flip_max);

    std::vector<TeacherProfile> binary, scalar;
    for (int i = 0; i < n_per_modality; ++i) {
        TeacherProfile p;
        p.gain = gain(rng);
        p.offset = offset(rng);
        p.session_drift = drift(rng);
        p.noise_sigma = noise(rng);
        p.flip_prob = flip(rng);
        p.rng_seed = rng();

        char id[16];
        std::snprintf(id, sizeof id, "%02d", i);
        p.modality = Modality::Binary;
        p.id = std::string("B") + id;
        binary.push_back(p);
        p.modality = Modality::Scalar;
        p.id = std::string("S") + id;
        scalar.push_back(p);
    }
    binary.insert(binary.end(), scalar.begin(), scalar.end());
    return binary;
}

bool CalibrationReport::agreement_within(const CalibrationTargets& targets) const {
    if (std::abs(binary_delta) > targets.tolerance) return false;
    return std::all_of(scalar_delta.begin(), scalar_delta.end(),
                       [&](double d) { return std::abs(d) <= targets.tolerance; });
}

CalibrationReport verify_calibration(std::span<const FeedbackLog> logs,
                                     const CalibrationTargets& targets) {
    if (logs.empty()) throw std::invalid_argument("verify_calibration: no logs");
    CalibrationReport rep;
    for (const auto& log : logs) {
        const auto bias = analysis::session_bias(log);
        const int cls = bias.kind == analysis::BiasClass::Positive   ? 0
                        : bias.kind == analysis::BiasClass::Negative ? 1
                                                                     : 2;
        if (log.modality == Modality::Binary) {
            ++rep.binary_teachers;
            rep.binary_agreement += analysis::self_agreement(log, 0.0);
            rep.binary_mean_bias += bias.delta;
            ++rep.binary_bias_counts[static_cast<std::size_t>(cls)];
        } else {
            ++rep.scalar_teachers;
            for (std::size_t k = 0; k < 3; ++k)
                rep.scalar_agreement[k] += analysis::self_agreement(log, static_cast<double>(k));
            rep.scalar_mean_bias += bias.delta;
            ++rep.scalar_bias_counts[static_cast<std::size_t>(cls)];
        }
    }
    if (rep.binary_teachers == 0 || rep.scalar_teachers == 0)
        throw std::invalid_argument("verify_calibration: logs must cover both modalities");
    rep.binary_agreement /= rep.binary_teachers;
    rep.binary_mean_bias /= rep.binary_teachers;
    for (auto& a : rep.scalar_agreement) a /= rep.scalar_teachers;
    rep.scalar_mean_bias /= rep.scalar_teachers;
    rep.binary_delta = rep.binary_agreement - targets.binary_agreement;
    for (std::size_t k = 0; k < 3; ++k)
        rep.scalar_delta[k] = rep.scalar_agreement[k] - targets.scalar_agreement[k];
    return rep;
}

}  // namespace teachlab::teachers
