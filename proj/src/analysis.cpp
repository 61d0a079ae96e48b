#include "teachlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace teachlab::analysis {

double self_agreement(const FeedbackLog& log, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("threshold must be non-negative");
    log.validate();
    int agree = 0;
    for (int i = 0; i < kClipsPerSession; ++i) {
        const int a = log.events[static_cast<std::size_t>(i)].value;
        const int b = log.events[static_cast<std::size_t>(i + kClipsPerSession)].value;
        if (std::abs(a - b) <= threshold) ++agree;
    }
    return static_cast<double>(agree) / kClipsPerSession;
}

std::string_view to_string(BiasClass c) {
    switch (c) {
        case BiasClass::Positive: return "positive";
        case BiasClass::Negative: return "negative";
        case BiasClass::NonBiased: return "non-biased";
    }
    return "non-biased";
}

SessionBias session_bias(const FeedbackLog& log) {
    log.validate();
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < kClipsPerSession; ++i) {
        s1 += log.events[static_cast<std::size_t>(i)].value;
        s2 += log.events[static_cast<std::size_t>(i + kClipsPerSession)].value;
    }
    SessionBias out;
    out.delta = (s2 - s1) / kClipsPerSession;
    const double thr = log.modality == Modality::Binary ? 0.05 : 0.5;
    if (out.delta > thr) {
        out.kind = BiasClass::Positive;
    } else if (out.delta < -thr) {
        out.kind = BiasClass::Negative;
    }
    return out;
}

std::vector<double> average_ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("spearman: length mismatch");
    if (xs.size() < 2) throw std::invalid_argument("spearman: need at least two points");
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    const double n = static_cast<double>(rx.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw std::domain_error("spearman: constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

AgreementReport agreement_report(std::span<const FeedbackLog> logs,
                                 std::span<const double> thresholds) {
    AgreementReport rep;
    rep.thresholds.assign(thresholds.begin(), thresholds.end());
    rep.cohort_mean.assign(thresholds.size(), 0.0);
    for (const auto& log : logs) {
        rep.teacher_ids.push_back(log.teacher_id);
        std::vector<double> row;
        for (std::size_t k = 0; k < thresholds.size(); ++k) {
            row.push_back(self_agreement(log, thresholds[k]));
            rep.cohort_mean[k] += row.back();
        }
        rep.per_teacher.push_back(std::move(row));
    }
    if (!logs.empty())
        for (auto& m : rep.cohort_mean) m /= static_cast<double>(logs.size());
    return rep;
}

namespace {

std::optional<double> try_spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    try {
        return spearman(xs, ys);
    } catch (const std::domain_error&) {
        return std::nullopt;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

}  // namespace

CorrelationReport correlation_report(const FeedbackLog& log, const oracle::QTable& q,
                                     std::span<const env::Transition> transitions, double tie_tolerance) {
    if (!(tie_tolerance >= 0.0)) throw std::invalid_argument("tie tolerance must be non-negative");
    log.validate_prefix();
    if (transitions.size() != log.events.size())
        throw std::invalid_argument("correlation_report: " + std::to_string(transitions.size()) +
                                    " transitions for " + std::to_string(log.events.size()) + " events");
    CorrelationReport rep;
    rep.teacher_id = log.teacher_id;
    std::vector<double> fb, fb_nq, nq, rank, adv;
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        const auto& e = log.events[i];
        const auto& t = transitions[i];
        if (e.transition_id != t.id)
            throw std::invalid_argument("correlation_report: clip " + std::to_string(i) +
                                        " refers to transition " + std::to_string(e.transition_id) +
                                        " but transition " + std::to_string(t.id) + " was supplied");
        const double v = e.value;
        fb.push_back(v);
        rank.push_back(oracle::action_rank(q, t.state, t.action));
        const double a = oracle::advantage(q, t.state, t.action);
        adv.push_back(a >= -tie_tolerance ? 0.0 : a);
        try {
            nq.push_back(oracle::normalized_q(q, t.state, t.action));
            fb_nq.push_back(v);
        } catch (const oracle::DegenerateStateError&) {
            ++rep.degenerate_states;
        }
    }
    rep.normalized_q = try_spearman(fb_nq, nq);
    rep.action_rank = try_spearman(fb, rank);
    rep.advantage = try_spearman(fb, adv);
    return rep;
}

}  // namespace teachlab::analysis
