#include "teachlab/steady.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace teachlab::steady {

namespace {

// Distances that agree to this relative precision are treated as a tie; the
// two alternatives are summed in different orders, so mirror-image inputs
// need not compare exactly equal.
bool nearly_equal(double a, double b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= 1e-12 * scale;
}

EmpDistribution with(const EmpDistribution& d, double f) {
    EmpDistribution out = d;
    out.insert(f);
    return out;
}

}  // namespace

int classify(const EmpDistribution& pos, const EmpDistribution& neg, double f) {
    const double join_pos = wasserstein(with(pos, f), neg);
    const double join_neg = wasserstein(pos, with(neg, f));
    if (!nearly_equal(join_pos, join_neg)) return join_pos > join_neg ? 1 : -1;
    const double dp = std::abs(f - pos.mean());
    const double dn = std::abs(f - neg.mean());
    return dp < dn ? 1 : -1;
}

double confidence(const EmpDistribution& own, const EmpDistribution& other, double f,
                  ConfidenceCase* kind) {
    if (own.empty() || other.empty())
        throw std::logic_error("confidence requires two initialized distributions");
    const double mu = own.mean();
    const double mu_other = other.mean();
    const double m1 = std::abs(own.cdf(mu) - own.cdf(mu_other));
    const double m2 = std::abs(own.cdf(f) - own.cdf(mu));
    const bool increase = (f - mu) * (mu - mu_other) > 0.0;
    if (kind != nullptr) *kind = increase ? ConfidenceCase::Increase : ConfidenceCase::Decrease;
    return increase ? 1.0 + m1 + m2 : 1.0 - m1 + m2;
}

bool reduce_overlap(EmpDistribution& pos, EmpDistribution& neg, double f, int label) {
    if (pos.size() < 2 || neg.size() < 2) return false;
    if (!pos.within_three_sigma(f) || !neg.within_three_sigma(f)) return false;

    const bool move_pos_min = !(label > 0 && pos.min() == f);
    const bool move_neg_max = !(label < 0 && neg.max() == f);
    // Pop both before pushing so each move takes the pre-swap extremum.
    std::optional<double> to_neg;
    std::optional<double> to_pos;
    if (move_pos_min) to_neg = pos.pop_min();
    if (move_neg_max) to_pos = neg.pop_max();
    if (to_neg) neg.insert(*to_neg);
    if (to_pos) pos.insert(*to_pos);
    return move_pos_min || move_neg_max;
}

SteadyState::SteadyState(SteadyConfig config) : config_(config) {
    if (config_.k < 2) throw std::invalid_argument("STEADY needs k >= 2 warm-up values");
    if (!(config_.min_value < config_.max_value))
        throw std::invalid_argument("feedback range must satisfy min < max");
    buffer_.reserve(config_.k);
}

LabeledFeedback SteadyState::process(double f) {
    if (!std::isfinite(f) || f < config_.min_value || f > config_.max_value)
        throw std::out_of_range("feedback " + std::to_string(f) + " outside [" +
                                std::to_string(config_.min_value) + ", " +
                                std::to_string(config_.max_value) + "]");
    ++processed_;
    if (!initialized_) return warm_up(f);

    LabeledFeedback out;
    out.raw = f;
    out.label = classify(positive_, negative_, f);
    EmpDistribution& own = out.label > 0 ? positive_ : negative_;
    EmpDistribution& other = out.label > 0 ? negative_ : positive_;
    own.insert(f);
    out.confidence = confidence(own, other, f, &out.kind);
    out.shaped_reward = out.label * out.confidence;

    reduce_overlap(positive_, negative_, f, out.label);

    if (!(positive_.mean() > negative_.mean())) {
        ++anomalies_;
        // The higher-mean distribution is always the positive one.
        if (positive_.mean() < negative_.mean()) std::swap(positive_, negative_);
    }
    return out;
}

LabeledFeedback SteadyState::warm_up(double f) {
    buffer_.push_back(f);
    const double running_mean =
        std::accumulate(buffer_.begin(), buffer_.end(), 0.0) / static_cast<double>(buffer_.size());
    LabeledFeedback out;
    out.raw = f;
    out.label = f > running_mean ? 1 : -1;
    out.confidence = 1.0;
    out.shaped_reward = out.label;
    out.kind = ConfidenceCase::Warmup;
    if (buffer_.size() == config_.k) initialize();
    return out;
}

void SteadyState::initialize() {
    const double mean =
        std::accumulate(buffer_.begin(), buffer_.end(), 0.0) / static_cast<double>(buffer_.size());
    init_labels_.assign(buffer_.size(), -1);
    for (std::size_t i = 0; i < buffer_.size(); ++i) init_labels_[i] = buffer_[i] > mean ? 1 : -1;

    const bool one_sided = std::all_of(init_labels_.begin(), init_labels_.end(),
                                       [&](int l) { return l == init_labels_.front(); });
    if (one_sided) {
        // All values equal: split the sorted buffer at its midpoint index.
        std::vector<std::size_t> order(buffer_.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return buffer_[a] < buffer_[b]; });
        const std::size_t half = order.size() / 2;
        for (std::size_t r = 0; r < order.size(); ++r) init_labels_[order[r]] = r < half ? -1 : 1;
    }

    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < buffer_.size(); ++i)
        (init_labels_[i] > 0 ? pos : neg).push_back(buffer_[i]);
    positive_ = EmpDistribution(std::move(pos));
    negative_ = EmpDistribution(std::move(neg));
    buffer_.clear();
    initialized_ = true;
}

SteadyState SteadyState::restore(SteadyConfig config, std::vector<double> positive,
                                 std::vector<double> negative, std::vector<double> buffer,
                                 std::size_t anomalies, std::vector<int> init_labels) {
    SteadyState s(config);
    const bool init = !positive.empty() || !negative.empty();
    if (init && (positive.empty() || negative.empty() || !buffer.empty()))
        throw std::invalid_argument("snapshot: initialized state needs two non-empty distributions "
                                    "and an empty buffer");
    if (buffer.size() >= config.k) throw std::invalid_argument("snapshot: buffer exceeds k");
    if (!init_labels.empty() && (!init || init_labels.size() != config.k))
        throw std::invalid_argument("snapshot: warm-up labels need an initialized state and k entries");
    s.processed_ = positive.size() + negative.size() + buffer.size();
    s.positive_ = EmpDistribution(std::move(positive));
    s.negative_ = EmpDistribution(std::move(negative));
    s.buffer_ = std::move(buffer);
    s.initialized_ = init;
    s.anomalies_ = anomalies;
    s.init_labels_ = std::move(init_labels);
    return s;
}

std::vector<EmpDistribution> init_m(std::span<const double> buffer, std::size_t m) {
    if (m < 1) throw std::invalid_argument("init_m: m must be at least 1");
    if (m > buffer.size())
        throw std::invalid_argument("init_m: m = " + std::to_string(m) + " exceeds buffer size " +
                                    std::to_string(buffer.size()));
    std::vector<double> sorted(buffer.begin(), buffer.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::vector<EmpDistribution> out;
    out.reserve(m);
    for (std::size_t g = 0; g < m; ++g) {
        const std::size_t lo = g * n / m;
        const std::size_t hi = (g + 1) * n / m;
        out.emplace_back(std::vector<double>(sorted.begin() + static_cast<std::ptrdiff_t>(lo),
                                             sorted.begin() + static_cast<std::ptrdiff_t>(hi)));
    }
    return out;
}

double multi_distance(std::span<const EmpDistribution> dists) {
    if (dists.size() < 2) throw std::invalid_argument("multi_distance: need at least two");
    if (dists.size() == 2) return wasserstein(dists[0], dists[1]);
    double total = 0.0;
    for (std::size_t v = 1; v + 1 < dists.size(); ++v)
        total += wasserstein(dists[v - 1], dists[v]) + wasserstein(dists[v], dists[v + 1]);
    return total;
}

std::size_t classify_m(std::span<const EmpDistribution> dists, double f) {
    if (dists.size() < 2) throw std::invalid_argument("classify_m: need at least two distributions");
    std::vector<double> scores(dists.size());
    std::vector<EmpDistribution> trial(dists.begin(), dists.end());
    for (std::size_t c = 0; c < dists.size(); ++c) {
        trial[c].insert(f);
        scores[c] = multi_distance(trial);
        trial[c] = dists[c];
    }
    const double best = *std::max_element(scores.begin(), scores.end());
    std::size_t pick = dists.size();
    double pick_gap = 0.0;
    for (std::size_t c = 0; c < dists.size(); ++c) {
        if (!nearly_equal(scores[c], best) && scores[c] != best) continue;
        const double gap = std::abs(f - dists[c].mean());
        if (pick == dists.size() || gap < pick_gap) {
            pick = c;
            pick_gap = gap;
        }
    }
    return pick;
}

}  // namespace teachlab::steady
