#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "teachlab/empirical.hpp"

namespace teachlab::steady {

enum class ConfidenceCase { Warmup, Increase, Decrease };

/// Filter output for one scalar feedback value.
struct LabeledFeedback {
    double raw = 0.0;
    int label = -1;  // +1 or -1
    double confidence = 1.0;
    double shaped_reward = -1.0;  // label * confidence
    ConfidenceCase kind = ConfidenceCase::Warmup;

    friend bool operator==(const LabeledFeedback&, const LabeledFeedback&) = default;
};

struct SteadyConfig {
    std::size_t k = 20;
    double min_value = 0.0;
    double max_value = 10.0;

    friend bool operator==(const SteadyConfig&, const SteadyConfig&) = default;
};

// Individual steps of the filter. They operate on the two distributions
// directly so each rule can be exercised on its own.

/// +1 iff W(pos + f, neg) > W(pos, neg + f). A tie goes to the distribution
/// whose mean is nearer to f, and to the negative side if that ties too.
int classify(const EmpDistribution& pos, const EmpDistribution& neg, double f);

/// Confidence degree for f, which must already be a member of `own`.
/// M1 = |F(mean own) - F(mean other)|, M2 = |F(f) - F(mean own)| with F the
/// empirical CDF of `own`. Increase case (f strictly beyond mean(own), away
/// from mean(other)): 1 + M1 + M2. Otherwise: 1 - M1 + M2.
double confidence(const EmpDistribution& own, const EmpDistribution& other, double f,
                  ConfidenceCase* kind = nullptr);

/// When f lies inside the 3-sigma interval of both distributions (each with at
/// least two samples), moves min(pos) to neg and max(neg) to pos. A move is
/// skipped when the value to be popped is f itself, i.e. f sits in that
/// distribution and is its extremum. Returns whether anything moved.
bool reduce_overlap(EmpDistribution& pos, EmpDistribution& neg, double f, int label);

/// Online two-distribution filter. Copyable; `process` is deterministic in
/// (state, f).
class SteadyState {
public:
    explicit SteadyState(SteadyConfig config = {});

    /// Throws std::out_of_range for values outside [min_value, max_value].
    LabeledFeedback process(double f);

    bool initialized() const { return initialized_; }
    const SteadyConfig& config() const { return config_; }
    const EmpDistribution& positive() const { return positive_; }
    const EmpDistribution& negative() const { return negative_; }
    std::span<const double> init_buffer() const { return buffer_; }
    std::size_t processed() const { return processed_; }
    /// Number of process calls after which mean(pos) > mean(neg) did not hold.
    std::size_t anomalies() const { return anomalies_; }
    /// Labels the warm-up values received when the buffer was split, in
    /// arrival order. Empty until initialization.
    std::span<const int> init_labels() const { return init_labels_; }

    /// Rebuilds a state from serialized parts (snapshot restore).
    static SteadyState restore(SteadyConfig config, std::vector<double> positive,
                               std::vector<double> negative, std::vector<double> buffer,
                               std::size_t anomalies = 0, std::vector<int> init_labels = {});

    friend bool operator==(const SteadyState&, const SteadyState&) = default;

private:
    LabeledFeedback warm_up(double f);
    void initialize();

    SteadyConfig config_;
    EmpDistribution positive_;
    EmpDistribution negative_;
    std::vector<double> buffer_;
    std::vector<int> init_labels_;
    std::size_t processed_ = 0;
    std::size_t anomalies_ = 0;
    bool initialized_ = false;
};

/// Splits a buffer at the 100*i/m percentiles (i = 1..m-1) into m contiguous
/// groups of the sorted values. Throws std::invalid_argument if m < 1 or
/// m > buffer size.
std::vector<EmpDistribution> init_m(std::span<const double> buffer, std::size_t m);

/// Sum over adjacent triples (u, v, q) of W(u, v) + W(v, q); for m = 2 this
/// is the single pair distance.
double multi_distance(std::span<const EmpDistribution> dists);

/// Index of the distribution that maximizes multi_distance once f is added
/// to it. Distributions must be ordered by mean. Ties go to the nearer mean,
/// then the lower index. Throws std::invalid_argument for fewer than two.
std::size_t classify_m(std::span<const EmpDistribution> dists, double f);

}  // namespace teachlab::steady
