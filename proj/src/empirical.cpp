#include "teachlab/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace teachlab::steady {

EmpDistribution::EmpDistribution(std::vector<double> samples) : samples_(std::move(samples)) {
    std::sort(samples_.begin(), samples_.end());
    refresh();
}

void EmpDistribution::insert(double v) {
    samples_.insert(std::upper_bound(samples_.begin(), samples_.end(), v), v);
    refresh();
}

bool EmpDistribution::erase_one(double v) {
    auto it = std::lower_bound(samples_.begin(), samples_.end(), v);
    if (it == samples_.end() || *it != v) return false;
    samples_.erase(it);
    refresh();
    return true;
}

double EmpDistribution::pop_min() {
    const double v = min();
    samples_.erase(samples_.begin());
    refresh();
    return v;
}

double EmpDistribution::pop_max() {
    const double v = max();
    samples_.pop_back();
    refresh();
    return v;
}

double EmpDistribution::min() const {
    if (samples_.empty()) throw std::logic_error("min of empty distribution");
    return samples_.front();
}

double EmpDistribution::max() const {
    if (samples_.empty()) throw std::logic_error("max of empty distribution");
    return samples_.back();
}

double EmpDistribution::cdf(double x) const {
    if (samples_.empty()) return 0.0;
    const auto n = std::upper_bound(samples_.begin(), samples_.end(), x) - samples_.begin();
    return static_cast<double>(n) / static_cast<double>(samples_.size());
}

bool EmpDistribution::within_three_sigma(double x) const {
    return x >= mean_ - 3.0 * stddev_ && x <= mean_ + 3.0 * stddev_;
}

void EmpDistribution::refresh() {
    const std::size_t n = samples_.size();
    if (n == 0) {
        mean_ = stddev_ = 0.0;
        return;
    }
    double sum = 0.0;
    for (double v : samples_) sum += v;
    mean_ = sum / static_cast<double>(n);
    if (n == 1) {
        stddev_ = 0.0;
        return;
    }
    double ss = 0.0;
    for (double v : samples_) ss += (v - mean_) * (v - mean_);
    stddev_ = std::sqrt(ss / static_cast<double>(n));
}

double wasserstein(const EmpDistribution& a, const EmpDistribution& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein: empty distribution");
    const auto xs = a.sorted();
    const auto ys = b.sorted();
    const auto na = static_cast<std::uint64_t>(xs.size());
    const auto nb = static_cast<std::uint64_t>(ys.size());

    // Quantile levels are tracked in integer units of 1 / (na * nb) so the
    // breakpoint comparisons are exact.
    std::uint64_t i = 0, j = 0, level = 0;
    double total = 0.0;
    while (i < na && j < nb) {
        const std::uint64_t next_a = (i + 1) * nb;
        const std::uint64_t next_b = (j + 1) * na;
        const std::uint64_t next = std::min(next_a, next_b);
        total += static_cast<double>(next - level) * std::abs(xs[i] - ys[j]);
        level = next;
        if (next_a == next) ++i;
        if (next_b == next) ++j;
    }
    return total / static_cast<double>(na * nb);
}

}  // namespace teachlab::steady
