#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace teachlab::steady {

/// Finite multiset of scalar feedback values. Samples are kept sorted; the
/// mean and (population) standard deviation are refreshed on every change.
class EmpDistribution {
public:
    EmpDistribution() = default;
    explicit EmpDistribution(std::vector<double> samples);

    void insert(double v);
    /// Removes one occurrence of v. Returns false if v is absent.
    bool erase_one(double v);
    double pop_min();
    double pop_max();

    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    double mean() const { return mean_; }
    double stddev() const { return stddev_; }
    double min() const;
    double max() const;
    std::span<const double> sorted() const { return samples_; }

    /// Empirical CDF, right-continuous: fraction of samples <= x.
    double cdf(double x) const;
    /// Whether x lies in [mean - 3 sigma, mean + 3 sigma].
    bool within_three_sigma(double x) const;

    friend bool operator==(const EmpDistribution& a, const EmpDistribution& b) {
        return a.samples_ == b.samples_;
    }

private:
    void refresh();

    std::vector<double> samples_;
    double mean_ = 0.0;
    double stddev_ = 0.0;
};

/// Exact 1-D Wasserstein-1 distance between two empirical distributions:
/// the integral over u in [0,1] of |F1^-1(u) - F2^-1(u)|, evaluated over the
/// merged quantile breakpoints. Throws std::invalid_argument if either is empty.
double wasserstein(const EmpDistribution& a, const EmpDistribution& b);

}  // namespace teachlab::steady
