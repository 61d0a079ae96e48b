#pragma once

#include <cstddef>
#include <deque>
#include <string_view>

namespace teachlab::baselines {

inline constexpr double kScaleMin = 0.0;
inline constexpr double kScaleMax = 10.0;
inline constexpr double kScaleMidpoint = 5.0;

/// f - 5. Throws std::out_of_range outside [0, 10].
double raw_offset(double f);

/// +1 iff f > 5.
int midpoint_classify(double f);

/// FIFO of recent feedback used by the sliding-window classifier.
class WindowState {
public:
    explicit WindowState(std::size_t capacity = 20);

    /// +1 iff f exceeds the mean of the values already in the window (an
    /// empty window compares f against itself, giving -1). f is then
    /// appended and the oldest value evicted at capacity.
    int classify(double f);

    std::size_t capacity() const { return capacity_; }
    const std::deque<double>& window() const { return window_; }

private:
    std::size_t capacity_;
    std::deque<double> window_;
};

/// "good" -> +1, "bad" -> -1; throws std::invalid_argument otherwise.
int binary_passthrough(std::string_view token);

}  // namespace teachlab::baselines
