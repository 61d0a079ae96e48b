#include "teachlab/baselines.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace teachlab::baselines {

namespace {

void check_range(double f) {
    if (!std::isfinite(f) || f < kScaleMin || f > kScaleMax)
        throw std::out_of_range("feedback " + std::to_string(f) + " outside [0, 10]");
}

}  // namespace

double raw_offset(double f) {
    check_range(f);
    return f - kScaleMidpoint;
}

int midpoint_classify(double f) {
    check_range(f);
    return f > kScaleMidpoint ? 1 : -1;
}

WindowState::WindowState(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("window capacity must be positive");
}

int WindowState::classify(double f) {
    check_range(f);
    const double mean = window_.empty()
                            ? f
                            : std::accumulate(window_.begin(), window_.end(), 0.0) /
                                  static_cast<double>(window_.size());
    const int label = f > mean ? 1 : -1;
    window_.push_back(f);
    if (window_.size() > capacity_) window_.pop_front();
    return label;
}

int binary_passthrough(std::string_view token) {
    if (token == "good") return 1;
    if (token == "bad") return -1;
    throw std::invalid_argument("binary feedback must be 'good' or 'bad', got '" +
                                std::string(token) + "'");
}

}  // namespace teachlab::baselines
