#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace teachlab {

enum class Modality { Binary, Scalar };

std::string_view to_string(Modality m);
Modality modality_from_string(std::string_view name);

inline constexpr int kClipsPerSession = 100;
inline constexpr int kClipsPerLog = 2 * kClipsPerSession;

/// One teacher judgment bound to one clip. Scalar values are integers 0..10;
/// binary values are stored as 1 (good) / 0 (bad).
struct FeedbackEvent {
    std::string teacher_id;
    Modality modality = Modality::Scalar;
    int clip_index = 0;
    int session = 1;  // 1 for clips 0..99, 2 for clips 100..199
    std::uint64_t transition_id = 0;
    int value = 0;
    std::int64_t timestamp_ms = 0;

    /// "good"/"bad" for binary, the integer otherwise.
    std::string value_token() const;
    bool good() const { return value != 0; }

    friend bool operator==(const FeedbackEvent&, const FeedbackEvent&) = default;
};

/// Parses a value column token for the given modality. Throws
/// std::invalid_argument on a bad token or out-of-range integer.
int parse_feedback_value(Modality m, std::string_view token);

/// All feedback one teacher gave over a 200-clip session pair.
struct FeedbackLog {
    std::string teacher_id;
    Modality modality = Modality::Scalar;
    std::vector<FeedbackEvent> events;

    /// Checks the 200-event, one-per-clip, ascending, session-consistent
    /// structure. Throws std::invalid_argument describing the first problem.
    void validate() const;
    /// Same structure checks without the exact-length requirement, for
    /// partially completed sessions.
    void validate_prefix() const;

    friend bool operator==(const FeedbackLog&, const FeedbackLog&) = default;
};

}  // namespace teachlab
