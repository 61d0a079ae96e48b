#include "teachlab/feedback.hpp"

#include <charconv>
#include <stdexcept>

namespace teachlab {

std::string_view to_string(Modality m) { return m == Modality::Binary ? "binary" : "scalar"; }

Modality modality_from_string(std::string_view name) {
    if (name == "binary") return Modality::Binary;
    if (name == "scalar") return Modality::Scalar;
    throw std::invalid_argument("unknown modality '" + std::string(name) + "'");
}

std::string FeedbackEvent::value_token() const {
    if (modality == Modality::Binary) return value != 0 ? "good" : "bad";
    return std::to_string(value);
}

int parse_feedback_value(Modality m, std::string_view token) {
    if (m == Modality::Binary) {
        if (token == "good") return 1;
        if (token == "bad") return 0;
        throw std::invalid_argument("binary value must be 'good' or 'bad', got '" +
                                    std::string(token) + "'");
    }
    int v = 0;
    const auto* end = token.data() + token.size();
    const auto res = std::from_chars(token.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw std::invalid_argument("scalar value must be an integer, got '" + std::string(token) +
                                    "'");
    if (v < 0 || v > 10)
        throw std::invalid_argument("scalar value " + std::to_string(v) + " outside 0..10");
    return v;
}

namespace {

void check_events(const FeedbackLog& log) {
    for (std::size_t i = 0; i < log.events.size(); ++i) {
        const auto& e = log.events[i];
        const std::string where = "teacher " + log.teacher_id + " event " + std::to_string(i);
        if (e.teacher_id != log.teacher_id) throw std::invalid_argument(where + ": teacher id mismatch");
        if (e.modality != log.modality) throw std::invalid_argument(where + ": modality mismatch");
        if (e.clip_index != static_cast<int>(i))
            throw std::invalid_argument(where + ": expected clip_index " + std::to_string(i) +
                                        ", got " + std::to_string(e.clip_index));
        const int expected_session = e.clip_index < kClipsPerSession ? 1 : 2;
        if (e.session != expected_session)
            throw std::invalid_argument(where + ": clip " + std::to_string(e.clip_index) +
                                        " belongs to session " + std::to_string(expected_session));
        const int hi = e.modality == Modality::Binary ? 1 : 10;
        if (e.value < 0 || e.value > hi) throw std::invalid_argument(where + ": value out of range");
    }
}

}  // namespace

void FeedbackLog::validate() const {
    if (events.size() != static_cast<std::size_t>(kClipsPerLog))
        throw std::invalid_argument("teacher " + teacher_id + ": expected " +
                                    std::to_string(kClipsPerLog) + " events, got " +
                                    std::to_string(events.size()));
    check_events(*this);
}

void FeedbackLog::validate_prefix() const {
    if (events.size() > static_cast<std::size_t>(kClipsPerLog))
        throw std::invalid_argument("teacher " + teacher_id + ": more than " +
                                    std::to_string(kClipsPerLog) + " events");
    check_events(*this);
}

}  // namespace teachlab
