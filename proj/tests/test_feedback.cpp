#include <gtest/gtest.h>

#include "teachlab/feedback.hpp"

using namespace teachlab;

namespace {

FeedbackLog make_log(Modality m, int n = kClipsPerLog) {
    FeedbackLog log{"T1", m, {}};
    for (int i = 0; i < n; ++i)
        log.events.push_back({"T1", m, i, i < kClipsPerSession ? 1 : 2, static_cast<std::uint64_t>(i), 1, i * 10});
    return log;
}

}  // namespace

TEST(Feedback, ParseTokens) {
    EXPECT_EQ(parse_feedback_value(Modality::Binary, "good"), 1);
    EXPECT_EQ(parse_feedback_value(Modality::Binary, "bad"), 0);
    EXPECT_EQ(parse_feedback_value(Modality::Scalar, "7"), 7);
    EXPECT_EQ(parse_feedback_value(Modality::Scalar, "0"), 0);
    EXPECT_THROW(parse_feedback_value(Modality::Scalar, "11"), std::invalid_argument);
    EXPECT_THROW(parse_feedback_value(Modality::Scalar, "-1"), std::invalid_argument);
    EXPECT_THROW(parse_feedback_value(Modality::Scalar, "7.5"), std::invalid_argument);
    EXPECT_THROW(parse_feedback_value(Modality::Scalar, "good"), std::invalid_argument);
    EXPECT_THROW(parse_feedback_value(Modality::Binary, "7"), std::invalid_argument);
}

TEST(Feedback, ValueTokenRoundTrip) {
    FeedbackEvent e;
    e.modality = Modality::Binary;
    e.value = 1;
    EXPECT_EQ(e.value_token(), "good");
    e.value = 0;
    EXPECT_EQ(e.value_token(), "bad");
    e.modality = Modality::Scalar;
    e.value = 9;
    EXPECT_EQ(e.value_token(), "9");
}

TEST(Feedback, ModalityNames) {
    EXPECT_EQ(modality_from_string("scalar"), Modality::Scalar);
    EXPECT_EQ(to_string(Modality::Binary), "binary");
    EXPECT_THROW(modality_from_string("both"), std::invalid_argument);
}

TEST(FeedbackLog, CompleteLogValidates) {
    EXPECT_NO_THROW(make_log(Modality::Scalar).validate());
    EXPECT_NO_THROW(make_log(Modality::Binary).validate());
}

TEST(FeedbackLog, WrongLengthRejected) {
    EXPECT_THROW(make_log(Modality::Scalar, 199).validate(), std::invalid_argument);
    EXPECT_NO_THROW(make_log(Modality::Scalar, 199).validate_prefix());
    EXPECT_THROW(make_log(Modality::Scalar, 201).validate_prefix(), std::invalid_argument);
}

TEST(FeedbackLog, StructureViolationsRejected) {
    auto log = make_log(Modality::Scalar);
    log.events[100].session = 1;
    EXPECT_THROW(log.validate(), std::invalid_argument);

    log = make_log(Modality::Scalar);
    std::swap(log.events[3], log.events[4]);
    EXPECT_THROW(log.validate(), std::invalid_argument);

    log = make_log(Modality::Binary);
    log.events[0].value = 2;
    EXPECT_THROW(log.validate(), std::invalid_argument);

    log = make_log(Modality::Scalar);
    log.events[5].teacher_id = "T2";
    EXPECT_THROW(log.validate(), std::invalid_argument);
}
