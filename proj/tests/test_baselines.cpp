#include <gtest/gtest.h>

#include "teachlab/baselines.hpp"

using namespace teachlab::baselines;

TEST(RawOffset, SubtractsMidpoint) {
    EXPECT_EQ(raw_offset(7), 2.0);
    EXPECT_EQ(raw_offset(5), 0.0);
    EXPECT_EQ(raw_offset(0), -5.0);
    EXPECT_THROW(raw_offset(10.5), std::out_of_range);
}

TEST(Midpoint, StrictlyAboveFiveIsPositive) {
    EXPECT_EQ(midpoint_classify(6), 1);
    EXPECT_EQ(midpoint_classify(5), -1);
    EXPECT_EQ(midpoint_classify(10), 1);
    for (int f = 0; f <= 10; ++f) EXPECT_EQ(midpoint_classify(f), f > 5 ? 1 : -1);
    EXPECT_THROW(midpoint_classify(-1), std::out_of_range);
}

TEST(SlidingWindow, ComparesAgainstWindowMean) {
    WindowState w;
    w.classify(4);
    w.classify(6);
    EXPECT_EQ(w.classify(6), 1);
}

TEST(SlidingWindow, EmptyWindowIsNegative) {
    WindowState w;
    EXPECT_EQ(w.classify(7), -1);
    EXPECT_EQ(w.window().size(), 1u);
}

TEST(SlidingWindow, EqualToMeanIsNegative) {
    WindowState w;
    w.classify(4);
    w.classify(6);
    EXPECT_EQ(w.classify(5), -1);
}

TEST(SlidingWindow, EvictsOldestAtCapacity) {
    WindowState w(20);
    for (int i = 0; i < 21; ++i) w.classify(i % 11);
    ASSERT_EQ(w.window().size(), 20u);
    EXPECT_EQ(w.window().front(), 1.0);
    EXPECT_EQ(w.window().back(), 9.0);
}

TEST(SlidingWindow, CapacityOneComparesWithPrevious) {
    WindowState w(1);
    w.classify(5);
    EXPECT_EQ(w.classify(6), 1);
    EXPECT_EQ(w.classify(6), -1);
    EXPECT_EQ(w.classify(2), -1);
    EXPECT_EQ(w.classify(3), 1);
}

TEST(SlidingWindow, RejectsZeroCapacityAndOutOfRange) {
    EXPECT_THROW(WindowState(0), std::invalid_argument);
    WindowState w;
    EXPECT_THROW(w.classify(11), std::out_of_range);
}

TEST(BinaryPassthrough, Tokens) {
    EXPECT_EQ(binary_passthrough("good"), 1);
    EXPECT_EQ(binary_passthrough("bad"), -1);
    EXPECT_THROW(binary_passthrough("meh"), std::invalid_argument);
}
