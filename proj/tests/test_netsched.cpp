#include <gtest/gtest.h>

#include <sstream>

#include "flexcomm/netsched.hpp"

using namespace flexcomm;

TEST(Schedule, ValidateRejectsBadSegments) {
    NetworkSchedule s;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s.segments = {{1, NetParams(0.001, 1e9)}};
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s.segments = {{0, NetParams(0.001, 1e9)}, {5, NetParams(0.002, 1e9)},
                  {5, NetParams(0.003, 1e9)}};
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s.segments.pop_back();
    EXPECT_NO_THROW(s.validate());
}

TEST(Schedule, ParamsAtPicksEnclosingSegment) {
    NetworkSchedule s;
    s.segments = {{0, NetParams(0.001, 25e9)}, {10, NetParams(0.05, 1e9)},
                  {20, NetParams(0.001, 25e9)}};
    EXPECT_EQ(params_at(s, 0), s.segments[0].net);
    EXPECT_EQ(params_at(s, 9), s.segments[0].net);
    EXPECT_EQ(params_at(s, 10), s.segments[1].net);
    EXPECT_EQ(params_at(s, 19), s.segments[1].net);
    EXPECT_EQ(params_at(s, 500), s.segments[2].net);
    EXPECT_THROW(params_at(s, -1), std::invalid_argument);
}

TEST(Schedule, NetworkChangedRespectsThreshold) {
    NetParams a(0.001, 10e9);
    NetParams b(0.0011, 10e9);
    EXPECT_FALSE(network_changed(a, a));
    EXPECT_TRUE(network_changed(a, b));
    EXPECT_FALSE(network_changed(a, b, 0.2));
    EXPECT_TRUE(network_changed(a, NetParams(0.001, 1e9), 0.2));
}

TEST(Trace, RoundTrip) {
    NetworkSchedule s;
    s.segments = {{0, NetParams(0.001, 25e9)}, {13, NetParams(0.05, 1e9)}};
    std::ostringstream out;
    write_trace(s, out);
    std::istringstream in(out.str());
    auto back = parse_trace(in);
    ASSERT_EQ(back.segments.size(), 2u);
    EXPECT_EQ(back.segments[0].start_epoch, 0);
    EXPECT_EQ(back.segments[0].net, s.segments[0].net);
    EXPECT_EQ(back.segments[1].start_epoch, 13);
    EXPECT_EQ(back.segments[1].net, s.segments[1].net);
}

TEST(Trace, ParserRejectsMalformedLines) {
    std::istringstream bad("0,1,10\nnot a line\n");
    EXPECT_THROW(parse_trace(bad), std::runtime_error);
    std::istringstream comments("# header only\n  \n0, 1, 10  # inline\n");
    auto s = parse_trace(comments);
    ASSERT_EQ(s.segments.size(), 1u);
    EXPECT_THROW(load_trace("/nonexistent/trace.csv"), std::runtime_error);
}

TEST(PresetC1, BoundariesAtFixedFractions) {
    auto s = preset_c1(50);
    ASSERT_EQ(s.segments.size(), 4u);
    EXPECT_EQ(s.segments[0].start_epoch, 0);
    EXPECT_EQ(s.segments[1].start_epoch, 13);
    EXPECT_EQ(s.segments[2].start_epoch, 25);
    EXPECT_EQ(s.segments[3].start_epoch, 37);
    EXPECT_EQ(s.segments[0].net, NetParams(0.001, 25e9));
    EXPECT_EQ(s.segments[1].net, NetParams(0.001, 1e9));
    EXPECT_EQ(s.segments[2].net, NetParams(0.050, 1e9));
    EXPECT_EQ(s.segments[3].net, NetParams(0.050, 25e9));
    EXPECT_THROW(preset_c1(0), std::invalid_argument);
}

TEST(PresetC2, SevenPhasesOnLongHorizon) {
    auto s = preset_c2(100);
    ASSERT_EQ(s.segments.size(), 7u);
    EXPECT_EQ(s.segments[1].start_epoch, 24);
    EXPECT_EQ(s.segments[3].start_epoch, 40);
    EXPECT_EQ(s.segments[3].net, NetParams(0.050, 1e9));
    EXPECT_EQ(s.segments[6].start_epoch, 70);
    // short horizons collapse colliding boundaries instead of failing
    EXPECT_NO_THROW(preset_c2(2).validate());
    EXPECT_THROW(preset_c2(-1), std::invalid_argument);
}

TEST(SimClock, CategoryAccounting) {
    SimClock clk;
    EXPECT_EQ(clk.now(), 0.0);
    clk.charge(Category::Compute, 1.5);
    clk.charge(Category::Sync, 0.25);
    clk.charge(Category::Sync, 0.25);
    EXPECT_DOUBLE_EQ(clk.of(Category::Sync), 0.5);
    EXPECT_DOUBLE_EQ(clk.of(Category::Compute), 1.5);
    EXPECT_DOUBLE_EQ(clk.of(Category::Exploration), 0.0);
    EXPECT_DOUBLE_EQ(clk.now(), 2.0);
    EXPECT_THROW(clk.charge(Category::Io, -1.0), std::invalid_argument);
}
