#include <gtest/gtest.h>

#include "flexcomm/core.hpp"

using namespace flexcomm;

TEST(SparseGrad, ValidateRejectsBadShapes) {
    SparseGrad s;
    s.total_len = 0;
    EXPECT_THROW(validate(s), std::invalid_argument);

    s.total_len = 4;
    s.indices = {0, 2};
    s.values = {1.0};
    EXPECT_THROW(validate(s), std::invalid_argument);

    s.values = {1.0, 2.0};
    EXPECT_NO_THROW(validate(s));

    s.indices = {0, 4};
    EXPECT_THROW(validate(s), std::out_of_range);

    s.indices = {2, 2};
    EXPECT_THROW(validate(s), std::invalid_argument);

    s.indices = {2, 1};
    EXPECT_THROW(validate(s), std::invalid_argument);
}

TEST(Flatten, ConcatenatesAndRecordsSpans) {
    auto g = flatten({{1.0, 2.0}, {3.0}, {4.0, 5.0, 6.0}}, {"a", "b"});
    ASSERT_EQ(g.size(), 6u);
    EXPECT_EQ(g.values, (std::vector<double>{1, 2, 3, 4, 5, 6}));
    ASSERT_EQ(g.layer_map.size(), 3u);
    EXPECT_EQ(g.layer_map[0].name, "a");
    EXPECT_EQ(g.layer_map[1].name, "b");
    EXPECT_EQ(g.layer_map[2].name, "L2");
    EXPECT_EQ(g.layer_map[1].offset, 2u);
    EXPECT_EQ(g.layer_map[2].offset, 3u);
    EXPECT_EQ(g.layer_map[2].length, 3u);
}

TEST(Flatten, RejectsEmptyAndNonFinite) {
    EXPECT_THROW(flatten({}), std::invalid_argument);
    EXPECT_THROW(flatten({{1.0, std::nan("")}}), std::runtime_error);
}

TEST(Densify, RoundTrip) {
    SparseGrad s;
    s.total_len = 5;
    s.indices = {1, 4};
    s.values = {-2.0, 7.0};
    auto d = densify(s);
    EXPECT_EQ(d.values, (std::vector<double>{0, -2, 0, 0, 7}));
}

TEST(ResidualStore, StartsAllZero) {
    ResidualStore store(3, 4);
    for (int r = 0; r < 3; ++r) {
        ASSERT_EQ(store.of(r).size(), 4u);
        for (double v : store.of(r)) EXPECT_EQ(v, 0.0);
    }
    EXPECT_THROW(store.of(3), std::out_of_range);
}
