#include <gtest/gtest.h>

#include <vector>

#include "flexcomm/collectives.hpp"

using namespace flexcomm;

namespace {

Cluster make_cluster(int n, SimClock* clk) {
    return Cluster(n, NetParams(0.001, 1e9), clk);
}

}  // namespace

TEST(Allgather, ReturnsAllPayloadsAndCharges) {
    SimClock clk;
    auto cluster = make_cluster(4, &clk);
    std::vector<std::vector<double>> payloads = {{1.0}, {2.0}, {3.0}, {4.0}};
    auto all = allgather(cluster, payloads, 8.0);
    EXPECT_EQ(all, payloads);
    EXPECT_DOUBLE_EQ(clk.of(Category::Sync),
                     cost_allgather_dense(cluster.net, cluster.msg(8.0)));

    std::vector<std::vector<double>> uneven = {{1.0}, {2.0, 9.0}, {3.0}, {4.0}};
    EXPECT_THROW(allgather(cluster, uneven, 8.0), std::invalid_argument);
    std::vector<std::vector<double>> short_list = {{1.0}};
    EXPECT_THROW(allgather(cluster, short_list, 8.0), std::invalid_argument);
}

TEST(Broadcast, ValidatesSourceRank) {
    SimClock clk;
    auto cluster = make_cluster(3, &clk);
    std::vector<std::size_t> idx = {1, 5, 9};
    auto got = broadcast(cluster, 2, idx, 12.0);
    EXPECT_EQ(got, idx);
    EXPECT_DOUBLE_EQ(clk.of(Category::Sync), cost_broadcast(cluster.net, cluster.msg(12.0)));
    EXPECT_THROW(broadcast(cluster, 3, idx, 12.0), std::invalid_argument);
    EXPECT_THROW(broadcast(cluster, -1, idx, 12.0), std::invalid_argument);
}

TEST(Allreduce, SumAndAverage) {
    SimClock clk;
    auto cluster = make_cluster(2, &clk);
    std::vector<std::vector<double>> v = {{1.0, 2.0}, {3.0, 6.0}};
    auto sum = allreduce(cluster, v, ReduceOp::Sum, ReduceAlgo::Ring, 8.0);
    EXPECT_EQ(sum, (std::vector<double>{4.0, 8.0}));
    auto avg = allreduce(cluster, v, ReduceOp::Avg, ReduceAlgo::Tree, 8.0);
    EXPECT_EQ(avg, (std::vector<double>{2.0, 4.0}));
    double expect = cost_ring_ar(cluster.net, cluster.msg(8.0)) +
                    cost_tree_ar(cluster.net, cluster.msg(8.0));
    EXPECT_DOUBLE_EQ(clk.of(Category::Sync), expect);
}

TEST(Allreduce, RankAscendingOrderIsDeterministic) {
    SimClock clk;
    auto cluster = make_cluster(3, &clk);
    // values chosen so (a+b)+c != a+(c+b) under a different summation order
    std::vector<std::vector<double>> v = {{1e16}, {1.0}, {-1e16}};
    auto out = allreduce(cluster, v, ReduceOp::Sum, ReduceAlgo::Ring, 4.0);
    EXPECT_EQ(out[0], (1e16 + 1.0) - 1e16);
}

TEST(Collectives, SingleWorkerChargesNothing) {
    SimClock clk;
    auto cluster = make_cluster(1, &clk);
    std::vector<std::vector<double>> v = {{5.0}};
    auto out = allreduce(cluster, v, ReduceOp::Avg, ReduceAlgo::Ring, 4.0);
    EXPECT_EQ(out, v.front());
    allgather(cluster, v, 4.0);
    broadcast(cluster, 0, v.front(), 4.0);
    EXPECT_EQ(clk.now(), 0.0);
}

TEST(Cluster, PayloadFloorIsFourBytes) {
    SimClock clk;
    auto cluster = make_cluster(2, &clk);
    EXPECT_EQ(cluster.msg(0.0).m_bytes, 4.0);
    EXPECT_EQ(cluster.msg(100.0).m_bytes, 100.0);
    EXPECT_THROW(Cluster(0, NetParams(0.001, 1e9), &clk), std::invalid_argument);
}
