#include <doctest.h>

#include <numbers>

#include "coex/scenario.hpp"
#include "oracles.hpp"

using namespace coex;
using cd = std::complex<double>;

namespace
{
    RadarArray ula(Index m_r)
    {
        RadarArray a;
        a.m_r = m_r;
        return a;
    }
} // namespace

TEST_CASE("steering vector at broadside is all ones")
{
    const auto a = steering_vector(ula(4), 0.0);
    for (Index p = 0; p < 4; ++p)
        CHECK(std::abs(a(p) - cd(1.0, 0.0)) <= 1e-15);
}

TEST_CASE("steering vector at endfire with 3/4 wavelength spacing")
{
    const auto a = steering_vector(ula(4), std::numbers::pi / 2);
    const cd expect[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (Index p = 0; p < 4; ++p)
        CHECK(std::abs(a(p) - expect[p]) <= 1e-12);
}

TEST_CASE("steering vector matches the delay model and is unit modulus over a 1 degree grid")
{
    const auto array = ula(16);
    for (int deg = -90; deg <= 90; ++deg)
    {
        const double th = deg * std::numbers::pi / 180.0;
        const auto a = steering_vector(array, th);
        REQUIRE((a.array().abs() - 1.0).abs().maxCoeff() <= 1e-14);
        REQUIRE((a - oracle::steering(16, 0.75, th)).norm() <= 1e-12);
    }
}

TEST_CASE("steering derivative at broadside")
{
    const auto d = steering_derivative(ula(3), 0.0);
    const double k = 3.0 * std::numbers::pi / 2.0;
    CHECK(std::abs(d(0)) == 0.0);
    CHECK(std::abs(d(1) - cd(0, -k)) <= 1e-12);
    CHECK(std::abs(d(2) - cd(0, -2 * k)) <= 1e-12);
}

TEST_CASE("steering derivative vanishes at endfire")
{
    const auto d = steering_derivative(ula(5), std::numbers::pi / 2);
    CHECK(d.norm() <= 1e-12);
}

TEST_CASE("steering derivative matches central finite differences")
{
    const auto array = ula(12);
    const double h = 1e-6;
    for (int deg = -89; deg <= 89; ++deg)
    {
        const double th = deg * std::numbers::pi / 180.0;
        const ComplexVector fd =
            (steering_vector(array, th + h) - steering_vector(array, th - h)) / (2.0 * h);
        const auto d = steering_derivative(array, th);
        for (Index p = 1; p < array.m_r; ++p)
            REQUIRE(std::abs(fd(p) - d(p)) <= 1e-6 * std::abs(d(p)) + 1e-9);
    }
}

TEST_CASE("topology validation")
{
    CHECK_THROWS(CompTopology({2, 2, 2}, {{1, 2}, {2, 3}}));  // overlapping
    CHECK_THROWS(CompTopology({2, 2}, {{1, 3}}));             // out of range
    CHECK_THROWS(CompTopology({2, 2}, {{}}));                 // empty cluster
    const CompTopology ok({2, 3, 4}, {{1}, {3}});             // BS 2 unclustered
    CHECK(ok.c_t() == 2);
    CHECK(ok.cluster_rows(2) == 4);
    CHECK(ok.total_rows() == 9);
    CHECK_THROWS_AS(ok.cluster(3), DimensionError);

    const auto sw = CompTopology::per_cluster(3, {6, 5, 4, 3});
    CHECK(sw.m() == 12);
    CHECK(sw.cluster_rows(1) == 18);
    CHECK(sw.cluster_rows(4) == 9);
}

TEST_CASE("cluster channel shape and stacking")
{
    const auto topo = CompTopology::uniform(2, 3, 8);
    const auto array = ula(100);
    const auto ch = gen_cluster_channel(topo, 2, array, 77);
    CHECK(ch.h.rows() == 24);
    CHECK(ch.h.cols() == 100);
    CHECK(ch.kind == CsiKind::true_csi);
    REQUIRE(ch.blocks() == 3);

    // row block n is an independent N_BS x M_R draw under its derived seed
    const auto &members = topo.cluster(2);
    for (Index n = 0; n < 3; ++n)
    {
        const auto bs = members[static_cast<std::size_t>(n)];
        const auto expect = random_complex_gaussian(8, 100, channel_block_seed(77, 2, bs));
        CHECK((ch.block(n) - expect).norm() == 0.0);
    }
    CHECK(numeric_rank(svd(ch.h), 1e-10) == 24);
    CHECK_THROWS_AS(gen_cluster_channel(topo, 3, array, 77), DimensionError);

    const auto again = gen_cluster_channel(topo, 2, array, 77);
    CHECK((again.h - ch.h).norm() == 0.0);
}

TEST_CASE("single-BS cluster equals its block")
{
    const CompTopology topo({4}, {{1}});
    const auto ch = gen_cluster_channel(topo, 1, ula(10), 3);
    CHECK((ch.h - random_complex_gaussian(4, 10, channel_block_seed(3, 1, 1))).norm() == 0.0);
}

TEST_CASE("network channel contains every cluster channel")
{
    const auto topo = CompTopology::uniform(2, 2, 3);
    const auto array = ula(20);
    const auto net = gen_network_channel(topo, array, 9);
    CHECK(net.h.rows() == 12);
    CHECK((net.h.topRows(6) - gen_cluster_channel(topo, 1, array, 9).h).norm() == 0.0);
    CHECK((net.h.bottomRows(6) - gen_cluster_channel(topo, 2, array, 9).h).norm() == 0.0);
}

TEST_CASE("nullity examples")
{
    const auto n1 = nullity(gen_cluster_channel(CompTopology::uniform(1, 3, 8), 1, ula(100), 1));
    CHECK(n1 == 76);
    const auto n2 = nullity(gen_cluster_channel(CompTopology::uniform(1, 3, 3), 1, ula(100), 1));
    CHECK(n2 == 91);
    const auto n3 = nullity(gen_cluster_channel(CompTopology::uniform(1, 3, 4), 1, ula(10), 1));
    CHECK(n3 == 0);
}

TEST_CASE("nullity law across seeds")
{
    for (std::uint64_t seed = 0; seed < 100; ++seed)
    {
        const int n_bs = 1 + int(seed % 9);
        const Index m_r = 10 + Index(seed % 40);
        const auto ch = gen_cluster_channel(CompTopology::uniform(1, 3, n_bs), 1, ula(m_r), seed);
        REQUIRE(nullity(ch) == std::max<Index>(m_r - 3 * n_bs, 0));
    }
}
