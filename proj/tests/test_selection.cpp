#include <doctest.h>

#include <algorithm>
#include <set>

#include "coex/metrics.hpp"
#include "coex/selection.hpp"
#include "oracles.hpp"

using namespace coex;

namespace
{
    RadarArray ula(Index m_r)
    {
        RadarArray a;
        a.m_r = m_r;
        return a;
    }

    std::vector<CompositeChannel> clusters(const CompTopology &topo, Index m_r, std::uint64_t seed)
    {
        std::vector<CompositeChannel> out;
        for (int c = 1; c <= topo.c_t(); ++c)
            out.push_back(gen_cluster_channel(topo, c, ula(m_r), seed));
        return out;
    }

    const double kTol = default_rank_tol<double>(1, 100);
} // namespace

TEST_CASE("snsp picks the cluster with the largest null space")
{
    const auto chans = clusters(CompTopology::per_cluster(3, {18, 15, 12, 9}), 100, 3);
    const auto sel = snsp_select(chans, kTol);
    REQUIRE(sel.scores.size() == 4);
    CHECK(sel.scores[0] == 46.0);
    CHECK(sel.scores[1] == 55.0);
    CHECK(sel.scores[2] == 64.0);
    CHECK(sel.scores[3] == 73.0);
    CHECK(sel.best_index == 4);
    CHECK(sel.worst_index == 1);
    CHECK(sel.chosen_precoder.subspace_rank == 73);
    CHECK((chans[3].h * sel.precoded_waveform.x).norm() <= 1e-9 * chans[3].h.norm() * sel.precoded_waveform.x.norm());
}

TEST_CASE("snsp ties resolve to the lowest index")
{
    const auto chans = clusters(CompTopology::uniform(3, 3, 5), 100, 11);
    const auto sel = snsp_select(chans, kTol);
    CHECK(sel.best_index == 1);
    CHECK(sel.worst_index == 1);
}

TEST_CASE("snsp with a single cluster")
{
    const auto chans = clusters(CompTopology::uniform(1, 3, 5), 40, 2);
    const auto sel = snsp_select(chans, kTol);
    CHECK(sel.best_index == 1);
    CHECK(sel.worst_index == 1);
    CHECK(sel.scores[0] == 25.0);
}

TEST_CASE("snsp without any null space is infeasible")
{
    const auto chans = clusters(CompTopology::uniform(2, 3, 4), 10, 2);
    CHECK_THROWS_AS(snsp_select(chans, kTol), NoFeasibleCluster);
}

TEST_CASE("selection rejects mixed array sizes")
{
    auto chans = clusters(CompTopology::uniform(2, 3, 2), 20, 1);
    chans[1] = clusters(CompTopology::uniform(1, 3, 2), 21, 1)[0];
    CHECK_THROWS_AS(snsp_select(chans, kTol), DimensionError);
    CHECK_THROWS_AS(sssvsp_select(chans, SigmaThreshold::absolute(0.0), orthogonal_waveform(20, 32)), DimensionError);
    CHECK_THROWS(snsp_select(std::vector<CompositeChannel>{}, kTol));
}

TEST_CASE("sssvsp score identity for an orthogonal waveform")
{
    const auto x = orthogonal_waveform(100, 128);
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const auto chans = clusters(CompTopology::per_cluster(3, {8, 6, 4}), 100, seed);
        const auto th = SigmaThreshold::relative(0.5);
        const auto sel = sssvsp_select(chans, th, x);
        for (std::size_t i = 0; i < chans.size(); ++i)
        {
            const auto basis = small_singular_basis(chans[i].h, th, default_rank_tol<double>(chans[i].h.rows(), 100));
            const double expect = 128.0 * double(100 - basis.cols());
            REQUIRE(sel.scores[i] * sel.scores[i] == doctest::Approx(expect).epsilon(1e-6));
        }
    }
}

TEST_CASE("sssvsp scores vanish once the threshold exceeds every singular value")
{
    const auto chans = clusters(CompTopology::uniform(3, 3, 6), 60, 5);
    const auto sel = sssvsp_select(chans, SigmaThreshold::relative(1e6), orthogonal_waveform(60, 64));
    for (double s : sel.scores)
        CHECK(s <= 1e-9);
    CHECK(sel.best_index == 1);
    CHECK(sel.chosen_precoder.subspace_rank == 60);
}

TEST_CASE("sssvsp with no usable subspace returns a silent precoder")
{
    const auto chans = clusters(CompTopology::uniform(2, 3, 4), 10, 8);
    const auto sel = sssvsp_select(chans, SigmaThreshold::absolute(0.0), orthogonal_waveform(10, 16));
    CHECK(sel.chosen_precoder.subspace_rank == 0);
    CHECK(sel.precoded_waveform.x.norm() == 0.0);
}

TEST_CASE("sssvsp with a relative threshold is invariant to channel scaling")
{
    const auto x = orthogonal_waveform(50, 64);
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        auto chans = clusters(CompTopology::per_cluster(2, {5, 8, 3}), 50, seed);
        const auto a = sssvsp_select(chans, SigmaThreshold::relative(0.4), x);
        for (auto &c : chans)
            c.h *= 37.5;
        const auto b = sssvsp_select(chans, SigmaThreshold::relative(0.4), x);
        REQUIRE(a.best_index == b.best_index);
        REQUIRE(a.worst_index == b.worst_index);
        for (std::size_t i = 0; i < a.scores.size(); ++i)
            REQUIRE(a.scores[i] == doctest::Approx(b.scores[i]).epsilon(1e-9));
    }
}

TEST_CASE("sssvsp scores are non-increasing in the threshold")
{
    const auto x = orthogonal_waveform(60, 64);
    const auto chans = clusters(CompTopology::per_cluster(3, {6, 4}), 60, 17);
    std::vector<double> prev(chans.size(), std::numeric_limits<double>::infinity());
    for (double rel : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.1})
    {
        const auto sel = sssvsp_select(chans, SigmaThreshold::relative(rel), x);
        for (std::size_t i = 0; i < chans.size(); ++i)
        {
            REQUIRE(sel.scores[i] <= prev[i] + 1e-9);
            prev[i] = sel.scores[i];
        }
    }
}

TEST_CASE("sssvsp at zero threshold agrees with snsp")
{
    int agree = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
    {
        std::vector<int> n_bs;
        for (int c = 0; c < 4; ++c)
            n_bs.push_back(3 + int(mix_seed(seed * 4 + std::uint64_t(c)) % 6));
        const auto chans = clusters(CompTopology::per_cluster(3, n_bs), 100, seed);
        const auto a = snsp_select(chans, kTol);
        const auto b = sssvsp_select(chans, SigmaThreshold::absolute(0.0), orthogonal_waveform(100, 128));
        agree += a.best_index == b.best_index && a.worst_index == b.worst_index;
    }
    CHECK(agree == 100);
}

TEST_CASE("selection follows the clusters under permutation")
{
    const std::vector<int> n_bs{7, 4, 9, 4};
    const auto chans = clusters(CompTopology::per_cluster(3, n_bs), 100, 4);
    const auto base = snsp_select(chans, kTol);
    CHECK(base.best_index == 2);
    CHECK(base.worst_index == 3);

    // swap clusters 1 and 2: the winner moves to index 1
    std::vector<CompositeChannel> swapped{chans[1], chans[0], chans[2], chans[3]};
    CHECK(snsp_select(swapped, kTol).best_index == 1);
    // reversed order: the tie between the two N_BS = 4 clusters goes to the lower index
    std::vector<CompositeChannel> reversed(chans.rbegin(), chans.rend());
    const auto r = snsp_select(reversed, kTol);
    CHECK(r.best_index == 1);
    CHECK(r.worst_index == 2);
}

TEST_CASE("pri cycle alternates cooperation and interference mitigation")
{
    Scenario sc{ula(40), CompTopology::uniform(3, 2, 4), 0.0, 5000.0};
    PriConfig cfg;
    cfg.pris = 4;
    cfg.training = TrainingConfig{16, 10.0, false};
    const auto run = run_pri_cycle(sc, cfg);
    REQUIRE(run.trace.size() == 8);
    REQUIRE(run.selections.size() == 4);
    for (std::size_t k = 0; k < run.trace.size(); ++k)
    {
        CHECK(run.trace[k].mode == (k % 2 == 0 ? PriMode::cooperation : PriMode::interference_mitigation));
        CHECK(run.trace[k].pri_index == int(k / 2) + 1);
        CHECK(run.trace[k].channel_estimates.size() == 3);
        CHECK(run.trace[k].clustering_info.c_t() == 3);
    }
    // 24 stacked rows fit the 40-element array, so cooperation has a ZF precoder
    REQUIRE(run.trace[0].coop_precoder.has_value());
    CHECK(run.trace[0].coop_precoder->p.cols() == 24);
    CHECK(run.trace[0].channel_estimates[0].kind == CsiKind::estimated_csi);
}

TEST_CASE("pri cycle is deterministic and static channels give a static choice")
{
    Scenario sc{ula(100), CompTopology::per_cluster(3, {8, 5, 6}), 0.0, 5000.0};
    PriConfig cfg;
    cfg.pris = 5;
    cfg.estimate = false;
    cfg.redraw_channels = false;
    const auto a = run_pri_cycle(sc, cfg);
    const auto b = run_pri_cycle(sc, cfg);
    for (std::size_t k = 0; k < a.selections.size(); ++k)
    {
        CHECK(a.selections[k].best_index == 2);
        CHECK(a.selections[k].worst_index == 1);
        CHECK(a.selections[k].scores == b.selections[k].scores);
        CHECK((a.selections[k].chosen_precoder.p - b.selections[k].chosen_precoder.p).norm() == 0.0);
    }
    // 57 stacked rows fit the 100-element array
    CHECK(a.trace[0].coop_precoder.has_value());
}

TEST_CASE("pri cycle with redrawn equal-size clusters and estimated CSI")
{
    // equal N_BS with sssvsp scores: the winner varies with the channel draw
    Scenario sc{ula(60), CompTopology::uniform(3, 3, 5), 0.0, 5000.0};
    PriConfig cfg;
    cfg.pris = 100;
    cfg.scheme = SelectionScheme::sssvsp;
    cfg.sigma_th = SigmaThreshold::relative(0.6);
    cfg.training = TrainingConfig{30, 10.0, false};
    cfg.redraw_channels = true;
    const auto run = run_pri_cycle(sc, cfg);
    std::set<int> winners;
    for (const auto &s : run.selections)
    {
        REQUIRE(s.best_index >= 1);
        REQUIRE(s.best_index <= 3);
        winners.insert(s.best_index);
    }
    CHECK(winners.size() >= 2);
    CHECK(pri_channel_seed(cfg, 1) != pri_channel_seed(cfg, 2));
    cfg.redraw_channels = false;
    CHECK(pri_channel_seed(cfg, 1) == pri_channel_seed(cfg, 2));
}
