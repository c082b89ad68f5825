#include "coex/selection.hpp"

#include <algorithm>

namespace coex
{
    const char *to_string(SelectionScheme scheme)
    {
        return scheme == SelectionScheme::snsp ? "snsp" : "sssvsp";
    }

    const char *to_string(PriMode mode)
    {
        return mode == PriMode::cooperation ? "cooperation" : "interference_mitigation";
    }

    namespace
    {
        void check_channels(std::span<const CompositeChannel> channels)
        {
            if (channels.empty())
                throw std::invalid_argument("selection: at least one cluster required");
            const Index m_r = channels.front().h.cols();
            for (const auto &ch : channels)
                if (ch.h.cols() != m_r)
                    throw DimensionError("selection: clusters disagree on M_R");
        }

        // first index of the extreme element; strict comparison keeps the lowest index on ties
        template <typename Better>
        int pick(const std::vector<double> &scores, Better better)
        {
            std::size_t at = 0;
            for (std::size_t i = 1; i < scores.size(); ++i)
                if (better(scores[i], scores[at]))
                    at = i;
            return static_cast<int>(at) + 1;
        }

        WaveformBlock default_waveform(Index m_r)
        {
            return orthogonal_waveform(m_r, std::max<Index>(128, m_r));
        }
    } // namespace

    SelectionResult snsp_select(std::span<const CompositeChannel> channels, double rel_tol, const WaveformBlock &x)
    {
        check_channels(channels);
        SelectionResult out;
        out.scores.reserve(channels.size());
        for (const auto &ch : channels)
            out.scores.push_back(double(nullity(ch, rel_tol)));

        if (std::all_of(out.scores.begin(), out.scores.end(), [](double s) { return s == 0.0; }))
            throw NoFeasibleCluster("snsp_select: every cluster has an empty null space");

        out.best_index = pick(out.scores, std::greater<>());
        out.worst_index = pick(out.scores, std::less<>());
        out.chosen_precoder = nsp_precoder(channels[static_cast<std::size_t>(out.best_index - 1)], rel_tol);
        out.precoded_waveform = {matmul(out.chosen_precoder.p, x.x)};
        return out;
    }

    SelectionResult snsp_select(std::span<const CompositeChannel> channels, double rel_tol)
    {
        check_channels(channels);
        return snsp_select(channels, rel_tol, default_waveform(channels.front().h.cols()));
    }

    SelectionResult sssvsp_select(std::span<const CompositeChannel> channels, SigmaThreshold sigma_th,
                                  const WaveformBlock &x)
    {
        check_channels(channels);
        const Index m_r = channels.front().h.cols();
        if (x.x.rows() != m_r)
            throw DimensionError("sssvsp_select: waveform has " + std::to_string(x.x.rows()) + " rows, expected " +
                                 std::to_string(m_r));

        SelectionResult out;
        out.scores.reserve(channels.size());
        for (const auto &ch : channels)
        {
            const ComplexMatrix basis =
                small_singular_basis(ch.h, sigma_th, default_rank_tol(ch.h.rows(), ch.h.cols()));
            // ||P X - X||_F with P = B B*, evaluated without forming P
            const ComplexMatrix residual = x.x - basis * (basis.adjoint() * x.x);
            out.scores.push_back(residual.norm());
        }

        // scores equal up to rounding count as ties
        const double slack = 1e-9 * *std::max_element(out.scores.begin(), out.scores.end());
        out.best_index = pick(out.scores, [slack](double a, double b) { return a < b - slack; });
        out.worst_index = pick(out.scores, [slack](double a, double b) { return a > b + slack; });
        const auto &best = channels[static_cast<std::size_t>(out.best_index - 1)];
        try
        {
            out.chosen_precoder = ssvsp_precoder(best, sigma_th);
        }
        catch (const EmptyNullSpace &)
        {
            // nothing to project onto: the radar stays silent toward this cluster
            out.chosen_precoder.p = ComplexMatrix::Zero(m_r, m_r);
            out.chosen_precoder.kind = PrecoderKind::ssvsp;
            out.chosen_precoder.subspace_rank = 0;
        }
        out.precoded_waveform = {matmul(out.chosen_precoder.p, x.x)};
        return out;
    }

    std::uint64_t pri_channel_seed(const PriConfig &cfg, int pri_index)
    {
        return cfg.redraw_channels ? derive_seed(cfg.seed, {0x9e1ULL, static_cast<std::uint64_t>(pri_index)})
                                   : cfg.seed;
    }

    PriRun run_pri_cycle(const Scenario &scenario, const PriConfig &cfg)
    {
        if (cfg.pris < 1)
            throw std::invalid_argument("run_pri_cycle: pris must be >= 1");
        scenario.array.validate();
        const auto &topo = scenario.topology;
        const WaveformBlock x = orthogonal_waveform(scenario.array.m_r, cfg.waveform_len);

        PriRun run;
        for (int pri = 1; pri <= cfg.pris; ++pri)
        {
            const std::uint64_t chan_seed = pri_channel_seed(cfg, pri);

            // cooperation: clustering snapshot, per-cluster training, broadcast precoder
            std::vector<CompositeChannel> truth;
            std::vector<CompositeChannel> estimates;
            for (int c = 1; c <= topo.c_t(); ++c)
            {
                truth.push_back(gen_cluster_channel(topo, c, scenario.array, chan_seed));
                if (cfg.estimate)
                    estimates.push_back(estimate_composite(
                        truth.back(), cfg.training,
                        derive_seed(cfg.seed, {0xE57ULL, static_cast<std::uint64_t>(pri), static_cast<std::uint64_t>(c)})));
                else
                    estimates.push_back(truth.back());
            }

            PriState coop;
            coop.mode = PriMode::cooperation;
            coop.pri_index = pri;
            coop.clustering_info = topo;
            coop.channel_estimates = estimates;
            Index rows = 0;
            for (const auto &e : estimates)
                rows += e.h.rows();
            if (rows <= scenario.array.m_r)
            {
                ComplexMatrix stacked(rows, scenario.array.m_r);
                Index at = 0;
                for (const auto &e : estimates)
                {
                    stacked.middleRows(at, e.h.rows()) = e.h;
                    at += e.h.rows();
                }
                try
                {
                    coop.coop_precoder = zf_precoder(stacked);
                }
                catch (const ZfInfeasible &)
                {
                }
            }
            run.trace.push_back(coop);

            // interference mitigation on the estimates gathered above
            SelectionResult sel = cfg.scheme == SelectionScheme::snsp
                                      ? snsp_select(estimates, default_rank_tol<double>(1, scenario.array.m_r), x)
                                      : sssvsp_select(estimates, cfg.sigma_th, x);

            PriState mitigate;
            mitigate.mode = PriMode::interference_mitigation;
            mitigate.pri_index = pri;
            mitigate.clustering_info = topo;
            mitigate.channel_estimates = std::move(estimates);
            run.trace.push_back(std::move(mitigate));
            run.selections.push_back(std::move(sel));
            run.true_channels.push_back(std::move(truth));
        }
        return run;
    }

} // namespace coex
