#ifndef COEX_SELECTION_HPP
#define COEX_SELECTION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "coex/estimation.hpp"
#include "coex/precoders.hpp"

namespace coex
{
    enum class SelectionScheme
    {
        snsp,
        sssvsp
    };

    const char *to_string(SelectionScheme scheme);

    struct SelectionResult
    {
        int best_index = 1;  // 1-based cluster index
        int worst_index = 1; // 1-based cluster index
        std::vector<double> scores;
        Precoder chosen_precoder;
        WaveformBlock precoded_waveform;
    };

    // Best = argmax nullity, worst = argmin; ties resolve to the lowest index.
    // Throws NoFeasibleCluster when every nullity is zero.
    SelectionResult snsp_select(std::span<const CompositeChannel> channels, double rel_tol, const WaveformBlock &x);
    SelectionResult snsp_select(std::span<const CompositeChannel> channels, double rel_tol);

    // Score_i = ||P_s,i X - X||_F; best = argmin, worst = argmax, lowest index on ties
    SelectionResult sssvsp_select(std::span<const CompositeChannel> channels, SigmaThreshold sigma_th,
                                  const WaveformBlock &x);

    enum class PriMode
    {
        cooperation,
        interference_mitigation
    };

    const char *to_string(PriMode mode);

    struct PriState
    {
        PriMode mode = PriMode::cooperation;
        int pri_index = 0;
        CompTopology clustering_info = CompTopology::uniform(1, 1, 1);
        std::vector<CompositeChannel> channel_estimates;
        std::optional<Precoder> coop_precoder; // cooperation phase only, empty when ZF is infeasible
    };

    struct PriConfig
    {
        int pris = 1;
        SelectionScheme scheme = SelectionScheme::snsp;
        SigmaThreshold sigma_th = SigmaThreshold::relative(0.0);
        TrainingConfig training;
        bool estimate = true;         // false: select on true CSI
        bool redraw_channels = false; // fresh channel realization every PRI
        Index waveform_len = 128;
        std::uint64_t seed = 1;
    };

    struct PriRun
    {
        std::vector<PriState> trace; // two entries per PRI, cooperation first
        std::vector<SelectionResult> selections;
        std::vector<std::vector<CompositeChannel>> true_channels; // per PRI
    };

    // Channel realization seed of one PRI
    std::uint64_t pri_channel_seed(const PriConfig &cfg, int pri_index);

    PriRun run_pri_cycle(const Scenario &scenario, const PriConfig &cfg);

} // namespace coex

#endif // COEX_SELECTION_HPP
