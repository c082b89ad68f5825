#ifndef COEX_ESTIMATION_HPP
#define COEX_ESTIMATION_HPP

#include <cstdint>

#include "coex/scenario.hpp"

namespace coex
{
    struct TrainingConfig
    {
        Index l_t = 1;       // training length in symbols
        double rho = 10.0;   // linear SNR per receive antenna
        bool noiseless = false;

        void validate(Index n_streams) const;
    };

    // Orthogonal training rows, S S* = L_t I
    struct TrainingMatrix
    {
        ComplexMatrix s; // n_streams x L_t
    };

    TrainingMatrix design_training(Index n_streams, Index l_t);

    // ML estimate of the reverse link H_bar (M_R x n_streams) from
    //   Y = sqrt(rho / n) H_bar S + W,   H_hat = sqrt(n / rho) Y S* (S S*)^-1
    // W is CN(0,1) per entry unless cfg.noiseless.
    ComplexMatrix estimate_channel(const ComplexMatrix &h_bar_true, const TrainingMatrix &training,
                                   const TrainingConfig &cfg, std::uint64_t seed);

    // Forward-link composite estimate, the conjugate transpose of the reverse-link estimate
    CompositeChannel estimated_composite(const ComplexMatrix &h_bar_hat, int cluster_index,
                                         std::vector<Index> block_rows);

    // Train on the reverse link of a true composite channel and return its estimate
    CompositeChannel estimate_composite(const CompositeChannel &truth, const TrainingConfig &cfg,
                                        std::uint64_t seed);

} // namespace coex

#endif // COEX_ESTIMATION_HPP
