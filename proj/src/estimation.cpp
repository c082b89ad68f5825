#include "coex/estimation.hpp"

#include <cmath>
#include <string>

namespace coex
{
    void TrainingConfig::validate(Index n_streams) const
    {
        if (l_t < n_streams)
            throw std::invalid_argument("training too short for identifiability: l_t = " + std::to_string(l_t) +
                                        " < " + std::to_string(n_streams) + " streams");
        if (!(rho > 0.0))
            throw std::invalid_argument("TrainingConfig: rho must be > 0");
    }

    TrainingMatrix design_training(Index n_streams, Index l_t)
    {
        if (n_streams < 1)
            throw std::invalid_argument("design_training: n_streams must be >= 1");
        if (l_t < n_streams)
            throw std::invalid_argument("training too short for identifiability: l_t = " + std::to_string(l_t) +
                                        " < " + std::to_string(n_streams) + " streams");
        return {dft_rows(n_streams, l_t)};
    }

    ComplexMatrix estimate_channel(const ComplexMatrix &h_bar_true, const TrainingMatrix &training,
                                   const TrainingConfig &cfg, std::uint64_t seed)
    {
        const Index n = training.s.rows();
        const Index l_t = training.s.cols();
        if (h_bar_true.cols() != n)
            throw DimensionError("estimate_channel: H_bar has " + std::to_string(h_bar_true.cols()) +
                                 " columns but training has " + std::to_string(n) + " streams");
        cfg.validate(n);
        if (cfg.l_t != l_t)
            throw DimensionError("estimate_channel: training length differs from cfg.l_t");

        const double scale = std::sqrt(cfg.rho / double(n));
        ComplexMatrix y = scale * h_bar_true * training.s;
        if (!cfg.noiseless)
            y += random_complex_gaussian(h_bar_true.rows(), l_t, seed);

        const ComplexMatrix gram = training.s * training.s.adjoint();
        Eigen::LLT<ComplexMatrix> llt(gram);
        if (llt.info() != Eigen::Success)
            throw NumericalError("estimate_channel: S S* is singular");
        // Y S* (S S*)^-1 == ((S S*)^-1 S Y*)*, the Gram matrix being Hermitian
        const ComplexMatrix rhs = training.s * y.adjoint();
        return (llt.solve(rhs)).adjoint() / scale;
    }

    CompositeChannel estimated_composite(const ComplexMatrix &h_bar_hat, int cluster_index,
                                         std::vector<Index> block_rows)
    {
        CompositeChannel ch;
        ch.cluster_index = cluster_index;
        ch.h = h_bar_hat.adjoint();
        ch.kind = CsiKind::estimated_csi;
        if (block_rows.empty())
            block_rows.push_back(ch.h.rows());
        ch.block_rows = std::move(block_rows);
        return ch;
    }

    CompositeChannel estimate_composite(const CompositeChannel &truth, const TrainingConfig &cfg,
                                        std::uint64_t seed)
    {
        const Index n = truth.h.rows();
        const auto training = design_training(n, cfg.l_t);
        const ComplexMatrix h_bar = truth.h.adjoint();
        return estimated_composite(estimate_channel(h_bar, training, cfg, seed), truth.cluster_index,
                                   truth.block_rows);
    }

} // namespace coex
