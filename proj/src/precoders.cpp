#include "coex/precoders.hpp"

#include <cmath>

namespace coex
{
    const char *to_string(PrecoderKind kind)
    {
        switch (kind)
        {
        case PrecoderKind::nsp:
            return "nsp";
        case PrecoderKind::ssvsp:
            return "ssvsp";
        case PrecoderKind::zf:
            return "zf";
        case PrecoderKind::mmse:
            return "mmse";
        }
        return "?";
    }

    namespace
    {
        Precoder projection_from_basis(const ComplexMatrix &basis, PrecoderKind kind, double threshold)
        {
            Precoder out;
            out.p = basis * basis.adjoint();
            out.kind = kind;
            out.subspace_rank = basis.cols();
            out.sigma_threshold = threshold;
            return out;
        }

        void normalize_total_power(Precoder &pc)
        {
            const double f = pc.p.norm();
            if (f > 0.0)
                pc.p /= f;
            pc.power_normalized = true;
        }
    } // namespace

    Precoder nsp_precoder(const CompositeChannel &ch, double rel_tol)
    {
        const auto s = svd(ch.h);
        const double cut = s.sigma.size() > 0 ? rel_tol * s.sigma(0) : 0.0;
        const ComplexMatrix basis = select_right_vectors(s, [cut](double sv) { return sv <= cut; });
        if (basis.cols() == 0)
            throw EmptyNullSpace("nsp_precoder: empty null space for cluster " + std::to_string(ch.cluster_index) +
                                 " (M_R = " + std::to_string(ch.h.cols()) +
                                 " does not exceed rank = " + std::to_string(ch.h.rows()) + ")");
        return projection_from_basis(basis, PrecoderKind::nsp, 0.0);
    }

    Precoder nsp_precoder(const CompositeChannel &ch)
    {
        return nsp_precoder(ch, default_rank_tol(ch.h.rows(), ch.h.cols()));
    }

    namespace
    {
        struct SmallSubspace
        {
            ComplexMatrix basis;
            double threshold = 0.0; // absolute
        };

        SmallSubspace small_subspace(const ComplexMatrix &h, SigmaThreshold sigma_th, double rel_tol)
        {
            if (!(sigma_th.value >= 0.0))
                throw std::invalid_argument("sigma_th must be >= 0");
            const auto s = svd(h);
            const double top = s.sigma.size() > 0 ? s.sigma(0) : 0.0;
            const double null_cut = rel_tol * top;
            const double th = sigma_th.resolve(top);
            return {select_right_vectors(s, [&](double sv) { return sv <= null_cut || sv < th; }), th};
        }
    } // namespace

    ComplexMatrix small_singular_basis(const ComplexMatrix &h, SigmaThreshold sigma_th, double rel_tol)
    {
        return small_subspace(h, sigma_th, rel_tol).basis;
    }

    Precoder ssvsp_precoder(const CompositeChannel &ch, SigmaThreshold sigma_th, double rel_tol)
    {
        const auto sub = small_subspace(ch.h, sigma_th, rel_tol);
        if (sub.basis.cols() == 0)
            throw EmptyNullSpace("ssvsp_precoder: empty projection subspace for cluster " +
                                 std::to_string(ch.cluster_index));
        return projection_from_basis(sub.basis, PrecoderKind::ssvsp, sub.threshold);
    }

    Precoder ssvsp_precoder(const CompositeChannel &ch, SigmaThreshold sigma_th)
    {
        return ssvsp_precoder(ch, sigma_th, default_rank_tol(ch.h.rows(), ch.h.cols()));
    }

    Precoder zf_precoder(const ComplexMatrix &h_comp, bool normalize)
    {
        if (h_comp.rows() > h_comp.cols())
            throw ZfInfeasible("zf_precoder: d_R = " + std::to_string(h_comp.rows()) + " exceeds M_R = " +
                               std::to_string(h_comp.cols()));
        const ComplexMatrix gram = h_comp * h_comp.adjoint();
        // rank test on the channel itself; the Gram matrix squares the condition number
        const auto s = svd(h_comp);
        if (numeric_rank(s, default_rank_tol(h_comp.rows(), h_comp.cols())) < h_comp.rows())
            throw ZfInfeasible("zf_precoder: channel is not full row rank");
        Eigen::LLT<ComplexMatrix> llt(gram);
        if (llt.info() != Eigen::Success)
            throw ZfInfeasible("zf_precoder: Gram matrix is not positive definite");

        Precoder out;
        out.kind = PrecoderKind::zf;
        out.p = llt.solve(h_comp).adjoint(); // (G^-1 H)* = H* G^-1
        if (normalize)
            normalize_total_power(out);
        return out;
    }

    Precoder mmse_precoder(const ComplexMatrix &h_comp, Index d_r, double sigma2, bool normalize)
    {
        if (d_r != h_comp.rows())
            throw DimensionError("mmse_precoder: d_r must equal the row count of the channel");
        if (!(sigma2 >= 0.0))
            throw std::invalid_argument("mmse_precoder: sigma2 must be >= 0");
        if (sigma2 == 0.0)
        {
            auto zf = zf_precoder(h_comp, normalize);
            zf.kind = PrecoderKind::mmse;
            return zf;
        }
        ComplexMatrix gram = h_comp * h_comp.adjoint();
        gram.diagonal().array() += double(d_r) * sigma2;
        Eigen::LLT<ComplexMatrix> llt(gram);
        if (llt.info() != Eigen::Success)
            throw NumericalError("mmse_precoder: regularized Gram matrix not positive definite");

        Precoder out;
        out.kind = PrecoderKind::mmse;
        out.p = llt.solve(h_comp).adjoint();
        if (normalize)
            normalize_total_power(out);
        return out;
    }

    ComplexMatrix coherence_matrix(const WaveformBlock &x)
    {
        if (x.l() < 1)
            throw DimensionError("coherence_matrix: empty waveform block");
        return (x.x * x.x.adjoint()) / double(x.l());
    }

    WaveformBlock orthogonal_waveform(Index m_r, Index l)
    {
        if (m_r < 1)
            throw std::invalid_argument("orthogonal_waveform: m_r must be >= 1");
        if (l < m_r)
            throw std::invalid_argument("orthogonal_waveform: l = " + std::to_string(l) + " < m_r = " +
                                        std::to_string(m_r));
        return {dft_rows(m_r, l)};
    }

    bool is_projection(const ComplexMatrix &p, double tol)
    {
        if (p.rows() != p.cols())
            return false;
        const double scale = std::max(1.0, p.norm());
        const bool herm = (p - p.adjoint()).norm() <= tol * scale;
        const bool idem = (p * p - p).norm() <= tol * scale;
        return herm && idem;
    }

} // namespace coex
