#ifndef COEX_PRECODERS_HPP
#define COEX_PRECODERS_HPP

#include <string>

#include "coex/scenario.hpp"

namespace coex
{
    enum class PrecoderKind
    {
        nsp,
        ssvsp,
        zf,
        mmse
    };

    const char *to_string(PrecoderKind kind);

    struct Precoder
    {
        ComplexMatrix p;
        PrecoderKind kind = PrecoderKind::nsp;
        Index subspace_rank = 0;      // projections only
        double sigma_threshold = 0.0; // absolute, ssvsp only
        bool power_normalized = false;
    };

    // sigma_th either absolute or as a fraction of the largest singular value
    struct SigmaThreshold
    {
        enum class Mode
        {
            relative,
            absolute
        };
        double value = 0.0;
        Mode mode = Mode::relative;

        static SigmaThreshold relative(double v) { return {v, Mode::relative}; }
        static SigmaThreshold absolute(double v) { return {v, Mode::absolute}; }
        double resolve(double sigma_max) const { return mode == Mode::relative ? value * sigma_max : value; }
    };

    struct WaveformBlock
    {
        ComplexMatrix x; // M_R x L
        Index l() const { return x.cols(); }
    };

    // Projection onto the numeric null space of H (sigma_i <= rel_tol * sigma_1).
    // Throws EmptyNullSpace when the null space is trivial.
    Precoder nsp_precoder(const CompositeChannel &ch, double rel_tol);
    Precoder nsp_precoder(const CompositeChannel &ch);

    // Basis of the null space together with right singular vectors whose
    // singular value lies strictly below the threshold; may have zero columns
    ComplexMatrix small_singular_basis(const ComplexMatrix &h, SigmaThreshold sigma_th, double rel_tol);

    // Throws EmptyNullSpace when the selected subspace is empty
    Precoder ssvsp_precoder(const CompositeChannel &ch, SigmaThreshold sigma_th, double rel_tol);
    Precoder ssvsp_precoder(const CompositeChannel &ch, SigmaThreshold sigma_th);

    // P = H* (H H*)^-1, H has d_R rows. Throws ZfInfeasible on a singular Gram matrix.
    Precoder zf_precoder(const ComplexMatrix &h_comp, bool normalize = false);

    // P = H* (H H* + d_R sigma2 I)^-1
    Precoder mmse_precoder(const ComplexMatrix &h_comp, Index d_r, double sigma2, bool normalize = false);

    // R_x = (1/L) X X*
    ComplexMatrix coherence_matrix(const WaveformBlock &x);

    // First m_r rows of an l-point DFT; (1/L) X X* = I
    WaveformBlock orthogonal_waveform(Index m_r, Index l);

    // Algebraic checks shared by tests and debug asserts
    bool is_projection(const ComplexMatrix &p, double tol = 1e-9);

} // namespace coex

#endif // COEX_PRECODERS_HPP
