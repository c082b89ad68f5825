#ifndef COEX_MATOPS_HPP
#define COEX_MATOPS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "coex/errors.hpp"

namespace coex
{
    // Dense complex types, templated on the real scalar (float or double)
    template <typename Real>
    using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
    template <typename Real>
    using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
    template <typename Real>
    using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

    using ComplexMatrix = CMatrix<double>;
    using ComplexVector = CVector<double>;
    using RealVector = RVector<double>;
    using Index = Eigen::Index;

    // Full SVD A = U diag(sigma) V*, sigma sorted descending, min(rows, cols) entries
    template <typename Real>
    struct SvdResult
    {
        CMatrix<Real> u;     // rows x rows, unitary
        RVector<Real> sigma; // descending, non-negative
        CMatrix<Real> v;     // cols x cols, unitary
    };

    template <typename Derived>
    SvdResult<typename Eigen::NumTraits<typename Derived::Scalar>::Real> svd(const Eigen::MatrixBase<Derived> &a)
    {
        using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
        if (a.rows() < 1 || a.cols() < 1)
            throw DimensionError("svd: matrix must be nonempty");

        CMatrix<Real> m = a.template cast<std::complex<Real>>();
        Eigen::JacobiSVD<CMatrix<Real>, Eigen::ColPivHouseholderQRPreconditioner> solver(
            m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        if (solver.info() != Eigen::Success)
            throw NumericalError("svd: factorization failed (non-finite input or no convergence)");

        SvdResult<Real> out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
        if (!out.sigma.allFinite())
            throw NumericalError("svd: non-finite singular values");
        return out;
    }

    // Default relative tolerance for numeric rank: max(rows, cols) * eps
    template <typename Real = double>
    Real default_rank_tol(Index rows, Index cols)
    {
        return Real(std::max(rows, cols)) * std::numeric_limits<Real>::epsilon();
    }

    // Count of sigma_i > rel_tol * sigma_1 (0 when sigma_1 == 0)
    template <typename Real>
    Index numeric_rank(const SvdResult<Real> &s, Real rel_tol)
    {
        if (!(rel_tol > Real(0) && rel_tol < Real(1)))
            throw std::invalid_argument("numeric_rank: rel_tol must lie in (0, 1)");
        if (s.sigma.size() == 0 || s.sigma(0) <= Real(0))
            return 0;
        const Real cut = rel_tol * s.sigma(0);
        Index r = 0;
        while (r < s.sigma.size() && s.sigma(r) > cut)
            ++r;
        return r;
    }

    // splitmix64 finalizer, used to derive independent stream seeds
    constexpr std::uint64_t mix_seed(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags)
    {
        std::uint64_t h = mix_seed(seed);
        for (auto t : tags)
            h = mix_seed(h ^ mix_seed(t + 0x632be59bd9b4e019ULL));
        return h;
    }

    // i.i.d. circularly-symmetric CN(0, 1) entries, filled row by row so that
    // a taller draw under the same seed extends a shorter one
    template <typename Real = double>
    CMatrix<Real> random_complex_gaussian(Index rows, Index cols, std::uint64_t seed)
    {
        if (rows < 1 || cols < 1)
            throw DimensionError("random_complex_gaussian: rows and cols must be >= 1");
        std::mt19937_64 gen(seed);
        std::normal_distribution<Real> dist(Real(0), std::sqrt(Real(0.5)));
        CMatrix<Real> out(rows, cols);
        for (Index r = 0; r < rows; ++r)
            for (Index c = 0; c < cols; ++c)
            {
                const Real re = dist(gen);
                const Real im = dist(gen);
                out(r, c) = {re, im};
            }
        return out;
    }

    // First n rows of an l-point DFT matrix, unit-modulus entries, X X* = l I
    template <typename Real = double>
    CMatrix<Real> dft_rows(Index n, Index l)
    {
        CMatrix<Real> out(n, l);
        for (Index r = 0; r < n; ++r)
            for (Index c = 0; c < l; ++c)
            {
                // reduce the product modulo l before scaling to keep the phase exact
                const auto k = static_cast<long long>((r * c) % l);
                const Real phase = Real(-2) * std::numbers::pi_v<Real> * Real(k) / Real(l);
                out(r, c) = std::polar(Real(1), phase);
            }
        return out;
    }

    template <typename Derived>
    auto frobenius_norm(const Eigen::MatrixBase<Derived> &a)
    {
        return a.norm();
    }

    template <typename Derived>
    auto l2_norm(const Eigen::MatrixBase<Derived> &v)
    {
        if (v.cols() != 1 && v.rows() != 1)
            throw DimensionError("l2_norm: argument is not a vector");
        return v.norm();
    }

    template <typename Derived>
    auto hermitian(const Eigen::MatrixBase<Derived> &a)
    {
        return a.adjoint().eval();
    }

    // Dimension-checked product
    template <typename A, typename B>
    auto matmul(const Eigen::MatrixBase<A> &a, const Eigen::MatrixBase<B> &b)
    {
        if (a.cols() != b.rows())
            throw DimensionError("matmul: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                                 std::to_string(b.rows()) + ")");
        return (a * b).eval();
    }

    // Orthonormal basis of the right singular vectors selected by a predicate on
    // the singular value. Columns past min(rows, cols) carry an implicit zero.
    template <typename Real, typename Pred>
    CMatrix<Real> select_right_vectors(const SvdResult<Real> &s, Pred keep)
    {
        const Index n = s.v.cols();
        std::vector<Index> picked;
        for (Index i = 0; i < n; ++i)
        {
            const Real sv = i < s.sigma.size() ? s.sigma(i) : Real(0);
            if (keep(sv))
                picked.push_back(i);
        }
        CMatrix<Real> basis(s.v.rows(), static_cast<Index>(picked.size()));
        for (Index k = 0; k < basis.cols(); ++k)
            basis.col(k) = s.v.col(picked[static_cast<std::size_t>(k)]);
        return basis;
    }

} // namespace coex

#endif // COEX_MATOPS_HPP
