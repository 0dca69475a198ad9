#pragma once

// Spectra of operators on C^d (x) (C^2)^{(x)m} that are sums of terms
//     K_t (x) alpha_t^{(x)m},
// i.e. invariant under permutations of the m identical units. By Schur-Weyl
// duality (C^2)^{(x)m} = sum_q V_q (x) S_q with V_q the GL(2) irrep of highest
// weight (m-q, q), which acts as det^q (x) Sym^{m-2q}. Each operator of the
// form above is then block diagonal: one block of size d(m-2q+1) per q,
// repeated dim S_q = C(m,q) - C(m,q-1) times.

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "measures.hpp"

namespace spinstar {

struct SymmetricTerm {
    Eigen::MatrixXcd sys; ///< d x d factor on the non-symmetric part (d = 1 for none)
    Mat2 unit;            ///< single-unit factor, raised to the m-th tensor power
};

/// Eigenvalues paired with their multiplicities.
struct WeightedSpectrum {
    std::vector<std::pair<double, std::size_t>> levels;

    std::size_t dim() const {
        std::size_t d = 0;
        for (const auto& [v, k] : levels) d += k;
        return d;
    }

    Spectrum expand() const {
        Spectrum s;
        for (const auto& [v, k] : levels) s.eigenvalues.insert(s.eigenvalues.end(), k, v);
        s.source_dim = s.eigenvalues.size();
        sort_descending(s.eigenvalues);
        return s;
    }

    double entropy() const {
        double s = 0.0;
        for (const auto& [v, k] : levels) s += static_cast<double>(k) * entropy_term(v);
        return s;
    }
};

namespace detail {

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline Complex ipow(Complex z, int n) {
    Complex r = 1.0;
    for (int i = 0; i < n; ++i) r *= z;
    return r;
}

} // namespace detail

/// Matrix of alpha^{(x)k} restricted to the symmetric subspace, in the
/// orthonormal Dicke basis |D_a> (a = number of units in basis state 0).
/// In this basis Sym(alpha^dagger) = Sym(alpha)^dagger.
inline Eigen::MatrixXcd symmetric_power(const Mat2& alpha, int k) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(k + 1, k + 1);
    for (int a = 0; a <= k; ++a)
        for (int b = 0; b <= k; ++b) {
            // coefficient of x^a y^(k-a) in (a00 x + a10 y)^b (a01 x + a11 y)^(k-b)
            Complex t = 0.0;
            for (int r = std::max(0, a - (k - b)); r <= std::min(a, b); ++r)
                t += detail::binomial(b, r) * detail::binomial(k - b, a - r) * detail::ipow(alpha(0, 0), r) *
                     detail::ipow(alpha(1, 0), b - r) * detail::ipow(alpha(0, 1), a - r) *
                     detail::ipow(alpha(1, 1), k - b - a + r);
            out(a, b) = std::sqrt(detail::binomial(k, b) / detail::binomial(k, a)) * t;
        }
    return out;
}

/// Spectrum of sum_t K_t (x) alpha_t^{(x)m}; the sum must be Hermitian.
inline WeightedSpectrum symmetric_spectrum(std::span<const SymmetricTerm> terms, int m) {
    if (terms.empty()) throw ContractError("symmetric_spectrum: no terms");
    if (m < 0) throw ContractError("symmetric_spectrum: negative unit count");
    const Eigen::Index d = terms.front().sys.rows();
    for (const auto& t : terms)
        if (t.sys.rows() != d || t.sys.cols() != d) throw ContractError("symmetric_spectrum: inconsistent factor sizes");

    WeightedSpectrum out;
    for (int q = 0; 2 * q <= m; ++q) {
        const int k = m - 2 * q;
        const auto copies = static_cast<std::size_t>(detail::binomial(m, q) - detail::binomial(m, q - 1));
        const Eigen::Index irrep = k + 1;
        Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(d * irrep, d * irrep);
        for (const auto& t : terms) {
            const Eigen::MatrixXcd rep = detail::ipow(t.unit.determinant(), q) * symmetric_power(t.unit, k);
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = 0; j < d; ++j)
                    if (t.sys(i, j) != Complex{}) block.block(i * irrep, j * irrep, irrep, irrep) += t.sys(i, j) * rep;
        }
        const Spectrum s = hermitian_eigenvalues(ComplexMatrix(std::move(block)));
        for (double v : s.eigenvalues) out.levels.emplace_back(v, copies);
    }
    return out;
}

} // namespace spinstar
