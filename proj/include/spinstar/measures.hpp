#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "errors.hpp"
#include "linalg.hpp"

namespace spinstar {

/// Eigenvalues with |lambda| below this are exact zeros (0 log 0 := 0).
inline constexpr double kZeroEigenvalue = 1e-12;
/// Negative eigenvalues down to this are rounding noise; below it the input is rejected.
inline constexpr double kNegativeEigenvalueTolerance = 1e-8;
inline constexpr double kTraceTolerance = 1e-8;

/// sqrt(QJSD) between a Bell state and the product of its marginals.
inline const double kQjsdNormalization = std::sqrt(2.0 - 0.625 * std::log2(5.0));
/// Mutual information of a Bell state.
inline constexpr double kMutualInformationNormalization = 2.0;

/// Contribution -lambda log2 lambda after clipping; rejects genuinely negative values.
inline double entropy_term(double lambda) {
    if (lambda < -kNegativeEigenvalueTolerance)
        throw ContractError("eigenvalue " + std::to_string(lambda) + " is negative beyond tolerance");
    if (lambda < kZeroEigenvalue) return 0.0;
    lambda = std::min(lambda, 1.0);
    return -lambda * std::log2(lambda);
}

inline double entropy_of_eigenvalues(std::span<const double> eigenvalues) {
    double s = 0.0;
    for (double l : eigenvalues) s += entropy_term(l);
    return s;
}

inline void validate_density_matrix(const ComplexMatrix& rho, const Spectrum& spectrum, const char* who) {
    const Complex tr = rho.trace();
    if (std::abs(tr - Complex(1.0)) > kTraceTolerance)
        throw ContractError(std::string(who) + ": trace " + std::to_string(tr.real()) + " differs from 1");
    if (spectrum.min() < -kNegativeEigenvalueTolerance)
        throw ContractError(std::string(who) + ": not positive semidefinite (min eigenvalue " +
                            std::to_string(spectrum.min()) + ")");
}

/// Validated spectrum of a density matrix.
inline Spectrum density_spectrum(const ComplexMatrix& rho, const char* who) {
    Spectrum s = hermitian_eigenvalues(rho);
    validate_density_matrix(rho, s, who);
    return s;
}

/// Von Neumann entropy in bits.
inline double von_neumann_entropy(const ComplexMatrix& rho) {
    const Spectrum s = density_spectrum(rho, "von_neumann_entropy");
    const double bound = std::log2(static_cast<double>(rho.dim()));
    return std::clamp(entropy_of_eigenvalues(s.eigenvalues), 0.0, bound);
}

/// Entropy rounding error grows with the number of eigenvalues summed; a
/// divergence below this cannot be told apart from zero.
inline double jsd_resolution(std::size_t dim) {
    return 64.0 * static_cast<double>(dim) * std::numeric_limits<double>::epsilon();
}

/// sqrt of S(mix) - S(a)/2 - S(b)/2, with rounding residue below the resolution mapped to 0.
inline double sqrt_jsd_from_entropies(double s_mix, double s_a, double s_b, std::size_t dim) {
    const double j = s_mix - 0.5 * s_a - 0.5 * s_b;
    if (j <= jsd_resolution(dim)) return 0.0;
    return std::sqrt(std::min(j, 1.0));
}

inline void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* who) {
    if (a.dim() != b.dim())
        throw ContractError(std::string(who) + ": dimension mismatch " + std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
}

/// Square root of the quantum Jensen-Shannon divergence (a metric, values in [0, 1]).
inline double qjsd_sqrt(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
    require_same_dim(rho, sigma, "qjsd_sqrt");
    const double s_rho = entropy_of_eigenvalues(density_spectrum(rho, "qjsd_sqrt").eigenvalues);
    const double s_sigma = entropy_of_eigenvalues(density_spectrum(sigma, "qjsd_sqrt").eigenvalues);
    const ComplexMatrix mix = 0.5 * (rho + sigma);
    const double s_mix = entropy_of_eigenvalues(hermitian_eigenvalues(mix).eigenvalues);
    return sqrt_jsd_from_entropies(s_mix, s_rho, s_sigma, rho.dim());
}

/// Tr rho log2 rho - Tr rho log2 sigma; +infinity when supp(rho) is not inside supp(sigma).
inline double relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
    require_same_dim(rho, sigma, "relative_entropy");
    const Spectrum rho_spec = density_spectrum(rho, "relative_entropy");
    const EigenSystem sig = hermitian_eigensystem(sigma);
    validate_density_matrix(sigma, sig.spectrum, "relative_entropy");

    double cross = 0.0; // Tr rho log2 sigma
    const Eigen::MatrixXcd& v = sig.vectors;
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        const double weight = (v.col(k).adjoint() * rho.eigen() * v.col(k))(0, 0).real();
        const double lambda = sig.spectrum.eigenvalues[static_cast<std::size_t>(k)];
        if (lambda < kZeroEigenvalue) {
            if (weight > kZeroEigenvalue) return std::numeric_limits<double>::infinity();
            continue;
        }
        cross += weight * std::log2(lambda);
    }
    const double value = -entropy_of_eigenvalues(rho_spec.eigenvalues) - cross;
    return std::max(value, 0.0);
}

namespace detail {

inline void check_bipartite(const ComplexMatrix& rho_ab, std::size_t dim_a, std::size_t dim_b, const char* who) {
    if (dim_a == 0 || dim_b == 0 || dim_a * dim_b != rho_ab.dim())
        throw ContractError(std::string(who) + ": " + std::to_string(dim_a) + " x " + std::to_string(dim_b) +
                            " does not factor dimension " + std::to_string(rho_ab.dim()));
}

struct Marginals {
    ComplexMatrix a, b;
};

inline Marginals marginals(const ComplexMatrix& rho_ab, std::size_t dim_a, std::size_t dim_b) {
    const std::size_t dims[] = {dim_a, dim_b};
    return {partial_trace(rho_ab, dims, {0}), partial_trace(rho_ab, dims, {1})};
}

} // namespace detail

inline double mutual_information(const ComplexMatrix& rho_ab, std::size_t dim_a, std::size_t dim_b) {
    detail::check_bipartite(rho_ab, dim_a, dim_b, "mutual_information");
    const auto [a, b] = detail::marginals(rho_ab, dim_a, dim_b);
    const double value = von_neumann_entropy(a) + von_neumann_entropy(b) - von_neumann_entropy(rho_ab);
    return std::max(value, 0.0);
}

enum class Quantifier { qjsd_sqrt, mutual_information };

inline const char* to_string(Quantifier q) {
    return q == Quantifier::qjsd_sqrt ? "qjsd_sqrt" : "mutual_information";
}

inline double normalization_constant(Quantifier q) {
    return q == Quantifier::qjsd_sqrt ? kQjsdNormalization : kMutualInformationNormalization;
}

/// A correlation quantifier value together with its maximally-entangled rescaling.
struct CorrelationValue {
    double raw = 0.0;
    double rescaled = 0.0;
    Quantifier quantifier = Quantifier::qjsd_sqrt;
    double normalization_constant = kQjsdNormalization;

    static CorrelationValue from_raw(double raw, Quantifier q) {
        const double k = spinstar::normalization_constant(q);
        return {raw, raw / k, q, k};
    }
};

/// D(rho_AB, rho_A (x) rho_B) for the chosen distinguishability quantifier.
inline CorrelationValue correlation(const ComplexMatrix& rho_ab, std::size_t dim_a, std::size_t dim_b, Quantifier q) {
    detail::check_bipartite(rho_ab, dim_a, dim_b, "correlation");
    if (q == Quantifier::mutual_information)
        return CorrelationValue::from_raw(mutual_information(rho_ab, dim_a, dim_b), q);
    const auto [a, b] = detail::marginals(rho_ab, dim_a, dim_b);
    return CorrelationValue::from_raw(qjsd_sqrt(rho_ab, kron(a, b)), q);
}

} // namespace spinstar
