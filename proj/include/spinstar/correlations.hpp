#pragma once

// Correlation and environment-distinguishability quantities evaluated on
// fraction marginals of a TensorBlockState. Two routes compute the same
// numbers: `dense` materializes the marginal and diagonalizes it, `symmetric`
// uses the permutation symmetry of identical kept units (symmetric.hpp) and
// never forms a matrix larger than 2(m+1).

#include <array>
#include <vector>

#include "errors.hpp"
#include "measures.hpp"
#include "model.hpp"
#include "symmetric.hpp"

namespace spinstar {

enum class Route { automatic, dense, symmetric };

/// True when all kept units carry identical factors (uniform kept couplings).
inline bool symmetric_route_applies(const TensorBlockState& st, int kept) {
    for (const auto& row : st.unit_factors)
        for (const auto& seq : row)
            for (int k = 1; k < kept; ++k)
                if (seq[static_cast<std::size_t>(k)] != seq[0]) return false;
    return true;
}

namespace detail {

inline Route resolve(Route r, const TensorBlockState& st, int kept) {
    if (r == Route::automatic) return symmetric_route_applies(st, kept) ? Route::symmetric : Route::dense;
    if (r == Route::symmetric && !symmetric_route_applies(st, kept))
        throw ContractError("symmetric route requires identical factors on the kept units");
    return r;
}

inline const Mat2& unit_or_identity(const std::vector<Mat2>& seq, int kept) {
    static const Mat2 id = Mat2::Identity();
    return kept > 0 ? seq[0] : id;
}

inline Eigen::MatrixXcd scalar(Complex z) { return Eigen::MatrixXcd::Constant(1, 1, z); }

/// Terms of the system + first-m-units marginal.
inline std::vector<SymmetricTerm> joint_terms(const TensorBlockState& st, int kept) {
    std::vector<SymmetricTerm> terms;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const auto& seq = st.unit_factors[i][j];
            Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(2, 2);
            k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = st.weights[i][j] * traced_scalar(seq, kept);
            terms.push_back({std::move(k), unit_or_identity(seq, kept)});
        }
    return terms;
}

/// Terms of (sys (x) environment marginal) with `sys` an arbitrary d x d factor.
inline std::vector<SymmetricTerm> env_terms(const TensorBlockState& st, int kept, const Eigen::MatrixXcd& sys) {
    std::vector<SymmetricTerm> terms;
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& seq = st.unit_factors[i][i];
        terms.push_back({sys * (st.weights[i][i] * traced_scalar(seq, kept)), unit_or_identity(seq, kept)});
    }
    return terms;
}

inline std::vector<SymmetricTerm> scaled(std::vector<SymmetricTerm> terms, double f) {
    for (auto& t : terms) t.sys *= f;
    return terms;
}

/// Entropies needed by both correlation quantifiers.
struct CorrelationEntropies {
    double joint = 0, system = 0, environment = 0, mixture = 0;
    std::size_t dim = 1;
};

inline CorrelationEntropies symmetric_entropies(const TensorBlockState& st, int kept, bool need_mixture) {
    CorrelationEntropies e;
    e.dim = std::size_t{2} << kept;
    const auto joint = joint_terms(st, kept);
    e.joint = symmetric_spectrum(joint, kept).entropy();

    const Eigen::MatrixXcd rho_s = reduce_to_system(st);
    e.system = entropy_of_eigenvalues(hermitian_eigenvalues(ComplexMatrix(rho_s)).eigenvalues);
    e.environment = symmetric_spectrum(env_terms(st, kept, scalar(1.0)), kept).entropy();

    if (need_mixture) {
        auto mix = scaled(joint, 0.5);
        const auto product = scaled(env_terms(st, kept, rho_s), 0.5);
        mix.insert(mix.end(), product.begin(), product.end());
        e.mixture = symmetric_spectrum(mix, kept).entropy();
    }
    return e;
}

} // namespace detail

/// D(rho_{S E_m}, rho_S (x) rho_{E_m}) on the first `frac.kept_units` environment units.
inline CorrelationValue sys_env_correlation(const TensorBlockState& st, const Fraction& frac, Quantifier q,
                                            Route route = Route::automatic) {
    detail::check_fraction(st, frac);
    const int m = frac.kept_units;
    if (detail::resolve(route, st, m) == Route::dense)
        return correlation(marginal_sys_env(st, frac), 2, std::size_t{1} << m, q);

    const auto e = detail::symmetric_entropies(st, m, q == Quantifier::qjsd_sqrt);
    if (q == Quantifier::mutual_information)
        return CorrelationValue::from_raw(std::max(0.0, e.system + e.environment - e.joint), q);
    return CorrelationValue::from_raw(sqrt_jsd_from_entropies(e.mixture, e.joint, e.system + e.environment, e.dim), q);
}

/// Raw sqrt(QJSD) between the environment marginals of two evolutions of the same model.
inline double env_distance(const TensorBlockState& a, const TensorBlockState& b, const Fraction& frac,
                           Route route = Route::automatic) {
    detail::check_fraction(a, frac);
    detail::check_fraction(b, frac);
    const int m = frac.kept_units;
    if (a.unit_factors != b.unit_factors) throw ContractError("env_distance: states come from different evolutions");
    if (detail::resolve(route, a, m) == Route::dense) return qjsd_sqrt(marginal_env(a, frac), marginal_env(b, frac));

    const auto one = detail::scalar(1.0);
    const auto ta = detail::env_terms(a, m, one);
    const auto tb = detail::env_terms(b, m, one);
    auto mix = detail::scaled(ta, 0.5);
    const auto half_b = detail::scaled(tb, 0.5);
    mix.insert(mix.end(), half_b.begin(), half_b.end());
    return sqrt_jsd_from_entropies(symmetric_spectrum(mix, m).entropy(), symmetric_spectrum(ta, m).entropy(),
                                   symmetric_spectrum(tb, m).entropy(), std::size_t{1} << m);
}

} // namespace spinstar
