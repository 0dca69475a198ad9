#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "correlations.hpp"
#include "errors.hpp"
#include "measures.hpp"
#include "model.hpp"

namespace spinstar {

/// lhs > rhs_sum + this counts as a violated bound.
inline constexpr double kViolationTolerance = 1e-9;
/// Maximum deviation for a fraction profile to count as an exact plateau.
inline constexpr double kPlateauTolerance = 1e-6;

/// Pair of initial system states: the plus state and |theta>.
struct PairSpec {
    SystemInit first = SystemInit::plus();
    SystemInit second = SystemInit::minus();
    double theta = std::numbers::pi / 2;

    static PairSpec from_theta(double theta) { return {SystemInit::plus(), SystemInit::from_theta(theta), theta}; }
};

struct BoundTerms {
    double lhs = 0;       ///< revival of the system distinguishability between s and t
    double env_dist = 0;  ///< environment distinguishability at s
    double corr1 = 0;     ///< system-environment correlations at s, first evolution
    double corr2 = 0;     ///< same for the second evolution
    double rhs_sum = 0;
    Fraction fraction;
    double s = 0, t = 0;
    bool violated = false;
};

/// Rescaled sqrt(QJSD) revival of the two evolved system states from time s to time t.
/// Depends only on the reduced dynamics, hence not on c.
inline double revival_lhs(const ModelParams& params, const PairSpec& pair, double s, double t) {
    if (!(s >= 0.0 && s <= t)) throw ContractError("revival_lhs: requires 0 <= s <= t");
    auto distance = [&](double time) {
        return qjsd_sqrt(reduced_system(params, pair.first, time), reduced_system(params, pair.second, time));
    };
    if (s == t) return 0.0;
    return (distance(t) - distance(s)) / kQjsdNormalization;
}

/// Both sides of the backflow bound, with the environment restricted to `frac`.
/// All terms share the Bell-state rescaling.
inline BoundTerms bound_terms(const ModelParams& params, const PairSpec& pair, double s, double t, const Fraction& frac,
                              Route route = Route::automatic) {
    if (!(s >= 0.0 && s <= t)) throw ContractError("bound_terms: requires 0 <= s <= t");
    if (frac.total_units != params.n_units) throw ContractError("bound_terms: fraction does not match model size");
    const TensorBlockState one = build_joint_state(params, pair.first, s);
    const TensorBlockState two = build_joint_state(params, pair.second, s);

    BoundTerms b;
    b.fraction = frac;
    b.s = s;
    b.t = t;
    b.lhs = revival_lhs(params, pair, s, t);
    b.env_dist = env_distance(one, two, frac, route) / kQjsdNormalization;
    b.corr1 = sys_env_correlation(one, frac, Quantifier::qjsd_sqrt, route).rescaled;
    b.corr2 = sys_env_correlation(two, frac, Quantifier::qjsd_sqrt, route).rescaled;
    b.rhs_sum = b.env_dist + b.corr1 + b.corr2;
    b.violated = b.lhs > b.rhs_sum + kViolationTolerance;
    return b;
}

struct PlateauReport {
    double max_abs_deviation = 0;
    bool is_plateau = false;
};

/// Flatness of a profile sampled on interior fractions (0 < m < N), measured
/// against the value at the middle fraction.
inline PlateauReport plateau_flatness(std::span<const std::pair<Fraction, double>> values) {
    std::vector<std::pair<Fraction, double>> sorted(values.begin(), values.end());
    for (const auto& [f, v] : sorted) {
        f.validate();
        if (f.kept_units <= 0 || f.kept_units >= f.total_units)
            throw ContractError("plateau_flatness: fraction " + std::to_string(f.kept_units) + "/" +
                                std::to_string(f.total_units) + " is not interior");
    }
    if (sorted.size() < 2) throw ContractError("plateau_flatness: needs at least two interior points");
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first.kept_units < b.first.kept_units; });

    const double mid = sorted[sorted.size() / 2].second;
    PlateauReport r;
    for (const auto& [f, v] : sorted) r.max_abs_deviation = std::max(r.max_abs_deviation, std::abs(v - mid));
    r.is_plateau = r.max_abs_deviation <= kPlateauTolerance;
    return r;
}

} // namespace spinstar
