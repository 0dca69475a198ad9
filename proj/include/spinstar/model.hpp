#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace spinstar {

// Basis convention for every 2x2 object in this library: index 0 is the
// sigma_z = +1 level (written |1> for the system), index 1 is sigma_z = -1.

/// Full dense materialization is supported up to this many environment units.
inline constexpr int kMaxDenseUnits = 12;

/// One member of the dephasing model class. Dynamics is in the interaction
/// picture, so omega_s / omega_e are carried along but never enter a result.
struct ModelParams {
    int n_units = 8;
    std::vector<double> couplings = std::vector<double>(8, 1.0);
    double p = 0.5;
    double c = 0.0;
    double omega_s = 0.0;
    double omega_e = 0.0;

    static ModelParams uniform(int n_units, double p, double c, double g = 1.0) {
        if (n_units < 1) throw ContractError("ModelParams: n_units must be positive");
        ModelParams m;
        m.n_units = n_units;
        m.couplings.assign(static_cast<std::size_t>(n_units), g);
        m.p = p;
        m.c = c;
        m.validate();
        return m;
    }

    /// Largest admissible |c| for the unit state to be positive.
    static double max_coherence(double p) { return std::sqrt(std::max(0.0, p * (1.0 - p))); }

    void validate() const {
        if (n_units < 1) throw ContractError("ModelParams: n_units must be positive");
        if (couplings.size() != static_cast<std::size_t>(n_units))
            throw ContractError("ModelParams: expected " + std::to_string(n_units) + " couplings, got " +
                                std::to_string(couplings.size()));
        if (!(p >= 0.0 && p <= 1.0)) throw ContractError("ModelParams: p must lie in [0, 1]");
        if (!(std::abs(c) <= max_coherence(p) + 1e-12))
            throw ContractError("ModelParams: |c| = " + std::to_string(std::abs(c)) + " exceeds sqrt(p(1-p)) = " +
                                std::to_string(max_coherence(p)));
    }

    bool uniform_couplings(int first_units) const {
        for (int k = 1; k < first_units; ++k)
            if (couplings[static_cast<std::size_t>(k)] != couplings[0]) return false;
        return true;
    }

    /// Initial state of a single environment unit.
    Mat2 unit_state() const {
        Mat2 m;
        m << p, c, c, 1.0 - p;
        return m;
    }
};

/// Initial qubit state of the system.
struct SystemInit {
    double rho11 = 0.5;
    Complex rho10 = 0.5;

    double rho00() const { return 1.0 - rho11; }
    Complex rho01() const { return std::conj(rho10); }

    /// |theta> = cos(theta/2)|1> - sin(theta/2)|0>.
    static SystemInit from_theta(double theta) {
        const double cs = std::cos(theta / 2), sn = std::sin(theta / 2);
        return SystemInit{cs * cs, Complex(-cs * sn, 0.0)};
    }
    static SystemInit plus() { return SystemInit{0.5, 0.5}; }
    static SystemInit minus() { return SystemInit{0.5, -0.5}; }

    void validate() const {
        if (!(rho11 >= 0.0 && rho11 <= 1.0)) throw ContractError("SystemInit: rho11 must lie in [0, 1]");
        if (std::abs(rho10) > std::sqrt(rho11 * rho00()) + 1e-12)
            throw ContractError("SystemInit: |rho10| exceeds sqrt(rho11 rho00), state is not positive");
    }

    ComplexMatrix matrix() const { return ComplexMatrix{{rho11, rho10}, {rho01(), rho00()}}; }
};

/// Environment fraction: the first `kept_units` of `total_units` environment units.
struct Fraction {
    int kept_units = 0;
    int total_units = 0;

    static Fraction whole(int n) { return {n, n}; }
    double value() const { return total_units == 0 ? 0.0 : static_cast<double>(kept_units) / total_units; }

    void validate() const {
        if (total_units < 0 || kept_units < 0 || kept_units > total_units)
            throw ContractError("Fraction: kept units " + std::to_string(kept_units) + " outside [0, " +
                                std::to_string(total_units) + "]");
    }
};

/// Joint state in block form: block (i, j) = weights[i][j] * kron_k unit_factors[i][j][k].
struct TensorBlockState {
    std::array<std::array<Complex, 2>, 2> weights{};
    std::array<std::array<std::vector<Mat2>, 2>, 2> unit_factors;

    int n_units() const { return static_cast<int>(unit_factors[0][0].size()); }
};

inline Mat2 evolved_unit_state(double p, double c, double phase) {
    const Complex e = std::polar(1.0, -phase); // e^{-i 2 g s}
    Mat2 m;
    m << p, c * e, c * std::conj(e), 1.0 - p;
    return m;
}

inline Mat2 evolved_unit_coherence(double p, double c, double phase) {
    const Complex e = std::polar(1.0, -phase);
    Mat2 m;
    m << p * e, c, c, (1.0 - p) * std::conj(e);
    return m;
}

inline TensorBlockState build_joint_state(const ModelParams& params, const SystemInit& sys, double s) {
    params.validate();
    sys.validate();
    if (!(s >= 0.0)) throw ContractError("build_joint_state: time must be non-negative");

    TensorBlockState st;
    st.weights = {{{sys.rho11, sys.rho10}, {sys.rho01(), sys.rho00()}}};
    for (auto& row : st.unit_factors)
        for (auto& seq : row) seq.reserve(params.couplings.size());
    for (double g : params.couplings) {
        const double phase = 2.0 * g * s;
        const Mat2 rho = evolved_unit_state(params.p, params.c, phase);
        const Mat2 sigma = evolved_unit_coherence(params.p, params.c, phase);
        st.unit_factors[0][0].push_back(rho);
        st.unit_factors[0][1].push_back(sigma);
        st.unit_factors[1][0].push_back(sigma.conjugate());
        st.unit_factors[1][1].push_back(rho.conjugate());
    }
    return st;
}

namespace detail {

/// kron over the first `count` factors, unit 0 most significant.
inline Eigen::MatrixXcd kron_units(const std::vector<Mat2>& factors, int count) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(1, 1);
    for (int k = 0; k < count; ++k) {
        const Mat2& f = factors[static_cast<std::size_t>(k)];
        const Eigen::Index d = acc.rows();
        Eigen::MatrixXcd next(2 * d, 2 * d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) next.block<2, 2>(2 * i, 2 * j) = acc(i, j) * f;
        acc = std::move(next);
    }
    return acc;
}

inline Complex traced_scalar(const std::vector<Mat2>& factors, int from) {
    Complex t = 1.0;
    for (std::size_t k = static_cast<std::size_t>(from); k < factors.size(); ++k) t *= factors[k].trace();
    return t;
}

/// System marginal straight from the block weights.
inline Mat2 reduce_to_system(const TensorBlockState& st) {
    Mat2 out;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = st.weights[i][j] * traced_scalar(st.unit_factors[i][j], 0);
    return out;
}

inline void check_fraction(const TensorBlockState& st, const Fraction& frac) {
    frac.validate();
    if (frac.total_units != st.n_units())
        throw ContractError("fraction refers to " + std::to_string(frac.total_units) + " units, state has " +
                            std::to_string(st.n_units()));
}

} // namespace detail

/// Marginal on the system plus the first m environment units, built from the block structure.
/// Each traced unit contributes the trace of its 2x2 factor.
inline ComplexMatrix marginal_sys_env(const TensorBlockState& st, const Fraction& frac) {
    detail::check_fraction(st, frac);
    const int m = frac.kept_units;
    if ((std::size_t{2} << m) > kMaxDenseDim) throw SizeError("marginal_sys_env: too many kept units");
    const Eigen::Index block = Eigen::Index{1} << m;
    Eigen::MatrixXcd out(2 * block, 2 * block);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const auto& f = st.unit_factors[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            const Complex w = st.weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * detail::traced_scalar(f, m);
            out.block(i * block, j * block, block, block) = w * detail::kron_units(f, m);
        }
    return ComplexMatrix(std::move(out));
}

inline ComplexMatrix materialize(const TensorBlockState& st) {
    if (st.n_units() > kMaxDenseUnits)
        throw SizeError("materialize: " + std::to_string(st.n_units()) + " units exceeds dense cap of " +
                        std::to_string(kMaxDenseUnits));
    return marginal_sys_env(st, Fraction::whole(st.n_units()));
}

/// Environment-only marginal on the first m units (system traced out).
inline ComplexMatrix marginal_env(const TensorBlockState& st, const Fraction& frac) {
    detail::check_fraction(st, frac);
    const int m = frac.kept_units;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(Eigen::Index{1} << m, Eigen::Index{1} << m);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& f = st.unit_factors[i][i];
        out += st.weights[i][i] * detail::traced_scalar(f, m) * detail::kron_units(f, m);
    }
    return ComplexMatrix(std::move(out));
}

inline Complex dephasing_function(const ModelParams& params, double s) {
    Complex chi = 1.0;
    const double bias = 2.0 * params.p - 1.0;
    for (double g : params.couplings) chi *= Complex(std::cos(2.0 * g * s), -bias * std::sin(2.0 * g * s));
    return chi;
}

inline ComplexMatrix reduced_system(const ModelParams& params, const SystemInit& sys, double s) {
    params.validate();
    sys.validate();
    const Complex off = sys.rho10 * dephasing_function(params, s);
    return ComplexMatrix{{sys.rho11, off}, {std::conj(off), sys.rho00()}};
}

/// Closed-form spectra for the maximally mixed (c = 0, p = 1/2) uniform model
/// with the system starting in the plus state.
struct C0Spectra {
    Spectrum joint;       ///< system + first m units
    Spectrum system;
    Spectrum environment; ///< first m units
    Spectrum average;     ///< (joint + system (x) environment) / 2
};

inline C0Spectra c0_eigenvalues(const ModelParams& params, const SystemInit& sys, const Fraction& frac, double s) {
    params.validate();
    frac.validate();
    if (params.c != 0.0) throw ContractError("c0_eigenvalues: requires c = 0");
    if (params.p != 0.5) throw ContractError("c0_eigenvalues: requires p = 1/2");
    if (!params.uniform_couplings(params.n_units)) throw ContractError("c0_eigenvalues: requires uniform couplings");
    if (sys.rho11 != 0.5 || sys.rho10 != Complex(0.5, 0.0))
        throw ContractError("c0_eigenvalues: requires the plus state");
    if (frac.total_units != params.n_units) throw ContractError("c0_eigenvalues: fraction does not match model size");

    const int n = params.n_units, m = frac.kept_units;
    const double gs = params.couplings[0] * s;
    const double cos2 = std::cos(2.0 * gs);
    const double cos_all = std::pow(cos2, n);
    const double cos_traced = std::pow(cos2, n - m);
    const double env_level = std::ldexp(1.0, -m);
    const double joint_level = std::ldexp(1.0, -(m + 1));
    const std::size_t copies = std::size_t{1} << m;

    C0Spectra out;
    out.joint.source_dim = out.average.source_dim = 2 * copies;
    out.system.source_dim = 2;
    out.environment.source_dim = copies;

    out.system.eigenvalues = {0.5 * (1 + cos_all), 0.5 * (1 - cos_all)};
    out.environment.eigenvalues.assign(copies, env_level);
    for (std::size_t k = 0; k < copies; ++k) {
        out.joint.eigenvalues.push_back(joint_level * (1 + cos_traced));
        out.joint.eigenvalues.push_back(joint_level * (1 - cos_traced));
    }
    // One pair per sign pattern; only the pattern sum enters.
    for (std::size_t pattern = 0; pattern < copies; ++pattern) {
        int total = 0;
        for (int k = 0; k < m; ++k) total += (pattern >> k & 1U) ? 1 : -1;
        const Complex z = cos_all + cos_traced * std::polar(1.0, 2.0 * gs * total);
        out.average.eigenvalues.push_back(joint_level * (1 + 0.5 * std::abs(z)));
        out.average.eigenvalues.push_back(joint_level * (1 - 0.5 * std::abs(z)));
    }
    sort_descending(out.joint.eigenvalues);
    sort_descending(out.system.eigenvalues);
    sort_descending(out.average.eigenvalues);
    return out;
}

} // namespace spinstar
