#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <initializer_list>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace spinstar {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

/// Largest dense dimension we materialize: system qubit plus 12 environment units.
inline constexpr std::size_t kMaxDenseDim = std::size_t{1} << 13;

/// Dense square complex matrix. Carrier for density operators and their marginals.
class ComplexMatrix {
public:
    ComplexMatrix() : ComplexMatrix(1) {}

    explicit ComplexMatrix(std::size_t dim) {
        if (dim == 0) throw ContractError("ComplexMatrix: dimension must be positive");
        if (dim > kMaxDenseDim)
            throw SizeError("ComplexMatrix: dimension " + std::to_string(dim) + " exceeds " +
                            std::to_string(kMaxDenseDim));
        data_ = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    }

    explicit ComplexMatrix(Eigen::MatrixXcd m) : data_(std::move(m)) {
        if (data_.rows() != data_.cols() || data_.rows() == 0)
            throw ContractError("ComplexMatrix: expected a non-empty square matrix, got " +
                                std::to_string(data_.rows()) + "x" + std::to_string(data_.cols()));
        if (static_cast<std::size_t>(data_.rows()) > kMaxDenseDim)
            throw SizeError("ComplexMatrix: dimension exceeds dense maximum");
    }

    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
        const auto n = rows.size();
        if (n == 0) throw ContractError("ComplexMatrix: empty initializer");
        data_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        Eigen::Index i = 0;
        for (const auto& row : rows) {
            if (row.size() != n) throw ContractError("ComplexMatrix: initializer is not square");
            Eigen::Index j = 0;
            for (const auto& v : row) data_(i, j++) = v;
            ++i;
        }
    }

    static ComplexMatrix identity(std::size_t dim) {
        ComplexMatrix m(dim);
        m.data_.setIdentity();
        return m;
    }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(data_.rows()); }

    Complex& operator()(std::size_t i, std::size_t j) {
        return data_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const Complex& operator()(std::size_t i, std::size_t j) const {
        return data_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    const Eigen::MatrixXcd& eigen() const noexcept { return data_; }

    Complex trace() const { return data_.trace(); }
    ComplexMatrix adjoint() const { return ComplexMatrix(Eigen::MatrixXcd(data_.adjoint())); }

    /// max |M - M^dagger| over all entries.
    double hermiticity_defect() const { return (data_ - data_.adjoint()).cwiseAbs().maxCoeff(); }

    double max_abs_diff(const ComplexMatrix& other) const {
        require_same_dim(other, "max_abs_diff");
        return (data_ - other.data_).cwiseAbs().maxCoeff();
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_dim(o, "operator+=");
        data_ += o.data_;
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_dim(o, "operator-=");
        data_ -= o.data_;
        return *this;
    }
    ComplexMatrix& operator*=(Complex s) {
        data_ *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        a.require_same_dim(b, "operator*");
        return ComplexMatrix(Eigen::MatrixXcd(a.data_ * b.data_));
    }

private:
    void require_same_dim(const ComplexMatrix& o, const char* where) const {
        if (o.dim() != dim())
            throw ContractError(std::string(where) + ": dimension mismatch " + std::to_string(dim()) +
                                " vs " + std::to_string(o.dim()));
    }

    Eigen::MatrixXcd data_;
};

/// Real eigenvalues of a Hermitian matrix, sorted descending.
struct Spectrum {
    std::vector<double> eigenvalues;
    std::size_t source_dim = 0;

    double sum() const { return std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0); }
    double min() const { return *std::min_element(eigenvalues.begin(), eigenvalues.end()); }
};

inline void sort_descending(std::vector<double>& values) { std::sort(values.begin(), values.end(), std::greater<>()); }

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t da = a.dim(), db = b.dim();
    if (da * db > kMaxDenseDim)
        throw SizeError("kron: result dimension " + std::to_string(da * db) + " exceeds " +
                        std::to_string(kMaxDenseDim));
    ComplexMatrix out(da * db);
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < da; ++j) {
            const Complex aij = a(i, j);
            if (aij == Complex{}) continue;
            for (std::size_t k = 0; k < db; ++k)
                for (std::size_t l = 0; l < db; ++l) out(i * db + k, j * db + l) = aij * b(k, l);
        }
    return out;
}

/// Marginal on the subsystems listed in `keep`, which retain their original relative order.
/// Subsystem 0 is the most significant factor of the row index.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                                   const std::set<std::size_t>& keep) {
    if (dims.empty()) throw ContractError("partial_trace: empty dims");
    std::size_t total = 1;
    for (auto d : dims) {
        if (d == 0) throw ContractError("partial_trace: zero subsystem dimension");
        total *= d;
    }
    if (total != m.dim())
        throw ContractError("partial_trace: product of dims " + std::to_string(total) +
                            " does not match matrix dimension " + std::to_string(m.dim()));
    for (auto k : keep)
        if (k >= dims.size())
            throw ContractError("partial_trace: kept index " + std::to_string(k) + " out of range");

    const std::size_t n = dims.size();
    std::vector<std::size_t> stride(n);
    std::size_t acc = 1;
    for (std::size_t i = n; i-- > 0;) {
        stride[i] = acc;
        acc *= dims[i];
    }

    std::vector<std::size_t> kept, traced;
    for (std::size_t i = 0; i < n; ++i) (keep.count(i) ? kept : traced).push_back(i);

    // Full-space offset contributed by a mixed-radix index over the given subsystems.
    auto offsets = [&](const std::vector<std::size_t>& subsystems) {
        std::size_t count = 1;
        for (auto s : subsystems) count *= dims[s];
        std::vector<std::size_t> out(count, 0);
        for (std::size_t idx = 0; idx < count; ++idx) {
            std::size_t rem = idx, off = 0;
            for (std::size_t pos = subsystems.size(); pos-- > 0;) {
                const auto s = subsystems[pos];
                off += (rem % dims[s]) * stride[s];
                rem /= dims[s];
            }
            out[idx] = off;
        }
        return out;
    };

    const auto kept_off = offsets(kept);
    const auto traced_off = offsets(traced);
    ComplexMatrix out(kept_off.size());
    for (auto t : traced_off)
        for (std::size_t r = 0; r < kept_off.size(); ++r)
            for (std::size_t c = 0; c < kept_off.size(); ++c) out(r, c) += m(kept_off[r] + t, kept_off[c] + t);
    return out;
}

inline ComplexMatrix partial_trace(const ComplexMatrix& m, std::initializer_list<std::size_t> dims,
                                   const std::set<std::size_t>& keep) {
    return partial_trace(m, std::span<const std::size_t>(dims.begin(), dims.size()), keep);
}

inline constexpr double kHermitianTolerance = 1e-8;

namespace detail {

inline Eigen::MatrixXcd symmetrized(const ComplexMatrix& m) {
    const double defect = m.hermiticity_defect();
    if (defect > kHermitianTolerance) {
        std::ostringstream os;
        os << "matrix is not Hermitian: max|M - M^dagger| = " << defect << " > " << kHermitianTolerance;
        throw ContractError(os.str());
    }
    return 0.5 * (m.eigen() + m.eigen().adjoint());
}

/// Unitary DFT matrix of size n.
inline Eigen::MatrixXcd dft(Eigen::Index n) {
    Eigen::MatrixXcd f(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
            f(a, b) = std::polar(norm, 2.0 * std::numbers::pi * static_cast<double>((a * b) % n) / static_cast<double>(n));
    return f;
}

/// Eigen's tridiagonal QR occasionally stalls on highly degenerate input. A
/// retry in a rotated basis (same spectrum) breaks the offending structure.
/// Returns the solver and the basis change to apply to its eigenvectors.
inline std::pair<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>, Eigen::MatrixXcd> solve(const Eigen::MatrixXcd& h,
                                                                                            int options) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, options);
    if (solver.info() == Eigen::Success) return {std::move(solver), Eigen::MatrixXcd()};
    const Eigen::MatrixXcd f = dft(h.rows());
    Eigen::MatrixXcd rotated = f * h * f.adjoint();
    rotated = (0.5 * (rotated + rotated.adjoint())).eval();
    solver.compute(rotated, options);
    if (solver.info() != Eigen::Success)
        throw NumericalError("Hermitian eigensolver did not converge at dimension " + std::to_string(h.rows()) +
                             " (tridiagonal QR exceeded its iteration budget)");
    return {std::move(solver), f.adjoint()};
}

} // namespace detail

inline Spectrum hermitian_eigenvalues(const ComplexMatrix& m) {
    const auto [solver, basis] = detail::solve(detail::symmetrized(m), Eigen::EigenvaluesOnly);
    Spectrum s;
    s.source_dim = m.dim();
    s.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
    sort_descending(s.eigenvalues);
    return s;
}

/// Eigenvalues (descending) with the matching orthonormal eigenvectors as columns.
struct EigenSystem {
    Spectrum spectrum;
    Eigen::MatrixXcd vectors;
};

inline EigenSystem hermitian_eigensystem(const ComplexMatrix& m) {
    const Eigen::MatrixXcd h = detail::symmetrized(m);
    const auto [solver, basis] = detail::solve(h, Eigen::ComputeEigenvectors);

    const auto n = h.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return solver.eigenvalues()(a) > solver.eigenvalues()(b); });

    EigenSystem out;
    out.spectrum.source_dim = m.dim();
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.spectrum.eigenvalues.push_back(solver.eigenvalues()(order[static_cast<std::size_t>(k)]));
        out.vectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    }
    if (basis.size()) out.vectors = (basis * out.vectors).eval();

    Eigen::VectorXd lambda = Eigen::Map<const Eigen::VectorXd>(out.spectrum.eigenvalues.data(), n);
    const Eigen::MatrixXcd rebuilt = out.vectors * lambda.asDiagonal() * out.vectors.adjoint();
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double residual = (h - rebuilt).cwiseAbs().maxCoeff();
    if (residual > 1e-9 * scale) {
        std::ostringstream os;
        os << "eigendecomposition residual " << residual << " exceeds tolerance at dimension " << n;
        throw NumericalError(os.str());
    }
    return out;
}

/// Debug dump: `dim=<d>` then d rows of `re+imj` entries with 17 significant digits.
inline void write_matrix_csv(std::ostream& os, const ComplexMatrix& m) {
    os << "dim=" << m.dim() << '\n';
    char buf[96];
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = 0; j < m.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g%+.17gj", m(i, j).real(), m(i, j).imag());
            if (j) os << ',';
            os << buf;
        }
        os << '\n';
    }
}

inline ComplexMatrix read_matrix_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("dim=", 0) != 0) throw FormatError("matrix csv: missing dim= header");
    std::size_t dim = 0;
    try {
        dim = std::stoul(line.substr(4));
    } catch (const std::exception&) {
        throw FormatError("matrix csv: bad dimension in '" + line + "'");
    }
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        if (!std::getline(is, line)) throw FormatError("matrix csv: truncated at row " + std::to_string(i));
        std::stringstream row(line);
        std::string cell;
        std::size_t j = 0;
        while (std::getline(row, cell, ',')) {
            if (j >= dim) throw FormatError("matrix csv: too many entries in row " + std::to_string(i));
            double re = 0, im = 0;
            char unit = 0;
            std::stringstream cs(cell);
            if (!(cs >> re >> im >> unit) || unit != 'j') throw FormatError("matrix csv: bad entry '" + cell + "'");
            m(i, j++) = {re, im};
        }
        if (j != dim) throw FormatError("matrix csv: row " + std::to_string(i) + " has wrong length");
    }
    return m;
}

} // namespace spinstar
