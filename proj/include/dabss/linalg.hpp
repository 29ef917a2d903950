#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace dabss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Matrix exponential e^{A t}.
///
/// Scaling and squaring around diagonal Padé approximants (orders 3, 5, 7, 9
/// and 13, selected from the 1-norm of A t). Throws DimensionError for a
/// non-square A and NumericInputError for non-finite A or t.
[[nodiscard]] Matrix expm(const Matrix& A, double t = 1.0);

/// Eigenvalues of a real square matrix, sorted by (real, imag).
[[nodiscard]] std::vector<Complex> eigenvalues(const Matrix& M);

[[nodiscard]] double spectral_radius(const Matrix& M);

/// Largest singular value.
[[nodiscard]] double norm2(const Matrix& M);
[[nodiscard]] double norm2(const ComplexMatrix& M);

/// |a - b| <= rel * max(|a|, |b|) + abs_floor, using Frobenius/2-norms.
template <typename A, typename B>
[[nodiscard]] bool near(const A& a, const B& b, double rel, double abs_floor = 0.0) {
    const double scale = std::max(a.norm(), b.norm());
    return (a - b).norm() <= rel * scale + abs_floor;
}

/// Norm-wise relative deviation |a - b| / max(|a|, |b|, floor).
template <typename A, typename B>
[[nodiscard]] double relative_deviation(const A& a, const B& b, double floor = 1e-300) {
    const double scale = std::max({a.norm(), b.norm(), floor});
    return (a - b).norm() / scale;
}

}  // namespace dabss
