#include "dabss/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "dabss/errors.hpp"

namespace dabss {

namespace {

// Largest 1-norm for which the order-m Padé approximant is accurate to
// double precision without scaling (Higham 2005, Table 2.3).
constexpr std::array<double, 5> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                          9.504178996162932e-1, 2.097847961257068e0,
                                          5.371920351148152e0};

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                           30270240.0,    2162160.0,    110880.0,     3960.0,
                                           90.0,          1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

double one_norm(const Matrix& A) {
    return A.cwiseAbs().colwise().sum().maxCoeff();
}

// Padé orders 3..9: U = A * sum_{odd k} b_k A^{k-1}, V = sum_{even k} b_k A^k.
template <std::size_t N>
Matrix pade_low(const Matrix& A, const std::array<double, N>& b) {
    const auto n = A.rows();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix A2 = A * A;
    Matrix power = I;
    Matrix odd = b[1] * I;
    Matrix even = b[0] * I;
    for (std::size_t k = 2; k < N; k += 2) {
        power = power * A2;
        even += b[k] * power;
        if (k + 1 < N) {
            odd += b[k + 1] * power;
        }
    }
    const Matrix U = A * odd;
    return (even - U).partialPivLu().solve(even + U);
}

Matrix pade13(const Matrix& A) {
    const auto& b = kPade13;
    const auto n = A.rows();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix A2 = A * A;
    const Matrix A4 = A2 * A2;
    const Matrix A6 = A4 * A2;
    const Matrix U =
        A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
    const Matrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
    return (V - U).partialPivLu().solve(V + U);
}

}  // namespace

Matrix expm(const Matrix& A, double t) {
    if (A.rows() != A.cols()) {
        throw DimensionError("expm: matrix must be square, got " + std::to_string(A.rows()) + "x" +
                             std::to_string(A.cols()));
    }
    if (!std::isfinite(t) || !A.allFinite()) {
        throw NumericInputError("expm: non-finite input");
    }
    if (A.size() == 0) {
        return A;
    }

    const Matrix At = A * t;
    const double norm = one_norm(At);
    if (norm <= kTheta[0]) {
        return pade_low(At, kPade3);
    }
    if (norm <= kTheta[1]) {
        return pade_low(At, kPade5);
    }
    if (norm <= kTheta[2]) {
        return pade_low(At, kPade7);
    }
    if (norm <= kTheta[3]) {
        return pade_low(At, kPade9);
    }

    const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta[4]))));
    Matrix E = pade13(std::ldexp(1.0, -squarings) * At);
    for (int i = 0; i < squarings; ++i) {
        E = E * E;
    }
    return E;
}

std::vector<Complex> eigenvalues(const Matrix& M) {
    if (M.rows() != M.cols()) {
        throw DimensionError("eigenvalues: matrix must be square");
    }
    Eigen::EigenSolver<Matrix> solver(M, false);
    const auto& ev = solver.eigenvalues();
    std::vector<Complex> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

double spectral_radius(const Matrix& M) {
    double r = 0.0;
    for (const auto& lambda : eigenvalues(M)) {
        r = std::max(r, std::abs(lambda));
    }
    return r;
}

double norm2(const Matrix& M) {
    if (M.size() == 0) {
        return 0.0;
    }
    return Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
}

double norm2(const ComplexMatrix& M) {
    if (M.size() == 0) {
        return 0.0;
    }
    return Eigen::JacobiSVD<ComplexMatrix>(M).singularValues()(0);
}

}  // namespace dabss
