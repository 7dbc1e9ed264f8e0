// Dense complex linear algebra used throughout the simulator: Kronecker
// products, matrix exponential, Hermitian eigendecomposition, partial trace
// and column-stacking vectorization. All operators, density matrices and
// superoperators are carried as Eigen dense complex matrices.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nvpol {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double two_pi = 6.283185307179586476925286766559;

// ---------------------------------------------------------------------------
// basic predicates

inline bool is_square(const ComplexMatrix& m) { return m.rows() == m.cols(); }

// Hermitian within tol * (1 + max |entry|).
inline bool is_hermitian(const ComplexMatrix& m, double tol = 1e-10) {
    if (!is_square(m)) return false;
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    return (m - m.adjoint()).cwiseAbs().maxCoeff() < tol * scale;
}

// ---------------------------------------------------------------------------
// kron

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// ---------------------------------------------------------------------------
// matrix exponential: scaling-and-squaring with Pade approximants.
// Degree 13 kicks in above a 1-norm of ~5.37; lower degrees below.

namespace detail {

inline ComplexMatrix pade_solve(const ComplexMatrix& u, const ComplexMatrix& v) {
    // (V - U) X = (V + U)
    return (v - u).partialPivLu().solve(v + u);
}

inline ComplexMatrix expm_pade_low(const ComplexMatrix& a, int degree) {
    static const std::vector<std::vector<double>> coeffs = {
        {120., 60., 12., 1.},                                          // 3
        {30240., 15120., 3360., 420., 30., 1.},                        // 5
        {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.},  // 7
        {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
         2162160., 110880., 3960., 90., 1.},                           // 9
    };
    const auto& b = coeffs[(degree - 3) / 2];
    const Eigen::Index n = a.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix a2 = a * a;
    ComplexMatrix u = b[1] * id;
    ComplexMatrix v = b[0] * id;
    ComplexMatrix pow = id;
    for (int k = 2; k <= degree; k += 2) {
        pow = pow * a2;
        v += b[k] * pow;
        if (k + 1 <= degree) u += b[k + 1] * pow;
    }
    u = a * u;
    return pade_solve(u, v);
}

inline ComplexMatrix expm_pade13(const ComplexMatrix& a) {
    static const double b[14] = {
        64764752532480000., 32382376266240000., 7771770303897600.,
        1187353796428800.,  129060195264000.,   10559470521600.,
        670442572800.,      33522128640.,       1323241920.,
        40840800.,          960960.,            16380., 182., 1.};
    const Eigen::Index n = a.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix a2 = a * a;
    const ComplexMatrix a4 = a2 * a2;
    const ComplexMatrix a6 = a2 * a4;
    ComplexMatrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                           b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    ComplexMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                      b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    return pade_solve(u, v);
}

}  // namespace detail

// exp(scale * m) for square m.
inline ComplexMatrix expm(const ComplexMatrix& m, double scale = 1.0) {
    if (!is_square(m)) throw std::invalid_argument("expm: matrix must be square");
    if (!std::isfinite(scale)) throw std::invalid_argument("expm: scale must be finite");
    ComplexMatrix a = scale * m;
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    static const double theta[] = {1.495585217958292e-2, 2.539398330063230e-1,
                                   9.504178996162932e-1, 2.097847961257068};
    if (norm1 <= theta[0]) return detail::expm_pade_low(a, 3);
    if (norm1 <= theta[1]) return detail::expm_pade_low(a, 5);
    if (norm1 <= theta[2]) return detail::expm_pade_low(a, 7);
    if (norm1 <= theta[3]) return detail::expm_pade_low(a, 9);
    constexpr double theta13 = 5.371920351148152;
    int squarings = 0;
    if (norm1 > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
        a *= std::pow(2.0, -squarings);
    }
    ComplexMatrix f = detail::expm_pade13(a);
    for (int i = 0; i < squarings; ++i) f = f * f;
    return f;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition

struct EighResult {
    Eigen::VectorXd values;   // ascending
    ComplexMatrix vectors;    // orthonormal columns, vectors.col(k) <-> values(k)
};

inline EighResult eigh(const ComplexMatrix& m, double herm_tol = 1e-10) {
    if (!is_hermitian(m, herm_tol))
        throw std::invalid_argument("eigh: matrix is not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigh: eigendecomposition failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// ---------------------------------------------------------------------------
// partial trace over one factor of a bipartite system (dims dA x dB)

enum class Subsystem { A, B };

inline ComplexMatrix partial_trace(const ComplexMatrix& rho, int d_a, int d_b,
                                   Subsystem keep) {
    if (rho.rows() != rho.cols() ||
        rho.rows() != static_cast<Eigen::Index>(d_a) * d_b)
        throw std::invalid_argument("partial_trace: dimension mismatch");
    if (keep == Subsystem::A) {
        ComplexMatrix out = ComplexMatrix::Zero(d_a, d_a);
        for (int i = 0; i < d_a; ++i)
            for (int j = 0; j < d_a; ++j)
                for (int k = 0; k < d_b; ++k)
                    out(i, j) += rho(i * d_b + k, j * d_b + k);
        return out;
    }
    ComplexMatrix out = ComplexMatrix::Zero(d_b, d_b);
    for (int k = 0; k < d_b; ++k)
        for (int l = 0; l < d_b; ++l)
            for (int i = 0; i < d_a; ++i)
                out(k, l) += rho(i * d_b + k, i * d_b + l);
    return out;
}

// ---------------------------------------------------------------------------
// column-stacking vectorization; vec(A rho B) = (B^T (x) A) vec(rho)

inline ComplexVector vectorize(const ComplexMatrix& m) {
    if (!is_square(m)) throw std::invalid_argument("vectorize: matrix must be square");
    return ComplexVector(Eigen::Map<const ComplexVector>(m.data(), m.size()));
}

inline ComplexMatrix devectorize(const ComplexVector& v, Eigen::Index n) {
    if (v.size() != n * n)
        throw std::invalid_argument("devectorize: length is not n^2");
    return ComplexMatrix(Eigen::Map<const ComplexMatrix>(v.data(), n, n));
}

inline ComplexMatrix devectorize(const ComplexVector& v) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
    if (n * n != v.size())
        throw std::invalid_argument("devectorize: length is not a perfect square");
    return devectorize(v, n);
}

}  // namespace nvpol
