// Spin operators and the seven-level NV electronic basis.
//
// Electronic basis order (fixed everywhere):
//   0 (g,-1)  1 (g,0)  2 (g,+1)  3 (e,-1)  4 (e,0)  5 (e,+1)  6 singlet
// Triplet operators returned by spin1_operators() use the matching ascending
// order (-1, 0, +1), so embed() places them verbatim into a manifold block.
// Nuclear bases are ordered by descending projection: spin-1/2 (up, down),
// spin-1 (+1, 0, -1). Joint states are kron(electron, nucleus):
// index = electron_level * nuclear_dim + nuclear_level.
#pragma once

#include "nvpol/linalg.hpp"

namespace nvpol {

enum class Manifold { ground, excited };

namespace level {
inline constexpr int g_minus = 0;
inline constexpr int g_zero = 1;
inline constexpr int g_plus = 2;
inline constexpr int e_minus = 3;
inline constexpr int e_zero = 4;
inline constexpr int e_plus = 5;
inline constexpr int singlet = 6;
inline constexpr int count = 7;

inline int ground_of(int ms) { return g_zero + ms; }
inline int excited_of(int ms) { return e_zero + ms; }
}  // namespace level

struct SpinOps {
    ComplexMatrix z, plus, minus, x, y;
};

// Spin-1 triplet operators in the ascending (-1, 0, +1) basis.
inline SpinOps spin1_operators() {
    ComplexMatrix z = ComplexMatrix::Zero(3, 3);
    z(0, 0) = -1.0;
    z(2, 2) = 1.0;
    ComplexMatrix plus = ComplexMatrix::Zero(3, 3);
    const double r2 = std::sqrt(2.0);
    plus(1, 0) = r2;  // S+|-1> = sqrt(2)|0>
    plus(2, 1) = r2;  // S+|0>  = sqrt(2)|+1>
    ComplexMatrix minus = plus.adjoint();
    return {z, plus, minus, (plus + minus) / 2.0, (plus - minus) / Complex(0, 2)};
}

// Spin-1/2 operators in the (up, down) basis; eigenvalues of I_z are +-1/2.
inline SpinOps spin_half_operators() {
    ComplexMatrix z = ComplexMatrix::Zero(2, 2);
    z(0, 0) = 0.5;
    z(1, 1) = -0.5;
    ComplexMatrix plus = ComplexMatrix::Zero(2, 2);
    plus(0, 1) = 1.0;
    ComplexMatrix minus = plus.adjoint();
    return {z, plus, minus, (plus + minus) / 2.0, (plus - minus) / Complex(0, 2)};
}

// Spin-1 nuclear operators in the descending (+1, 0, -1) basis.
inline SpinOps spin1_nuclear_operators() {
    ComplexMatrix z = ComplexMatrix::Zero(3, 3);
    z(0, 0) = 1.0;
    z(2, 2) = -1.0;
    ComplexMatrix plus = ComplexMatrix::Zero(3, 3);
    const double r2 = std::sqrt(2.0);
    plus(0, 1) = r2;  // I+|0>  = sqrt(2)|+1>
    plus(1, 2) = r2;  // I+|-1> = sqrt(2)|0>
    ComplexMatrix minus = plus.adjoint();
    return {z, plus, minus, (plus + minus) / 2.0, (plus - minus) / Complex(0, 2)};
}

inline SpinOps nuclear_operators(int nuclear_dim) {
    if (nuclear_dim == 2) return spin_half_operators();
    if (nuclear_dim == 3) return spin1_nuclear_operators();
    throw std::invalid_argument("nuclear_operators: nuclear_dim must be 2 or 3");
}

// Place a 3x3 triplet operator into the seven-level space; the singlet row
// and column stay zero.
inline ComplexMatrix embed(const ComplexMatrix& op, Manifold manifold) {
    if (op.rows() != 3 || op.cols() != 3)
        throw std::invalid_argument("embed: operator must be 3x3");
    ComplexMatrix out = ComplexMatrix::Zero(level::count, level::count);
    const int offset = manifold == Manifold::ground ? level::g_minus : level::e_minus;
    out.block(offset, offset, 3, 3) = op;
    return out;
}

// Joint electron (x) nucleus operator.
inline ComplexMatrix lift(const ComplexMatrix& electron_op, const ComplexMatrix& nuclear_op) {
    return kron(electron_op, nuclear_op);
}

inline ComplexMatrix singlet_projector() {
    ComplexMatrix out = ComplexMatrix::Zero(level::count, level::count);
    out(level::singlet, level::singlet) = 1.0;
    return out;
}

}  // namespace nvpol
