// Scalar readouts of the joint density matrix: nuclear polarization (signed
// and absolute), ground m_s = 0 population, singlet population and per-level
// populations. The nuclear polarization can be read in the z basis or in the
// eigenbasis of the nuclear Hamiltonian conditioned on a chosen electron
// projection.
#pragma once

#include "nvpol/hamiltonian.hpp"
#include "nvpol/lindblad.hpp"
#include "nvpol/linalg.hpp"
#include "nvpol/spin.hpp"

namespace nvpol {

struct ReadoutBasis {
    enum class Kind { z, conditional } kind = Kind::z;
    int ms = 0;  // electron projection defining the conditional basis

    static ReadoutBasis z() { return {Kind::z, 0}; }
    static ReadoutBasis conditional(int ms) { return {Kind::conditional, ms}; }
};

// Eigenbasis of the conditional nuclear Hamiltonian, columns ordered and
// phased to have maximal overlap with the z basis states (so "up" stays the
// first column).
inline ComplexMatrix conditional_nuclear_basis(const SystemParams& params,
                                               const HyperfineTensor& hf_ground, int ms,
                                               bool include_soc) {
    const ComplexMatrix h = conditional_hamiltonian(params, hf_ground, ms, include_soc);
    auto eig = eigh(h, 1e-8);
    const int dn = params.nuclear_dim;
    ComplexMatrix v = ComplexMatrix::Zero(dn, dn);
    std::vector<bool> used(dn, false);
    for (int z = 0; z < dn; ++z) {
        int best = -1;
        double best_overlap = -1.0;
        for (int c = 0; c < dn; ++c) {
            if (used[c]) continue;
            const double o = std::abs(eig.vectors(z, c));
            if (o > best_overlap) {
                best_overlap = o;
                best = c;
            }
        }
        used[best] = true;
        ComplexVector col = eig.vectors.col(best);
        const Complex phase = col(z);
        if (std::abs(phase) > 0) col *= std::conj(phase) / std::abs(phase);
        v.col(z) = col;
    }
    return v;
}

inline ComplexMatrix nuclear_reduced(const SimState& state) {
    return partial_trace(state.rho, level::count, state.nuclear_dim, Subsystem::B);
}

// Signed population difference of the outermost nuclear projections,
// rho_n(up,up) - rho_n(down,down) for spin 1/2, rho_n(+1,+1) - rho_n(-1,-1)
// for spin 1; optionally after rotating into a conditional eigenbasis.
inline double nuclear_polarization_signed(const SimState& state,
                                          const ComplexMatrix* basis = nullptr) {
    ComplexMatrix rn = nuclear_reduced(state);
    if (basis) {
        if (basis->rows() != state.nuclear_dim || basis->cols() != state.nuclear_dim)
            throw std::invalid_argument("nuclear_polarization: basis dimension mismatch");
        rn = basis->adjoint() * rn * (*basis);
    }
    return (rn(0, 0) - rn(state.nuclear_dim - 1, state.nuclear_dim - 1)).real();
}

inline double nuclear_polarization(const SimState& state,
                                   const ComplexMatrix* basis = nullptr) {
    return std::abs(nuclear_polarization_signed(state, basis));
}

// Population of the ground m_s = 0 level, summed over the nucleus.
inline double electron_polarization(const SimState& state) {
    double p = 0.0;
    for (int n = 0; n < state.nuclear_dim; ++n)
        p += state.rho(level::g_zero * state.nuclear_dim + n,
                       level::g_zero * state.nuclear_dim + n)
                 .real();
    return p;
}

inline double singlet_population(const SimState& state) {
    double p = 0.0;
    for (int n = 0; n < state.nuclear_dim; ++n)
        p += state.rho(level::singlet * state.nuclear_dim + n,
                       level::singlet * state.nuclear_dim + n)
                 .real();
    return p;
}

struct Readout {
    double p_nuclear_signed = 0.0;
    double p_nuclear_abs = 0.0;
    double p_electron_ms0 = 0.0;
    double singlet_pop = 0.0;
    std::vector<double> populations;  // joint-basis diagonal
};

inline Readout read_state(const SimState& state, const ComplexMatrix* basis = nullptr) {
    Readout r;
    r.p_nuclear_signed = nuclear_polarization_signed(state, basis);
    r.p_nuclear_abs = std::abs(r.p_nuclear_signed);
    r.p_electron_ms0 = electron_polarization(state);
    r.singlet_pop = singlet_population(state);
    r.populations.resize(state.rho.rows());
    for (Eigen::Index i = 0; i < state.rho.rows(); ++i)
        r.populations[static_cast<size_t>(i)] = state.rho(i, i).real();
    return r;
}

}  // namespace nvpol
