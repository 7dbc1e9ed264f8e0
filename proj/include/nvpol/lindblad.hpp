// Jump operators, the vectorized Liouvillian and density-matrix propagation.
//
// The master equation drho/dt = -i[H, rho] + sum_k D(L_k) rho is evolved in
// vectorized form, rho_hat(t) = exp(L t) rho_hat(0), with the column-stacking
// convention
//   L = i(conj(H) (x) I - I (x) H)
//     + sum_k conj(L_k) (x) L_k - 1/2 I (x) L_k^dag L_k
//              - 1/2 (L_k^dag L_k)^T (x) I.
#pragma once

#include "nvpol/hamiltonian.hpp"
#include "nvpol/linalg.hpp"
#include "nvpol/rates.hpp"
#include "nvpol/spin.hpp"

#include <functional>
#include <vector>

namespace nvpol {

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// jump operators

namespace detail {

inline void add_transition(std::vector<ComplexMatrix>& ops, int to, int from,
                           double rate, int nuclear_dim) {
    if (rate <= 0.0 || !std::isfinite(rate)) return;
    ComplexMatrix t = ComplexMatrix::Zero(level::count, level::count);
    t(to, from) = std::sqrt(rate);
    ops.push_back(kron(t, ComplexMatrix::Identity(nuclear_dim, nuclear_dim)));
}

}  // namespace detail

// One operator per incoherent channel, each tensored with the nuclear
// identity (electron channels) or the electron identity (nuclear channels):
//  - optical pumping g->e at k(1-e) spin-conserving, k e/2 to each other
//    projection, and the mirrored spontaneous decay with gamma,
//  - inter-system crossing e->S and S->g at the model rates,
//  - S_z dephasing per manifold at 1/sqrt(2 T2*), nuclear I_z dephasing,
//  - ground-state T1 as symmetric exchange at 1/(3 T1) per directed pair,
//    nuclear flips at 1/(2 T1n).
inline std::vector<ComplexMatrix> jump_operators(const RateModel& model,
                                                 const RelaxationParams& relax,
                                                 const ControlSettings& control,
                                                 int nuclear_dim) {
    model.validate();
    relax.validate();
    control.validate(nuclear_dim);

    std::vector<ComplexMatrix> ops;
    const int dn = nuclear_dim;
    const auto el = spin1_operators();
    const ComplexMatrix id_el = ComplexMatrix::Identity(level::count, level::count);

    const int ground[3] = {level::g_minus, level::g_zero, level::g_plus};
    const int excited[3] = {level::e_minus, level::e_zero, level::e_plus};

    for (int i = 0; i < 3; ++i) {
        detail::add_transition(ops, excited[i], ground[i], control.k * (1.0 - model.e), dn);
        detail::add_transition(ops, ground[i], excited[i], model.gamma * (1.0 - model.e), dn);
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            detail::add_transition(ops, excited[j], ground[i], control.k * model.e / 2.0, dn);
            detail::add_transition(ops, ground[j], excited[i], model.gamma * model.e / 2.0, dn);
        }
    }

    detail::add_transition(ops, level::singlet, level::e_minus, model.kms, dn);
    detail::add_transition(ops, level::singlet, level::e_zero, model.k0s, dn);
    detail::add_transition(ops, level::singlet, level::e_plus, model.kps, dn);
    detail::add_transition(ops, level::g_minus, level::singlet, model.ksm, dn);
    detail::add_transition(ops, level::g_zero, level::singlet, model.ks0, dn);
    detail::add_transition(ops, level::g_plus, level::singlet, model.ksp, dn);

    const ComplexMatrix id_n = ComplexMatrix::Identity(dn, dn);
    if (std::isfinite(relax.t2_el_ground))
        ops.push_back(std::sqrt(1.0 / (2.0 * relax.t2_el_ground)) *
                      kron(embed(el.z, Manifold::ground), id_n));
    if (std::isfinite(relax.t2_el_excited))
        ops.push_back(std::sqrt(1.0 / (2.0 * relax.t2_el_excited)) *
                      kron(embed(el.z, Manifold::excited), id_n));
    if (std::isfinite(relax.t1_el))
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j)
                    detail::add_transition(ops, ground[j], ground[i],
                                           1.0 / (3.0 * relax.t1_el), dn);

    const auto nuc = nuclear_operators(dn);
    if (std::isfinite(relax.t2_n))
        ops.push_back(std::sqrt(1.0 / (2.0 * relax.t2_n)) * kron(id_el, nuc.z));
    if (std::isfinite(relax.t1_n)) {
        // flips between adjacent nuclear levels, both directions
        for (int n = 0; n + 1 < dn; ++n) {
            ComplexMatrix up = ComplexMatrix::Zero(dn, dn);
            up(n, n + 1) = 1.0;
            const double amp = std::sqrt(1.0 / (2.0 * relax.t1_n));
            ops.push_back(amp * kron(id_el, up));
            ops.push_back(amp * kron(id_el, ComplexMatrix(up.adjoint())));
        }
    }
    return ops;
}

// ---------------------------------------------------------------------------
// microwave drive in the rotating frame
//
// Adds rabi/2 (|g,from><g,to| + h.c.) (x) 1 and shifts the driven ground
// m_s = to levels down by the transition frequency of the named joint pair,
// so those two joint levels become degenerate. Frame-induced phases on the
// remaining coherences are not unwound; every readout used here is diagonal
// in the electron index.
inline ComplexMatrix microwave_term(const MicrowaveDrive& mw, const ComplexMatrix& h_joint,
                                    int nuclear_dim) {
    mw.validate(nuclear_dim);
    const int dim = level::count * nuclear_dim;
    if (h_joint.rows() != dim || h_joint.cols() != dim)
        throw std::invalid_argument("microwave_term: Hamiltonian dimension mismatch");

    const int from = level::ground_of(mw.ms_from);
    const int to = level::ground_of(mw.ms_to);
    const int a = from * nuclear_dim + mw.nuclear_level;
    const int b = to * nuclear_dim + mw.nuclear_level;
    const double omega = (h_joint(b, b) - h_joint(a, a)).real();

    // the named transition must be spectrally distinct from the same electron
    // transition at the other nuclear projections
    for (int n = 0; n < nuclear_dim; ++n) {
        if (n == mw.nuclear_level) continue;
        const double other = (h_joint(to * nuclear_dim + n, to * nuclear_dim + n) -
                              h_joint(from * nuclear_dim + n, from * nuclear_dim + n))
                                 .real();
        if (std::abs(other - omega) < 1e-9)
            throw std::invalid_argument(
                "microwave_term: named transition is degenerate with another nuclear level");
    }

    const ComplexMatrix id_n = ComplexMatrix::Identity(nuclear_dim, nuclear_dim);
    ComplexMatrix drive = ComplexMatrix::Zero(level::count, level::count);
    drive(from, to) = 1.0;
    drive(to, from) = 1.0;
    ComplexMatrix shift = ComplexMatrix::Zero(level::count, level::count);
    shift(to, to) = 1.0;
    return h_joint + (mw.rabi / 2.0) * kron(drive, id_n) - omega * kron(shift, id_n);
}

// ---------------------------------------------------------------------------
// Liouvillian and propagation

inline ComplexMatrix liouvillian(const ComplexMatrix& h,
                                 const std::vector<ComplexMatrix>& jumps) {
    if (!is_square(h)) throw std::invalid_argument("liouvillian: H must be square");
    if (!is_hermitian(h, 1e-9))
        throw std::invalid_argument("liouvillian: H must be Hermitian");
    const Eigen::Index n = h.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    ComplexMatrix sup = Complex(0, 1) * (kron(h.conjugate(), id) - kron(id, h));
    for (const auto& l : jumps) {
        if (l.rows() != n || l.cols() != n)
            throw std::invalid_argument("liouvillian: jump operator dimension mismatch");
        const ComplexMatrix ldl = l.adjoint() * l;
        sup += kron(l.conjugate(), l);
        sup -= 0.5 * kron(id, ldl);
        sup -= 0.5 * kron(ldl.transpose(), id);
    }
    return sup;
}

// Joint electron (x) nucleus density matrix.
struct SimState {
    ComplexMatrix rho;
    int nuclear_dim = 2;

    int joint_dim() const { return level::count * nuclear_dim; }

    // maximally mixed ground triplet (x) maximally mixed nucleus
    static SimState thermal(int nuclear_dim) {
        const int dim = level::count * nuclear_dim;
        SimState s;
        s.nuclear_dim = nuclear_dim;
        s.rho = ComplexMatrix::Zero(dim, dim);
        const double p = 1.0 / (3.0 * nuclear_dim);
        for (int lvl : {level::g_minus, level::g_zero, level::g_plus})
            for (int n = 0; n < nuclear_dim; ++n)
                s.rho(lvl * nuclear_dim + n, lvl * nuclear_dim + n) = p;
        return s;
    }

    static SimState pure(const ComplexVector& psi, int nuclear_dim) {
        SimState s;
        s.nuclear_dim = nuclear_dim;
        s.rho = psi * psi.adjoint();
        return s;
    }

    void validate(double tol = 1e-10) const {
        if (rho.rows() != joint_dim() || rho.cols() != joint_dim())
            throw std::invalid_argument("SimState: dimension mismatch");
        if (std::abs(rho.trace().real() - 1.0) > 1e-8 || std::abs(rho.trace().imag()) > 1e-8)
            throw std::invalid_argument("SimState: trace must be 1");
        if (!is_hermitian(rho, tol)) throw std::invalid_argument("SimState: not Hermitian");
        const auto eig = eigh(rho, 1e-8);
        if (eig.values.minCoeff() < -tol)
            throw std::invalid_argument("SimState: not positive semidefinite");
    }
};

inline SimState evolve(const SimState& state, const ComplexMatrix& sup, double t) {
    const Eigen::Index n = state.rho.rows();
    if (sup.rows() != n * n)
        throw std::invalid_argument("evolve: Liouvillian dimension mismatch");
    SimState out = state;
    if (t == 0.0) return out;
    const ComplexMatrix prop = expm(sup, t);
    out.rho = devectorize(ComplexVector(prop * vectorize(state.rho)), n);
    const double drift = std::abs(out.rho.trace().real() - 1.0);
    if (drift > 1e-8)
        throw numerical_error("evolve: trace drift " + std::to_string(drift));
    return out;
}

struct TrajectoryPoint {
    double t;
    SimState state;
};

// States at t = 0, dt, 2dt, ... up to and including t (a shorter final step
// covers any remainder). The step propagator is built once and reused.
inline std::vector<TrajectoryPoint> evolve_sampled(const SimState& state,
                                                   const ComplexMatrix& sup, double t,
                                                   double dt) {
    if (dt <= 0.0) throw std::invalid_argument("evolve_sampled: dt must be positive");
    const Eigen::Index n = state.rho.rows();
    if (sup.rows() != n * n)
        throw std::invalid_argument("evolve_sampled: Liouvillian dimension mismatch");
    std::vector<TrajectoryPoint> traj;
    traj.push_back({0.0, state});
    if (t <= 0.0) return traj;
    const ComplexMatrix prop = expm(sup, dt);
    ComplexVector v = vectorize(state.rho);
    double elapsed = 0.0;
    while (elapsed + dt <= t * (1.0 + 1e-12)) {
        v = prop * v;
        elapsed += dt;
        SimState s;
        s.nuclear_dim = state.nuclear_dim;
        s.rho = devectorize(v, n);
        traj.push_back({elapsed, std::move(s)});
    }
    if (t - elapsed > 1e-12 * std::max(1.0, t)) {
        v = expm(sup, t - elapsed) * v;
        SimState s;
        s.nuclear_dim = state.nuclear_dim;
        s.rho = devectorize(v, n);
        traj.push_back({t, std::move(s)});
    }
    const double drift = std::abs(traj.back().state.rho.trace().real() - 1.0);
    if (drift > 1e-8)
        throw numerical_error("evolve_sampled: trace drift " + std::to_string(drift));
    return traj;
}

}  // namespace nvpol
