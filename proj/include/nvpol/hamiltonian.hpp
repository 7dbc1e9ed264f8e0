// Coherent Hamiltonian of the seven-level NV electronic system coupled to one
// nuclear spin: zero-field splitting, electronic and nuclear Zeeman terms,
// quadrupole term for a spin-1 nucleus, and the hyperfine coupling in full or
// secular form. The secular form can be augmented with the second-order
// correction that restores the leading effect of the dropped S_x/S_y terms
// on the nuclear spin.
//
// Units: energies in rad/us (angular), magnetic field in gauss,
// gyromagnetic ratios in rad/us/G.
#pragma once

#include "nvpol/hyperfine.hpp"
#include "nvpol/linalg.hpp"
#include "nvpol/spin.hpp"

#include <array>

namespace nvpol {

namespace constants {
inline constexpr double d_ground = two_pi * 2870.0;      // rad/us
inline constexpr double d_excited = two_pi * 1420.0;     // rad/us
inline constexpr double gamma_el = two_pi * 2.8;         // rad/us/G
inline constexpr double gamma_n_13c = two_pi * 1.07e-3;  // rad/us/G
inline constexpr double gamma_n_14n = two_pi * 0.3077e-3;
inline constexpr double gamma_n_15n = two_pi * -0.4316e-3;
inline constexpr double quadrupole_14n = two_pi * -4.96;  // rad/us
}  // namespace constants

enum class Nucleus { c13, n14, n15 };

struct SystemParams {
    double d_ground = constants::d_ground;
    double d_excited = constants::d_excited;
    double gamma_el = constants::gamma_el;
    double gamma_n = constants::gamma_n_13c;
    double quadrupole = 0.0;           // nonzero only for a spin-1 nucleus
    Eigen::Vector3d b_field{0, 0, 0};  // gauss
    int nuclear_dim = 2;

    static SystemParams for_nucleus(Nucleus n, const Eigen::Vector3d& b) {
        SystemParams p;
        p.b_field = b;
        switch (n) {
            case Nucleus::c13: p.gamma_n = constants::gamma_n_13c; break;
            case Nucleus::n15: p.gamma_n = constants::gamma_n_15n; break;
            case Nucleus::n14:
                p.gamma_n = constants::gamma_n_14n;
                p.quadrupole = constants::quadrupole_14n;
                p.nuclear_dim = 3;
                break;
        }
        return p;
    }

    void validate() const {
        if (nuclear_dim != 2 && nuclear_dim != 3)
            throw std::invalid_argument("SystemParams: nuclear_dim must be 2 or 3");
        if (quadrupole != 0.0 && nuclear_dim != 3)
            throw std::invalid_argument("SystemParams: quadrupole requires a spin-1 nucleus");
        if (!b_field.allFinite())
            throw std::invalid_argument("SystemParams: magnetic field must be finite");
    }

    int joint_dim() const { return level::count * nuclear_dim; }
};

enum class HamiltonianMode { full, secular, secular_plus_soc };

namespace detail {

inline double manifold_d(const SystemParams& p, Manifold m) {
    return m == Manifold::ground ? p.d_ground : p.d_excited;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Second-order correction operators.
//
// The non-secular terms V = gamma_el (Bx Sx + By Sy) + sum_{a=x,y} A_aj Sa Ij
// shift each electron-spin projection by a nuclear operator E2_ms obtained
// from second-order perturbation theory:
//
//   E2_0   = (-2 D M + 2 gamma_el Bz N) / (2 (D^2 - gamma_el^2 Bz^2))
//   E2_+-1 = (M -+ N) / (2 (D +- gamma_el Bz))
// with
//   M = 2 gamma_el [(A.B)_x Ix + (A.B)_y Iy + (A.B)_z Iz]
//       + gamma_el^2 Bperp^2 1 + (1/4)(A+ . A-) 1
//   N = (i/2)(A+ x A-) . I,   A_{j+-} = A_jx +- i A_jy.
//
// The 1/4 and 1/2 factors arise because the nuclear operators are spin-1/2
// matrices (sigma/2), via (a.I)(b.I) = (a.b)/4 + (i/2)(a x b).I.

struct HsocOperators {
    ComplexMatrix e2_minus;  // 2x2 nuclear operators, one per m_s
    ComplexMatrix e2_zero;
    ComplexMatrix e2_plus;

    const ComplexMatrix& of(int ms) const {
        if (ms == -1) return e2_minus;
        if (ms == 0) return e2_zero;
        if (ms == 1) return e2_plus;
        throw std::invalid_argument("HsocOperators: m_s must be -1, 0 or +1");
    }
};

inline HsocOperators build_hsoc(const SystemParams& params, const HyperfineTensor& hf,
                                Manifold manifold) {
    params.validate();
    if (params.nuclear_dim != 2)
        throw std::invalid_argument("build_hsoc: only spin-1/2 nuclei are supported");
    const double d = detail::manifold_d(params, manifold);
    const Eigen::Vector3d gb = params.gamma_el * params.b_field;
    if (std::abs(gb.z()) >= d)
        throw std::invalid_argument("build_hsoc: |gamma_el Bz| >= D, correction is singular");

    const auto nuc = spin_half_operators();
    const std::array<const ComplexMatrix*, 3> ivec{&nuc.x, &nuc.y, &nuc.z};
    const auto& a = hf.a;
    const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);

    Eigen::Vector3cd a_plus, a_minus;
    for (int j = 0; j < 3; ++j) {
        a_plus(j) = Complex(a(j, 0), a(j, 1));
        a_minus(j) = Complex(a(j, 0), -a(j, 1));
    }

    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    for (int j = 0; j < 3; ++j)
        m += 2.0 * (a(0, j) * gb.x() + a(1, j) * gb.y()) * (*ivec[j]);
    m += (gb.x() * gb.x() + gb.y() * gb.y()) * id2;
    m += 0.25 * a_plus.squaredNorm() * id2;  // A+ . A- = sum_j |A_{j+}|^2

    const Eigen::Vector3cd cross = 0.5 * Complex(0, 1) * a_plus.cross(a_minus);
    ComplexMatrix n = ComplexMatrix::Zero(2, 2);
    for (int j = 0; j < 3; ++j) n += cross(j).real() * (*ivec[j]);

    HsocOperators out;
    const double den0 = 2.0 * (d * d - gb.z() * gb.z());
    out.e2_zero = (-2.0 * d * m + 2.0 * gb.z() * n) / den0;
    out.e2_plus = (m - n) / (2.0 * (d + gb.z()));
    out.e2_minus = (m + n) / (2.0 * (d - gb.z()));
    return out;
}

// ---------------------------------------------------------------------------
// full joint Hamiltonian

inline ComplexMatrix build_hamiltonian(const SystemParams& params,
                                       const HyperfineTensor& hf_ground,
                                       const HyperfineTensor& hf_excited,
                                       HamiltonianMode mode) {
    params.validate();
    if (mode == HamiltonianMode::secular_plus_soc && params.nuclear_dim == 3)
        throw std::invalid_argument(
            "build_hamiltonian: the second-order correction supports only spin-1/2 nuclei");

    const int dn = params.nuclear_dim;
    const int dim = params.joint_dim();
    const auto el = spin1_operators();
    const auto nuc = nuclear_operators(dn);
    const ComplexMatrix id_n = ComplexMatrix::Identity(dn, dn);
    const ComplexMatrix id_el = ComplexMatrix::Identity(level::count, level::count);
    const std::array<const ComplexMatrix*, 3> svec{&el.x, &el.y, &el.z};
    const std::array<const ComplexMatrix*, 3> ivec{&nuc.x, &nuc.y, &nuc.z};

    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    const Eigen::Vector3d& b = params.b_field;

    for (Manifold man : {Manifold::ground, Manifold::excited}) {
        const double d = detail::manifold_d(params, man);
        const auto& a = (man == Manifold::ground ? hf_ground : hf_excited).a;
        const ComplexMatrix sz = embed(el.z, man);
        h += d * lift(sz * sz, id_n);
        if (mode == HamiltonianMode::full) {
            for (int i = 0; i < 3; ++i)
                h += params.gamma_el * b(i) * lift(embed(*svec[i], man), id_n);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    if (a(i, j) != 0.0)
                        h += a(i, j) * lift(embed(*svec[i], man), *ivec[j]);
        } else {
            h += params.gamma_el * b.z() * lift(sz, id_n);
            for (int j = 0; j < 3; ++j)
                if (a(2, j) != 0.0) h += a(2, j) * lift(sz, *ivec[j]);
        }
    }

    // nuclear Zeeman and quadrupole act identically in every manifold
    for (int j = 0; j < 3; ++j)
        h += params.gamma_n * b(j) * lift(id_el, *ivec[j]);
    if (params.quadrupole != 0.0) h += params.quadrupole * lift(id_el, nuc.z * nuc.z);

    if (mode == HamiltonianMode::secular_plus_soc) {
        for (Manifold man : {Manifold::ground, Manifold::excited}) {
            const auto& hf = man == Manifold::ground ? hf_ground : hf_excited;
            const auto e2 = build_hsoc(params, hf, man);
            for (int ms : {-1, 0, 1}) {
                const int lvl = man == Manifold::ground ? level::ground_of(ms)
                                                        : level::excited_of(ms);
                ComplexMatrix proj = ComplexMatrix::Zero(level::count, level::count);
                proj(lvl, lvl) = 1.0;
                h += lift(proj, e2.of(ms));
            }
        }
    }
    return h;
}

// Ground Hamiltonian variant used by the precession protocols: secular terms
// everywhere, second-order correction applied to the ground manifold only.
inline ComplexMatrix build_hamiltonian_soc_ground(const SystemParams& params,
                                                  const HyperfineTensor& hf_ground,
                                                  const HyperfineTensor& hf_excited) {
    ComplexMatrix h = build_hamiltonian(params, hf_ground, hf_excited,
                                        HamiltonianMode::secular);
    const auto e2 = build_hsoc(params, hf_ground, Manifold::ground);
    for (int ms : {-1, 0, 1}) {
        ComplexMatrix proj = ComplexMatrix::Zero(level::count, level::count);
        proj(level::ground_of(ms), level::ground_of(ms)) = 1.0;
        h += kron(proj, e2.of(ms));
    }
    return h;
}

// ---------------------------------------------------------------------------
// conditional nuclear Hamiltonian and quantization axes

// Nuclear Hamiltonian conditioned on the electron sitting in ground-state
// projection m_s (constant electron energy dropped).
inline ComplexMatrix conditional_hamiltonian(const SystemParams& params,
                                             const HyperfineTensor& hf, int ms,
                                             bool include_soc) {
    params.validate();
    const auto nuc = nuclear_operators(params.nuclear_dim);
    const std::array<const ComplexMatrix*, 3> ivec{&nuc.x, &nuc.y, &nuc.z};
    ComplexMatrix h = ComplexMatrix::Zero(params.nuclear_dim, params.nuclear_dim);
    for (int j = 0; j < 3; ++j)
        h += (params.gamma_n * params.b_field(j) + ms * hf.a(2, j)) * (*ivec[j]);
    if (params.quadrupole != 0.0) h += params.quadrupole * nuc.z * nuc.z;
    if (include_soc) h += build_hsoc(params, hf, Manifold::ground).of(ms);
    return h;
}

struct QuantizationAxes {
    Eigen::Vector3d axis_ms0;   // unit vectors
    Eigen::Vector3d axis_ms1;
    double precession_rate;     // rad/us
};

namespace detail {

// Bloch vector w of a 2x2 Hamiltonian h = c0 + w . I (spin-1/2 operators).
inline Eigen::Vector3d bloch_vector(const ComplexMatrix& h) {
    const auto nuc = spin_half_operators();
    Eigen::Vector3d w;
    w.x() = 2.0 * (h * nuc.x).trace().real();
    w.y() = 2.0 * (h * nuc.y).trace().real();
    w.z() = 2.0 * (h * nuc.z).trace().real();
    return w;
}

}  // namespace detail

// Quantization axes of the nucleus for the electron in m_s = 0 and m_s = +1,
// from the secular(+correction) ground Hamiltonian, and the precession rate
// |w_0| (1 - |n0 . n1|) with |w_0| the conditional field on m_s = 0.
inline QuantizationAxes quantization_axes(const SystemParams& params,
                                          const HyperfineTensor& hf_ground,
                                          bool include_soc = true) {
    if (params.nuclear_dim != 2)
        throw std::invalid_argument("quantization_axes: requires a spin-1/2 nucleus");
    const Eigen::Vector3d w0 =
        detail::bloch_vector(conditional_hamiltonian(params, hf_ground, 0, include_soc));
    const Eigen::Vector3d w1 =
        detail::bloch_vector(conditional_hamiltonian(params, hf_ground, 1, include_soc));
    const double n0 = w0.norm(), n1 = w1.norm();
    if (n0 == 0.0 || n1 == 0.0)
        throw std::invalid_argument("quantization_axes: conditional field has zero norm");
    QuantizationAxes out;
    out.axis_ms0 = w0 / n0;
    out.axis_ms1 = w1 / n1;
    out.precession_rate = n0 * (1.0 - std::abs(out.axis_ms0.dot(out.axis_ms1)));
    return out;
}

}  // namespace nvpol
