#include "nvpol/hamiltonian.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace nvpol;

namespace {

ComplexMatrix ground_block(const ComplexMatrix& h, int dn) {
    return h.topLeftCorner(3 * dn, 3 * dn);  // manifolds never couple coherently
}

// Second-order effective nuclear Hamiltonians computed numerically from the
// non-secular coupling, with electron-only energy denominators. Independent
// of the closed-form route in build_hsoc.
ComplexMatrix brute_force_e2(const SystemParams& p, const HyperfineTensor& hf, int ms) {
    const auto el = spin1_operators();
    const auto nuc = spin_half_operators();
    const std::array<const ComplexMatrix*, 3> svec{&el.x, &el.y, &el.z};
    const std::array<const ComplexMatrix*, 3> ivec{&nuc.x, &nuc.y, &nuc.z};
    ComplexMatrix v = ComplexMatrix::Zero(6, 6);
    v += p.gamma_el * p.b_field.x() * kron(el.x, ComplexMatrix::Identity(2, 2));
    v += p.gamma_el * p.b_field.y() * kron(el.y, ComplexMatrix::Identity(2, 2));
    for (int a = 0; a < 2; ++a)
        for (int j = 0; j < 3; ++j) v += hf.a(a, j) * kron(*svec[a], *ivec[j]);
    auto block = [&](int mi, int mj) {
        return ComplexMatrix(v.block(2 * (mi + 1), 2 * (mj + 1), 2, 2));
    };
    auto energy = [&](int m) {
        return m == 0 ? 0.0 : p.d_ground + m * p.gamma_el * p.b_field.z();
    };
    ComplexMatrix e2 = ComplexMatrix::Zero(2, 2);
    for (int other : {-1, 0, 1}) {
        if (other == ms) continue;
        e2 += block(ms, other) * block(other, ms) / (energy(ms) - energy(other));
    }
    return e2;
}

}  // namespace

TEST_CASE("zero field, zero hyperfine: ground splitting D per nuclear level") {
    const auto params = SystemParams::for_nucleus(Nucleus::c13, {0, 0, 0});
    const auto h = build_hamiltonian(params, HyperfineTensor::zero(), HyperfineTensor::zero(),
                                     HamiltonianMode::full);
    const auto eig = eigh(ground_block(h, 2));
    for (int i : {0, 1}) CHECK(eig.values(i) == Catch::Approx(0.0).margin(1e-9));
    for (int i : {2, 3, 4, 5})
        CHECK(eig.values(i) == Catch::Approx(constants::d_ground).epsilon(1e-12));
}

TEST_CASE("excited m_s = 0 and -1 approach degeneracy near 510 G") {
    const auto params = SystemParams::for_nucleus(Nucleus::n15, {0, 0, 510});
    const auto h = build_hamiltonian(params, HyperfineTensor::zero(), HyperfineTensor::zero(),
                                     HamiltonianMode::full);
    const double e_minus = h(level::e_minus * 2, level::e_minus * 2).real();
    const double e_zero = h(level::e_zero * 2, level::e_zero * 2).real();
    const double gap = std::abs(e_minus - e_zero);
    CHECK(gap == Catch::Approx(two_pi * std::abs(1420.0 - 2.8 * 510.0)).epsilon(1e-10));
    CHECK(gap < two_pi * 10.0);
}

TEST_CASE("full minus secular is exactly the S_x/S_y part") {
    const auto params = SystemParams::for_nucleus(Nucleus::c13, {7, 3, 12});
    FamilyRegistry reg;
    const auto& fam = reg.get("C");
    const auto full =
        build_hamiltonian(params, fam.ground, fam.excited, HamiltonianMode::full);
    const auto secular =
        build_hamiltonian(params, fam.ground, fam.excited, HamiltonianMode::secular);
    // reconstruct the dropped part directly
    const auto el = spin1_operators();
    const auto nuc = spin_half_operators();
    const std::array<const ComplexMatrix*, 3> svec{&el.x, &el.y, &el.z};
    const std::array<const ComplexMatrix*, 3> ivec{&nuc.x, &nuc.y, &nuc.z};
    ComplexMatrix dropped = ComplexMatrix::Zero(14, 14);
    for (Manifold man : {Manifold::ground, Manifold::excited}) {
        const auto& a = (man == Manifold::ground ? fam.ground : fam.excited).a;
        for (int i : {0, 1}) {
            dropped += params.gamma_el * params.b_field(i) *
                       kron(embed(*svec[i], man), ComplexMatrix::Identity(2, 2));
            for (int j = 0; j < 3; ++j)
                dropped += a(i, j) * kron(embed(*svec[i], man), *ivec[j]);
        }
    }
    CHECK((full - secular - dropped).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("Hamiltonian is Hermitian in every mode") {
    const auto params = SystemParams::for_nucleus(Nucleus::c13, {10, 4, 0.5});
    FamilyRegistry reg;
    const auto& fam = reg.get("C");
    for (auto mode : {HamiltonianMode::full, HamiltonianMode::secular,
                      HamiltonianMode::secular_plus_soc}) {
        const auto h = build_hamiltonian(params, fam.ground, fam.excited, mode);
        CHECK(is_hermitian(h, 1e-10));
    }
    CHECK(is_hermitian(build_hamiltonian_soc_ground(params, fam.ground, fam.excited), 1e-10));
}

TEST_CASE("secular Hamiltonian commutes with total S_z") {
    const auto params = SystemParams::for_nucleus(Nucleus::c13, {10, 0, 0.5});
    FamilyRegistry reg;
    const auto& fam = reg.get("C");
    const auto h = build_hamiltonian(params, fam.ground, fam.excited, HamiltonianMode::secular);
    const auto el = spin1_operators();
    const ComplexMatrix sz_total =
        kron(embed(el.z, Manifold::ground) + embed(el.z, Manifold::excited),
             ComplexMatrix::Identity(2, 2));
    CHECK((h * sz_total - sz_total * h).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("axial field with zero hyperfine: full equals secular") {
    const auto params = SystemParams::for_nucleus(Nucleus::n15, {0, 0, 300});
    const auto f = build_hamiltonian(params, HyperfineTensor::zero(), HyperfineTensor::zero(),
                                     HamiltonianMode::full);
    const auto s = build_hamiltonian(params, HyperfineTensor::zero(), HyperfineTensor::zero(),
                                     HamiltonianMode::secular);
    CHECK((f - s).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("quadrupole term acts on the spin-1 nucleus in every manifold") {
    auto params = SystemParams::for_nucleus(Nucleus::n14, {0, 0, 0});
    const auto h = build_hamiltonian(params, HyperfineTensor::zero(), HyperfineTensor::zero(),
                                     HamiltonianMode::full);
    // nuclear basis (+1, 0, -1): Q I_z^2 shifts the outer levels on the
    // singlet exactly as on the ground levels
    const double q = constants::quadrupole_14n;
    CHECK(h(level::singlet * 3, level::singlet * 3).real() == Catch::Approx(q));
    CHECK(h(level::singlet * 3 + 1, level::singlet * 3 + 1).real() ==
          Catch::Approx(0.0).margin(1e-12));
    CHECK(h(level::g_zero * 3, level::g_zero * 3).real() == Catch::Approx(q));
    CHECK(params.nuclear_dim == 3);
    CHECK_THROWS_AS(
        build_hamiltonian(params, HyperfineTensor::zero(), HyperfineTensor::zero(),
                          HamiltonianMode::secular_plus_soc),
        std::invalid_argument);
}

TEST_CASE("correction vanishes for a diagonal tensor with axial field") {
    const auto params = SystemParams::for_nucleus(Nucleus::n15, {0, 0, 100});
    FamilyRegistry reg;
    const auto ops = build_hsoc(params, reg.get("15N").ground, Manifold::ground);
    // only scalar shifts survive (A_xx, A_yy != 0); the nuclear-operator part is zero
    for (int ms : {-1, 0, 1}) {
        const ComplexMatrix traceless =
            ops.of(ms) - ops.of(ms).trace() / 2.0 * ComplexMatrix::Identity(2, 2);
        CHECK(traceless.cwiseAbs().maxCoeff() < 1e-12);
    }
    // with A_zz only and B_perp = 0 the correction vanishes identically
    const auto azz_only = HyperfineTensor::from_ladder(two_pi * 3.0, 0, 0, 0);
    const auto ops2 = build_hsoc(params, azz_only, Manifold::ground);
    for (int ms : {-1, 0, 1}) CHECK(ops2.of(ms).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("M and N pieces are Hermitian for random symmetric tensors") {
    for (unsigned seed : {601u, 602u, 603u}) {
        const auto raw = nvpol_test::random_matrix(3, 3, seed).real();
        const auto hf = HyperfineTensor::from_matrix(
            Eigen::Matrix3d((raw + raw.transpose()) / 2.0 * two_pi));
        SystemParams params = SystemParams::for_nucleus(Nucleus::c13, {11, -4, 2});
        const auto ops = build_hsoc(params, hf, Manifold::ground);
        for (int ms : {-1, 0, 1}) CHECK(is_hermitian(ops.of(ms), 1e-12));
    }
}

TEST_CASE("closed-form correction matches brute-force perturbation theory") {
    const auto params = SystemParams::for_nucleus(Nucleus::c13, {10, 0, 0.5});
    FamilyRegistry reg;
    for (const char* fam : {"C", "H"}) {
        const auto hf = reg.get(fam).ground;
        const auto ops = build_hsoc(params, hf, Manifold::ground);
        for (int ms : {-1, 0, 1}) {
            const auto num = brute_force_e2(params, hf, ms);
            CHECK((ops.of(ms) - num).cwiseAbs().maxCoeff() < 1e-10 * two_pi);
        }
    }
}

TEST_CASE("correction is singular beyond the ground-state crossing") {
    auto params = SystemParams::for_nucleus(Nucleus::c13, {0, 0, 1100});
    FamilyRegistry reg;
    CHECK_THROWS_AS(build_hsoc(params, reg.get("C").ground, Manifold::ground),
                    std::invalid_argument);
}

TEST_CASE("quantization axes: zero hyperfine aligns both axes with B") {
    const auto params = SystemParams::for_nucleus(Nucleus::c13, {3, 0, 4});
    const auto qa = quantization_axes(params, HyperfineTensor::zero(), false);
    const Eigen::Vector3d b_hat = Eigen::Vector3d(3, 0, 4).normalized();
    CHECK((qa.axis_ms0 - b_hat).norm() < 1e-12);
    CHECK((qa.axis_ms1 - b_hat).norm() < 1e-12);
    CHECK(qa.precession_rate == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("quantization axes: orthogonal limit") {
    // B along x, strong axial tensor: n0 ~ x, n1 ~ z, rate ~ gamma_n B
    const auto params = SystemParams::for_nucleus(Nucleus::c13, {20, 0, 0});
    const auto hf = HyperfineTensor::from_ladder(two_pi * 50.0, 0, 0, 0);
    const auto qa = quantization_axes(params, hf, false);
    CHECK(std::abs(qa.axis_ms0.dot(qa.axis_ms1)) < 1e-3);
    const double gnb = std::abs(params.gamma_n) * 20.0;
    CHECK(qa.precession_rate == Catch::Approx(gnb).epsilon(1e-3));
    CHECK_THROWS_AS(
        quantization_axes(SystemParams::for_nucleus(Nucleus::c13, {0, 0, 0}),
                          HyperfineTensor::zero(), false),
        std::invalid_argument);
}

TEST_CASE("precession frequency of the full dynamics matches the conditional field") {
    // nucleus prepared along the m_s=1 axis, electron pinned in m_s=0: the
    // signal <n1 . sigma>(t) oscillates at the conditional-field magnitude
    const auto params = SystemParams::for_nucleus(Nucleus::c13, {10, 0, 0.5});
    FamilyRegistry reg;
    const auto hf = reg.get("C").ground;
    const auto h0 = conditional_hamiltonian(params, hf, 0, true);
    const auto h1 = conditional_hamiltonian(params, hf, 1, true);
    const Eigen::Vector3d w0 = 2.0 * Eigen::Vector3d((h0 * spin_half_operators().x).trace().real(),
                                                     (h0 * spin_half_operators().y).trace().real(),
                                                     (h0 * spin_half_operators().z).trace().real());
    const auto qa = quantization_axes(params, hf, true);

    const auto eig1 = eigh(h1);
    const ComplexVector psi0 = eig1.vectors.col(1);  // along +n1
    const int n_samples = 2048;
    const double total_t = 60.0;  // several precession periods
    const double dt = total_t / n_samples;
    const ComplexMatrix step = expm(Complex(0, -1) * h0, dt);
    const auto nuc = spin_half_operators();
    const ComplexMatrix n1_op = 2.0 * (qa.axis_ms1.x() * nuc.x + qa.axis_ms1.y() * nuc.y +
                                       qa.axis_ms1.z() * nuc.z);
    std::vector<double> signal(n_samples);
    ComplexVector psi = psi0;
    for (int i = 0; i < n_samples; ++i) {
        signal[i] = (psi.adjoint() * n1_op * psi)(0).real();
        psi = step * psi;
    }
    double mean = 0.0;
    for (double v : signal) mean += v;
    mean /= n_samples;
    // scan |DFT| over a frequency grid, pick the peak
    double best_w = 0.0, best_amp = -1.0;
    const double w_max = 3.0 * w0.norm();
    for (int fi = 1; fi <= 1500; ++fi) {
        const double w = w_max * fi / 1500.0;
        Complex acc = 0.0;
        for (int i = 0; i < n_samples; ++i)
            acc += (signal[i] - mean) * std::exp(Complex(0, -w * i * dt));
        if (std::abs(acc) > best_amp) {
            best_amp = std::abs(acc);
            best_w = w;
        }
    }
    CHECK(best_w == Catch::Approx(w0.norm()).epsilon(0.05));
    // the quoted rate carries the (1 - |n0 . n1|) transfer factor
    CHECK(qa.precession_rate ==
          Catch::Approx(w0.norm() * (1.0 - std::abs(qa.axis_ms0.dot(qa.axis_ms1))))
              .epsilon(1e-12));
}
