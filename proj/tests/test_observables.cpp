#include "nvpol/observables.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace nvpol;

namespace {

SimState state_from_nuclear(const ComplexMatrix& rho_n) {
    // ground m_s = 0 electron (x) given nuclear state
    SimState s;
    s.nuclear_dim = static_cast<int>(rho_n.rows());
    const int dim = level::count * s.nuclear_dim;
    s.rho = ComplexMatrix::Zero(dim, dim);
    const int base = level::g_zero * s.nuclear_dim;
    s.rho.block(base, base, s.nuclear_dim, s.nuclear_dim) = rho_n;
    return s;
}

}  // namespace

TEST_CASE("nuclear polarization definition arithmetic") {
    ComplexMatrix up = ComplexMatrix::Zero(2, 2);
    up(0, 0) = 1.0;
    CHECK(nuclear_polarization(state_from_nuclear(up)) == Catch::Approx(1.0));

    CHECK(nuclear_polarization(state_from_nuclear(0.5 * ComplexMatrix::Identity(2, 2))) ==
          Catch::Approx(0.0).margin(1e-15));

    ComplexMatrix mixed = ComplexMatrix::Zero(2, 2);
    mixed(0, 0) = 0.975;
    mixed(1, 1) = 0.025;
    CHECK(nuclear_polarization(state_from_nuclear(mixed)) == Catch::Approx(0.95));
    CHECK(nuclear_polarization_signed(state_from_nuclear(mixed)) == Catch::Approx(0.95));
}

TEST_CASE("spin-1 nuclear polarization keeps its sign") {
    ComplexMatrix rho_n = ComplexMatrix::Zero(3, 3);
    rho_n(0, 0) = 0.2;
    rho_n(1, 1) = 0.3;
    rho_n(2, 2) = 0.5;
    CHECK(nuclear_polarization_signed(state_from_nuclear(rho_n)) == Catch::Approx(-0.3));
    CHECK(nuclear_polarization(state_from_nuclear(rho_n)) == Catch::Approx(0.3));
}

TEST_CASE("nuclear polarization is invariant under electronic unitaries") {
    const auto h_el = nvpol_test::random_hermitian(7, 501);
    const ComplexMatrix u = kron(expm(Complex(0, -1) * h_el), ComplexMatrix::Identity(2, 2));
    SimState s;
    s.nuclear_dim = 2;
    s.rho = nvpol_test::random_density(14, 502);
    SimState rotated = s;
    rotated.rho = u * s.rho * u.adjoint();
    CHECK(nuclear_polarization_signed(rotated) ==
          Catch::Approx(nuclear_polarization_signed(s)).margin(1e-12));
}

TEST_CASE("electron and singlet populations on simple states") {
    SimState pumped = state_from_nuclear(0.5 * ComplexMatrix::Identity(2, 2));
    CHECK(electron_polarization(pumped) == Catch::Approx(1.0));
    CHECK(singlet_population(pumped) == Catch::Approx(0.0));

    const SimState thermal = SimState::thermal(2);
    CHECK(electron_polarization(thermal) == Catch::Approx(1.0 / 3.0));

    SimState singlet;
    singlet.nuclear_dim = 2;
    singlet.rho = ComplexMatrix::Zero(14, 14);
    singlet.rho(level::singlet * 2, level::singlet * 2) = 0.5;
    singlet.rho(level::singlet * 2 + 1, level::singlet * 2 + 1) = 0.5;
    CHECK(singlet_population(singlet) == Catch::Approx(1.0));
}

TEST_CASE("populations sum to one") {
    SimState s;
    s.nuclear_dim = 2;
    s.rho = nvpol_test::random_density(14, 503);
    const auto r = read_state(s);
    double sum = 0.0;
    for (double p : r.populations) sum += p;
    CHECK(sum == Catch::Approx(1.0).margin(1e-9));
    CHECK(r.p_nuclear_abs == Catch::Approx(std::abs(r.p_nuclear_signed)));
}

TEST_CASE("conditional basis readout equals z readout when the conditional H is diagonal") {
    auto params = SystemParams::for_nucleus(Nucleus::c13, {0, 0, -1806.5});
    FamilyRegistry reg;
    const auto& fam = reg.get("H");
    // B || z, no correction: conditional H on m_s = 0 is gamma_n Bz I_z
    const ComplexMatrix basis = conditional_nuclear_basis(params, fam.ground, 0, false);
    CHECK((basis - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

    SimState s;
    s.nuclear_dim = 2;
    s.rho = nvpol_test::random_density(14, 504);
    CHECK(nuclear_polarization_signed(s, &basis) ==
          Catch::Approx(nuclear_polarization_signed(s)).margin(1e-12));
}
