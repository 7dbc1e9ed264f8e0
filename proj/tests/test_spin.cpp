#include "nvpol/spin.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace nvpol;

TEST_CASE("spin-1 operator conventions") {
    const auto s = spin1_operators();
    // basis order (-1, 0, +1): <m|S_z|m> = m
    CHECK(s.z(0, 0) == Complex(-1, 0));
    CHECK(s.z(1, 1) == Complex(0, 0));
    CHECK(s.z(2, 2) == Complex(1, 0));
    // S+|0> = sqrt(2) |+1>
    ComplexVector zero_state = ComplexVector::Zero(3);
    zero_state(1) = 1.0;
    const ComplexVector raised = s.plus * zero_state;
    CHECK(std::abs(raised(2) - std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(raised(0)) + std::abs(raised(1)) < 1e-15);
}

TEST_CASE("spin commutators close") {
    for (const auto& s : {spin1_operators(), spin_half_operators(), spin1_nuclear_operators()}) {
        const ComplexMatrix comm = s.x * s.y - s.y * s.x - Complex(0, 1) * s.z;
        CHECK(comm.cwiseAbs().maxCoeff() < 1e-15);
        CHECK((s.plus - (s.x + Complex(0, 1) * s.y)).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("spin-1/2 basis is (up, down)") {
    const auto i = spin_half_operators();
    CHECK(i.z(0, 0) == Complex(0.5, 0));
    CHECK(i.z(1, 1) == Complex(-0.5, 0));
    CHECK(i.plus(0, 1) == Complex(1, 0));  // I+|down> = |up>
}

TEST_CASE("embed places blocks in the documented manifold") {
    const ComplexMatrix i3 = ComplexMatrix::Identity(3, 3);
    const ComplexMatrix g = embed(i3, Manifold::ground);
    ComplexMatrix expected = ComplexMatrix::Zero(7, 7);
    expected.diagonal() << 1, 1, 1, 0, 0, 0, 0;
    CHECK(g.isApprox(expected));

    const auto s = spin1_operators();
    const ComplexMatrix ez = embed(s.z, Manifold::excited);
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j)
            if (i < 3 || i > 5 || j < 3 || j > 5) CHECK(ez(i, j) == Complex(0, 0));
    CHECK(ez(level::e_minus, level::e_minus) == Complex(-1, 0));
    CHECK(ez(level::e_plus, level::e_plus) == Complex(1, 0));
}

TEST_CASE("lift factorizes the trace") {
    const auto a = nvpol_test::random_matrix(7, 7, 201);
    const auto b = nvpol_test::random_matrix(2, 2, 202);
    CHECK(std::abs(lift(a, b).trace() - a.trace() * b.trace()) < 1e-12);
}
