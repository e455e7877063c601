#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gusd/operators.hpp"
#include "support/test_utils.hpp"

using namespace gusd;
using gusd::testing::check_close;
using gusd::testing::random_hermitian;

namespace {

ComplexMatrix rotation2(double theta) {
    ComplexMatrix s(2, 2);
    s << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return s;
}

ComplexMatrix cyclic_shift(int n) {
    ComplexMatrix s = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) s((i + 1) % n, i) = 1.0;
    return s;
}

}  // namespace

TEST_CASE("validate_density accepts the maximally mixed state") {
    const DensityOperator rho = validate_density(0.5 * ComplexMatrix::Identity(2, 2));
    const RealVector ev = rho.hermitian().eigenvalues();
    CHECK(ev(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ev(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("validate_density accepts a mixed state with hand-checked spectrum") {
    ComplexMatrix m(2, 2);
    m << 0.8, 0.2, 0.2, 0.2;
    const DensityOperator rho = validate_density(m);
    // Characteristic polynomial roots: 1/2 +- sqrt(0.13).
    const double root = std::sqrt(0.13);
    const RealVector ev = rho.hermitian().eigenvalues();
    CHECK(ev(0) == doctest::Approx(0.5 - root).epsilon(1e-12));
    CHECK(ev(1) == doctest::Approx(0.5 + root).epsilon(1e-12));
    CHECK(rho.rank() == 2);
}

TEST_CASE("validate_density rejects indefinite and malformed input") {
    ComplexMatrix neg(2, 2);
    neg << 1.0, 0.0, 0.0, -0.01;
    CHECK_THROWS_WITH_AS(validate_density(neg), doctest::Contains("-0.01"), Error);

    ComplexMatrix nonherm(2, 2);
    nonherm << 0.0, 1.0, 0.0, 1.0;
    try {
        validate_density(nonherm);
        FAIL("expected NotHermitian");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotHermitian);
    }

    try {
        validate_density(2.0 * ComplexMatrix::Identity(3, 3));
        FAIL("expected TraceNotOne");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TraceNotOne);
    }

    CHECK_THROWS_AS(validate_density(ComplexMatrix::Zero(2, 3)), Error);
}

TEST_CASE("validate_density symmetrizes roundoff-level asymmetry") {
    ComplexMatrix m(2, 2);
    m << 0.5, Complex(0.1, 1e-13), Complex(0.1, 1e-13), 0.5;
    // Entry (1,0) should be the conjugate; the 1e-13 error is within herm tol.
    const DensityOperator rho = validate_density(m);
    check_close(rho.matrix(), rho.matrix().adjoint(), 0.0);
}

TEST_CASE("validate_symmetry fits the projective phase of the rotation") {
    const SymmetryOperator s = validate_symmetry(rotation2(M_PI / 4.0), 4);
    CHECK(std::abs(s.projective_phase() - Complex(-1.0, 0.0)) <= 1e-8);

    const SymmetryOperator id = validate_symmetry(ComplexMatrix::Identity(3, 3), 1);
    CHECK(std::abs(id.projective_phase() - Complex(1.0, 0.0)) <= 1e-12);
}

TEST_CASE("validate_symmetry rejects non-unitary and wrong-order input") {
    ComplexMatrix shear(2, 2);
    shear << 1.0, 1.0, 0.0, 1.0;
    try {
        validate_symmetry(shear, 2);
        FAIL("expected NotUnitary");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotUnitary);
    }

    try {
        validate_symmetry(rotation2(M_PI / 3.0), 4);  // S^4 is not proportional to I
        FAIL("expected NotProjectiveOrder");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotProjectiveOrder);
    }
}

TEST_CASE("eigenstructure of the rotation family") {
    for (int m : {2, 3, 5, 8}) {
        const SymmetryOperator s = validate_symmetry(rotation2(M_PI / m), m);
        const EigenStructure eig = eigenstructure(s);
        REQUIRE(eig.num_distinct() == 2);
        CHECK(eig.multiplicities() == std::vector<int>{1, 1});
        const Complex expected = std::polar(1.0, M_PI / m);
        CHECK(std::abs(eig.distinct_eigenvalues()[0] - expected) <= 1e-12);
        CHECK(std::abs(eig.distinct_eigenvalues()[1] - std::conj(expected)) <= 1e-12);
    }
}

TEST_CASE("eigenstructure of the identity collapses to one block") {
    const SymmetryOperator s = validate_symmetry(ComplexMatrix::Identity(5, 5), 1);
    const EigenStructure eig = eigenstructure(s);
    REQUIRE(eig.num_distinct() == 1);
    CHECK(eig.multiplicities() == std::vector<int>{5});
    CHECK(std::abs(eig.distinct_eigenvalues()[0] - Complex(1.0, 0.0)) <= 1e-12);
    // U must still be unitary.
    check_close(eig.basis().adjoint() * eig.basis(), ComplexMatrix::Identity(5, 5),
                1e-12);
}

TEST_CASE("eigenstructure of the cyclic shift has the fourth roots of unity") {
    const SymmetryOperator s = validate_symmetry(cyclic_shift(4), 4);
    const EigenStructure eig = eigenstructure(s);
    REQUIRE(eig.num_distinct() == 4);
    CHECK(eig.multiplicities() == std::vector<int>{1, 1, 1, 1});
    for (int k = 0; k < 4; ++k) {
        const Complex expect = std::polar(1.0, 2.0 * M_PI * k / 4.0);
        CHECK(std::abs(eig.distinct_eigenvalues()[k] - expect) <= 1e-12);
    }
    const ComplexMatrix lam = eig.repeated_eigenvalues().asDiagonal();
    CHECK((s.matrix() * eig.basis() - eig.basis() * lam).norm() <= 1e-12);
}

TEST_CASE("eigenstructure reconstructs S and sums multiplicities") {
    Rng rng(7);
    for (int trial = 0; trial < 4; ++trial) {
        const int n = 3 + static_cast<int>(rng.below(4));
        const int m = 2 + static_cast<int>(rng.below(4));
        GUEnsemble e = random_ensemble(n, m, 1 + static_cast<int>(rng.below(n)), rng);
        const EigenStructure eig = eigenstructure(e.symmetry());
        int total = 0;
        for (int mult : eig.multiplicities()) total += mult;
        CHECK(total == n);
        for (const Complex& lam : eig.distinct_eigenvalues()) {
            CHECK(std::abs(std::abs(lam) - 1.0) <= 1e-8);
        }
        const ComplexMatrix rebuilt = eig.basis() *
                                      eig.repeated_eigenvalues().asDiagonal() *
                                      eig.basis().adjoint();
        CHECK((e.symmetry().matrix() - rebuilt).norm() <=
              1e3 * kMachineEpsilon * n + 1e-12);
    }
}

TEST_CASE("conjugate_power basics") {
    const SymmetryOperator s = validate_symmetry(rotation2(M_PI / 2.0), 2);
    const HermitianOperator a(ComplexMatrix((ComplexMatrix(2, 2) << 1, 0, 0, 0).finished()));

    check_close(conjugate_power(s, 0, a).matrix(), a.matrix(), 0.0);

    ComplexMatrix expect(2, 2);
    expect << 0, 0, 0, 1;
    check_close(conjugate_power(s, 1, a).matrix(), expect, 1e-14);

    const HermitianOperator eye(ComplexMatrix::Identity(2, 2));
    check_close(conjugate_power(s, 1, eye).matrix(), eye.matrix(), 1e-14);
}

TEST_CASE("conjugate_power preserves trace and spectrum") {
    Rng rng(11);
    const SymmetryOperator s = validate_symmetry(cyclic_shift(5), 5);
    for (int trial = 0; trial < 6; ++trial) {
        const ComplexMatrix a = random_hermitian(5, rng);
        for (int i = 0; i < 5; ++i) {
            const ComplexMatrix b = conjugate_power(s, i, a);
            CHECK(std::abs(b.trace().real() - a.trace().real()) <=
                  10 * kMachineEpsilon * 5 * (1.0 + a.norm()));
            CHECK((gusd::testing::spectrum(a) - gusd::testing::spectrum(b)).norm() <=
                  1e-12 * (1.0 + a.norm()));
        }
        // Exponents reduce modulo the order.
        check_close(conjugate_power(s, 7, a), conjugate_power(s, 2, a), 1e-12);
    }
}

TEST_CASE("conjugate_power rejects mismatched dimensions") {
    const SymmetryOperator s = validate_symmetry(rotation2(M_PI / 2.0), 2);
    const HermitianOperator a(ComplexMatrix::Identity(3, 3));
    CHECK_THROWS_AS(conjugate_power(s, 1, a), Error);
}
