#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gusd/sdp.hpp"
#include "support/test_utils.hpp"

using namespace gusd;
using gusd::testing::check_close;
using gusd::testing::random_density_matrix;
using gusd::testing::random_hermitian;

TEST_CASE("count_variables reproduces the complexity table") {
    CHECK(count_variables(ProblemKind::PP1, 2, 3).d == 12);
    CHECK(count_variables(ProblemKind::PP1, 2, 3).equality == 1);
    CHECK(count_variables(ProblemKind::PP1, 2, 3).inequality == 3);

    const auto pp2 = count_variables(ProblemKind::PP2, 5, 7);
    CHECK(pp2.d == 25);
    CHECK(pp2.equality == 1);
    CHECK(pp2.inequality == 1);

    const auto dp1 = count_variables(ProblemKind::DP1, 4, 6);
    CHECK(dp1.d == 16);
    CHECK(dp1.equality == 0);
    CHECK(dp1.inequality == 6);

    const auto dp2 = count_variables(ProblemKind::DP2, 4, 9);
    CHECK(dp2.d == 16);
    CHECK(dp2.equality == 0);
    CHECK(dp2.inequality == 2);

    const auto dp3 = count_variables(ProblemKind::DP3, 2, 5, BlockSpec{{1, 1}});
    CHECK(dp3.d == 2);
    CHECK(dp3.equality == 0);
    CHECK(dp3.inequality == 1);

    const auto big = count_variables(ProblemKind::DP3, 7, 3, BlockSpec{{3, 2, 2}});
    CHECK(big.d == 9 + 4 + 4);

    try {
        count_variables(ProblemKind::DP3, 4, 4);
        FAIL("expected MissingBlockSpec");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingBlockSpec);
    }
}

TEST_CASE("positive_part on pinned cases") {
    ComplexMatrix d(2, 2);
    d << 1, 0, 0, -1;
    const HermitianOperator plus = positive_part(HermitianOperator(d));
    ComplexMatrix expect(2, 2);
    expect << 1, 0, 0, 0;
    check_close(plus.matrix(), expect, 1e-14);

    ComplexMatrix offdiag(2, 2);
    offdiag << 0, 1, 1, 0;
    const HermitianOperator half = positive_part(HermitianOperator(offdiag));
    ComplexMatrix expect_half(2, 2);
    expect_half << 0.5, 0.5, 0.5, 0.5;
    check_close(half.matrix(), expect_half, 1e-14);
    CHECK(half.trace() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("positive_part dominates the input and stays PSD") {
    Rng rng(21);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(5));
        const ComplexMatrix a = random_hermitian(n, rng);
        const HermitianOperator plus = positive_part(HermitianOperator(a));
        CHECK(gusd::testing::spectrum(plus.matrix()).minCoeff() >= -1e-12);
        CHECK(gusd::testing::spectrum(plus.matrix() - a).minCoeff() >= -1e-12);
        // A already PSD stays untouched.
        const ComplexMatrix psd = a * a.adjoint() / std::max(1.0, a.norm());
        check_close(positive_part(HermitianOperator(ComplexMatrix(psd))).matrix(), psd,
                    1e-10);
    }
}

TEST_CASE("solve_dp1 on a single state returns that state") {
    ComplexMatrix m(3, 3);
    Rng rng(23);
    m = random_density_matrix(3, 3, rng);
    auto [x, report] = solve_dp1({validate_density(m)}, {1.0});
    CHECK(report.optimal_value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(report.duality_gap <= 1e-8);
    CHECK((x.matrix() - m).norm() <= 1e-5);
    CHECK(report.variable_count == 9);
    CHECK(report.inequality_constraints == 1);
}

TEST_CASE("solve_dp1 on identical states is blind guessing") {
    Rng rng(29);
    const ComplexMatrix m = random_density_matrix(3, 2, rng);
    const DensityOperator rho = validate_density(m);
    const int num = 4;
    std::vector<DensityOperator> states(num, rho);
    std::vector<double> priors(num, 1.0 / num);
    auto [x, report] = solve_dp1(states, priors);
    CHECK(report.optimal_value == doctest::Approx(0.25).epsilon(1e-7));
}

TEST_CASE("solve_dp1 matches the closed-form rotation error probability") {
    GUEnsemble e = rotation_ensemble(3, 0.8, 0.2);
    auto [x, report] = solve_dp1(e.states_as_densities(), e.uniform_priors());
    // (M-1)/M - sqrt((2a-1)^2 + (2b)^2)/M at M=3, a=0.8, b=0.2.
    const double expected_pe = 0.42629658163573404;
    CHECK(report.p_error == doctest::Approx(expected_pe).epsilon(1e-6));
    CHECK(report.duality_gap <= 1e-8);
    CHECK(report.duality_gap >= -1e-12);
    CHECK(report.max_constraint_violation <= 1e-8);
}

TEST_CASE("solve_dp3 matches the closed-form reduced optimum") {
    for (const auto& [m, alpha, beta] :
         {std::tuple{2, 1.0, 0.0}, std::tuple{3, 0.8, 0.2}, std::tuple{5, 0.6, 0.3},
          std::tuple{4, 0.5, 0.5}}) {
        GUEnsemble e = rotation_ensemble(m, alpha, beta);
        const EigenStructure eig = eigenstructure(e.symmetry());
        auto [xt, report] = solve_dp3(e, eig);
        const double gain =
            std::sqrt((2 * alpha - 1) * (2 * alpha - 1) + 4 * beta * beta);
        const double expected = (1.0 + gain) / m;
        CHECK(report.optimal_value == doctest::Approx(expected).epsilon(1e-7));
        CHECK(report.variable_count == 2);
        CHECK(report.inequality_constraints == 1);
        CHECK(report.equality_constraints == 0);
        CHECK(xt.spec().sizes == std::vector<int>{1, 1});
    }
}

TEST_CASE("solve_dp3 with the identity symmetry is a single full block") {
    Rng rng(31);
    const ComplexMatrix m = random_density_matrix(3, 3, rng);
    const DensityOperator rho = validate_density(m);
    const SymmetryOperator s = validate_symmetry(ComplexMatrix::Identity(3, 3), 4);
    GUEnsemble e = build_ensemble(rho, s, 4);
    const EigenStructure eig = eigenstructure(s);
    auto [xt, report] = solve_dp3(e, eig);
    CHECK(report.optimal_value == doctest::Approx(0.25).epsilon(1e-7));
    CHECK(report.variable_count == 9);
}

TEST_CASE("cross-solver agreement on random ensembles") {
    Rng rng(37);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(4));
        const int m = 2 + static_cast<int>(rng.below(4));
        const int rank = 1 + static_cast<int>(rng.below(n));
        GUEnsemble e = random_ensemble(n, m, rank, rng);
        auto [x1, rep1] = solve_dp1(e.states_as_densities(), e.uniform_priors());
        auto [x3, rep3] = solve_dp3(e, eigenstructure(e.symmetry()));
        CHECK(std::abs(rep1.optimal_value - rep3.optimal_value) <= 2e-8);
    }
}

TEST_CASE("optimal value is invariant under cyclic relabeling") {
    Rng rng(41);
    GUEnsemble e = random_ensemble(3, 4, 2, rng);
    auto states = e.states_as_densities();
    auto priors = e.uniform_priors();
    auto [x0, rep0] = solve_dp1(states, priors);
    std::rotate(states.begin(), states.begin() + 1, states.end());
    auto [x1, rep1] = solve_dp1(states, priors);
    CHECK(rep0.optimal_value == doctest::Approx(rep1.optimal_value).epsilon(2e-8));
}

TEST_CASE("lift preserves trace and spectrum and lands in the commutant") {
    GUEnsemble e = rotation_ensemble(4, 0.7, 0.2);
    const EigenStructure eig = eigenstructure(e.symmetry());

    const BlockDiagOperator ident = BlockDiagOperator::identity(BlockSpec{{1, 1}});
    check_close(lift(ident, eig).matrix(), ComplexMatrix::Identity(2, 2), 1e-13);

    auto [xt, report] = solve_dp3(e, eig);
    const HermitianOperator x = lift(xt, eig);
    CHECK(std::abs(x.trace() - xt.trace()) <= 10 * kMachineEpsilon * e.dim());
    const ComplexMatrix xs = x.matrix() * e.symmetry().matrix();
    const ComplexMatrix sx = e.symmetry().matrix() * x.matrix();
    CHECK((xs - sx).norm() <= 1e-8);
    CHECK((gusd::testing::spectrum(x.matrix()) -
           gusd::testing::spectrum(xt.to_dense()))
              .norm() <= 1e3 * kMachineEpsilon * (1.0 + x.matrix().norm()));
}

TEST_CASE("barrier solve agrees with the positive-part oracle") {
    Rng rng(43);
    SolverOptions opts;
    opts.tol = 1e-8;
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(7));
        const ComplexMatrix a = random_hermitian(n, rng);
        auto [x, report] = minimize_trace_dominating(
            {a, ComplexMatrix::Zero(n, n)}, BlockSpec::full(n), opts);
        const double oracle = positive_part(HermitianOperator(a)).trace();
        CHECK(std::abs(x.trace().real() - oracle) <= 2e-8 * (1.0 + std::abs(oracle)));
    }
}

TEST_CASE("group averaging preserves trace, feasibility, and commutes") {
    Rng rng(47);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(4));
        const int m = 2 + static_cast<int>(rng.below(5));
        GUEnsemble e = random_ensemble(n, m, 1 + static_cast<int>(rng.below(n)), rng);
        const ComplexMatrix& s = e.symmetry().matrix();

        // A generic feasible point of the unreduced dual.
        ComplexMatrix x = ComplexMatrix::Zero(n, n);
        for (int i = 0; i < m; ++i) x += e.prior() * e.state(i);
        const ComplexMatrix noise = random_hermitian(n, rng, 0.1);
        x += noise * noise.adjoint();
        x += 0.05 * ComplexMatrix::Identity(n, n);

        const ComplexMatrix avg = group_average(e.symmetry(), x);
        CHECK(std::abs(avg.trace().real() - x.trace().real()) <=
              10 * kMachineEpsilon * n * m * (1.0 + x.norm()));
        CHECK((avg * s - s * avg).norm() <= 1e-10);
        const ComplexMatrix slack = avg - e.prior() * e.rho0().matrix();
        CHECK(gusd::testing::spectrum(slack).minCoeff() >= -1e-9);

        // Commuting feasible points are feasible for every conjugated bound.
        for (int i = 0; i < m; ++i) {
            const ComplexMatrix si = conjugate_power(e.symmetry(), i, slack);
            CHECK(gusd::testing::spectrum(si).minCoeff() >= -1e-9);
        }
    }
}

TEST_CASE("the iterative and dense Newton paths agree") {
    Rng rng(53);
    GUEnsemble e = random_ensemble(6, 3, 2, rng);
    const EigenStructure eig = eigenstructure(e.symmetry());
    SolverOptions dense;
    auto [xa, ra] = solve_dp3(e, eig, dense);
    SolverOptions iterative;
    iterative.max_dense_newton_dim = 1;  // force the CG path
    auto [xb, rb] = solve_dp3(e, eig, iterative);
    CHECK(std::abs(ra.optimal_value - rb.optimal_value) <= 2e-8);
    CHECK(ra.variable_count == rb.variable_count);
}

TEST_CASE("multi-bound problems beyond the dense cap are rejected") {
    Rng rng(59);
    const ComplexMatrix a = random_density_matrix(4, 4, rng);
    const ComplexMatrix b = random_density_matrix(4, 4, rng);
    SolverOptions opts;
    opts.max_dense_newton_dim = 1;
    try {
        minimize_trace_dominating({a, b}, BlockSpec::full(4), opts);
        FAIL("expected DimensionCapExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionCapExceeded);
    }
}

TEST_CASE("exhausting the barrier budget reports the best iterate") {
    GUEnsemble e = rotation_ensemble(3, 0.9, 0.1);
    SolverOptions opts;
    opts.max_barrier_rounds = 2;
    try {
        solve_dp1(e.states_as_densities(), e.uniform_priors(), opts);
        FAIL("expected SolveFailure");
    } catch (const SolveFailure& f) {
        CHECK(f.code() == ErrorCode::MaxIterationsExceeded);
        CHECK(f.best_iterate().rows() == 2);
        // The best iterate is still strictly feasible.
        for (int i = 0; i < 3; ++i) {
            const ComplexMatrix slack =
                f.best_iterate() - e.prior() * e.state(i);
            CHECK(gusd::testing::spectrum(slack).minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("packed dimension matches the block spec arithmetic") {
    CHECK(BlockSpec{{1, 1}}.packed_dim() == 2);
    CHECK(BlockSpec{{3, 2, 2}}.packed_dim() == 17);
    CHECK(BlockSpec::full(5).packed_dim() == 25);
    CHECK(BlockSpec{{2, 1}}.total_dim() == 3);
    CHECK(BlockSpec{{2, 1}}.offsets() == std::vector<int>{0, 2});
}
