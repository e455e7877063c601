#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gusd/ensemble.hpp"
#include "gusd/operators.hpp"
#include "gusd/types.hpp"

namespace gusd {

/// Sizes of the diagonal blocks of a block-diagonal Hermitian variable.
struct BlockSpec {
    std::vector<int> sizes;

    int total_dim() const;
    /// Number of real parameters: sum of sizes[j]^2.
    int packed_dim() const;
    std::vector<int> offsets() const;

    static BlockSpec full(int n) { return BlockSpec{{n}}; }
};

/// Hermitian operator stored as diagonal blocks; off-block entries are zero
/// by construction and never stored.
class BlockDiagOperator {
  public:
    explicit BlockDiagOperator(BlockSpec spec);  // zero blocks
    BlockDiagOperator(BlockSpec spec, std::vector<ComplexMatrix> blocks,
                      const Tolerances& tol = default_tolerances());

    const BlockSpec& spec() const { return spec_; }
    int num_blocks() const { return static_cast<int>(blocks_.size()); }
    const ComplexMatrix& block(int j) const { return blocks_[j]; }
    Eigen::Index dim() const { return spec_.total_dim(); }

    ComplexMatrix to_dense() const;
    double trace() const;

    static BlockDiagOperator identity(const BlockSpec& spec);

  private:
    BlockSpec spec_;
    std::vector<ComplexMatrix> blocks_;
};

struct SolveReport {
    double optimal_value = 0.0;  // P_c for the discrimination duals
    double p_error = 0.0;        // 1 - optimal_value
    double duality_gap = 0.0;    // certified via an explicit dual feasible point
    int iterations = 0;          // barrier rounds
    int newton_steps = 0;        // total inner steps
    double max_constraint_violation = 0.0;  // max(0, -min slack eigenvalue)
    int variable_count = 0;                 // d, real decision variables
    int equality_constraints = 0;
    int inequality_constraints = 0;
    double wall_time = 0.0;  // seconds
};

struct SolverOptions {
    double tol = 1e-8;           // duality-gap target
    int max_barrier_rounds = 200;
    int max_newton_steps = 50;   // per round
    double t_growth = 10.0;
    double fraction_to_boundary = 0.98;
    int max_dense_newton_dim = 4096;  // dense Hessian cap on d
    int max_cg_iterations = 600;
    double cg_rel_tol = 1e-11;
};

/// Thrown when the barrier loop runs out of iterations or the Newton system
/// breaks down; carries the best iterate reached and its report.
class SolveFailure : public Error {
  public:
    SolveFailure(ErrorCode code, const std::string& message, ComplexMatrix best,
                 SolveReport report)
        : Error(code, message), best_(std::move(best)), report_(report) {}

    const ComplexMatrix& best_iterate() const { return best_; }
    const SolveReport& report() const { return report_; }

  private:
    ComplexMatrix best_;
    SolveReport report_;
};

/// Core barrier engine: minimize Tr(X) over block-diagonal Hermitian X
/// subject to X >= B_k for every bound. Logarithmic-barrier path following
/// with Newton steps on the packed real parameters; the duality gap in the
/// report is certified by an explicitly constructed dual feasible point.
std::pair<ComplexMatrix, SolveReport> minimize_trace_dominating(
    const std::vector<ComplexMatrix>& lower_bounds, const BlockSpec& variable_blocks,
    const SolverOptions& opts = {});

/// General dual: minimize Tr(X) over full Hermitian X with X >= q_i rho_i.
/// Tr of the solution is the maximum probability of correct detection.
std::pair<HermitianOperator, SolveReport> solve_dp1(
    const std::vector<DensityOperator>& states, const std::vector<double>& priors,
    const SolverOptions& opts = {});
std::pair<HermitianOperator, SolveReport> solve_dp1(
    const std::vector<DensityOperator>& states, const std::vector<double>& priors,
    double tol);

/// Symmetry-reduced dual: minimize Tr over block-diagonal operators (blocks
/// sized by the eigenvalue multiplicities of S) subject to
/// Xt >= (1/M) U^H rho_0 U.
std::pair<BlockDiagOperator, SolveReport> solve_dp3(const GUEnsemble& e,
                                                    const EigenStructure& eig,
                                                    const SolverOptions& opts = {});
std::pair<BlockDiagOperator, SolveReport> solve_dp3(const GUEnsemble& e,
                                                    const EigenStructure& eig,
                                                    double tol);

/// X = U Xt U^H. Trace and spectrum carry over; the result commutes with S.
HermitianOperator lift(const BlockDiagOperator& xtilde, const EigenStructure& eig);

/// Spectral positive part: sum of lambda_k v_k v_k^H over positive
/// eigenvalues. Closed-form optimum of min Tr(X), X >= A, X >= 0.
HermitianOperator positive_part(const HermitianOperator& a);

enum class ProblemKind { PP1, PP2, DP1, DP2, DP3 };

struct VariableCounts {
    long d = 0;
    long equality = 0;
    long inequality = 0;
};

/// Real decision variables and constraint counts for each formulation.
/// DP3 requires the block specification of the symmetry eigenbasis.
VariableCounts count_variables(ProblemKind kind, int dim, int num_states,
                               const std::optional<BlockSpec>& spec = std::nullopt);

/// (1/M) sum_i S^{-i} A S^{i}: the commutant projection used by the
/// reduction theorem. Preserves the trace; the result commutes with S.
ComplexMatrix group_average(const SymmetryOperator& s, const ComplexMatrix& a);

}  // namespace gusd
