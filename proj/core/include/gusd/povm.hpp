#pragma once

#include <vector>

#include "gusd/ensemble.hpp"
#include "gusd/operators.hpp"
#include "gusd/types.hpp"

namespace gusd {

/// Positive operator-valued measure: M operators, each PSD within tolerance,
/// summing to the identity within the completeness tolerance.
class POVM {
  public:
    POVM(std::vector<ComplexMatrix> operators,
         const Tolerances& tol = default_tolerances());

    int size() const { return static_cast<int>(ops_.size()); }
    Eigen::Index dim() const { return ops_.empty() ? 0 : ops_[0].rows(); }
    const ComplexMatrix& operator[](int i) const { return ops_[i]; }
    const std::vector<ComplexMatrix>& operators() const { return ops_; }

    double completeness_residual() const;

  private:
    std::vector<ComplexMatrix> ops_;
};

/// Reference measurement operator from a converged dual optimum, via the
/// slackness conditions: Pi_0 is supported on the numerical null space of
/// D = X_opt - (1/M) rho_0 and chosen so the conjugated family sums to the
/// identity. The completeness system is solved in least squares over the
/// Hermitian coefficient matrix, projected onto the PSD cone, and refined
/// once on the face found; the minimum-norm solution is taken when the
/// system is underdetermined.
HermitianOperator recover_reference_povm(const GUEnsemble& e,
                                         const HermitianOperator& x_opt,
                                         double solver_tol,
                                         const Tolerances& tol = default_tolerances());

/// Conjugated family Pi_i = S^i Pi_0 S^{-i}, validated as a POVM.
POVM expand_povm(const HermitianOperator& pi0, const SymmetryOperator& s,
                 int num_states, const Tolerances& tol = default_tolerances());

/// P_c = sum_i q_i Tr(rho_i Pi_i).
double success_probability(const std::vector<DensityOperator>& states,
                           const std::vector<double>& priors, const POVM& povm);
double success_probability(const GUEnsemble& e, const POVM& povm);

/// Square-root measurement: Pi_i = rbar^{-1/2} q_i rho_i rbar^{-1/2} on the
/// support of the average state rbar, with the orthogonal complement of the
/// support split evenly to restore completeness on the full space.
POVM srm_povm(const std::vector<DensityOperator>& states,
              const std::vector<double>& priors,
              const Tolerances& tol = default_tolerances());

struct OptimalityReport {
    double max_slackness_residual = 0.0;   // max over i, sides of ||(X-q_i rho_i) Pi_i||_F
    double min_slack_eigenvalue = 0.0;     // min over i of lambda_min(X - q_i rho_i)
    double completeness_residual = 0.0;    // ||sum Pi_i - I||_F
    double probability_gap = 0.0;          // |Tr(X) - P_c(povm)|
    double tolerance = 0.0;
    bool optimal = false;
};

/// Diagnostic check of the slackness equalities, dual feasibility,
/// completeness, and the value match between Tr(X) and the POVM's success
/// probability. Never throws on a bad measurement; the verdict reports it.
OptimalityReport verify_optimality(const GUEnsemble& e, const POVM& povm,
                                   const HermitianOperator& x, double tol);

}  // namespace gusd
