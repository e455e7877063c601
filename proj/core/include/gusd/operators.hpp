#pragma once

#include <complex>
#include <vector>

#include "gusd/types.hpp"

namespace gusd {

/// Hermitian matrix on an N-dimensional complex space. Construction
/// symmetrizes the input as (A + A^H)/2 when the deviation is within the
/// relative tolerance and rejects it otherwise.
class HermitianOperator {
  public:
    explicit HermitianOperator(ComplexMatrix m,
                               const Tolerances& tol = default_tolerances());

    Eigen::Index dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }
    double trace() const { return m_.trace().real(); }

    /// Eigenvalues in ascending order.
    RealVector eigenvalues() const;

  private:
    ComplexMatrix m_;
};

/// PSD unit-trace Hermitian operator: a (possibly mixed) quantum state.
class DensityOperator {
  public:
    explicit DensityOperator(HermitianOperator op,
                             const Tolerances& tol = default_tolerances());

    Eigen::Index dim() const { return op_.dim(); }
    const ComplexMatrix& matrix() const { return op_.matrix(); }
    const HermitianOperator& hermitian() const { return op_; }

    /// Rank under the scale-invariant threshold of the tolerance set.
    int rank(const Tolerances& tol = default_tolerances()) const;

  private:
    HermitianOperator op_;
};

/// Unitary S with projective order M: S^M = c I for a unit-modulus scalar c.
/// The identity is relaxed to a projective one because conjugation orbits are
/// invariant under the global phase.
class SymmetryOperator {
  public:
    SymmetryOperator(ComplexMatrix m, int order,
                     const Tolerances& tol = default_tolerances());

    Eigen::Index dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }
    int order() const { return order_; }
    Complex projective_phase() const { return phase_; }

  private:
    ComplexMatrix m_;
    int order_;
    Complex phase_;
};

/// Eigenbasis of a symmetry operator with eigenvalues clustered into distinct
/// groups. Column j of basis() pairs with the group containing index j; the
/// first multiplicities()[0] columns belong to eigenvalue 0, and so on.
class EigenStructure {
  public:
    EigenStructure(ComplexMatrix basis, std::vector<Complex> distinct_eigenvalues,
                   std::vector<int> multiplicities);

    Eigen::Index dim() const { return basis_.rows(); }
    const ComplexMatrix& basis() const { return basis_; }
    const std::vector<Complex>& distinct_eigenvalues() const { return eigenvalues_; }
    const std::vector<int>& multiplicities() const { return multiplicities_; }
    const std::vector<int>& block_offsets() const { return offsets_; }
    int num_distinct() const { return static_cast<int>(eigenvalues_.size()); }

    /// Diagonal of eigenvalues repeated with multiplicity.
    ComplexVector repeated_eigenvalues() const;

  private:
    ComplexMatrix basis_;
    std::vector<Complex> eigenvalues_;
    std::vector<int> multiplicities_;
    std::vector<int> offsets_;
};

/// Validates a density operator: square, Hermitian within tolerance
/// (symmetrized), eigenvalues >= -psd tolerance, unit trace.
DensityOperator validate_density(const ComplexMatrix& m,
                                 const Tolerances& tol = default_tolerances());

/// Validates a symmetry operator of declared order M: unitarity, then S^M
/// proportional to the identity. The best unit-modulus proportionality scalar
/// is fitted from Tr(S^M)/N and stored.
SymmetryOperator validate_symmetry(const ComplexMatrix& m, int order,
                                   const Tolerances& tol = default_tolerances());

/// Full eigendecomposition of the unitary S. Eigenvalues are sorted by
/// principal angle in [0, 2pi), clustered when closer than grouping_tol
/// radians (including across the 0/2pi seam), and the eigenvectors of each
/// cluster are re-orthonormalized.
EigenStructure eigenstructure(const SymmetryOperator& s,
                              double grouping_tol = default_tolerances().grouping,
                              const Tolerances& tol = default_tolerances());

/// S^i A S^{-i}. The exponent is reduced modulo the projective order, under
/// which conjugation is exactly periodic.
HermitianOperator conjugate_power(const SymmetryOperator& s, int i,
                                  const HermitianOperator& a);
ComplexMatrix conjugate_power(const SymmetryOperator& s, int i,
                              const ComplexMatrix& a);

/// M^k by repeated squaring, k >= 0.
ComplexMatrix matrix_power(const ComplexMatrix& m, int k);

/// Rank of a Hermitian matrix under the relative singular-value threshold.
int hermitian_rank(const ComplexMatrix& m, double rel_threshold);

}  // namespace gusd
