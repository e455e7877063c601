#pragma once

#include <optional>
#include <vector>

#include "gusd/operators.hpp"
#include "gusd/types.hpp"

namespace gusd {

/// Geometrically uniform ensemble: M states rho_i = S^i rho_0 S^{-i} with
/// uniform priors 1/M. States are materialized eagerly while M*N^2 stays
/// below the scalar budget and are generated on demand above it.
class GUEnsemble {
  public:
    GUEnsemble(DensityOperator rho0, SymmetryOperator s, int num_states,
               std::vector<ComplexMatrix> eager_states,
               std::vector<ComplexVector> pure_words = {});

    int num_states() const { return m_; }
    Eigen::Index dim() const { return rho0_.dim(); }
    double prior() const { return 1.0 / static_cast<double>(m_); }

    const DensityOperator& rho0() const { return rho0_; }
    const SymmetryOperator& symmetry() const { return s_; }

    /// Dense rho_i; computed on demand when states are lazy.
    ComplexMatrix state(int i) const;
    bool eager() const { return !states_.empty(); }

    /// Non-empty iff every state is a known pure state |w_i><w_i|.
    const std::vector<ComplexVector>& pure_words() const { return words_; }

    std::vector<DensityOperator> states_as_densities(
        const Tolerances& tol = default_tolerances()) const;
    std::vector<double> uniform_priors() const;

  private:
    DensityOperator rho0_;
    SymmetryOperator s_;
    int m_;
    std::vector<ComplexMatrix> states_;
    std::vector<ComplexVector> words_;
};

/// States eager up to this many stored scalars (M * N^2).
inline constexpr std::size_t kEagerStateScalarBudget = std::size_t{1} << 26;

/// Generic construction from a reference state and symmetry operator of
/// matching dimension and declared order M.
GUEnsemble build_ensemble(const DensityOperator& rho0, const SymmetryOperator& s,
                          int num_states,
                          const Tolerances& tol = default_tolerances());

/// Two-dimensional family: reference state [[alpha, beta], [beta, 1-alpha]]
/// conjugated by the plane rotation through pi/M.
GUEnsemble rotation_ensemble(int num_states, double alpha, double beta,
                             const Tolerances& tol = default_tolerances());

/// Pulse-position family on (C^n)^{tensor M}: pure words with the pulse in
/// position i, cyclic-shift symmetry (an exact permutation matrix, S^M = I).
/// The word model is a stand-in for the modulation physics: pure tensor
/// products of a pulse vector and idle vectors.
GUEnsemble ppm_ensemble(int subspace_dim, int num_states, const ComplexVector& pulse,
                        const ComplexVector& idle,
                        const Tolerances& tol = default_tolerances());

/// True when pulse and idle are parallel, which collapses all PPM words onto
/// one state. Allowed as input; callers may want to warn.
bool ppm_words_degenerate(const ComplexVector& pulse, const ComplexVector& idle,
                          double tol = 1e-12);

/// (1/M) sum_i rho_i. Lies in the commutant of S.
DensityOperator average_state(const GUEnsemble& e,
                              const Tolerances& tol = default_tolerances());

/// Seeded random ensemble: rho0 = G G^H / Tr (G an N x rank complex Gaussian
/// matrix) and S = V diag(exp(2 pi i k_j / M)) V^H for a Haar-like random V
/// and random exponents k_j, so S^M = I exactly in exact arithmetic.
GUEnsemble random_ensemble(int dim, int num_states, int rank, Rng& rng,
                           const Tolerances& tol = default_tolerances());

}  // namespace gusd
