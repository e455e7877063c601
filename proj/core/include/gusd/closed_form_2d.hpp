#pragma once

#include <optional>

#include "gusd/operators.hpp"
#include "gusd/sdp.hpp"
#include "gusd/types.hpp"

namespace gusd {

/// Parameters of the solvable two-dimensional rotation family: M states
/// generated from [[alpha, beta], [beta, 1-alpha]] by the plane rotation
/// through pi/M.
struct RotationExampleParams {
    int num_states = 2;
    double alpha = 1.0;
    double beta = 0.0;

    void validate() const;
};

/// The 2x2 counterclockwise rotation through pi/M, with projective phase -1
/// for M >= 2 (the order-M power is the rotation through pi).
SymmetryOperator rotation_symmetry(int num_states,
                                   const Tolerances& tol = default_tolerances());

/// Minimum error probability of the rotation family:
/// (M-1)/M - sqrt((2 alpha - 1)^2 + (2 beta)^2) / M.
double closed_form_pe(const RotationExampleParams& p);

/// Optimal reduced dual variable: both diagonal entries equal to
/// (1 + sqrt((2 alpha - 1)^2 + (2 beta)^2)) / (2 M).
BlockDiagOperator closed_form_xtilde(const RotationExampleParams& p);

/// Reference measurement in the two regimes with a closed form: beta = 0
/// (a scaled basis projector; mirrored onto the second basis vector for
/// alpha < 1/2 by the alpha <-> 1-alpha symmetry) and
/// beta = sqrt(alpha (1-alpha)) (a scaled copy of the reference state).
/// Returns nothing when neither regime applies; callers fall back to
/// numerical recovery.
std::optional<HermitianOperator> closed_form_povm(const RotationExampleParams& p);

}  // namespace gusd
