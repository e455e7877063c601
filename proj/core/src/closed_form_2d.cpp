#include "gusd/closed_form_2d.hpp"

#include <cmath>
#include <sstream>

namespace gusd {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kBoundarySlack = 1e-12;

double gain(const RotationExampleParams& p) {
    const double a = 2.0 * p.alpha - 1.0;
    const double b = 2.0 * p.beta;
    return std::sqrt(a * a + b * b);
}

}  // namespace

void RotationExampleParams::validate() const {
    if (num_states < 2) {
        throw Error(ErrorCode::InfeasibleParameters, "rotation family needs M >= 2");
    }
    if (alpha < 0.0 || alpha > 1.0 ||
        beta * beta > alpha * (1.0 - alpha) + kBoundarySlack) {
        std::ostringstream os;
        os << "alpha = " << alpha << ", beta = " << beta
           << " violate |beta| <= sqrt(alpha (1 - alpha))";
        throw Error(ErrorCode::InfeasibleParameters, os.str());
    }
}

SymmetryOperator rotation_symmetry(int num_states, const Tolerances& tol) {
    if (num_states < 1) {
        throw Error(ErrorCode::InvalidInput, "rotation order must be >= 1");
    }
    const double theta = kPi / static_cast<double>(num_states);
    ComplexMatrix s(2, 2);
    s << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return validate_symmetry(s, num_states, tol);
}

double closed_form_pe(const RotationExampleParams& p) {
    p.validate();
    const double m = static_cast<double>(p.num_states);
    return (m - 1.0) / m - gain(p) / m;
}

BlockDiagOperator closed_form_xtilde(const RotationExampleParams& p) {
    p.validate();
    const double m = static_cast<double>(p.num_states);
    const double x = (1.0 + gain(p)) / (2.0 * m);
    std::vector<ComplexMatrix> blocks{ComplexMatrix::Constant(1, 1, x),
                                      ComplexMatrix::Constant(1, 1, x)};
    return BlockDiagOperator(BlockSpec{{1, 1}}, std::move(blocks));
}

std::optional<HermitianOperator> closed_form_povm(const RotationExampleParams& p) {
    p.validate();
    const double m = static_cast<double>(p.num_states);
    const double boundary = std::sqrt(std::max(0.0, p.alpha * (1.0 - p.alpha)));
    if (p.beta == 0.0) {
        ComplexMatrix pi0 = ComplexMatrix::Zero(2, 2);
        // Mirrored onto the second basis vector for alpha < 1/2; the error
        // formula is symmetric under alpha -> 1 - alpha.
        if (p.alpha >= 0.5) {
            pi0(0, 0) = 2.0 / m;
        } else {
            pi0(1, 1) = 2.0 / m;
        }
        return HermitianOperator(pi0);
    }
    if (std::abs(std::abs(p.beta) - boundary) <= kBoundarySlack) {
        ComplexMatrix rho(2, 2);
        rho << p.alpha, p.beta, p.beta, 1.0 - p.alpha;
        return HermitianOperator((2.0 / m) * rho);
    }
    return std::nullopt;
}

}  // namespace gusd
