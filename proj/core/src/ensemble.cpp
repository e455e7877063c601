#include "gusd/ensemble.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace gusd {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

std::vector<ComplexMatrix> materialize_states(const DensityOperator& rho0,
                                              const SymmetryOperator& s,
                                              int num_states) {
    std::vector<ComplexMatrix> states;
    states.reserve(num_states);
    states.push_back(rho0.matrix());
    const ComplexMatrix& sm = s.matrix();
    for (int i = 1; i < num_states; ++i) {
        states.push_back(sm * states.back() * sm.adjoint());
    }
    return states;
}

}  // namespace

GUEnsemble::GUEnsemble(DensityOperator rho0, SymmetryOperator s, int num_states,
                       std::vector<ComplexMatrix> eager_states,
                       std::vector<ComplexVector> pure_words)
    : rho0_(std::move(rho0)),
      s_(std::move(s)),
      m_(num_states),
      states_(std::move(eager_states)),
      words_(std::move(pure_words)) {}

ComplexMatrix GUEnsemble::state(int i) const {
    const int k = ((i % m_) + m_) % m_;
    if (!states_.empty()) return states_[k];
    if (!words_.empty()) return words_[k] * words_[k].adjoint();
    return conjugate_power(s_, k, rho0_.matrix());
}

std::vector<DensityOperator> GUEnsemble::states_as_densities(const Tolerances& tol) const {
    std::vector<DensityOperator> out;
    out.reserve(m_);
    for (int i = 0; i < m_; ++i) out.push_back(validate_density(state(i), tol));
    return out;
}

std::vector<double> GUEnsemble::uniform_priors() const {
    return std::vector<double>(m_, prior());
}

GUEnsemble build_ensemble(const DensityOperator& rho0, const SymmetryOperator& s,
                          int num_states, const Tolerances& tol) {
    if (rho0.dim() != s.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "reference state and symmetry operator dimensions differ");
    }
    if (s.order() != num_states) {
        std::ostringstream os;
        os << "symmetry operator has order " << s.order() << ", ensemble wants M = "
           << num_states;
        throw Error(ErrorCode::OrderMismatch, os.str());
    }
    const std::size_t scalars = static_cast<std::size_t>(num_states) *
                                static_cast<std::size_t>(rho0.dim()) *
                                static_cast<std::size_t>(rho0.dim());
    std::vector<ComplexMatrix> states;
    if (scalars <= kEagerStateScalarBudget) {
        states = materialize_states(rho0, s, num_states);
        const int r0 = hermitian_rank(states[0], tol.rank_rel);
        for (int i = 1; i < num_states; ++i) {
            if (hermitian_rank(states[i], tol.rank_rel) != r0) {
                throw Error(ErrorCode::NumericalBreakdown,
                            "conjugated states disagree in rank");
            }
        }
    }
    return GUEnsemble(rho0, s, num_states, std::move(states));
}

GUEnsemble rotation_ensemble(int num_states, double alpha, double beta,
                             const Tolerances& tol) {
    if (num_states < 2) {
        throw Error(ErrorCode::InvalidInput, "rotation ensemble needs M >= 2");
    }
    if (alpha < 0.0 || alpha > 1.0 ||
        beta * beta > alpha * (1.0 - alpha) + 1e-15) {
        std::ostringstream os;
        os << "alpha = " << alpha << ", beta = " << beta
           << " violate |beta| <= sqrt(alpha (1 - alpha))";
        throw Error(ErrorCode::InfeasibleParameters, os.str());
    }
    ComplexMatrix rho(2, 2);
    rho << alpha, beta, beta, 1.0 - alpha;
    const double theta = kPi / static_cast<double>(num_states);
    ComplexMatrix rot(2, 2);
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    // The PSD check must accept the boundary |beta| = sqrt(alpha(1-alpha)),
    // where one eigenvalue is an exact zero up to roundoff.
    Tolerances relaxed = tol;
    relaxed.psd = std::max(tol.psd, 1e-12);
    return build_ensemble(validate_density(rho, relaxed),
                          validate_symmetry(rot, num_states, tol), num_states, tol);
}

bool ppm_words_degenerate(const ComplexVector& pulse, const ComplexVector& idle,
                          double tol) {
    const double overlap = std::abs(pulse.dot(idle));
    return overlap >= 1.0 - tol;
}

GUEnsemble ppm_ensemble(int subspace_dim, int num_states, const ComplexVector& pulse,
                        const ComplexVector& idle, const Tolerances& tol) {
    if (subspace_dim < 2 || num_states < 2) {
        throw Error(ErrorCode::InvalidInput, "ppm ensemble needs n >= 2 and M >= 2");
    }
    if (pulse.size() != subspace_dim || idle.size() != subspace_dim) {
        throw Error(ErrorCode::DimensionMismatch, "pulse/idle dimension != n");
    }
    if (std::abs(pulse.norm() - 1.0) > 1e-9 || std::abs(idle.norm() - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidInput, "pulse and idle must be unit vectors");
    }
    double dim_d = 1.0;
    for (int i = 0; i < num_states; ++i) {
        dim_d *= subspace_dim;
        if (dim_d > static_cast<double>(tol.dimension_cap)) {
            std::ostringstream os;
            os << "n^M = " << subspace_dim << "^" << num_states << " exceeds cap "
               << tol.dimension_cap;
            throw Error(ErrorCode::DimensionCapExceeded, os.str());
        }
    }
    const Eigen::Index n = static_cast<Eigen::Index>(dim_d);

    // Word i carries the pulse in tensor position i (position 0 is the most
    // significant digit of the basis index).
    std::vector<ComplexVector> words(num_states);
    for (int w = 0; w < num_states; ++w) {
        ComplexVector v = ComplexVector::Ones(1);
        for (int pos = 0; pos < num_states; ++pos) {
            const ComplexVector& factor = (pos == w) ? pulse : idle;
            ComplexVector next(v.size() * subspace_dim);
            for (Eigen::Index a = 0; a < v.size(); ++a) {
                for (int b = 0; b < subspace_dim; ++b) {
                    next(a * subspace_dim + b) = v(a) * factor(b);
                }
            }
            v = std::move(next);
        }
        words[w] = std::move(v);
    }

    // Cyclic right-shift of the tensor factors, as a permutation of basis
    // indices written in base n: digits (d0, .., d_{M-1}) -> (d_{M-1}, d0, ..).
    ComplexMatrix s = ComplexMatrix::Zero(n, n);
    for (Eigen::Index idx = 0; idx < n; ++idx) {
        Eigen::Index rest = idx;
        Eigen::Index last = idx % subspace_dim;
        rest /= subspace_dim;
        // rest now holds digits d0..d_{M-2}; prepend the last digit.
        Eigen::Index target = last;
        Eigen::Index scale = 1;
        for (int k = 1; k < num_states; ++k) scale *= subspace_dim;
        target = last * scale + rest;
        s(target, idx) = 1.0;
    }

    DensityOperator rho0 = validate_density(words[0] * words[0].adjoint(), tol);
    SymmetryOperator sym = validate_symmetry(s, num_states, tol);

    const std::size_t scalars = static_cast<std::size_t>(num_states) *
                                static_cast<std::size_t>(n) *
                                static_cast<std::size_t>(n);
    std::vector<ComplexMatrix> states;
    if (scalars <= kEagerStateScalarBudget) {
        states.reserve(num_states);
        for (int i = 0; i < num_states; ++i) {
            states.push_back(words[i] * words[i].adjoint());
        }
    }
    return GUEnsemble(std::move(rho0), std::move(sym), num_states, std::move(states),
                      std::move(words));
}

DensityOperator average_state(const GUEnsemble& e, const Tolerances& tol) {
    const Eigen::Index n = e.dim();
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < e.num_states(); ++i) acc += e.state(i);
    acc *= e.prior();
    return validate_density(acc, tol);
}

GUEnsemble random_ensemble(int dim, int num_states, int rank, Rng& rng,
                           const Tolerances& tol) {
    if (dim < 1 || num_states < 1 || rank < 1 || rank > dim) {
        throw Error(ErrorCode::InvalidInput, "random_ensemble: bad dimensions");
    }
    ComplexMatrix g(dim, rank);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < rank; ++j) g(i, j) = rng.complex_normal();
    }
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();

    ComplexMatrix ginibre(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) ginibre(i, j) = rng.complex_normal();
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(ginibre);
    ComplexMatrix v = qr.householderQ() * ComplexMatrix::Identity(dim, dim);

    ComplexVector phases(dim);
    bool nontrivial = false;
    for (int i = 0; i < dim; ++i) {
        const auto k = rng.below(static_cast<std::uint64_t>(num_states));
        if (k != 0) nontrivial = true;
        const double ang = 2.0 * kPi * static_cast<double>(k) /
                           static_cast<double>(num_states);
        phases(i) = Complex(std::cos(ang), std::sin(ang));
    }
    if (!nontrivial && num_states > 1) phases(0) = Complex(std::cos(2.0 * kPi / num_states),
                                                           std::sin(2.0 * kPi / num_states));
    ComplexMatrix s = v * phases.asDiagonal() * v.adjoint();

    return build_ensemble(validate_density(rho, tol),
                          validate_symmetry(s, num_states, tol), num_states, tol);
}

}  // namespace gusd
