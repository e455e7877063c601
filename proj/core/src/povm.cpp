#include "gusd/povm.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace gusd {

namespace {

// Orthonormal real coordinates of a k x k Hermitian matrix (k^2 of them):
// diagonal entries, then (Re, Im) of the upper triangle scaled by sqrt(2).
// Orthonormality makes packed 2-norms equal Frobenius norms, so the
// minimum-norm least-squares solution is the minimum-Frobenius-norm C.
RealVector pack_hermitian(const ComplexMatrix& a) {
    const Eigen::Index k = a.rows();
    RealVector out(k * k);
    Eigen::Index idx = 0;
    for (Eigen::Index p = 0; p < k; ++p) out(idx++) = a(p, p).real();
    const double s = std::sqrt(2.0);
    for (Eigen::Index p = 0; p < k; ++p) {
        for (Eigen::Index q = p + 1; q < k; ++q) {
            out(idx++) = s * a(p, q).real();
            out(idx++) = s * a(p, q).imag();
        }
    }
    return out;
}

ComplexMatrix unpack_hermitian(const RealVector& x, Eigen::Index k) {
    ComplexMatrix a = ComplexMatrix::Zero(k, k);
    Eigen::Index idx = 0;
    for (Eigen::Index p = 0; p < k; ++p) a(p, p) = x(idx++);
    const double s = 1.0 / std::sqrt(2.0);
    for (Eigen::Index p = 0; p < k; ++p) {
        for (Eigen::Index q = p + 1; q < k; ++q) {
            const double re = s * x(idx++);
            const double im = s * x(idx++);
            a(p, q) = Complex(re, im);
            a(q, p) = Complex(re, -im);
        }
    }
    return a;
}

// Orthonormal Hermitian basis element b of Herm(k), same ordering as the
// packers above.
ComplexMatrix hermitian_basis_element(Eigen::Index k, Eigen::Index b) {
    ComplexMatrix e = ComplexMatrix::Zero(k, k);
    if (b < k) {
        e(b, b) = 1.0;
        return e;
    }
    Eigen::Index idx = k;
    const double s = 1.0 / std::sqrt(2.0);
    for (Eigen::Index p = 0; p < k; ++p) {
        for (Eigen::Index q = p + 1; q < k; ++q) {
            if (idx == b) {
                e(p, q) = s;
                e(q, p) = s;
                return e;
            }
            ++idx;
            if (idx == b) {
                e(p, q) = Complex(0.0, s);
                e(q, p) = Complex(0.0, -s);
                return e;
            }
            ++idx;
        }
    }
    throw Error(ErrorCode::InvalidInput, "basis index out of range");
}

// Minimum-norm least-squares coefficient matrix C such that
// sum_i V_i C V_i^H is as close to the identity as possible.
ComplexMatrix completeness_least_squares(const std::vector<ComplexMatrix>& conjugated,
                                         Eigen::Index n) {
    const Eigen::Index k = conjugated[0].cols();
    const Eigen::Index rows = n * n;
    const Eigen::Index cols = k * k;
    RealMatrix a(rows, cols);
    for (Eigen::Index b = 0; b < cols; ++b) {
        const ComplexMatrix eb = hermitian_basis_element(k, b);
        ComplexMatrix image = ComplexMatrix::Zero(n, n);
        for (const auto& vi : conjugated) image += vi * eb * vi.adjoint();
        image = 0.5 * (image + image.adjoint().eval());
        a.col(b) = pack_hermitian(image);
    }
    const RealVector target = pack_hermitian(ComplexMatrix::Identity(n, n));
    Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(a);
    const RealVector c = cod.solve(target);
    return unpack_hermitian(c, k);
}

ComplexMatrix clip_to_psd(const ComplexMatrix& c) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(c);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::DecompositionFailed, "PSD projection eigensolver failed");
    }
    const RealVector ev = es.eigenvalues().cwiseMax(0.0);
    ComplexMatrix out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    return 0.5 * (out + out.adjoint().eval());
}

}  // namespace

POVM::POVM(std::vector<ComplexMatrix> operators, const Tolerances& tol)
    : ops_(std::move(operators)) {
    if (ops_.empty()) {
        throw Error(ErrorCode::InvalidInput, "a POVM needs at least one operator");
    }
    const Eigen::Index n = ops_[0].rows();
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (auto& op : ops_) {
        if (op.rows() != n || op.cols() != n) {
            throw Error(ErrorCode::DimensionMismatch, "POVM operators differ in shape");
        }
        op = 0.5 * (op + op.adjoint().eval());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(op, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol.psd) {
            std::ostringstream os;
            os << "POVM element has eigenvalue " << es.eigenvalues().minCoeff();
            throw Error(ErrorCode::NotPSD, os.str());
        }
        sum += op;
    }
    const double resid = (sum - ComplexMatrix::Identity(n, n)).norm();
    if (resid > tol.povm) {
        std::ostringstream os;
        os << "||sum Pi_i - I||_F = " << resid;
        throw Error(ErrorCode::CompletenessViolated, os.str());
    }
}

double POVM::completeness_residual() const {
    const Eigen::Index n = dim();
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (const auto& op : ops_) sum += op;
    return (sum - ComplexMatrix::Identity(n, n)).norm();
}

HermitianOperator recover_reference_povm(const GUEnsemble& e,
                                         const HermitianOperator& x_opt,
                                         double solver_tol, const Tolerances& tol) {
    const Eigen::Index n = e.dim();
    if (x_opt.dim() != n) {
        throw Error(ErrorCode::DimensionMismatch, "X_opt dimension mismatch");
    }
    ComplexMatrix d = x_opt.matrix() - e.prior() * e.rho0().matrix();
    d = 0.5 * (d + d.adjoint().eval());

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(d);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::DecompositionFailed, "slack eigensolver failed");
    }
    const RealVector ev = es.eigenvalues();
    const double sigma_max = ev.cwiseAbs().maxCoeff();
    // D is only trusted to the solver gap, so the numerical zero floor never
    // drops below a few multiples of it even when sigma_max is small.
    const double thresh = std::max(tol.null_rel * sigma_max, 10.0 * solver_tol);
    Eigen::Index k = 0;
    while (k < n && ev(k) <= thresh) ++k;
    if (k == 0) {
        std::ostringstream os;
        os << "slack operator is strictly positive (lambda_min = " << ev(0)
           << "); X_opt looks unconverged or wrong";
        throw Error(ErrorCode::EmptyNullSpace, os.str());
    }
    ComplexMatrix v = es.eigenvectors().leftCols(k);

    const int m = e.num_states();
    auto conjugated_frames = [&](const ComplexMatrix& frame) {
        std::vector<ComplexMatrix> out;
        out.reserve(m);
        out.push_back(frame);
        const ComplexMatrix& s = e.symmetry().matrix();
        for (int i = 1; i < m; ++i) out.push_back(s * out.back());
        return out;
    };

    // Least squares over Hermitian C, PSD projection, then one refinement
    // restricted to the face the projection selected.
    std::vector<ComplexMatrix> frames = conjugated_frames(v);
    ComplexMatrix c = completeness_least_squares(frames, n);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ces(c);
    if (ces.info() != Eigen::Success) {
        throw Error(ErrorCode::DecompositionFailed, "coefficient eigensolver failed");
    }
    const RealVector cev = ces.eigenvalues();
    const double cev_scale = std::max(cev.cwiseAbs().maxCoeff(), 1e-300);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < cev.size(); ++i) {
        if (cev(i) > 1e-12 * cev_scale) keep.push_back(i);
    }

    ComplexMatrix pi0;
    if (keep.empty()) {
        pi0 = ComplexMatrix::Zero(n, n);
    } else if (static_cast<Eigen::Index>(keep.size()) == k) {
        pi0 = v * clip_to_psd(c) * v.adjoint();
    } else {
        ComplexMatrix face(k, static_cast<Eigen::Index>(keep.size()));
        for (std::size_t i = 0; i < keep.size(); ++i) {
            face.col(static_cast<Eigen::Index>(i)) = ces.eigenvectors().col(keep[i]);
        }
        const ComplexMatrix vf = v * face;
        std::vector<ComplexMatrix> face_frames = conjugated_frames(vf);
        const ComplexMatrix cf = completeness_least_squares(face_frames, n);
        pi0 = vf * clip_to_psd(cf) * vf.adjoint();
    }
    pi0 = 0.5 * (pi0 + pi0.adjoint().eval());

    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    ComplexMatrix term = pi0;
    const ComplexMatrix& s = e.symmetry().matrix();
    sum += term;
    for (int i = 1; i < m; ++i) {
        term = s * term * s.adjoint();
        sum += term;
    }
    const double resid = (sum - ComplexMatrix::Identity(n, n)).norm();
    if (resid > tol.povm) {
        std::ostringstream os;
        os << "completeness residual " << resid << " exceeds " << tol.povm
           << " after PSD projection";
        throw Error(ErrorCode::CompletenessInfeasible, os.str());
    }
    return HermitianOperator(pi0);
}

POVM expand_povm(const HermitianOperator& pi0, const SymmetryOperator& s,
                 int num_states, const Tolerances& tol) {
    if (pi0.dim() != s.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "reference operator dimension mismatch");
    }
    std::vector<ComplexMatrix> ops;
    ops.reserve(num_states);
    ops.push_back(pi0.matrix());
    for (int i = 1; i < num_states; ++i) {
        ops.push_back(s.matrix() * ops.back() * s.matrix().adjoint());
    }
    return POVM(std::move(ops), tol);
}

double success_probability(const std::vector<DensityOperator>& states,
                           const std::vector<double>& priors, const POVM& povm) {
    if (states.size() != priors.size() ||
        static_cast<int>(states.size()) != povm.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "states, priors, and POVM must have matching lengths");
    }
    double pc = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].dim() != povm.dim()) {
            throw Error(ErrorCode::DimensionMismatch, "state/POVM dimension mismatch");
        }
        pc += priors[i] *
              (states[i].matrix() * povm[static_cast<int>(i)]).trace().real();
    }
    return pc;
}

double success_probability(const GUEnsemble& e, const POVM& povm) {
    if (e.num_states() != povm.size() || e.dim() != povm.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "ensemble/POVM shape mismatch");
    }
    double pc = 0.0;
    for (int i = 0; i < e.num_states(); ++i) {
        pc += e.prior() * (e.state(i) * povm[i]).trace().real();
    }
    return pc;
}

POVM srm_povm(const std::vector<DensityOperator>& states,
              const std::vector<double>& priors, const Tolerances& tol) {
    if (states.empty() || states.size() != priors.size()) {
        throw Error(ErrorCode::DimensionMismatch, "states/priors mismatch");
    }
    const Eigen::Index n = states[0].dim();
    ComplexMatrix rbar = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].dim() != n) {
            throw Error(ErrorCode::DimensionMismatch, "states differ in dimension");
        }
        rbar += priors[i] * states[i].matrix();
    }
    rbar = 0.5 * (rbar + rbar.adjoint().eval());

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rbar);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::DecompositionFailed, "average-state eigensolver failed");
    }
    const RealVector ev = es.eigenvalues();
    const double cutoff = tol.null_rel * std::max(ev.maxCoeff(), 1e-300);
    ComplexMatrix isqrt = ComplexMatrix::Zero(n, n);
    ComplexMatrix support = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (ev(i) > cutoff) {
            const ComplexVector vi = es.eigenvectors().col(i);
            isqrt += (1.0 / std::sqrt(ev(i))) * (vi * vi.adjoint());
            support += vi * vi.adjoint();
        }
    }
    const ComplexMatrix complement_share =
        (ComplexMatrix::Identity(n, n) - support) / static_cast<double>(states.size());

    std::vector<ComplexMatrix> ops;
    ops.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        ComplexMatrix op = isqrt * (priors[i] * states[i].matrix()) * isqrt;
        op += complement_share;
        ops.push_back(0.5 * (op + op.adjoint().eval()));
    }
    return POVM(std::move(ops), tol);
}

OptimalityReport verify_optimality(const GUEnsemble& e, const POVM& povm,
                                   const HermitianOperator& x, double tol) {
    if (e.dim() != povm.dim() || e.dim() != x.dim() ||
        e.num_states() != povm.size()) {
        throw Error(ErrorCode::DimensionMismatch, "verify_optimality shape mismatch");
    }
    OptimalityReport rep;
    rep.tolerance = tol;
    rep.min_slack_eigenvalue = std::numeric_limits<double>::infinity();
    const double q = e.prior();
    for (int i = 0; i < e.num_states(); ++i) {
        ComplexMatrix slack = x.matrix() - q * e.state(i);
        slack = 0.5 * (slack + slack.adjoint().eval());
        const double left = (slack * povm[i]).norm();
        const double right = (povm[i] * slack).norm();
        rep.max_slackness_residual = std::max({rep.max_slackness_residual, left, right});
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(slack, Eigen::EigenvaluesOnly);
        rep.min_slack_eigenvalue =
            std::min(rep.min_slack_eigenvalue, es.eigenvalues().minCoeff());
    }
    rep.completeness_residual = povm.completeness_residual();
    const double pc = success_probability(e, povm);
    rep.probability_gap = std::abs(x.trace() - pc);
    rep.optimal = rep.max_slackness_residual <= tol &&
                  rep.min_slack_eigenvalue >= -tol &&
                  rep.completeness_residual <= tol && rep.probability_gap <= tol;
    return rep;
}

}  // namespace gusd
