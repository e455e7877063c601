#include "gusd/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace gusd {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        std::ostringstream os;
        os << what << " must be a non-empty square matrix, got " << m.rows()
           << "x" << m.cols();
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
}

void require_finite(const ComplexMatrix& m, const char* what) {
    if (!all_finite(m)) {
        throw Error(ErrorCode::InvalidInput,
                    std::string(what) + " contains NaN or Inf entries");
    }
}

}  // namespace

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::NotPSD: return "NotPSD";
        case ErrorCode::TraceNotOne: return "TraceNotOne";
        case ErrorCode::NotUnitary: return "NotUnitary";
        case ErrorCode::NotProjectiveOrder: return "NotProjectiveOrder";
        case ErrorCode::DecompositionFailed: return "DecompositionFailed";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::OrderMismatch: return "OrderMismatch";
        case ErrorCode::InfeasibleParameters: return "InfeasibleParameters";
        case ErrorCode::DimensionCapExceeded: return "DimensionCapExceeded";
        case ErrorCode::MissingBlockSpec: return "MissingBlockSpec";
        case ErrorCode::MaxIterationsExceeded: return "MaxIterationsExceeded";
        case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
        case ErrorCode::EmptyNullSpace: return "EmptyNullSpace";
        case ErrorCode::CompletenessInfeasible: return "CompletenessInfeasible";
        case ErrorCode::CompletenessViolated: return "CompletenessViolated";
        case ErrorCode::InvalidInput: return "InvalidInput";
    }
    return "UnknownError";
}

HermitianOperator::HermitianOperator(ComplexMatrix m, const Tolerances& tol) {
    require_square(m, "Hermitian operator");
    require_finite(m, "Hermitian operator");
    const double scale = std::max(m.norm(), 1e-300);
    const double dev = (m - m.adjoint().eval()).norm();
    if (dev > tol.herm * scale) {
        std::ostringstream os;
        os << "relative deviation ||A - A^H||/||A|| = " << dev / scale
           << " exceeds " << tol.herm;
        throw Error(ErrorCode::NotHermitian, os.str());
    }
    m_ = 0.5 * (m + m.adjoint().eval());
}

RealVector HermitianOperator::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::DecompositionFailed, "Hermitian eigensolver failed");
    }
    return es.eigenvalues();
}

DensityOperator::DensityOperator(HermitianOperator op, const Tolerances& tol)
    : op_(std::move(op)) {
    const RealVector ev = op_.eigenvalues();
    if (ev.minCoeff() < -tol.psd) {
        std::ostringstream os;
        os << "most negative eigenvalue " << ev.minCoeff();
        throw Error(ErrorCode::NotPSD, os.str());
    }
    const double tr = op_.trace();
    if (std::abs(tr - 1.0) > tol.trace) {
        std::ostringstream os;
        os << "trace " << tr;
        throw Error(ErrorCode::TraceNotOne, os.str());
    }
}

int DensityOperator::rank(const Tolerances& tol) const {
    return hermitian_rank(op_.matrix(), tol.rank_rel);
}

SymmetryOperator::SymmetryOperator(ComplexMatrix m, int order, const Tolerances& tol)
    : m_(std::move(m)), order_(order) {
    require_square(m_, "symmetry operator");
    require_finite(m_, "symmetry operator");
    if (order < 1) {
        throw Error(ErrorCode::InvalidInput, "order must be >= 1");
    }
    const Eigen::Index n = m_.rows();
    const ComplexMatrix gram = m_ * m_.adjoint();
    const double unit_dev = (gram - ComplexMatrix::Identity(n, n)).norm();
    if (unit_dev > tol.unitary) {
        std::ostringstream os;
        os << "||S S^H - I||_F = " << unit_dev;
        throw Error(ErrorCode::NotUnitary, os.str());
    }
    const ComplexMatrix sm = matrix_power(m_, order);
    const Complex tr = sm.trace();
    if (std::abs(tr) < 1e-8 * static_cast<double>(n)) {
        throw Error(ErrorCode::NotProjectiveOrder,
                    "Tr(S^M) too small to fit a proportionality phase");
    }
    phase_ = tr / std::abs(tr);
    const double prop_dev = (sm - phase_ * ComplexMatrix::Identity(n, n)).norm();
    if (prop_dev > tol.unitary) {
        std::ostringstream os;
        os << "||S^M - c I||_F = " << prop_dev << " with fitted c = (" << phase_.real()
           << ", " << phase_.imag() << ")";
        throw Error(ErrorCode::NotProjectiveOrder, os.str());
    }
}

EigenStructure::EigenStructure(ComplexMatrix basis, std::vector<Complex> distinct_eigenvalues,
                               std::vector<int> multiplicities)
    : basis_(std::move(basis)),
      eigenvalues_(std::move(distinct_eigenvalues)),
      multiplicities_(std::move(multiplicities)) {
    if (eigenvalues_.size() != multiplicities_.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "eigenvalue and multiplicity lists differ in length");
    }
    const int total = std::accumulate(multiplicities_.begin(), multiplicities_.end(), 0);
    if (total != basis_.cols() || basis_.rows() != basis_.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "multiplicities do not sum to dim");
    }
    offsets_.resize(multiplicities_.size());
    int acc = 0;
    for (std::size_t j = 0; j < multiplicities_.size(); ++j) {
        offsets_[j] = acc;
        acc += multiplicities_[j];
    }
}

ComplexVector EigenStructure::repeated_eigenvalues() const {
    ComplexVector out(dim());
    Eigen::Index k = 0;
    for (std::size_t j = 0; j < eigenvalues_.size(); ++j) {
        for (int r = 0; r < multiplicities_[j]; ++r) out(k++) = eigenvalues_[j];
    }
    return out;
}

DensityOperator validate_density(const ComplexMatrix& m, const Tolerances& tol) {
    require_square(m, "density operator");
    return DensityOperator(HermitianOperator(m, tol), tol);
}

SymmetryOperator validate_symmetry(const ComplexMatrix& m, int order,
                                   const Tolerances& tol) {
    return SymmetryOperator(m, order, tol);
}

ComplexMatrix matrix_power(const ComplexMatrix& m, int k) {
    require_square(m, "matrix power base");
    if (k < 0) {
        throw Error(ErrorCode::InvalidInput, "matrix_power expects k >= 0");
    }
    ComplexMatrix result = ComplexMatrix::Identity(m.rows(), m.cols());
    ComplexMatrix base = m;
    while (k > 0) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return result;
}

EigenStructure eigenstructure(const SymmetryOperator& s, double grouping_tol,
                              const Tolerances& tol) {
    const Eigen::Index n = s.dim();
    // Schur of a normal matrix: the T factor is diagonal up to roundoff and
    // the Schur vectors are exactly orthonormal eigenvectors.
    Eigen::ComplexSchur<ComplexMatrix> schur(s.matrix(), true);
    if (schur.info() != Eigen::Success) {
        throw Error(ErrorCode::DecompositionFailed, "Schur decomposition failed");
    }
    ComplexVector lambda = schur.matrixT().diagonal();
    ComplexMatrix vectors = schur.matrixU();

    std::vector<Eigen::Index> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> angle(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double a = std::arg(lambda(i));
        if (a < 0) a += kTwoPi;
        angle[i] = a;
    }
    std::stable_sort(perm.begin(), perm.end(), [&](Eigen::Index a, Eigen::Index b) {
        return angle[a] < angle[b];
    });

    ComplexMatrix basis(n, n);
    ComplexVector sorted(n);
    std::vector<double> sorted_angle(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        basis.col(i) = vectors.col(perm[i]);
        sorted(i) = lambda(perm[i]);
        sorted_angle[i] = angle[perm[i]];
    }

    // Cluster by chaining consecutive gaps below grouping_tol.
    std::vector<int> group_start{0};
    for (Eigen::Index i = 1; i < n; ++i) {
        if (sorted_angle[i] - sorted_angle[i - 1] > grouping_tol) {
            group_start.push_back(static_cast<int>(i));
        }
    }
    std::vector<int> mult;
    for (std::size_t g = 0; g < group_start.size(); ++g) {
        const int end = (g + 1 < group_start.size()) ? group_start[g + 1]
                                                     : static_cast<int>(n);
        mult.push_back(end - group_start[g]);
    }
    // Merge across the 0 / 2pi seam.
    bool merged_seam = false;
    if (group_start.size() > 1) {
        const double seam = sorted_angle.front() + kTwoPi - sorted_angle.back();
        if (seam <= grouping_tol) {
            merged_seam = true;
        }
    }

    std::vector<Complex> values;
    std::vector<int> mults;
    std::vector<int> starts;
    if (merged_seam) {
        // Rotate the last group's columns to the front so its members sit
        // next to the first group, then merge the two.
        const int last_size = mult.back();
        ComplexMatrix rotated(n, n);
        rotated.leftCols(last_size) = basis.rightCols(last_size);
        rotated.rightCols(n - last_size) = basis.leftCols(n - last_size);
        basis = rotated;
        ComplexVector rot_vals(n);
        rot_vals.head(last_size) = sorted.tail(last_size);
        rot_vals.tail(n - last_size) = sorted.head(n - last_size);
        sorted = rot_vals;
        mult[0] += last_size;
        mult.pop_back();
    }
    int off = 0;
    for (int msize : mult) {
        starts.push_back(off);
        Complex mean = Complex(0, 0);
        for (int r = 0; r < msize; ++r) mean += sorted(off + r);
        const double norm = std::abs(mean);
        if (norm < 0.5) {
            throw Error(ErrorCode::DecompositionFailed,
                        "eigenvalue cluster has no well-defined direction");
        }
        values.push_back(mean / norm);
        mults.push_back(msize);
        off += msize;
    }

    // Re-orthonormalize within each group; the span is unchanged.
    for (std::size_t g = 0; g < mults.size(); ++g) {
        if (mults[g] < 2) continue;
        auto blockcols = basis.middleCols(starts[g], mults[g]);
        Eigen::HouseholderQR<ComplexMatrix> qr(blockcols);
        ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, mults[g]);
        basis.middleCols(starts[g], mults[g]) = q;
    }

    EigenStructure out(std::move(basis), std::move(values), std::move(mults));

    const ComplexMatrix lam = out.repeated_eigenvalues().asDiagonal();
    const double resid = (s.matrix() * out.basis() - out.basis() * lam).norm();
    if (resid > tol.eig * std::sqrt(static_cast<double>(n))) {
        std::ostringstream os;
        os << "||S U - U Lambda||_F = " << resid;
        throw Error(ErrorCode::DecompositionFailed, os.str());
    }
    return out;
}

ComplexMatrix conjugate_power(const SymmetryOperator& s, int i, const ComplexMatrix& a) {
    if (a.rows() != s.dim() || a.cols() != s.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "operator dimension does not match the symmetry operator");
    }
    const int m = s.order();
    int k = ((i % m) + m) % m;
    if (k == 0) return a;
    const ComplexMatrix sk = matrix_power(s.matrix(), k);
    return sk * a * sk.adjoint();
}

HermitianOperator conjugate_power(const SymmetryOperator& s, int i,
                                  const HermitianOperator& a) {
    return HermitianOperator(conjugate_power(s, i, a.matrix()));
}

int hermitian_rank(const ComplexMatrix& m, double rel_threshold) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
        0.5 * (m + m.adjoint().eval()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::DecompositionFailed, "rank eigensolver failed");
    }
    const RealVector ev = es.eigenvalues().cwiseAbs();
    const double cutoff = rel_threshold * std::max(ev.maxCoeff(), 1e-300);
    int rank = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > cutoff) ++rank;
    }
    return rank;
}

}  // namespace gusd
