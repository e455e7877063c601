#include "gusd/sdp.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace gusd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Centering thresholds on the squared Newton decrement. Re-centering after a
// t-jump only needs lambda <= 1/4; the final stage polishes further so the
// certified gap sits at nu/t up to a negligible factor.
constexpr double kCenterDecrementSq = 0.0625;
constexpr double kPolishDecrementSq = 1e-8;

struct BlockLayout {
    std::vector<int> sizes;
    std::vector<int> offsets;
    int n = 0;

    explicit BlockLayout(const BlockSpec& spec) : sizes(spec.sizes) {
        offsets.reserve(sizes.size());
        for (int s : sizes) {
            if (s <= 0) throw Error(ErrorCode::InvalidInput, "block size must be positive");
            offsets.push_back(n);
            n += s;
        }
        if (n == 0) throw Error(ErrorCode::InvalidInput, "empty block specification");
    }
    int num_blocks() const { return static_cast<int>(sizes.size()); }
};

using Blocks = std::vector<ComplexMatrix>;

Blocks zero_blocks(const BlockLayout& lay) {
    Blocks b;
    b.reserve(lay.num_blocks());
    for (int s : lay.sizes) b.push_back(ComplexMatrix::Zero(s, s));
    return b;
}

Blocks identity_blocks(const BlockLayout& lay, double scale) {
    Blocks b;
    b.reserve(lay.num_blocks());
    for (int s : lay.sizes) b.push_back(scale * ComplexMatrix::Identity(s, s));
    return b;
}

ComplexMatrix blocks_to_dense(const BlockLayout& lay, const Blocks& b) {
    ComplexMatrix out = ComplexMatrix::Zero(lay.n, lay.n);
    for (int j = 0; j < lay.num_blocks(); ++j) {
        out.block(lay.offsets[j], lay.offsets[j], lay.sizes[j], lay.sizes[j]) = b[j];
    }
    return out;
}

Blocks extract_diag_blocks(const BlockLayout& lay, const ComplexMatrix& m) {
    Blocks out;
    out.reserve(lay.num_blocks());
    for (int j = 0; j < lay.num_blocks(); ++j) {
        out.push_back(m.block(lay.offsets[j], lay.offsets[j], lay.sizes[j], lay.sizes[j]));
    }
    return out;
}

double blocks_trace(const Blocks& b) {
    double tr = 0.0;
    for (const auto& m : b) tr += m.trace().real();
    return tr;
}

// Real inner product Tr(A B) for Hermitian block operators.
double blocks_dot(const Blocks& a, const Blocks& b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        acc += a[j].conjugate().cwiseProduct(b[j]).sum().real();
    }
    return acc;
}

void blocks_axpy(Blocks& y, double alpha, const Blocks& x) {
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += alpha * x[j];
}

void hermitize(Blocks& b) {
    for (auto& m : b) m = 0.5 * (m + m.adjoint().eval());
}

// Packed real coordinates of a block-diagonal Hermitian matrix: per block,
// the real diagonal first, then (Re, Im) of each upper-triangle entry. The
// packed length is exactly sum of sizes^2 — the d of the complexity table.
struct BasisEntry {
    enum Kind : unsigned char { Diag = 0, Re = 1, Im = 2 } kind;
    int gp;  // global row
    int gq;  // global col (gp < gq for off-diagonal kinds)
};

std::vector<BasisEntry> enumerate_basis(const BlockLayout& lay) {
    std::vector<BasisEntry> basis;
    for (int j = 0; j < lay.num_blocks(); ++j) {
        const int off = lay.offsets[j];
        const int m = lay.sizes[j];
        for (int p = 0; p < m; ++p) basis.push_back({BasisEntry::Diag, off + p, off + p});
        for (int p = 0; p < m; ++p) {
            for (int q = p + 1; q < m; ++q) {
                basis.push_back({BasisEntry::Re, off + p, off + q});
                basis.push_back({BasisEntry::Im, off + p, off + q});
            }
        }
    }
    return basis;
}

Blocks unpack(const BlockLayout& lay, const std::vector<BasisEntry>& basis,
              const RealVector& x) {
    Blocks out = zero_blocks(lay);
    std::vector<int> owner(lay.n);
    for (int j = 0; j < lay.num_blocks(); ++j) {
        for (int r = 0; r < lay.sizes[j]; ++r) owner[lay.offsets[j] + r] = j;
    }
    for (std::size_t a = 0; a < basis.size(); ++a) {
        const BasisEntry& e = basis[a];
        const int j = owner[e.gp];
        const int p = e.gp - lay.offsets[j];
        const int q = e.gq - lay.offsets[j];
        switch (e.kind) {
            case BasisEntry::Diag:
                out[j](p, p) += x(a);
                break;
            case BasisEntry::Re:
                out[j](p, q) += x(a);
                out[j](q, p) += x(a);
                break;
            case BasisEntry::Im:
                out[j](p, q) += Complex(0.0, x(a));
                out[j](q, p) += Complex(0.0, -x(a));
                break;
        }
    }
    return out;
}

// Tr(G E_a) for a basis element against a dense Hermitian G.
double gradient_term(const ComplexMatrix& g, const BasisEntry& e) {
    switch (e.kind) {
        case BasisEntry::Diag:
            return g(e.gp, e.gp).real();
        case BasisEntry::Re:
            return 2.0 * g(e.gp, e.gq).real();
        case BasisEntry::Im:
            return 2.0 * g(e.gp, e.gq).imag();
    }
    return 0.0;
}

// Tr(W E_a W E_b); symmetric under swapping the entries.
double hessian_term(const ComplexMatrix& w, BasisEntry a, BasisEntry b) {
    if (a.kind > b.kind) std::swap(a, b);
    const int p = a.gp, q = a.gq, r = b.gp, s = b.gq;
    if (a.kind == BasisEntry::Diag && b.kind == BasisEntry::Diag) {
        return std::norm(w(p, r));
    }
    if (a.kind == BasisEntry::Diag && b.kind == BasisEntry::Re) {
        return 2.0 * (w(p, r) * std::conj(w(p, s))).real();
    }
    if (a.kind == BasisEntry::Diag && b.kind == BasisEntry::Im) {
        return -2.0 * (w(p, r) * std::conj(w(p, s))).imag();
    }
    const Complex t1 = w(q, r) * w(s, p);
    const Complex t2 = w(q, s) * w(r, p);
    if (a.kind == BasisEntry::Re && b.kind == BasisEntry::Re) {
        return 2.0 * (t1.real() + t2.real());
    }
    if (a.kind == BasisEntry::Re && b.kind == BasisEntry::Im) {
        return 2.0 * (t2.imag() - t1.imag());
    }
    // Im-Im
    return 2.0 * (t2.real() - t1.real());
}

struct SlackState {
    std::vector<Eigen::LLT<ComplexMatrix>> factors;
    double log_det_sum = 0.0;
};

// Factor every slack X - B_k; empty optional when any factorization hits a
// non-PD pivot (the cheap PSD boundary probe used by the line search).
std::optional<SlackState> factor_slacks(const BlockLayout& lay, const Blocks& x,
                                        const std::vector<ComplexMatrix>& bounds) {
    SlackState st;
    st.factors.reserve(bounds.size());
    const ComplexMatrix xd = blocks_to_dense(lay, x);
    for (const auto& b : bounds) {
        ComplexMatrix slack = xd - b;
        slack = 0.5 * (slack + slack.adjoint().eval());
        Eigen::LLT<ComplexMatrix> llt(slack);
        if (llt.info() != Eigen::Success) return std::nullopt;
        double ld = 0.0;
        const auto& l = llt.matrixLLT();
        for (Eigen::Index i = 0; i < l.rows(); ++i) {
            const double piv = l(i, i).real();
            if (!(piv > 0.0) || !std::isfinite(piv)) return std::nullopt;
            ld += std::log(piv);
        }
        st.log_det_sum += 2.0 * ld;
        st.factors.push_back(std::move(llt));
    }
    return st;
}

double barrier_value(double t, const Blocks& x, const SlackState& st) {
    return t * blocks_trace(x) - st.log_det_sum;
}

// Newton direction through the dense packed Hessian.
Blocks dense_newton_direction(const BlockLayout& lay,
                              const std::vector<BasisEntry>& basis,
                              const std::vector<ComplexMatrix>& inverses,
                              const Blocks& grad_blocks) {
    const int d = static_cast<int>(basis.size());
    const ComplexMatrix gd = blocks_to_dense(lay, grad_blocks);
    RealVector g(d);
    for (int a = 0; a < d; ++a) g(a) = gradient_term(gd, basis[a]);

    RealMatrix h = RealMatrix::Zero(d, d);
    for (const auto& w : inverses) {
        for (int a = 0; a < d; ++a) {
            for (int b = a; b < d; ++b) {
                h(a, b) += hessian_term(w, basis[a], basis[b]);
            }
        }
    }
    h = RealMatrix(h.selfadjointView<Eigen::Upper>());

    double ridge = 0.0;
    const double scale = std::max(h.diagonal().maxCoeff(), 1.0);
    for (int attempt = 0; attempt < 4; ++attempt) {
        RealMatrix hr = h;
        if (ridge > 0.0) hr.diagonal().array() += ridge;
        Eigen::LDLT<RealMatrix> ldlt(hr);
        if (ldlt.info() == Eigen::Success) {
            RealVector delta = ldlt.solve(-g);
            if (delta.allFinite() && g.dot(delta) <= 0.0) {
                return unpack(lay, basis, delta);
            }
        }
        ridge = (ridge == 0.0) ? 1e-12 * scale : ridge * 1e3;
    }
    throw Error(ErrorCode::NumericalBreakdown,
                "Newton system singular beyond ridge recovery");
}

// Preconditioned CG on the Newton system H(D) = -G for the single-bound
// block-diagonal problem. H(D) takes the diagonal blocks of W D W; the
// preconditioner inverts the per-block map W_jj D_j W_jj, which differs from
// H only by a low-rank coupling, so CG settles in a few iterations.
Blocks pcg_newton_direction(const BlockLayout& lay, const ComplexMatrix& w,
                            const Blocks& grad_blocks, const SolverOptions& opts) {
    const int nb = lay.num_blocks();
    std::vector<Eigen::LLT<ComplexMatrix>> block_llt;
    block_llt.reserve(nb);
    for (int j = 0; j < nb; ++j) {
        ComplexMatrix wjj =
            w.block(lay.offsets[j], lay.offsets[j], lay.sizes[j], lay.sizes[j]);
        wjj = 0.5 * (wjj + wjj.adjoint().eval());
        Eigen::LLT<ComplexMatrix> llt(wjj);
        if (llt.info() != Eigen::Success) {
            throw Error(ErrorCode::NumericalBreakdown,
                        "slack inverse block not positive definite");
        }
        block_llt.push_back(std::move(llt));
    }

    auto matvec = [&](const Blocks& d) {
        ComplexMatrix wd(lay.n, lay.n);
        for (int j = 0; j < nb; ++j) {
            wd.middleCols(lay.offsets[j], lay.sizes[j]) =
                w.middleCols(lay.offsets[j], lay.sizes[j]) * d[j];
        }
        Blocks out(nb);
        for (int j = 0; j < nb; ++j) {
            out[j] = wd.middleRows(lay.offsets[j], lay.sizes[j]) *
                     w.middleCols(lay.offsets[j], lay.sizes[j]);
            out[j] = 0.5 * (out[j] + out[j].adjoint().eval());
        }
        return out;
    };
    auto precond = [&](const Blocks& r) {
        Blocks out(nb);
        for (int j = 0; j < nb; ++j) {
            ComplexMatrix z = block_llt[j].solve(r[j]);
            out[j] = block_llt[j].solve(z.adjoint()).adjoint();
            out[j] = 0.5 * (out[j] + out[j].adjoint().eval());
        }
        return out;
    };

    Blocks rhs(nb);
    for (int j = 0; j < nb; ++j) rhs[j] = -grad_blocks[j];
    const double rhs_norm = std::sqrt(blocks_dot(rhs, rhs));
    Blocks x = zero_blocks(lay);
    if (rhs_norm == 0.0) return x;

    Blocks r = rhs;
    Blocks z = precond(r);
    Blocks p = z;
    double rz = blocks_dot(r, z);
    for (int it = 0; it < opts.max_cg_iterations; ++it) {
        Blocks hp = matvec(p);
        const double php = blocks_dot(p, hp);
        if (!(php > 0.0) || !std::isfinite(php)) break;
        const double alpha = rz / php;
        blocks_axpy(x, alpha, p);
        blocks_axpy(r, -alpha, hp);
        if (std::sqrt(blocks_dot(r, r)) <= opts.cg_rel_tol * rhs_norm) break;
        z = precond(r);
        const double rz_new = blocks_dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int j = 0; j < nb; ++j) p[j] = z[j] + beta * p[j];
    }
    hermitize(x);
    return x;
}

// Certified duality gap from an explicitly normalized dual feasible point:
// Z_k = A^{-1/2} (W_k / t) A^{-1/2} with A the block-diagonal part of
// sum_k W_k / t, so the diagonal blocks of sum_k Z_k are exact identities
// and each Z_k is PSD. Any primal-feasible X then satisfies
// Tr(X) >= sum_k Tr(B_k Z_k), so the returned value bounds the distance to
// the optimum regardless of centering quality.
double certified_gap(const BlockLayout& lay, const Blocks& x,
                     const std::vector<ComplexMatrix>& bounds,
                     const std::vector<ComplexMatrix>& inverses, double t) {
    const double primal = blocks_trace(x);
    ComplexMatrix sum_w = ComplexMatrix::Zero(lay.n, lay.n);
    for (const auto& w : inverses) sum_w += w;
    sum_w /= t;

    ComplexMatrix isqrt_bd = ComplexMatrix::Zero(lay.n, lay.n);
    for (int j = 0; j < lay.num_blocks(); ++j) {
        ComplexMatrix aj = sum_w.block(lay.offsets[j], lay.offsets[j], lay.sizes[j],
                                       lay.sizes[j]);
        aj = 0.5 * (aj + aj.adjoint().eval());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(aj);
        if (es.info() != Eigen::Success) {
            throw Error(ErrorCode::NumericalBreakdown, "dual normalization failed");
        }
        const RealVector ev = es.eigenvalues().cwiseMax(1e-300);
        isqrt_bd.block(lay.offsets[j], lay.offsets[j], lay.sizes[j], lay.sizes[j]) =
            es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
            es.eigenvectors().adjoint();
    }

    double dual = 0.0;
    for (std::size_t k = 0; k < bounds.size(); ++k) {
        const ComplexMatrix zk = isqrt_bd * (inverses[k] / t) * isqrt_bd;
        dual += (bounds[k] * zk).trace().real();
    }
    return primal - dual;
}

struct EngineResult {
    Blocks x;
    SolveReport report;
};

EngineResult run_barrier(const BlockLayout& lay,
                         const std::vector<ComplexMatrix>& bounds,
                         const SolverOptions& opts) {
    const int num_bounds = static_cast<int>(bounds.size());
    const double nu = static_cast<double>(num_bounds) * static_cast<double>(lay.n);

    double lam_max = 0.0;
    for (const auto& b : bounds) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(b, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) {
            throw Error(ErrorCode::DecompositionFailed, "bound eigensolver failed");
        }
        lam_max = std::max(lam_max, es.eigenvalues().maxCoeff());
    }
    // Strictly feasible start: distance at least I from every bound.
    Blocks x = identity_blocks(lay, 1.0 + std::max(0.0, lam_max));

    const int d = BlockSpec{lay.sizes}.packed_dim();
    const bool dense_path = d <= opts.max_dense_newton_dim;
    if (!dense_path && num_bounds != 1) {
        std::ostringstream os;
        os << "dense Newton needs d = " << d << " <= " << opts.max_dense_newton_dim
           << " when more than one bound is present; reduce the instance or raise "
              "max_dense_newton_dim";
        throw Error(ErrorCode::DimensionCapExceeded, os.str());
    }
    std::vector<BasisEntry> basis;
    if (dense_path) basis = enumerate_basis(lay);

    SolveReport report;
    report.variable_count = dense_path ? static_cast<int>(basis.size()) : d;
    report.equality_constraints = 0;
    report.inequality_constraints = num_bounds;

    const ComplexMatrix eye = ComplexMatrix::Identity(lay.n, lay.n);
    double t = 1.0;
    double last_gap = std::numeric_limits<double>::infinity();
    bool converged = false;

    for (int round = 0; round < opts.max_barrier_rounds && !converged; ++round) {
        report.iterations = round + 1;
        const bool final_stage = nu / t <= 0.5 * opts.tol;
        const double target_sq = final_stage ? kPolishDecrementSq : kCenterDecrementSq;

        for (int step = 0; step < opts.max_newton_steps; ++step) {
            auto st = factor_slacks(lay, x, bounds);
            if (!st) {
                throw Error(ErrorCode::NumericalBreakdown,
                            "iterate left the feasible interior");
            }
            std::vector<ComplexMatrix> inverses;
            inverses.reserve(num_bounds);
            for (auto& f : st->factors) inverses.push_back(f.solve(eye));

            Blocks grad = identity_blocks(lay, t);
            for (const auto& w : inverses) {
                Blocks wb = extract_diag_blocks(lay, w);
                blocks_axpy(grad, -1.0, wb);
            }
            hermitize(grad);

            Blocks delta = dense_path
                               ? dense_newton_direction(lay, basis, inverses, grad)
                               : pcg_newton_direction(lay, inverses[0], grad, opts);

            const double slope = blocks_dot(grad, delta);
            if (!std::isfinite(slope)) {
                throw Error(ErrorCode::NumericalBreakdown, "non-finite Newton slope");
            }
            const double decrement_sq = -slope;
            if (decrement_sq <= target_sq) break;
            ++report.newton_steps;

            // Backtrack to the cone interior (factorization is the boundary
            // probe), keep a fraction-to-boundary margin, then require an
            // Armijo decrease. The interior is convex, so shrinking s keeps
            // feasibility once it is reached.
            double s = 1.0;
            Blocks trial = x;
            blocks_axpy(trial, s, delta);
            auto trial_st = factor_slacks(lay, trial, bounds);
            bool shrunk = false;
            while (!trial_st) {
                s *= 0.5;
                shrunk = true;
                if (s < 1e-18) {
                    throw Error(ErrorCode::NumericalBreakdown,
                                "line search underflow at the PSD boundary");
                }
                trial = x;
                blocks_axpy(trial, s, delta);
                trial_st = factor_slacks(lay, trial, bounds);
            }
            if (shrunk) {
                s *= opts.fraction_to_boundary;
                trial = x;
                blocks_axpy(trial, s, delta);
                trial_st = factor_slacks(lay, trial, bounds);
            }
            const double phi0 = barrier_value(t, x, *st);
            while (!trial_st ||
                   barrier_value(t, trial, *trial_st) > phi0 + 0.25 * s * slope) {
                s *= 0.5;
                if (s < 1e-18) {
                    throw Error(ErrorCode::NumericalBreakdown,
                                "line search failed to decrease the barrier");
                }
                trial = x;
                blocks_axpy(trial, s, delta);
                trial_st = factor_slacks(lay, trial, bounds);
            }
            x = std::move(trial);
            hermitize(x);
        }

        if (final_stage) {
            auto st = factor_slacks(lay, x, bounds);
            if (!st) {
                throw Error(ErrorCode::NumericalBreakdown, "final iterate infeasible");
            }
            std::vector<ComplexMatrix> inverses;
            inverses.reserve(num_bounds);
            for (auto& f : st->factors) inverses.push_back(f.solve(eye));
            last_gap = certified_gap(lay, x, bounds, inverses, t);
            if (last_gap <= opts.tol) {
                report.duality_gap = last_gap;
                converged = true;
                break;
            }
        }
        t *= opts.t_growth;
    }

    report.optimal_value = blocks_trace(x);
    report.p_error = 1.0 - report.optimal_value;
    double min_eig = 0.0;
    {
        const ComplexMatrix xd = blocks_to_dense(lay, x);
        for (const auto& b : bounds) {
            ComplexMatrix slack = xd - b;
            slack = 0.5 * (slack + slack.adjoint().eval());
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(slack, Eigen::EigenvaluesOnly);
            min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        }
    }
    report.max_constraint_violation = std::max(0.0, -min_eig);

    if (!converged) {
        report.duality_gap = last_gap;
        throw SolveFailure(ErrorCode::MaxIterationsExceeded,
                           "barrier loop exhausted before reaching the gap target",
                           blocks_to_dense(lay, x), report);
    }
    return {std::move(x), report};
}

}  // namespace

int BlockSpec::total_dim() const {
    return std::accumulate(sizes.begin(), sizes.end(), 0);
}

int BlockSpec::packed_dim() const {
    int d = 0;
    for (int s : sizes) d += s * s;
    return d;
}

std::vector<int> BlockSpec::offsets() const {
    std::vector<int> off;
    off.reserve(sizes.size());
    int acc = 0;
    for (int s : sizes) {
        off.push_back(acc);
        acc += s;
    }
    return off;
}

BlockDiagOperator::BlockDiagOperator(BlockSpec spec) : spec_(std::move(spec)) {
    for (int s : spec_.sizes) blocks_.push_back(ComplexMatrix::Zero(s, s));
}

BlockDiagOperator::BlockDiagOperator(BlockSpec spec, std::vector<ComplexMatrix> blocks,
                                     const Tolerances& tol)
    : spec_(std::move(spec)), blocks_(std::move(blocks)) {
    if (spec_.sizes.size() != blocks_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "block count mismatch");
    }
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        const auto& b = blocks_[j];
        if (b.rows() != spec_.sizes[j] || b.cols() != spec_.sizes[j]) {
            throw Error(ErrorCode::DimensionMismatch, "block size mismatch");
        }
        const double scale = std::max(b.norm(), 1e-300);
        if ((b - b.adjoint().eval()).norm() > tol.herm * scale) {
            throw Error(ErrorCode::NotHermitian, "block is not Hermitian");
        }
        blocks_[j] = 0.5 * (b + b.adjoint().eval());
    }
}

ComplexMatrix BlockDiagOperator::to_dense() const {
    const auto off = spec_.offsets();
    ComplexMatrix out = ComplexMatrix::Zero(dim(), dim());
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        out.block(off[j], off[j], spec_.sizes[j], spec_.sizes[j]) = blocks_[j];
    }
    return out;
}

double BlockDiagOperator::trace() const {
    double tr = 0.0;
    for (const auto& b : blocks_) tr += b.trace().real();
    return tr;
}

BlockDiagOperator BlockDiagOperator::identity(const BlockSpec& spec) {
    std::vector<ComplexMatrix> blocks;
    for (int s : spec.sizes) blocks.push_back(ComplexMatrix::Identity(s, s));
    return BlockDiagOperator(spec, std::move(blocks));
}

std::pair<ComplexMatrix, SolveReport> minimize_trace_dominating(
    const std::vector<ComplexMatrix>& lower_bounds, const BlockSpec& variable_blocks,
    const SolverOptions& opts) {
    if (lower_bounds.empty()) {
        throw Error(ErrorCode::InvalidInput, "need at least one lower bound");
    }
    BlockLayout lay(variable_blocks);
    for (const auto& b : lower_bounds) {
        if (b.rows() != lay.n || b.cols() != lay.n) {
            throw Error(ErrorCode::DimensionMismatch, "bound dimension mismatch");
        }
    }
    const auto start = Clock::now();
    EngineResult res = run_barrier(lay, lower_bounds, opts);
    res.report.wall_time = seconds_since(start);
    return {blocks_to_dense(lay, res.x), res.report};
}

std::pair<HermitianOperator, SolveReport> solve_dp1(
    const std::vector<DensityOperator>& states, const std::vector<double>& priors,
    const SolverOptions& opts) {
    if (states.empty() || states.size() != priors.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "states and priors must be non-empty and match in length");
    }
    const Eigen::Index n = states[0].dim();
    double psum = 0.0;
    std::vector<ComplexMatrix> bounds;
    bounds.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].dim() != n) {
            throw Error(ErrorCode::DimensionMismatch, "states differ in dimension");
        }
        if (priors[i] < 0.0) {
            throw Error(ErrorCode::InvalidInput, "priors must be non-negative");
        }
        psum += priors[i];
        bounds.push_back(priors[i] * states[i].matrix());
    }
    if (std::abs(psum - 1.0) > 1e-8) {
        throw Error(ErrorCode::InvalidInput, "priors must sum to one");
    }
    auto [x, report] =
        minimize_trace_dominating(bounds, BlockSpec::full(static_cast<int>(n)), opts);
    return {HermitianOperator(x), report};
}

std::pair<HermitianOperator, SolveReport> solve_dp1(
    const std::vector<DensityOperator>& states, const std::vector<double>& priors,
    double tol) {
    SolverOptions opts;
    opts.tol = tol;
    return solve_dp1(states, priors, opts);
}

std::pair<BlockDiagOperator, SolveReport> solve_dp3(const GUEnsemble& e,
                                                    const EigenStructure& eig,
                                                    const SolverOptions& opts) {
    if (eig.dim() != e.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "eigenstructure dimension does not match the ensemble");
    }
    ComplexMatrix b = eig.basis().adjoint() * e.rho0().matrix() * eig.basis();
    b = (b + b.adjoint().eval()) * (0.5 * e.prior());
    BlockSpec spec{eig.multiplicities()};

    const auto start = Clock::now();
    BlockLayout lay(spec);
    EngineResult res = run_barrier(lay, {b}, opts);
    res.report.wall_time = seconds_since(start);

    return {BlockDiagOperator(spec, std::move(res.x)), res.report};
}

std::pair<BlockDiagOperator, SolveReport> solve_dp3(const GUEnsemble& e,
                                                    const EigenStructure& eig,
                                                    double tol) {
    SolverOptions opts;
    opts.tol = tol;
    return solve_dp3(e, eig, opts);
}

HermitianOperator lift(const BlockDiagOperator& xtilde, const EigenStructure& eig) {
    if (xtilde.dim() != eig.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "lift dimension mismatch");
    }
    return HermitianOperator(eig.basis() * xtilde.to_dense() * eig.basis().adjoint());
}

HermitianOperator positive_part(const HermitianOperator& a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix());
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::DecompositionFailed, "positive_part eigensolver failed");
    }
    const RealVector clipped = es.eigenvalues().cwiseMax(0.0);
    ComplexMatrix out =
        es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
    return HermitianOperator(std::move(out));
}

VariableCounts count_variables(ProblemKind kind, int dim, int num_states,
                               const std::optional<BlockSpec>& spec) {
    if (dim < 1 || num_states < 1) {
        throw Error(ErrorCode::InvalidInput, "count_variables: dim and M must be >= 1");
    }
    const long n2 = static_cast<long>(dim) * static_cast<long>(dim);
    switch (kind) {
        case ProblemKind::PP1:
            return {static_cast<long>(num_states) * n2, 1, num_states};
        case ProblemKind::PP2:
            return {n2, 1, 1};
        case ProblemKind::DP1:
            return {n2, 0, num_states};
        case ProblemKind::DP2:
            return {n2, 0, 2};
        case ProblemKind::DP3: {
            if (!spec) {
                throw Error(ErrorCode::MissingBlockSpec,
                            "DP3 counting needs the block specification");
            }
            if (spec->total_dim() != dim) {
                throw Error(ErrorCode::DimensionMismatch,
                            "block sizes do not sum to the space dimension");
            }
            return {static_cast<long>(spec->packed_dim()), 0, 1};
        }
    }
    throw Error(ErrorCode::InvalidInput, "unknown problem kind");
}

ComplexMatrix group_average(const SymmetryOperator& s, const ComplexMatrix& a) {
    if (a.rows() != s.dim() || a.cols() != s.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "group_average dimension mismatch");
    }
    const int m = s.order();
    ComplexMatrix acc = a;
    ComplexMatrix current = a;
    const ComplexMatrix& sm = s.matrix();
    for (int i = 1; i < m; ++i) {
        current = sm.adjoint() * current * sm;
        acc += current;
    }
    return acc / static_cast<double>(m);
}

}  // namespace gusd
