#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gusd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// What went wrong, machine-readably. The CLI maps these to error JSON.
enum class ErrorCode {
    NotHermitian,
    NotPSD,
    TraceNotOne,
    NotUnitary,
    NotProjectiveOrder,
    DecompositionFailed,
    DimensionMismatch,
    OrderMismatch,
    InfeasibleParameters,
    DimensionCapExceeded,
    MissingBlockSpec,
    MaxIterationsExceeded,
    NumericalBreakdown,
    EmptyNullSpace,
    CompletenessInfeasible,
    CompletenessViolated,
    InvalidInput,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

/// Numerical tolerances used by validation and recovery. Defaults sit well
/// above double-precision noise for dimensions up to the cap and well below
/// physically meaningful spectral gaps.
struct Tolerances {
    double herm = 1e-10;      // relative Hermiticity deviation
    double unitary = 1e-8;    // ||S S^H - I||_F
    double psd = 1e-9;        // eigenvalue floor
    double trace = 1e-9;      // |Tr - 1|
    double grouping = 1e-8;   // radians, eigenvalue clustering
    double eig = 1e-6;        // ||S U - U Lambda||_F after grouping
    double rank_rel = 1e-8;   // singular values below rank_rel * sigma_max count as zero
    double povm = 1e-7;       // completeness residual
    double null_rel = 1e-6;   // null-space threshold relative to sigma_max
    std::size_t dimension_cap = 2048;
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

inline constexpr double kMachineEpsilon = 2.220446049250313e-16;

/// Deterministic 64-bit generator (splitmix64). std::random distributions are
/// implementation-defined, so seeded test data goes through this instead.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    Complex complex_normal() { return {normal(), normal()}; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

inline double frobenius_norm(const ComplexMatrix& m) { return m.norm(); }

inline bool all_finite(const ComplexMatrix& m) {
    return m.allFinite();
}

}  // namespace gusd
