#include "gusd/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gusd {

namespace {

ComplexVector vector_from_json(const Json& j) {
    if (!j.is_array()) {
        throw Error(ErrorCode::InvalidInput, "vector field must be an array of [re, im]");
    }
    ComplexVector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& entry = j[i];
        if (!entry.is_array() || entry.size() != 2) {
            throw Error(ErrorCode::InvalidInput, "vector entries must be [re, im] pairs");
        }
        const double re = entry[0].get<double>();
        const double im = entry[1].get<double>();
        if (!std::isfinite(re) || !std::isfinite(im)) {
            throw Error(ErrorCode::InvalidInput, "vector entry is not finite");
        }
        v(static_cast<Eigen::Index>(i)) = Complex(re, im);
    }
    return v;
}

Json vector_to_json(const ComplexVector& v) {
    Json data = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) {
            throw Error(ErrorCode::InvalidInput, "vector entry is not finite");
        }
        data.push_back(Json::array({v(i).real(), v(i).imag()}));
    }
    return data;
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
    if (!all_finite(m)) {
        throw Error(ErrorCode::InvalidInput, "matrix contains NaN or Inf entries");
    }
    Json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    Json data = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            data.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        }
    }
    j["data"] = std::move(data);
    return j;
}

ComplexMatrix matrix_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
        !j.contains("data")) {
        throw Error(ErrorCode::InvalidInput,
                    "matrix document needs rows, cols, and data fields");
    }
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (rows < 1 || cols < 1 || !data.is_array() ||
        data.size() != static_cast<std::size_t>(rows * cols)) {
        throw Error(ErrorCode::InvalidInput, "matrix data length mismatch");
    }
    ComplexMatrix m(rows, cols);
    std::size_t idx = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c, ++idx) {
            const auto& entry = data[idx];
            if (!entry.is_array() || entry.size() != 2) {
                throw Error(ErrorCode::InvalidInput, "matrix entries must be [re, im]");
            }
            const double re = entry[0].get<double>();
            const double im = entry[1].get<double>();
            if (!std::isfinite(re) || !std::isfinite(im)) {
                throw Error(ErrorCode::InvalidInput, "matrix entry is not finite");
            }
            m(r, c) = Complex(re, im);
        }
    }
    return m;
}

Json ensemble_to_json(const GUEnsemble& e) {
    Json j;
    j["M"] = e.num_states();
    j["rho0"] = matrix_to_json(e.rho0().matrix());
    j["S"] = matrix_to_json(e.symmetry().matrix());
    return j;
}

GUEnsemble ensemble_from_json(const Json& j, const Tolerances& tol) {
    if (!j.is_object()) {
        throw Error(ErrorCode::InvalidInput, "ensemble document must be an object");
    }
    if (j.contains("generator")) {
        const std::string gen = j.at("generator").get<std::string>();
        if (gen == "rotation") {
            return rotation_ensemble(j.at("M").get<int>(), j.at("alpha").get<double>(),
                                     j.at("beta").get<double>(), tol);
        }
        if (gen == "ppm") {
            const int n = j.at("n").get<int>();
            const int m = j.at("M").get<int>();
            ComplexVector pulse, idle;
            if (j.contains("pulse")) {
                pulse = vector_from_json(j.at("pulse"));
                idle = vector_from_json(j.at("idle"));
            } else {
                pulse = ComplexVector::Zero(n);
                idle = ComplexVector::Zero(n);
                pulse(0) = 1.0;
                idle(1) = 1.0;
            }
            return ppm_ensemble(n, m, pulse, idle, tol);
        }
        throw Error(ErrorCode::InvalidInput, "unknown generator '" + gen + "'");
    }
    if (!j.contains("M") || !j.contains("rho0") || !j.contains("S")) {
        throw Error(ErrorCode::InvalidInput, "ensemble document needs M, rho0, and S");
    }
    const int m = j.at("M").get<int>();
    const ComplexMatrix rho = matrix_from_json(j.at("rho0"));
    const ComplexMatrix s = matrix_from_json(j.at("S"));
    return build_ensemble(validate_density(rho, tol), validate_symmetry(s, m, tol), m,
                          tol);
}

Json report_to_json(const SolveReport& r) {
    Json j;
    j["optimal_value"] = r.optimal_value;
    j["p_error"] = r.p_error;
    j["duality_gap"] = r.duality_gap;
    j["iterations"] = r.iterations;
    j["newton_steps"] = r.newton_steps;
    j["max_constraint_violation"] = r.max_constraint_violation;
    j["variable_count"] = r.variable_count;
    j["equality_constraints"] = r.equality_constraints;
    j["inequality_constraints"] = r.inequality_constraints;
    j["wall_time"] = r.wall_time;
    return j;
}

Json povm_to_json(const POVM& p) {
    Json arr = Json::array();
    for (int i = 0; i < p.size(); ++i) arr.push_back(matrix_to_json(p[i]));
    return arr;
}

Json optimality_to_json(const OptimalityReport& r) {
    Json j;
    j["max_slackness_residual"] = r.max_slackness_residual;
    j["min_slack_eigenvalue"] = r.min_slack_eigenvalue;
    j["completeness_residual"] = r.completeness_residual;
    j["probability_gap"] = r.probability_gap;
    j["tolerance"] = r.tolerance;
    j["verdict"] = r.optimal ? "optimal" : "not_optimal";
    return j;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::InvalidInput, "cannot open '" + path + "'");
    }
    Json j;
    try {
        in >> j;
    } catch (const std::exception& ex) {
        throw Error(ErrorCode::InvalidInput,
                    "JSON parse failure in '" + path + "': " + ex.what());
    }
    return j;
}

void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::InvalidInput, "cannot write '" + path + "'");
    }
    out << j.dump(2) << '\n';
}

}  // namespace gusd
