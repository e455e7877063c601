#pragma once

#include <string>

#include <json.hpp>

#include "gusd/ensemble.hpp"
#include "gusd/operators.hpp"
#include "gusd/povm.hpp"
#include "gusd/sdp.hpp"
#include "gusd/types.hpp"

namespace gusd {

using Json = nlohmann::json;

/// Shared matrix format: {"rows": R, "cols": C, "data": [[re, im], ...]} in
/// row-major order. NaN and Inf entries are rejected on both directions.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

/// Ensemble document. Either explicit {"M", "rho0", "S"} or one of the
/// generator forms {"generator": "rotation", ...} / {"generator": "ppm", ...}.
Json ensemble_to_json(const GUEnsemble& e);
GUEnsemble ensemble_from_json(const Json& j,
                              const Tolerances& tol = default_tolerances());

Json report_to_json(const SolveReport& r);
Json povm_to_json(const POVM& p);
Json optimality_to_json(const OptimalityReport& r);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace gusd
