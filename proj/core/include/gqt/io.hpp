#pragma once

// JSON forms of states, ensembles, matrices and reports.
//   amplitude / matrix entry : [re, im]
//   state                    : [[re, im], ...]
//   matrix                   : row-major [[[re, im], ...], ...]
//   ensemble                 : [{"weight": w, "amplitudes": state}, ...]

#include <string>

#include <nlohmann/json.hpp>

#include "gqt/canonical.hpp"
#include "gqt/dynamics.hpp"
#include "gqt/sampling.hpp"
#include "gqt/statespace.hpp"

namespace gqt {

using Json = nlohmann::ordered_json;

Json to_json(const CVector& v);
Json to_json(const CMatrix& m);
Json to_json(const ProjectiveState& s);
Json to_json(const WeightedStateEnsemble& e);
Json to_json(const McEstimate& e);
Json to_json(const ThermoReport& r);
Json to_json(const JarzynskiReport& r);
Json to_json(const FirstLawReport& r);

/// Accepts [re, im] pairs or plain real numbers for each entry.
CVector vector_from_json(const Json& j);
CMatrix matrix_from_json(const Json& j);
ProjectiveState state_from_json(const Json& j);
WeightedStateEnsemble ensemble_from_json(const Json& j);

/// Serializes with every floating-point value printed as %.17g; NaN and
/// infinities become null.
std::string dump_json(const Json& j, int indent = 2);

/// %.17g, with "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double x);

}  // namespace gqt
