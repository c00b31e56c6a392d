#pragma once

// JSON documents for radial functions.
//
// Scalar:
//   {"q": 2, "n_min": -3, "n_max": 3,
//    "values": [[re, im], ...],            one pair per level
//    "value_at_zero": [re, im],
//    "tail": {"kind": "zero"}
//          | {"kind": "constant", "c": [re, im]}
//          | {"kind": "power", "c": [re, im],
//             "terms": [{"scale": [re, im], "exponent": beta}, ...]}
//          | {"kind": "log", "c": [re, im], "slope": [re, im]}
//          | {"kind": "mixed", "c": ..., "slope": ..., "terms": [...]}}
//   Above n_max the tail evaluates to c + slope * n + sum scale * q^(exponent * n).
//
// Matrix ("shape": "matrix", "dim": d): each level value is d rows of d
// [re, im] pairs; value_at_zero likewise; tail is zero or constant with a
// matrix "c".
//
// Vector ("shape": "vector", "dim": d): each level value is d pairs; "tail"
// is an array of d scalar tail objects.
//
// Unknown fields (e.g. "alpha" written by the CLI) are ignored on input.

#include <string>

#include <json.hpp>

#include "radfrac/radial_function.hpp"

namespace radfrac {

using json = nlohmann::json;

json to_json(const RadialFunction& u);
json to_json(const TailModel& t);
json to_json(const MatrixRadialFunction& a);
json to_json(const RadialVector& v);

RadialFunction radial_from_json(const json& doc);
TailModel tail_from_json(const json& doc);
MatrixRadialFunction matrix_from_json(const json& doc);
RadialVector vector_from_json(const json& doc);

std::string serialize(const RadialFunction& u);
RadialFunction deserialize(const std::string& text);

/// %.17g formatting shared by every table emitter.
std::string format_real(double x);

/// Rows `n,abs_x,re,im` with one header row.
std::string to_csv(const RadialFunction& u);

}  // namespace radfrac
