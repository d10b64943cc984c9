#pragma once

#include <string>

#include "qdpi/algebra.hpp"
#include "qdpi/types.hpp"

namespace qdpi {

// JSON wire format for matrices:
//   {"dim": n, "re": [[...], ...], "im": [[...], ...]}
// with row-major n x n arrays of doubles. "im" may be omitted for real
// matrices; serialization always emits both parts.
Matrix parse_matrix_json(const std::string& text);
std::string matrix_to_json(const Matrix& m);

// JSON wire format for subalgebra descriptions. Accepted shapes:
//   {"kind": "generators", "dim": n, "generators": [<matrix>, ...]}
//   {"kind": "tensor_factor", "d1": a, "d2": b, "which": "first"|"second"}
//   {"kind": "diagonal", "dim": n}
//   {"kind": "full", "dim": n}
// Generator lists are closed under products and adjoints before the
// orthonormal basis is formed.
Subalgebra parse_algebra_json(const std::string& text, const Tolerances& tol = {});

// Tolerance overrides are a flat JSON object whose keys name Tolerances
// fields, e.g. {"faithfulness": 1e-9, "quadrature_panels": 128}. Unknown
// keys are rejected so typos cannot silently leave a default in place.
Tolerances parse_tolerance_overrides(const std::string& text, Tolerances base = {});

// Reads a whole file into memory; throws IoError when unreadable.
std::string read_file(const std::string& path);

// Writes content to a sibling temp file and renames it into place so a
// failure part way through never leaves a truncated artifact behind.
void write_file_atomic(const std::string& path, const std::string& content);

// Shortest round-trip decimal form of a double. Non-finite values map to
// "inf", "-inf" and "nan" so reports never carry locale or printf quirks.
std::string format_double(double value);

}  // namespace qdpi
