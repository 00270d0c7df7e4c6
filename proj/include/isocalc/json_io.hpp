#ifndef ISOCALC_JSON_IO_HPP
#define ISOCALC_JSON_IO_HPP

#include <string>

#include "json.hpp"

#include "isocalc/verification.hpp"

namespace isocalc {

using json = nlohmann::json;

/// {"d": n, "re": [[...]], "im": [[...]]}, row-major. "im" is omitted when the
/// matrix is real.
json matrix_to_json(const HMatrix& m);

/// Inverse of matrix_to_json; a missing "im" means zero. Throws ParseError on
/// malformed input and InvalidInput when the matrix is not Hermitian.
HMatrix matrix_from_json(const json& j);

HMatrix load_matrix(const std::string& path);

json real_matrix_to_json(const RealMatrix<double>& m);
json real_vector_to_json(const RealVector<double>& v);

/// {name, trials, worst_violation, tolerance, passed, expected_failure,
///  witnesses: [...], metrics: {...}}
json report_to_json(const PropertyReport& r);

/// Compact dump whose numbers re-parse to the same doubles. With `pretty`,
/// numbers are rounded to 6 significant digits and the output is indented.
std::string dump_json(const json& j, bool pretty = false);

}  // namespace isocalc

#endif  // ISOCALC_JSON_IO_HPP
