#include "isocalc/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace isocalc {

namespace {

RealMatrix<double> parse_rows(const json& rows, Index d, const char* field) {
  if (!rows.is_array() || static_cast<Index>(rows.size()) != d)
    throw ParseError(std::string("\"") + field + "\" must be an array of " + std::to_string(d) + " rows");
  RealMatrix<double> out(d, d);
  for (Index i = 0; i < d; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != d)
      throw ParseError(std::string("row ") + std::to_string(i) + " of \"" + field + "\" must have " +
                       std::to_string(d) + " entries");
    for (Index k = 0; k < d; ++k) {
      const auto& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw ParseError(std::string("non-numeric entry in \"") + field + "\"");
      out(i, k) = v.get<double>();
    }
  }
  return out;
}

json rounded(const json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v) || v == 0) return j;
    std::ostringstream os;
    os.precision(6);
    os << v;
    return std::stod(os.str());
  }
  if (j.is_array() || j.is_object()) {
    json out = j;
    for (auto it = out.begin(); it != out.end(); ++it) *it = rounded(*it);
    return out;
  }
  return j;
}

}  // namespace

json matrix_to_json(const HMatrix& m) {
  const Index d = m.dim();
  json re = json::array(), im = json::array();
  bool complex = false;
  for (Index i = 0; i < d; ++i) {
    json rr = json::array(), ir = json::array();
    for (Index k = 0; k < d; ++k) {
      rr.push_back(m(i, k).real());
      ir.push_back(m(i, k).imag());
      complex = complex || m(i, k).imag() != 0;
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  json j = {{"d", d}, {"re", std::move(re)}};
  if (complex) j["im"] = std::move(im);
  return j;
}

HMatrix matrix_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("matrix JSON must be an object");
  if (!j.contains("d") || !j["d"].is_number_integer()) throw ParseError("matrix JSON needs an integer \"d\"");
  const auto d = j["d"].get<long long>();
  if (d < 1) throw ParseError("\"d\" must be positive");
  if (!j.contains("re")) throw ParseError("matrix JSON needs \"re\"");
  const RealMatrix<double> re = parse_rows(j["re"], static_cast<Index>(d), "re");
  RealMatrix<double> im = RealMatrix<double>::Zero(d, d);
  if (j.contains("im")) im = parse_rows(j["im"], static_cast<Index>(d), "im");
  ComplexMatrix<double> m(d, d);
  m.real() = re;
  m.imag() = im;
  return HMatrix(m);
}

HMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
  return matrix_from_json(j);
}

json real_matrix_to_json(const RealMatrix<double>& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(std::move(row));
  }
  return out;
}

json real_vector_to_json(const RealVector<double>& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

namespace {

// JSON has no infinities; they are written as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

json report_to_json(const PropertyReport& r) {
  json witnesses = json::array();
  for (const auto& w : r.witnesses)
    witnesses.push_back({{"seed", w.seed}, {"trial", w.trial}, {"violation", number(w.violation)}, {"detail", w.detail}});
  json metrics = json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = number(v);
  return {{"name", r.name},
          {"trials", r.trials},
          {"worst_violation", number(r.worst_violation)},
          {"tolerance", r.tolerance},
          {"passed", r.passed},
          {"expected_failure", r.expected_failure},
          {"witnesses", std::move(witnesses)},
          {"metrics", std::move(metrics)}};
}

std::string dump_json(const json& j, bool pretty) {
  if (pretty) return rounded(j).dump(2);
  return j.dump();
}

}  // namespace isocalc
