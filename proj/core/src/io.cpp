#include "qdpi/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qdpi/errors.hpp"

namespace qdpi {
namespace {

using nlohmann::json;

json parse_document(const std::string& text, const char* what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw ParseError(std::string("malformed JSON in ") + what);
  }
  return doc;
}

int require_dim(const json& doc, const char* key, const char* what) {
  if (!doc.contains(key) || !doc[key].is_number_integer()) {
    throw ParseError(std::string(what) + ": missing integer field \"" + key + "\"");
  }
  const std::int64_t n = doc[key].get<std::int64_t>();
  if (n < 1 || n > 4096) {
    throw ParseError(std::string(what) + ": \"" + key + "\" out of range");
  }
  return static_cast<int>(n);
}

// Reads an n x n row-major array of doubles such as the "re"/"im" parts.
Eigen::MatrixXd parse_part(const json& part, int n, const char* name) {
  if (!part.is_array() || static_cast<int>(part.size()) != n) {
    throw ParseError(std::string("matrix: \"") + name + "\" must be an array of " +
                     std::to_string(n) + " rows");
  }
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = part[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ParseError(std::string("matrix: row ") + std::to_string(i) + " of \"" + name +
                       "\" must hold " + std::to_string(n) + " numbers");
    }
    for (int j = 0; j < n; ++j) {
      const json& cell = row[static_cast<std::size_t>(j)];
      if (!cell.is_number()) {
        throw ParseError(std::string("matrix: non-numeric entry in \"") + name + "\"");
      }
      out(i, j) = cell.get<double>();
    }
  }
  return out;
}

Matrix matrix_from_doc(const json& doc) {
  if (!doc.is_object()) {
    throw ParseError("matrix: expected a JSON object");
  }
  const int n = require_dim(doc, "dim", "matrix");
  if (!doc.contains("re")) {
    throw ParseError("matrix: missing \"re\" part");
  }
  const Eigen::MatrixXd re = parse_part(doc["re"], n, "re");
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(n, n);
  if (doc.contains("im")) {
    im = parse_part(doc["im"], n, "im");
  }
  Matrix out(n, n);
  out.real() = re;
  out.imag() = im;
  return out;
}

json matrix_to_doc(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatchError("matrix serialization expects a square matrix");
  }
  const int n = static_cast<int>(m.rows());
  json re = json::array();
  json im = json::array();
  for (int i = 0; i < n; ++i) {
    json re_row = json::array();
    json im_row = json::array();
    for (int j = 0; j < n; ++j) {
      re_row.push_back(m(i, j).real());
      im_row.push_back(m(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  json doc;
  doc["dim"] = n;
  doc["re"] = std::move(re);
  doc["im"] = std::move(im);
  return doc;
}

}  // namespace

Matrix parse_matrix_json(const std::string& text) {
  return matrix_from_doc(parse_document(text, "matrix"));
}

std::string matrix_to_json(const Matrix& m) { return matrix_to_doc(m).dump(); }

Subalgebra parse_algebra_json(const std::string& text, const Tolerances& tol) {
  const json doc = parse_document(text, "algebra");
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
    throw ParseError("algebra: missing string field \"kind\"");
  }
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "diagonal") {
    return Subalgebra::diagonal(require_dim(doc, "dim", "algebra"));
  }
  if (kind == "full") {
    return Subalgebra::full(require_dim(doc, "dim", "algebra"));
  }
  if (kind == "tensor_factor") {
    const int d1 = require_dim(doc, "d1", "algebra");
    const int d2 = require_dim(doc, "d2", "algebra");
    if (!doc.contains("which") || !doc["which"].is_string()) {
      throw ParseError("algebra: tensor_factor needs \"which\": \"first\"|\"second\"");
    }
    const std::string which = doc["which"].get<std::string>();
    if (which == "first") {
      return Subalgebra::tensor_factor(d1, d2, Factor::First);
    }
    if (which == "second") {
      return Subalgebra::tensor_factor(d1, d2, Factor::Second);
    }
    throw ParseError("algebra: \"which\" must be \"first\" or \"second\"");
  }
  if (kind == "generators") {
    const int n = require_dim(doc, "dim", "algebra");
    if (!doc.contains("generators") || !doc["generators"].is_array() ||
        doc["generators"].empty()) {
      throw ParseError("algebra: \"generators\" must be a non-empty array of matrices");
    }
    std::vector<Matrix> gens;
    gens.reserve(doc["generators"].size());
    for (const json& g : doc["generators"]) {
      Matrix m = matrix_from_doc(g);
      if (m.rows() != n) {
        throw ParseError("algebra: generator dimension does not match \"dim\"");
      }
      gens.push_back(std::move(m));
    }
    return close_generators(n, gens, tol);
  }
  throw ParseError("algebra: unknown kind \"" + kind + "\"");
}

Tolerances parse_tolerance_overrides(const std::string& text, Tolerances base) {
  const json doc = parse_document(text, "tolerance overrides");
  if (!doc.is_object()) {
    throw ParseError("tolerance overrides: expected a JSON object");
  }
  const auto number = [](const json& v, const std::string& key) {
    if (!v.is_number()) {
      throw ParseError("tolerance overrides: \"" + key + "\" must be a number");
    }
    return v.get<double>();
  };
  const auto integer = [](const json& v, const std::string& key) {
    if (!v.is_number_integer()) {
      throw ParseError("tolerance overrides: \"" + key + "\" must be an integer");
    }
    const std::int64_t n = v.get<std::int64_t>();
    if (n < 1 || n > 1 << 20) {
      throw ParseError("tolerance overrides: \"" + key + "\" out of range");
    }
    return static_cast<int>(n);
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "hermiticity") base.hermiticity = number(value, key);
    else if (key == "eig_residual") base.eig_residual = number(value, key);
    else if (key == "pinv_rel") base.pinv_rel = number(value, key);
    else if (key == "faithfulness") base.faithfulness = number(value, key);
    else if (key == "support_leak") base.support_leak = number(value, key);
    else if (key == "density_trace") base.density_trace = number(value, key);
    else if (key == "density_min_eig") base.density_min_eig = number(value, key);
    else if (key == "span_membership") base.span_membership = number(value, key);
    else if (key == "recovery_membership") base.recovery_membership = number(value, key);
    else if (key == "rank_truncation") base.rank_truncation = number(value, key);
    else if (key == "algebra_closure") base.algebra_closure = number(value, key);
    else if (key == "eigenvalue_grouping") base.eigenvalue_grouping = number(value, key);
    else if (key == "factor_structure") base.factor_structure = number(value, key);
    else if (key == "factor_retries") base.factor_retries = integer(value, key);
    else if (key == "fixed_point_rel") base.fixed_point_rel = number(value, key);
    else if (key == "invariant_span") base.invariant_span = number(value, key);
    else if (key == "gns_flag") base.gns_flag = number(value, key);
    else if (key == "cesaro_agreement") base.cesaro_agreement = number(value, key);
    else if (key == "cesaro_terms") base.cesaro_terms = integer(value, key);
    else if (key == "trace_renorm") base.trace_renorm = number(value, key);
    else if (key == "unit_norm") base.unit_norm = number(value, key);
    else if (key == "equality_gap") base.equality_gap = number(value, key);
    else if (key == "bound_slack") base.bound_slack = number(value, key);
    else if (key == "quadrature_panels") base.quadrature_panels = integer(value, key);
    else if (key == "quadrature_nodes") base.quadrature_nodes = integer(value, key);
    else if (key == "t_grid_min") base.t_grid_min = number(value, key);
    else if (key == "t_grid_max") base.t_grid_max = number(value, key);
    else if (key == "t_grid_points") base.t_grid_points = integer(value, key);
    else {
      throw ParseError("tolerance overrides: unknown key \"" + key + "\"");
    }
  }
  if (base.t_grid_min <= 0.0 || base.t_grid_max <= base.t_grid_min) {
    throw ParseError("tolerance overrides: need 0 < t_grid_min < t_grid_max");
  }
  return base;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open \"" + path + "\" for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw IoError("read failure on \"" + path + "\"");
  }
  return std::move(buf).str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open \"" + tmp + "\" for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw IoError("write failure on \"" + tmp + "\"");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot move \"" + tmp + "\" into place");
  }
}

std::string format_double(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0.0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace qdpi
