#pragma once

// JSON state files: {"dims": [d1, d2, ...], "re": [[...]], "im": [[...]]},
// row-major real and imaginary parts. Doubles are written in shortest
// round-trip form, so load(save(rho)) is exact.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qmi/qmat.hpp"

namespace qmi {

using Json = nlohmann::json;

inline Json state_to_json(const DensityMatrix& rho) {
  Json re = Json::array();
  Json im = Json::array();
  for (Index i = 0; i < rho.dim(); ++i) {
    Json re_row = Json::array();
    Json im_row = Json::array();
    for (Index j = 0; j < rho.dim(); ++j) {
      re_row.push_back(rho.matrix()(i, j).real());
      im_row.push_back(rho.matrix()(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return Json{{"dims", rho.dims()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

namespace detail {

inline Eigen::MatrixXd read_part(const Json& j, const char* key, Index n, bool required) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  if (!j.contains(key)) {
    if (required) throw Error(ErrorCode::schema_error, std::string("missing \"") + key + "\"");
    return out;
  }
  const Json& rows = j.at(key);
  if (!rows.is_array() || static_cast<Index>(rows.size()) != n) {
    throw Error(ErrorCode::schema_error, std::string("\"") + key + "\" must have " +
                                             std::to_string(n) + " rows to match dims");
  }
  for (Index i = 0; i < n; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n) {
      throw Error(ErrorCode::schema_error, std::string("row ") + std::to_string(i) + " of \"" + key +
                                               "\" must have " + std::to_string(n) + " entries");
    }
    for (Index k = 0; k < n; ++k) {
      const Json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) {
        throw Error(ErrorCode::schema_error, std::string("non-numeric entry in \"") + key + "\"");
      }
      out(i, k) = v.get<double>();
    }
  }
  return out;
}

}  // namespace detail

/// Parses and validates a state document. Schema problems raise SchemaError;
/// admissible-state problems raise the validate_density codes.
inline DensityMatrix state_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::schema_error, "state document must be a JSON object");
  if (!j.contains("dims") || !j.at("dims").is_array() || j.at("dims").empty()) {
    throw Error(ErrorCode::schema_error, "\"dims\" must be a nonempty array");
  }
  Dims dims;
  for (const Json& d : j.at("dims")) {
    if (!d.is_number_integer() || d.get<long long>() < 1) {
      throw Error(ErrorCode::schema_error, "\"dims\" entries must be positive integers");
    }
    dims.push_back(d.get<Index>());
  }
  const Index n = dims_product(dims);
  Matrix m(n, n);
  m.real() = detail::read_part(j, "re", n, true);
  m.imag() = detail::read_part(j, "im", n, false);
  return validate_density(m, std::move(dims));
}

/// Writes `contents` to `path` through a sibling temporary and a rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out.flush()) throw Error(ErrorCode::io_error, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::io_error, "rename to " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void save_state(const DensityMatrix& rho, const std::filesystem::path& path) {
  write_file_atomic(path, state_to_json(rho).dump(2) + "\n");
}

inline DensityMatrix load_state(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::schema_error, path.string() + ": " + e.what());
  }
  return state_from_json(j);
}

}  // namespace qmi
