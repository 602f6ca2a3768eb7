#pragma once

// Built-in reference states, addressable by name wherever a state file is
// accepted:
//
//   bell                  Phi+ on 2x2
//   ghz                   (|000> + |111>)/sqrt 2 on 2x2x2
//   maxmix:D | maxmix:AxB maximally mixed state, e.g. maxmix:4 or maxmix:2x2
//   classical-corr        (|00><00| + |11><11|)/2 on 2x2
//   depolarized-bell:p    (1-p) Phi+ + p I/4
//   product               diag(3/4,1/4) (x) diag(2/3,1/3)

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "qmi/qmat.hpp"
#include "qmi/state_io.hpp"

namespace qmi {

inline DensityMatrix bell_state() {
  Vector psi = Vector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  return pure_state(psi, {2, 2});
}

inline DensityMatrix ghz_state() {
  Vector psi = Vector::Zero(8);
  psi(0) = psi(7) = 1.0 / std::sqrt(2.0);
  return pure_state(psi, {2, 2, 2});
}

inline DensityMatrix classically_correlated_state() {
  return validate_density(RealVector{{0.5, 0.0, 0.0, 0.5}}.cast<Complex>().asDiagonal().toDenseMatrix(),
                          {2, 2});
}

inline DensityMatrix depolarized_bell(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::invalid_argument, "depolarizing weight outside [0,1]");
  return mix(bell_state(), maximally_mixed({2, 2}), p);
}

inline DensityMatrix diagonal_state(const RealVector& diag, Dims dims) {
  return validate_density(diag.cast<Complex>().asDiagonal().toDenseMatrix(), std::move(dims));
}

namespace detail {

inline Dims parse_dims_list(std::string_view s, char sep) {
  Dims dims;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t end = std::min(s.find(sep, start), s.size());
    const std::string part(s.substr(start, end - start));
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size() || part.empty() || v < 1) {
      throw Error(ErrorCode::invalid_argument, "bad dimension '" + part + "'");
    }
    dims.push_back(static_cast<Index>(v));
    start = end + 1;
  }
  return dims;
}

}  // namespace detail

/// Resolves a built-in name, or returns nullopt if `name` is not one.
inline std::optional<DensityMatrix> named_state(std::string_view name) {
  if (name == "bell") return bell_state();
  if (name == "ghz") return ghz_state();
  if (name == "classical-corr") return classically_correlated_state();
  if (name == "product") {
    return tensor(diagonal_state(RealVector{{0.75, 0.25}}, {2}),
                  diagonal_state(RealVector{{2.0 / 3.0, 1.0 / 3.0}}, {2}));
  }
  if (name.starts_with("maxmix:")) return maximally_mixed(detail::parse_dims_list(name.substr(7), 'x'));
  if (name.starts_with("depolarized-bell:")) {
    const std::string arg(name.substr(17));
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size() || arg.empty()) {
      throw Error(ErrorCode::invalid_argument, "bad depolarizing weight '" + arg + "'");
    }
    return depolarized_bell(p);
  }
  return std::nullopt;
}

/// A path to an existing file is loaded; otherwise the argument must be a
/// built-in name.
inline DensityMatrix resolve_state(const std::string& arg) {
  if (std::filesystem::exists(arg)) return load_state(arg);
  if (auto s = named_state(arg)) return *s;
  throw Error(ErrorCode::io_error, "'" + arg + "' is neither a readable state file nor a built-in state");
}

}  // namespace qmi
