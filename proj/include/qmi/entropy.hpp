#pragma once

// Entropy functionals and the closed-form continuity bounds.

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "qmi/qmat.hpp"

namespace qmi {

enum class LogBase { bits, nats };

constexpr std::string_view to_string(LogBase b) noexcept {
  return b == LogBase::bits ? "bits" : "nats";
}

inline double log_in(double x, LogBase base) {
  return base == LogBase::bits ? std::log2(x) : std::log(x);
}

/// An entropy together with the unit it is expressed in.
struct EntropyValue {
  double value = 0.0;
  LogBase base = LogBase::bits;

  EntropyValue in(LogBase target) const {
    if (target == base) return *this;
    return {target == LogBase::nats ? value * std::numbers::ln2 : value / std::numbers::ln2,
            target};
  }

  friend EntropyValue operator-(const EntropyValue& a, const EntropyValue& b) {
    if (a.base != b.base) {
      throw Error(ErrorCode::invalid_argument, "subtracting entropies in different log bases");
    }
    return {a.value - b.value, a.base};
  }
};

namespace tol {
inline constexpr double ssa_guard = 1e-9;
// Trace distances computed numerically land a few ulps above 1 for pairs
// that sit exactly on the regime edge.
inline constexpr double epsilon_edge = 1e-12;
}  // namespace tol

/// eta(x) = -x log x, with eta(0) = eta(1) = 0 exactly.
inline double eta(double x, LogBase base = LogBase::bits) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "eta argument " + std::to_string(x) + " outside [0,1]");
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * log_in(x, base);
}

/// Sum of eta over a spectrum after clamping jitter: [-1e-10, 0) -> 0 and
/// (1, 1 + 1e-10] -> 1.
inline double spectral_entropy(const RealVector& eigenvalues, LogBase base = LogBase::bits) {
  double s = 0.0;
  for (double lambda : eigenvalues) {
    if (lambda < 0.0 && lambda >= -tol::eigen_clamp) lambda = 0.0;
    if (lambda > 1.0 && lambda <= 1.0 + tol::eigen_clamp) lambda = 1.0;
    s += eta(lambda, base);
  }
  return s;
}

inline EntropyValue von_neumann_entropy(const DensityMatrix& rho, LogBase base = LogBase::bits) {
  return {spectral_entropy(herm_eigen(rho.op()).eigenvalues, base), base};
}

/// S(rho^12) - S(rho^2).
inline EntropyValue conditional_entropy(const DensityMatrix& rho12, LogBase base = LogBase::bits) {
  if (rho12.parties() != 2) {
    throw Error(ErrorCode::dims_mismatch, "conditional entropy needs exactly two subsystems, got " +
                                              dims_to_string(rho12.dims()));
  }
  return von_neumann_entropy(rho12, base) - von_neumann_entropy(partial_trace(rho12, {1}), base);
}

/// S(1) + S(2) - S(12) for a bipartite state.
inline double mutual_information(const DensityMatrix& rho12, LogBase base = LogBase::bits) {
  if (rho12.parties() != 2) {
    throw Error(ErrorCode::dims_mismatch, "mutual information needs exactly two subsystems");
  }
  return von_neumann_entropy(partial_trace(rho12, {0}), base).value +
         von_neumann_entropy(partial_trace(rho12, {1}), base).value -
         von_neumann_entropy(rho12, base).value;
}

/// I(1;2|3) = S(13|3) - S(123|23). Small negative values within 1e-9 are
/// clamped to zero; anything lower is reported as a strong-subadditivity fault.
inline double conditional_mutual_information(const DensityMatrix& rho123,
                                             LogBase base = LogBase::bits) {
  if (rho123.parties() != 3) {
    throw Error(ErrorCode::dims_mismatch, "conditional mutual information needs three subsystems, got " +
                                              dims_to_string(rho123.dims()));
  }
  const double s13 = von_neumann_entropy(partial_trace(rho123, {0, 2}), base).value;
  const double s3 = von_neumann_entropy(partial_trace(rho123, {2}), base).value;
  const double s123 = von_neumann_entropy(rho123, base).value;
  const double s23 = von_neumann_entropy(partial_trace(rho123, {1, 2}), base).value;
  const double cmi = (s13 - s3) - (s123 - s23);
  if (cmi < -tol::ssa_guard) {
    throw Error(ErrorCode::subadditivity_violation,
                "conditional mutual information " + std::to_string(cmi) + " below -1e-9");
  }
  return cmi < 0.0 ? 0.0 : cmi;
}

/// ||rho - sigma||_1, the full trace norm (ranges over [0, 2]).
inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "trace distance between dimensions " +
                                                   std::to_string(rho.dim()) + " and " +
                                                   std::to_string(sigma.dim()));
  }
  return trace_norm(rho.op() - sigma.op());
}

namespace detail {

inline void require_dimension(Index d, Index min, const char* what) {
  if (d < min) {
    throw Error(ErrorCode::invalid_argument,
                std::string(what) + " must be >= " + std::to_string(min) + ", got " + std::to_string(d));
  }
}

// Admits epsilon in [0,1] (snapping the ulp-level overshoot at 1) or throws
// BoundInapplicable with the supplied fallback.
inline double admit_epsilon(double epsilon, double fallback) {
  if (epsilon > 1.0 && epsilon <= 1.0 + tol::epsilon_edge) return 1.0;
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw BoundInapplicable(epsilon, fallback);
  return epsilon;
}

}  // namespace detail

/// 2 eps log d1 + eta(1-eps) + eta(eps): how far one eps-mixing step can move
/// the conditional entropy.
inline double lemma_bound(double epsilon, Index d1, LogBase base = LogBase::bits) {
  detail::require_dimension(d1, 2, "d1");
  const double log_d1 = log_in(static_cast<double>(d1), base);
  epsilon = detail::admit_epsilon(epsilon, 2.0 * log_d1);
  return 2.0 * epsilon * log_d1 + eta(1.0 - epsilon, base) + eta(epsilon, base);
}

/// 4 eps log d1 + 2 eta(1-eps) + 2 eta(eps), the continuity bound for the
/// conditional entropy. No dependence on the dimension of the conditioning
/// system.
inline double af_bound(double epsilon, Index d1, LogBase base = LogBase::bits) {
  detail::require_dimension(d1, 2, "d1");
  const double log_d1 = log_in(static_cast<double>(d1), base);
  epsilon = detail::admit_epsilon(epsilon, 2.0 * log_d1);
  return 4.0 * epsilon * log_d1 + 2.0 * eta(1.0 - epsilon, base) + 2.0 * eta(epsilon, base);
}

/// 2 eps log d + eta(eps) + eta(1-eps) for the von Neumann entropy itself.
inline double entropy_continuity_bound(double epsilon, Index d, LogBase base = LogBase::bits) {
  detail::require_dimension(d, 1, "d");
  const double log_d = log_in(static_cast<double>(d), base);
  epsilon = detail::admit_epsilon(epsilon, log_d);
  return 2.0 * epsilon * log_d + eta(epsilon, base) + eta(1.0 - epsilon, base);
}

/// Dimension of the span of the supports of rho and sigma: rank of rho + sigma
/// counting eigenvalues above 1e-10.
inline Index support_span_rank(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const RealVector ev = herm_eigen(rho.op() + sigma.op()).eigenvalues;
  return static_cast<Index>((ev.array() > tol::eigen_clamp).count());
}

enum class SpanDimension { support_rank, ambient };

}  // namespace qmi
