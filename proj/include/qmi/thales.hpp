#pragma once

// The auxiliary-state construction behind the conditional-entropy continuity
// bound, in executable form.
//
// For states rho, sigma at trace distance eps in (0, 1] write rho - sigma =
// P - N with P, N >= 0 on orthogonal supports. Then
//
//   gamma       = (1 - eps) rho + |rho - sigma|
//   rho_tilde   = |rho - sigma| / eps
//   sigma_tilde = ((1 - eps)(rho - sigma) + |rho - sigma|) / eps
//               = ((2 - eps) P + eps N) / eps
//
// and gamma is simultaneously the eps-mixture (1-eps) rho + eps rho_tilde and
// (1-eps) sigma + eps sigma_tilde. Everything here measures those identities
// and the inequalities that chain through gamma.

#include <algorithm>
#include <cmath>

#include "qmi/entropy.hpp"
#include "qmi/qmat.hpp"

namespace qmi {

namespace tol {
inline constexpr double identity_residual = 1e-10;
inline constexpr double inequality = 1e-9;
// Below this trace distance the pair is treated as identical.
inline constexpr double degenerate_epsilon = 1e-14;
}  // namespace tol

struct ThalesDecomposition {
  double epsilon;
  DensityMatrix rho;
  DensityMatrix sigma;
  DensityMatrix gamma;
  DensityMatrix rho_tilde;
  DensityMatrix sigma_tilde;
  HermitianOperator positive_part;  // P
  HermitianOperator negative_part;  // N
};

/// Maximum entrywise deviations of every identity the decomposition promises.
struct ThalesResiduals {
  double gamma_via_rho;         // gamma - ((1-eps) rho + eps rho_tilde)
  double gamma_via_sigma;       // gamma - ((1-eps) sigma + eps sigma_tilde)
  double rho_tilde_definition;  // rho_tilde - |rho - sigma| / eps
  double sigma_tilde_definition;  // sigma_tilde - ((1-eps)(rho-sigma) + |rho-sigma|)/eps
  double trace_positive_part;   // |Tr P - eps/2|
  double trace_negative_part;   // |Tr N - eps/2|
  double min_eigen_rho_tilde;
  double min_eigen_sigma_tilde;
  double trace_rho_tilde;
  double trace_sigma_tilde;

  double max_identity_residual() const {
    return std::max({gamma_via_rho, gamma_via_sigma, rho_tilde_definition, sigma_tilde_definition});
  }

  bool holds(double tolerance = tol::identity_residual) const {
    return max_identity_residual() <= tolerance && trace_positive_part <= tolerance &&
           trace_negative_part <= tolerance && min_eigen_rho_tilde >= -tolerance &&
           min_eigen_sigma_tilde >= -tolerance && std::abs(trace_rho_tilde - 1.0) <= tolerance &&
           std::abs(trace_sigma_tilde - 1.0) <= tolerance;
  }
};

inline ThalesDecomposition decompose(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dims() != sigma.dims()) {
    throw Error(ErrorCode::dimension_mismatch, "decompose: dims " + dims_to_string(rho.dims()) +
                                                   " vs " + dims_to_string(sigma.dims()));
  }
  const HermitianOperator diff = rho.op() - sigma.op();
  auto [pos, neg] = jordan_decomposition(diff);
  double epsilon = pos.trace() + neg.trace();
  if (epsilon <= tol::degenerate_epsilon) {
    throw Error(ErrorCode::degenerate_case,
                "trace distance is 0; the continuity bound is trivially 0 = 0");
  }
  if (epsilon > 1.0 + tol::epsilon_edge) {
    throw Error(ErrorCode::out_of_regime,
                "trace distance " + std::to_string(epsilon) + " exceeds 1; the construction needs eps <= 1");
  }
  epsilon = std::min(epsilon, 1.0);

  const HermitianOperator abs_diff = pos + neg;
  DensityMatrix gamma = validate_density((1.0 - epsilon) * rho.op() + abs_diff, rho.dims());
  DensityMatrix rho_tilde = validate_density(abs_diff / epsilon, rho.dims());
  DensityMatrix sigma_tilde =
      validate_density(((2.0 - epsilon) * pos + epsilon * neg) / epsilon, rho.dims());
  return {epsilon,
          rho,
          sigma,
          std::move(gamma),
          std::move(rho_tilde),
          std::move(sigma_tilde),
          std::move(pos),
          std::move(neg)};
}

inline ThalesResiduals residuals(const ThalesDecomposition& t) {
  const double e = t.epsilon;
  const Matrix diff = t.rho.matrix() - t.sigma.matrix();
  const Matrix abs_diff = operator_abs(t.rho.op() - t.sigma.op()).matrix();
  ThalesResiduals r{};
  r.gamma_via_rho = max_abs_diff(t.gamma.matrix(), (1.0 - e) * t.rho.matrix() + e * t.rho_tilde.matrix());
  r.gamma_via_sigma =
      max_abs_diff(t.gamma.matrix(), (1.0 - e) * t.sigma.matrix() + e * t.sigma_tilde.matrix());
  r.rho_tilde_definition = max_abs_diff(t.rho_tilde.matrix(), abs_diff / e);
  r.sigma_tilde_definition =
      max_abs_diff(t.sigma_tilde.matrix(), ((1.0 - e) * diff + abs_diff) / e);
  r.trace_positive_part = std::abs(t.positive_part.trace() - e / 2.0);
  r.trace_negative_part = std::abs(t.negative_part.trace() - e / 2.0);
  r.min_eigen_rho_tilde = herm_eigen(t.rho_tilde.op()).eigenvalues.minCoeff();
  r.min_eigen_sigma_tilde = herm_eigen(t.sigma_tilde.op()).eigenvalues.minCoeff();
  r.trace_rho_tilde = t.rho_tilde.op().trace();
  r.trace_sigma_tilde = t.sigma_tilde.op().trace();
  return r;
}

/// Measured quantities along the two one-sided chains that bound
/// |S(rho|rho2) - S(gamma|gamma2)| for gamma = (1-eps) rho + eps rho_tilde.
struct LemmaChainReport {
  double epsilon;
  Index d1;
  LogBase base;

  double cond_rho;        // S(rho^12 | rho^2)
  double cond_rho_tilde;  // S(rho_tilde^12 | rho_tilde^2)
  double cond_gamma;      // S(gamma^12 | gamma^2)

  // S(gamma|gamma2) - [(1-eps) S(rho|rho2) + eps S(rho_tilde|..)], >= 0 by concavity.
  double conditional_concavity_gap;
  // S(gamma^2) - [(1-eps) S(rho^2) + eps S(rho_tilde^2)], >= 0 by concavity.
  double marginal_concavity_gap;
  // S(gamma^12) - [(1-eps) S(rho^12) + eps S(rho_tilde^12)], <= eta(1-eps) + eta(eps).
  double mixing_slack;
  double mixing_cap;  // eta(1-eps) + eta(eps)

  double difference;    // S(rho|rho2) - S(gamma|gamma2)
  double scaled_spread;  // eps (S(rho|rho2) - S(rho_tilde|rho_tilde2))
  double upper_cap;     // 2 eps log d1
  double lower_cap;     // -2 eps log d1 - eta(1-eps) - eta(eps)
  double lemma_bound;   // 2 eps log d1 + eta(1-eps) + eta(eps)

  bool concavity_ok;
  bool marginal_concavity_ok;
  bool mixing_ok;
  bool upper_chain_ok;  // difference <= scaled_spread <= upper_cap
  bool lower_chain_ok;  // difference >= scaled_spread - mixing_cap >= lower_cap
  bool lemma_ok;        // |difference| <= lemma_bound

  bool all_ok() const {
    return concavity_ok && marginal_concavity_ok && mixing_ok && upper_chain_ok && lower_chain_ok &&
           lemma_ok;
  }
};

namespace detail {

struct BipartiteEntropies {
  double joint;
  double second;
  double conditional() const { return joint - second; }
};

inline BipartiteEntropies bipartite_entropies(const DensityMatrix& rho12, LogBase base) {
  if (rho12.parties() != 2) {
    throw Error(ErrorCode::dims_mismatch, "expected a bipartite state, got dims " +
                                              dims_to_string(rho12.dims()));
  }
  return {von_neumann_entropy(rho12, base).value,
          von_neumann_entropy(partial_trace(rho12, {1}), base).value};
}

}  // namespace detail

inline LemmaChainReport check_lemma_chain(const DensityMatrix& rho, const DensityMatrix& rho_tilde,
                                          double epsilon, LogBase base = LogBase::bits,
                                          double tolerance = tol::inequality) {
  if (rho.dims() != rho_tilde.dims()) {
    throw Error(ErrorCode::dimension_mismatch, "check_lemma_chain: dims " +
                                                   dims_to_string(rho.dims()) + " vs " +
                                                   dims_to_string(rho_tilde.dims()));
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "mixing weight outside [0,1]");
  }
  const DensityMatrix gamma = mix(rho, rho_tilde, epsilon);
  const auto er = detail::bipartite_entropies(rho, base);
  const auto et = detail::bipartite_entropies(rho_tilde, base);
  const auto eg = detail::bipartite_entropies(gamma, base);
  const double w = 1.0 - epsilon;

  LemmaChainReport r{};
  r.epsilon = epsilon;
  r.d1 = rho.dims()[0];
  r.base = base;
  r.cond_rho = er.conditional();
  r.cond_rho_tilde = et.conditional();
  r.cond_gamma = eg.conditional();

  r.conditional_concavity_gap = r.cond_gamma - (w * r.cond_rho + epsilon * r.cond_rho_tilde);
  r.marginal_concavity_gap = eg.second - (w * er.second + epsilon * et.second);
  r.mixing_slack = eg.joint - (w * er.joint + epsilon * et.joint);
  r.mixing_cap = eta(w, base) + eta(epsilon, base);

  r.difference = r.cond_rho - r.cond_gamma;
  r.scaled_spread = epsilon * (r.cond_rho - r.cond_rho_tilde);
  const double log_d1 = log_in(static_cast<double>(r.d1), base);
  r.upper_cap = 2.0 * epsilon * log_d1;
  r.lower_cap = -2.0 * epsilon * log_d1 - r.mixing_cap;
  r.lemma_bound = r.d1 >= 2 ? lemma_bound(epsilon, r.d1, base) : r.mixing_cap;

  r.concavity_ok = r.conditional_concavity_gap >= -tolerance;
  r.marginal_concavity_ok = r.marginal_concavity_gap >= -tolerance;
  r.mixing_ok = r.mixing_slack <= r.mixing_cap + tolerance;
  r.upper_chain_ok =
      r.difference <= r.scaled_spread + tolerance && r.scaled_spread <= r.upper_cap + tolerance;
  r.lower_chain_ok = r.difference >= r.scaled_spread - r.mixing_cap - tolerance &&
                     r.scaled_spread - r.mixing_cap >= r.lower_cap - tolerance;
  r.lemma_ok = std::abs(r.difference) <= r.lemma_bound + tolerance;
  return r;
}

/// The triangle inequality through gamma, with every intermediate quantity.
struct AssemblyReport {
  double epsilon;
  double lhs;          // |S(rho|rho2) - S(sigma|sigma2)|
  double leg_rho;      // |S(rho|rho2) - S(gamma|gamma2)|
  double leg_sigma;    // |S(sigma|sigma2) - S(gamma|gamma2)|
  double triangle;     // leg_rho + leg_sigma
  double leg_bound;    // lemma bound, applies to each leg
  double bound;        // af_bound(eps, d1)
  bool triangle_ok;
  bool legs_ok;
  bool bound_ok;

  double margin() const { return bound - lhs; }
  bool all_ok() const { return triangle_ok && legs_ok && bound_ok; }
};

inline AssemblyReport check_theorem_assembly(const DensityMatrix& rho, const DensityMatrix& sigma,
                                             LogBase base = LogBase::bits,
                                             double tolerance = tol::inequality) {
  const ThalesDecomposition t = decompose(rho, sigma);
  if (rho.parties() != 2) {
    throw Error(ErrorCode::dims_mismatch, "theorem assembly needs bipartite states");
  }
  const Index d1 = rho.dims()[0];
  const double s_rho = conditional_entropy(rho, base).value;
  const double s_sigma = conditional_entropy(sigma, base).value;
  const double s_gamma = conditional_entropy(t.gamma, base).value;

  AssemblyReport r{};
  r.epsilon = t.epsilon;
  r.lhs = std::abs(s_rho - s_sigma);
  r.leg_rho = std::abs(s_rho - s_gamma);
  r.leg_sigma = std::abs(s_sigma - s_gamma);
  r.triangle = r.leg_rho + r.leg_sigma;
  r.leg_bound = lemma_bound(t.epsilon, d1, base);
  r.bound = af_bound(t.epsilon, d1, base);
  r.triangle_ok = r.lhs <= r.triangle + tolerance;
  r.legs_ok = r.leg_rho <= r.leg_bound + tolerance && r.leg_sigma <= r.leg_bound + tolerance;
  r.bound_ok = r.triangle <= r.bound + tolerance;
  return r;
}

}  // namespace qmi
