#pragma once

// Seeded random states. Every generator is a pure function of its inputs and
// an engine; engines are derived from (master seed, stream index) so trials can
// run in any order on any number of workers and still see the same draws.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "qmi/entropy.hpp"
#include "qmi/qmat.hpp"

namespace qmi {

using Engine = std::mt19937_64;

/// Independent engine for stream `index` under `seed`.
inline Engine make_engine(std::uint64_t seed, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x71u, 0x6du, 0x69u};
  return Engine(seq);
}

/// Matrix of i.i.d. standard complex normals (real and imaginary parts each
/// N(0, 1/2)).
inline Matrix ginibre(Index rows, Index cols, Engine& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

inline Vector haar_vector(Index d, Engine& rng) {
  Vector v = ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal moved into Q.
inline Matrix haar_unitary(Index d, Engine& rng) {
  const Matrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    q.col(j) *= mag > 0.0 ? rjj / mag : Complex(1.0, 0.0);
  }
  return q;
}

inline DensityMatrix haar_pure(Dims dims, Engine& rng) {
  const Vector psi = haar_vector(dims_product(dims), rng);
  return pure_state(psi, std::move(dims));
}

inline DensityMatrix haar_pure(Index d, std::uint64_t seed) {
  Engine rng = make_engine(seed);
  return haar_pure(Dims{d}, rng);
}

/// Reduced state of a Haar pure state on (system) x (ancilla).
inline DensityMatrix induced_mixed(Dims dims, Index ancilla, Engine& rng) {
  if (ancilla < 1) throw Error(ErrorCode::invalid_argument, "ancilla dimension must be >= 1");
  const Index d = dims_product(dims);
  // Columns of G index the ancilla, so G G^dagger / Tr is the reduced state.
  const Matrix g = ginibre(d, ancilla, rng);
  const Matrix rho = g * g.adjoint();
  return validate_density(rho / rho.trace().real(), std::move(dims));
}

inline DensityMatrix induced_mixed(Index d, Index ancilla, std::uint64_t seed) {
  Engine rng = make_engine(seed);
  return induced_mixed(Dims{d}, ancilla, rng);
}

/// Random state of rank at most `rank`.
inline DensityMatrix rank_limited(Dims dims, Index rank, Engine& rng) {
  return induced_mixed(std::move(dims), rank, rng);
}

struct PerturbedPair {
  DensityMatrix rho;
  DensityMatrix sigma;
  double achieved_epsilon;
  double mixing_weight;  // t in sigma = (1-t) rho + t tau
  bool target_reached;
};

namespace tol {
inline constexpr double perturbation_target = 1e-6;
}

/// sigma = (1-t) rho + t tau with t found by bisection so that the trace
/// distance hits `target_epsilon` to 1e-6. When even t = 1 falls short the
/// pair at t = 1 is returned with target_reached = false.
inline PerturbedPair perturbation_pair(const DensityMatrix& rho, const DensityMatrix& tau,
                                       double target_epsilon) {
  if (!(target_epsilon >= 0.0 && target_epsilon <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "target epsilon outside [0,1]");
  }
  if (target_epsilon == 0.0) return {rho, rho, 0.0, 0.0, true};

  auto distance_at = [&](double t) { return trace_norm(t * (tau.op() - rho.op())); };

  const double full = distance_at(1.0);
  if (full < target_epsilon - tol::perturbation_target) {
    DensityMatrix sigma = mix(rho, tau, 1.0);
    const double achieved = trace_distance(rho, sigma);
    return {rho, std::move(sigma), achieved, 1.0, false};
  }

  double lo = 0.0;
  double hi = 1.0;
  double eps_lo = 0.0;
  double t = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    t = 0.5 * (lo + hi);
    const double e = distance_at(t);
    if (std::abs(e - target_epsilon) <= 0.25 * tol::perturbation_target) break;
    if (e < target_epsilon) {
      if (e < eps_lo) {
        throw Error(ErrorCode::invalid_argument,
                    "trace distance decreased along the mixing segment");
      }
      lo = t;
      eps_lo = e;
    } else {
      hi = t;
    }
  }
  DensityMatrix sigma = mix(rho, tau, t);
  const double achieved = trace_distance(rho, sigma);
  const bool reached = std::abs(achieved - target_epsilon) <= tol::perturbation_target;
  return {rho, std::move(sigma), achieved, t, reached};
}

inline PerturbedPair perturbation_pair(const DensityMatrix& rho, double target_epsilon,
                                       Engine& rng) {
  const DensityMatrix tau = induced_mixed(rho.dims(), rho.dim(), rng);
  return perturbation_pair(rho, tau, target_epsilon);
}

enum class EnsembleKind { haar_pure, induced_mixed, rank_limited, perturbation_pair };

constexpr std::string_view to_string(EnsembleKind k) noexcept {
  switch (k) {
    case EnsembleKind::haar_pure: return "haar_pure";
    case EnsembleKind::induced_mixed: return "induced_mixed";
    case EnsembleKind::rank_limited: return "rank_limited";
    case EnsembleKind::perturbation_pair: return "perturbation_pair";
  }
  return "unknown";
}

inline EnsembleKind parse_ensemble_kind(std::string_view s) {
  for (auto k : {EnsembleKind::haar_pure, EnsembleKind::induced_mixed, EnsembleKind::rank_limited,
                 EnsembleKind::perturbation_pair}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::invalid_argument, "unknown ensemble kind '" + std::string(s) + "'");
}

/// Recipe for drawing a pair of states on `dims`.
///
///   haar_pure          two independent Haar pure states
///   induced_mixed      two independent induced states, ancilla dimension
///                      `ancilla_dim` (0 = total dimension, Hilbert-Schmidt)
///   rank_limited       as induced_mixed with ancilla = rank (default 2)
///   perturbation_pair  an induced rho and a sigma on the segment towards a
///                      random tau at distance `target_epsilon`, or uniform
///                      in [0,1] when unset
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::perturbation_pair;
  Dims dims;
  Index ancilla_dim = 0;
  std::optional<double> target_epsilon;
  std::uint64_t seed = 0;

  void validate() const {
    if (dims.empty()) throw Error(ErrorCode::invalid_argument, "ensemble dims are empty");
    if (target_epsilon && !(*target_epsilon >= 0.0 && *target_epsilon <= 1.0)) {
      throw Error(ErrorCode::invalid_argument, "target_epsilon must lie in [0,1]");
    }
  }
};

struct StatePair {
  DensityMatrix rho;
  DensityMatrix sigma;
};

/// Pair number `index` of the ensemble.
inline StatePair draw_pair(const EnsembleSpec& spec, std::uint64_t index) {
  spec.validate();
  Engine rng = make_engine(spec.seed, index);
  const Index d = dims_product(spec.dims);
  switch (spec.kind) {
    case EnsembleKind::haar_pure: {
      DensityMatrix a = haar_pure(spec.dims, rng);
      DensityMatrix b = haar_pure(spec.dims, rng);
      return {std::move(a), std::move(b)};
    }
    case EnsembleKind::induced_mixed:
    case EnsembleKind::rank_limited: {
      Index k = spec.ancilla_dim;
      if (k == 0) k = spec.kind == EnsembleKind::rank_limited ? 2 : d;
      DensityMatrix a = induced_mixed(spec.dims, k, rng);
      DensityMatrix b = induced_mixed(spec.dims, k, rng);
      return {std::move(a), std::move(b)};
    }
    case EnsembleKind::perturbation_pair: {
      const Index k = spec.ancilla_dim == 0 ? d : spec.ancilla_dim;
      DensityMatrix rho = induced_mixed(spec.dims, k, rng);
      DensityMatrix tau = induced_mixed(spec.dims, k, rng);
      const double target = spec.target_epsilon
                                ? *spec.target_epsilon
                                : std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      auto p = perturbation_pair(rho, tau, target);
      return {std::move(p.rho), std::move(p.sigma)};
    }
  }
  throw Error(ErrorCode::invalid_argument, "unhandled ensemble kind");
}

}  // namespace qmi
