#pragma once

// Upper bounds on squashed entanglement,
//
//   E_sq(rho12) = inf over extensions rho123 of  I(1;2|3) / 2,
//
// obtained by searching over extensions of a fixed dimension d3. Every
// extension arises from a purification |psi> of rho12 on 12R by applying an
// isometry V : R -> 3 (x) E and tracing out E. V is parameterized as
//
//   V(theta) = W exp(A(theta)) [I_r; 0]
//
// with W a unitary whose first r columns are the base isometry and A an
// anti-Hermitian generator supported on the first r rows/columns, so every
// parameter vector gives an exact isometry.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "qmi/ensembles.hpp"
#include "qmi/entropy.hpp"
#include "qmi/nelder_mead.hpp"
#include "qmi/parallel.hpp"
#include "qmi/qmat.hpp"

namespace qmi {

namespace tol {
inline constexpr double isometry = 1e-9;
inline constexpr double marginal_recovery = 1e-9;
inline constexpr double esq_noise = 2e-2;
}  // namespace tol

/// Purification of a bipartite state: column k of `amplitudes` is
/// sqrt(lambda_k) v_k for the eigenpairs with lambda_k > 1e-10, so
/// |psi> = sum_k amplitudes(:,k) (x) |k>_R.
struct Purification {
  Matrix amplitudes;  // (d1 d2) x r
  Dims dims;          // [d1, d2]

  Index rank() const { return amplitudes.cols(); }

  Vector vector() const {
    // Row-major over (12, R): entry a * r + k.
    const Index r = rank();
    Vector psi(amplitudes.rows() * r);
    for (Index a = 0; a < amplitudes.rows(); ++a) {
      for (Index k = 0; k < r; ++k) psi(a * r + k) = amplitudes(a, k);
    }
    return psi;
  }

  DensityMatrix state() const {
    Dims d = dims;
    d.push_back(rank());
    return pure_state(vector(), std::move(d));
  }
};

inline Purification purify(const DensityMatrix& rho12) {
  if (rho12.parties() != 2) {
    throw Error(ErrorCode::dims_mismatch, "purify expects a bipartite state, got dims " +
                                              dims_to_string(rho12.dims()));
  }
  const Spectrum s = herm_eigen(rho12.op());
  Index r = static_cast<Index>((s.eigenvalues.array() > tol::eigen_clamp).count());
  r = std::max<Index>(r, 1);
  Matrix amp(rho12.dim(), r);
  for (Index k = 0; k < r; ++k) {
    amp.col(k) = std::sqrt(std::max(s.eigenvalues(k), 0.0)) * s.eigenvectors.col(k);
  }
  return {std::move(amp), rho12.dims()};
}

/// Shape of the extension search space for a purification of rank r.
struct ExtensionShape {
  Index rank;      // r, dimension of the purifying system
  Index d3;        // extension dimension
  Index residual;  // dimension of the discarded environment E

  Index output_dim() const { return d3 * residual; }
  Index parameter_count() const { return rank * rank + 2 * rank * (output_dim() - rank); }

  void validate() const {
    if (rank < 1 || d3 < 1 || residual < 1) {
      throw Error(ErrorCode::invalid_argument, "extension dimensions must be positive");
    }
    if (output_dim() < rank) {
      throw Error(ErrorCode::invalid_argument,
                  "d3 * residual = " + std::to_string(output_dim()) + " cannot host rank " +
                      std::to_string(rank));
    }
  }
};

/// Default environment size: a channel from R into system 3 needs at most
/// r * d3 Kraus operators.
inline ExtensionShape default_shape(Index rank, Index d3) { return {rank, d3, rank * d3}; }

/// Base isometry |k>_R -> |k mod d3>_3 |k div d3>_E. With d3 >= r this copies R
/// into system 3, i.e. the extension is the purification itself.
inline Matrix base_isometry(const ExtensionShape& shape) {
  shape.validate();
  Matrix v = Matrix::Zero(shape.output_dim(), shape.rank);
  for (Index k = 0; k < shape.rank; ++k) {
    v((k % shape.d3) * shape.residual + k / shape.d3, k) = 1.0;
  }
  return v;
}

/// Unitary whose leading columns are exactly `v` (orthonormal columns assumed).
inline Matrix complete_to_unitary(const Matrix& v) {
  const Index n = v.rows();
  const Index r = v.cols();
  Eigen::HouseholderQR<Matrix> qr(v);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix w(n, n);
  w.leftCols(r) = v;
  w.rightCols(n - r) = q.rightCols(n - r);
  return w;
}

/// Re-embeds an isometry found at a smaller (d3, residual) into a larger one,
/// mapping |j>_3 |e>_E to the same labels.
inline Matrix embed_isometry(const Matrix& v, const ExtensionShape& from, const ExtensionShape& to) {
  if (to.d3 < from.d3 || to.residual < from.residual || to.rank != from.rank ||
      v.rows() != from.output_dim() || v.cols() != from.rank) {
    throw Error(ErrorCode::invalid_argument, "cannot embed isometry into a smaller extension space");
  }
  Matrix out = Matrix::Zero(to.output_dim(), to.rank);
  for (Index j = 0; j < from.d3; ++j) {
    for (Index e = 0; e < from.residual; ++e) out.row(j * to.residual + e) = v.row(j * from.residual + e);
  }
  return out;
}

/// Parameters of one extension: the shape, the unitary frame around the base
/// isometry, and the generator coordinates.
struct ExtensionParams {
  ExtensionShape shape;
  RealVector params;
};

/// Maps parameter vectors to isometries around a fixed base.
class IsometryMap {
 public:
  IsometryMap(ExtensionShape shape, const Matrix& base) : shape_(shape) {
    shape_.validate();
    if (base.rows() != shape_.output_dim() || base.cols() != shape_.rank) {
      throw Error(ErrorCode::dimension_mismatch, "base isometry has the wrong shape");
    }
    check_isometry(base);
    frame_ = complete_to_unitary(base);
  }

  explicit IsometryMap(ExtensionShape shape) : IsometryMap(shape, base_isometry(shape)) {}

  const ExtensionShape& shape() const noexcept { return shape_; }

  Matrix operator()(const RealVector& theta) const {
    const Index r = shape_.rank;
    const Index n = shape_.output_dim();
    if (theta.size() != shape_.parameter_count()) {
      throw Error(ErrorCode::invalid_argument,
                  "expected " + std::to_string(shape_.parameter_count()) + " parameters, got " +
                      std::to_string(theta.size()));
    }
    Matrix a = Matrix::Zero(n, n);
    Index p = 0;
    for (Index i = 0; i < r; ++i) a(i, i) = Complex(0.0, theta(p++));
    for (Index i = 0; i < r; ++i) {
      for (Index j = i + 1; j < r; ++j) {
        const Complex z(theta(p), theta(p + 1));
        p += 2;
        a(i, j) = z;
        a(j, i) = -std::conj(z);
      }
    }
    for (Index i = r; i < n; ++i) {
      for (Index j = 0; j < r; ++j) {
        const Complex z(theta(p), theta(p + 1));
        p += 2;
        a(i, j) = z;
        a(j, i) = -std::conj(z);
      }
    }
    const Matrix u = a.exp();
    return frame_ * u.leftCols(r);
  }

  static void check_isometry(const Matrix& v) {
    const Index r = v.cols();
    const double dev = max_abs_diff(v.adjoint() * v, Matrix::Identity(r, r));
    if (dev > tol::isometry) {
      throw Error(ErrorCode::isometry_violation,
                  "columns not orthonormal (deviation " + std::to_string(dev) + ")");
    }
  }

 private:
  ExtensionShape shape_;
  Matrix frame_;
};

/// rho123 = Tr_E (1 (x) V)|psi><psi|(1 (x) V)^dagger on dims [d1, d2, d3].
/// Verifies the isometry and that the (1,2) marginal is recovered.
inline DensityMatrix extend(const Purification& pur, const Matrix& v, Index d3) {
  IsometryMap::check_isometry(v);
  const Index r = pur.rank();
  const Index d12 = pur.amplitudes.rows();
  if (v.cols() != r || v.rows() % d3 != 0) {
    throw Error(ErrorCode::dimension_mismatch, "isometry shape does not match purification/d3");
  }
  const Index res = v.rows() / d3;
  const Matrix lifted = pur.amplitudes * v.transpose();  // d12 x (d3 res)
  Matrix m(d12 * d3, res);
  for (Index a = 0; a < d12; ++a) {
    for (Index j = 0; j < d3; ++j) m.row(a * d3 + j) = lifted.block(a, j * res, 1, res);
  }
  const Matrix rho123 = m * m.adjoint();

  const Matrix recovered = lifted * lifted.adjoint();
  const Matrix target = pur.amplitudes * pur.amplitudes.adjoint();
  const double dev = max_abs_diff(recovered, target);
  if (dev > tol::marginal_recovery) {
    throw Error(ErrorCode::isometry_violation,
                "extension does not reproduce rho12 (deviation " + std::to_string(dev) + ")");
  }
  Dims dims = pur.dims;
  dims.push_back(d3);
  return validate_density(rho123, std::move(dims));
}

inline DensityMatrix extend(const DensityMatrix& rho12, const ExtensionParams& p) {
  const Purification pur = purify(rho12);
  if (pur.rank() != p.shape.rank) {
    throw Error(ErrorCode::invalid_argument, "extension params built for rank " +
                                                 std::to_string(p.shape.rank) + ", state has rank " +
                                                 std::to_string(pur.rank()));
  }
  return extend(pur, IsometryMap(p.shape)(p.params), p.shape.d3);
}

struct EsqOptions {
  Index d3 = 0;        // 0: 2 * rank(rho12)
  Index residual = 0;  // 0: rank * d3
  int restarts = 8;
  NelderMeadOptions optimizer{};
  double start_scale = 1.0;  // std-dev of random restart points
  std::uint64_t seed = 3735928559ULL;
  LogBase base = LogBase::bits;
  unsigned workers = 1;
  std::optional<Matrix> warm_start;  // base isometry; default base_isometry(shape)
};

struct RestartTrace {
  int restart = 0;
  double start_value = 0.0;
  double best_value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> history;  // best half-CMI after each iteration
};

struct EsqEstimate {
  double best_cmi_half = 0.0;
  double product_baseline = 0.0;  // I(1;2)/2, attained by rho12 (x) |0><0|
  ExtensionShape shape{};
  int restarts = 0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  int best_restart = -1;  // -1: the product baseline was never beaten
  LogBase base = LogBase::bits;
  std::vector<RestartTrace> trace;
  RealVector best_params;
  Matrix best_isometry;  // empty when best_restart == -1
};

/// Minimizes I(1;2|3)/2 over isometries R -> 3 (x) E with Nelder-Mead and
/// random restarts. Restart 0 starts from the base isometry; the rest from
/// Gaussian points. The product extension is always considered, so the result
/// never exceeds I(1;2)/2.
inline EsqEstimate estimate_esq(const DensityMatrix& rho12, const EsqOptions& opt = {}) {
  if (opt.restarts < 1) throw Error(ErrorCode::invalid_argument, "restarts must be >= 1");
  const Purification pur = purify(rho12);
  const Index r = pur.rank();
  const Index d3 = opt.d3 > 0 ? opt.d3 : 2 * r;
  ExtensionShape shape = default_shape(r, d3);
  if (opt.residual > 0) shape.residual = opt.residual;
  shape.validate();

  const IsometryMap map = opt.warm_start ? IsometryMap(shape, *opt.warm_start) : IsometryMap(shape);
  const Index np = shape.parameter_count();

  auto objective = [&](const RealVector& theta) {
    return 0.5 * conditional_mutual_information(extend(pur, map(theta), d3), opt.base);
  };

  EsqEstimate est;
  est.shape = shape;
  est.restarts = opt.restarts;
  est.base = opt.base;
  est.product_baseline = 0.5 * std::max(0.0, mutual_information(rho12, opt.base));

  std::vector<NelderMeadResult> results(static_cast<std::size_t>(opt.restarts));
  std::vector<double> start_values(results.size());
  parallel_for(results.size(), opt.workers, [&](std::size_t i) {
    RealVector start = RealVector::Zero(np);
    if (i > 0) {
      Engine rng = make_engine(opt.seed, i);
      std::normal_distribution<double> normal(0.0, opt.start_scale);
      for (Index k = 0; k < np; ++k) start(k) = normal(rng);
    }
    start_values[i] = objective(start);
    results[i] = nelder_mead(objective, start, opt.optimizer);
  });

  est.best_cmi_half = est.product_baseline;
  bool best_converged = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& res = results[i];
    RestartTrace t;
    t.restart = static_cast<int>(i);
    t.start_value = start_values[i];
    t.best_value = res.value;
    t.iterations = res.iterations;
    t.evaluations = res.evaluations;
    t.converged = res.converged;
    t.history = res.best_history;
    est.iterations += res.iterations;
    est.evaluations += res.evaluations;
    if (res.value < est.best_cmi_half) {
      est.best_cmi_half = res.value;
      est.best_restart = static_cast<int>(i);
      est.best_params = res.x;
      best_converged = res.converged;
    }
    est.trace.push_back(std::move(t));
  }
  est.converged = best_converged;
  if (est.best_restart >= 0) est.best_isometry = map(est.best_params);
  return est;
}

/// Runs estimate_esq for increasing d3, each stage warm-started from the best
/// isometry of the previous one, so the estimates are nonincreasing in d3.
inline std::vector<EsqEstimate> estimate_esq_ladder(const DensityMatrix& rho12,
                                                    const std::vector<Index>& d3_schedule,
                                                    EsqOptions opt = {}) {
  if (!std::is_sorted(d3_schedule.begin(), d3_schedule.end())) {
    throw Error(ErrorCode::invalid_argument, "d3 schedule must be nondecreasing");
  }
  std::vector<EsqEstimate> out;
  for (Index d3 : d3_schedule) {
    opt.d3 = d3;
    opt.warm_start.reset();
    if (!out.empty() && out.back().best_restart >= 0) {
      ExtensionShape to = out.back().shape;
      to.d3 = d3;
      to.residual = opt.residual > 0 ? opt.residual : to.rank * d3;
      opt.warm_start = embed_isometry(out.back().best_isometry, out.back().shape, to);
    }
    out.push_back(estimate_esq(rho12, opt));
  }
  return out;
}

struct EsqProbeReport {
  double epsilon = 0.0;
  double estimate_rho = 0.0;
  double estimate_sigma = 0.0;
  double difference = 0.0;
  double reference_bound = 0.0;  // af_bound(eps, d1), a reference line only
  double noise_allowance = tol::esq_noise;
  bool within_reference = false;
};

/// Compares the E_sq estimates of two nearby states with the conditional
/// entropy continuity bound at their distance. Observational only.
inline EsqProbeReport esq_continuity_probe(const DensityMatrix& rho, const DensityMatrix& sigma,
                                           const EsqOptions& opt = {}) {
  if (rho.dims() != sigma.dims() || rho.parties() != 2) {
    throw Error(ErrorCode::dimension_mismatch, "probe needs two bipartite states with equal dims");
  }
  const double eps = trace_distance(rho, sigma);
  if (eps > 1.0 + tol::epsilon_edge) {
    throw Error(ErrorCode::out_of_regime, "trace distance " + std::to_string(eps) + " exceeds 1");
  }
  EsqProbeReport r;
  r.epsilon = std::min(eps, 1.0);
  r.estimate_rho = estimate_esq(rho, opt).best_cmi_half;
  r.estimate_sigma = estimate_esq(sigma, opt).best_cmi_half;
  r.difference = std::abs(r.estimate_rho - r.estimate_sigma);
  r.reference_bound = af_bound(r.epsilon, rho.dims()[0], opt.base);
  r.within_reference = r.difference <= r.reference_bound + r.noise_allowance;
  return r;
}

}  // namespace qmi
