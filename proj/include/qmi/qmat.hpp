#pragma once

// Dense complex Hermitian operator algebra for small multipartite systems.
//
// Subsystem ordering is row-major throughout: the first factor of a tensor
// product is the slowest-varying index of the composite basis.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmi/error.hpp"

namespace qmi {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;
using Dims = std::vector<Index>;

namespace tol {
inline constexpr double hermiticity = 1e-12;
inline constexpr double eigen_clamp = 1e-10;
inline constexpr double trace_admission = 1e-9;
inline constexpr double clamped_mass = 1e-9;
}  // namespace tol

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "max_abs_diff on differently shaped matrices");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

inline Index dims_product(std::span<const Index> dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

inline std::string dims_to_string(std::span<const Index> dims) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
  os << ']';
  return os.str();
}

/// Hermitian complex matrix. Admission checks the hermiticity residual against
/// tol::hermiticity and then symmetrizes exactly, so every stored instance is
/// Hermitian to the last bit.
class HermitianOperator {
 public:
  struct trusted_t {};
  static constexpr trusted_t trusted{};

  HermitianOperator() = default;

  explicit HermitianOperator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
      throw Error(ErrorCode::not_square, "operator is " + std::to_string(m_.rows()) + "x" +
                                             std::to_string(m_.cols()));
    }
    if (m_.rows() == 0) throw Error(ErrorCode::invalid_argument, "operator of dimension 0");
    const double residual = max_abs_diff(m_, m_.adjoint());
    if (residual > tol::hermiticity) {
      std::ostringstream os;
      os << "hermiticity residual " << residual << " exceeds " << tol::hermiticity;
      throw Error(ErrorCode::not_hermitian, os.str());
    }
    symmetrize();
  }

  /// Skips the residual check but still symmetrizes. For results that are
  /// Hermitian up to rounding by construction.
  HermitianOperator(trusted_t, Matrix m) : m_(std::move(m)) { symmetrize(); }

  static HermitianOperator zero(Index d) { return {trusted, Matrix::Zero(d, d)}; }
  static HermitianOperator identity(Index d) { return {trusted, Matrix::Identity(d, d)}; }
  static HermitianOperator diagonal(const RealVector& diag) {
    return {trusted, diag.cast<Complex>().asDiagonal()};
  }
  /// |v><v| (not normalized).
  static HermitianOperator projector(const Vector& v) { return {trusted, v * v.adjoint()}; }

  Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }

  friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
    check_same_dim(a, b);
    return {trusted, a.m_ + b.m_};
  }
  friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
    check_same_dim(a, b);
    return {trusted, a.m_ - b.m_};
  }
  friend HermitianOperator operator-(const HermitianOperator& a) { return {trusted, -a.m_}; }
  friend HermitianOperator operator*(double s, const HermitianOperator& a) {
    return {trusted, s * a.m_};
  }
  friend HermitianOperator operator*(const HermitianOperator& a, double s) { return s * a; }
  friend HermitianOperator operator/(const HermitianOperator& a, double s) {
    return {trusted, a.m_ / s};
  }

 private:
  static void check_same_dim(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim()) {
      throw Error(ErrorCode::dimension_mismatch, "operators of dimension " +
                                                     std::to_string(a.dim()) + " and " +
                                                     std::to_string(b.dim()));
    }
  }

  void symmetrize() { m_ = (0.5 * (m_ + m_.adjoint())).eval(); }

  Matrix m_;
};

/// Eigen-decomposition of a Hermitian operator, eigenvalues descending.
struct Spectrum {
  RealVector eigenvalues;
  Matrix eigenvectors;  // columns

  Matrix reconstruct() const {
    return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
  }
};

inline Spectrum herm_eigen(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::eigensolver_failure,
                "self-adjoint eigensolver did not converge (dim " + std::to_string(h.dim()) + ")");
  }
  Spectrum s;
  s.eigenvalues = solver.eigenvalues().reverse();
  s.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return s;
}

/// V f(Lambda) V^dagger for a real function f applied to the eigenvalues.
template <class F>
HermitianOperator spectral_apply(const Spectrum& s, F&& f) {
  RealVector mapped = s.eigenvalues.unaryExpr(std::forward<F>(f));
  return {HermitianOperator::trusted,
          s.eigenvectors * mapped.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint()};
}

inline HermitianOperator operator_abs(const HermitianOperator& h) {
  return spectral_apply(herm_eigen(h), [](double x) { return std::abs(x); });
}

inline double trace_norm(const HermitianOperator& h) {
  return herm_eigen(h).eigenvalues.cwiseAbs().sum();
}

/// h = positive - negative with orthogonal supports, both PSD.
struct JordanDecomposition {
  HermitianOperator positive;
  HermitianOperator negative;
};

inline JordanDecomposition jordan_decomposition(const HermitianOperator& h) {
  const Spectrum s = herm_eigen(h);
  return {spectral_apply(s, [](double x) { return x > 0.0 ? x : 0.0; }),
          spectral_apply(s, [](double x) { return x < 0.0 ? -x : 0.0; })};
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  return {HermitianOperator::trusted, kron(a.matrix(), b.matrix())};
}

/// Unit-trace positive semidefinite operator with declared subsystem
/// dimensions. Only obtainable through validate_density, so every instance
/// satisfies the state invariants.
class DensityMatrix {
 public:
  const Dims& dims() const noexcept { return dims_; }
  const HermitianOperator& op() const noexcept { return op_; }
  const Matrix& matrix() const noexcept { return op_.matrix(); }
  Index dim() const noexcept { return op_.dim(); }
  std::size_t parties() const noexcept { return dims_.size(); }

  friend DensityMatrix validate_density(const Matrix& m, Dims dims);

 private:
  DensityMatrix(Dims dims, HermitianOperator op) : dims_(std::move(dims)), op_(std::move(op)) {}

  Dims dims_;
  HermitianOperator op_;
};

/// Admission of a candidate state: symmetrizes within the hermiticity
/// tolerance, clamps eigenvalues in [-1e-10, 0) to zero when the clamped mass
/// stays under 1e-9, and renormalizes the trace. Anything else is rejected.
inline DensityMatrix validate_density(const Matrix& m, Dims dims) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::not_square,
                "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (dims.empty() || std::any_of(dims.begin(), dims.end(), [](Index d) { return d < 1; })) {
    throw Error(ErrorCode::dims_mismatch, "dims must be a nonempty list of positive integers");
  }
  if (dims_product(dims) != m.rows()) {
    throw Error(ErrorCode::dims_mismatch, "dims " + dims_to_string(dims) + " do not multiply to " +
                                              std::to_string(m.rows()));
  }
  HermitianOperator h(m);

  const double trace = h.trace();
  if (std::abs(trace - 1.0) > tol::trace_admission) {
    std::ostringstream os;
    os.precision(17);
    os << "trace " << trace << " differs from 1 by more than " << tol::trace_admission;
    throw Error(ErrorCode::trace_mismatch, os.str());
  }

  Spectrum s = herm_eigen(h);
  const double min_eig = s.eigenvalues.minCoeff();
  if (min_eig < -tol::eigen_clamp) {
    std::ostringstream os;
    os.precision(17);
    os << "eigenvalue " << min_eig << " below -" << tol::eigen_clamp;
    throw Error(ErrorCode::negative_eigenvalue, os.str());
  }
  if (min_eig < 0.0) {
    double clamped = 0.0;
    for (Index i = 0; i < s.eigenvalues.size(); ++i) {
      if (s.eigenvalues(i) < 0.0) {
        clamped += -s.eigenvalues(i);
        s.eigenvalues(i) = 0.0;
      }
    }
    if (clamped >= tol::clamped_mass) {
      std::ostringstream os;
      os << "clamped negative mass " << clamped << " exceeds " << tol::clamped_mass;
      throw Error(ErrorCode::negative_eigenvalue, os.str());
    }
    h = HermitianOperator(HermitianOperator::trusted, s.reconstruct());
  }
  return DensityMatrix(std::move(dims), h / h.trace());
}

inline DensityMatrix validate_density(const HermitianOperator& h, Dims dims) {
  return validate_density(h.matrix(), std::move(dims));
}

inline DensityMatrix pure_state(const Vector& psi, Dims dims) {
  const double n = psi.norm();
  if (n == 0.0) throw Error(ErrorCode::invalid_argument, "zero vector");
  const Vector v = psi / n;
  return validate_density(v * v.adjoint(), std::move(dims));
}

inline DensityMatrix maximally_mixed(Dims dims) {
  const Index d = dims_product(dims);
  return validate_density(Matrix::Identity(d, d) / static_cast<double>(d), std::move(dims));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return validate_density(kron(a.matrix(), b.matrix()), std::move(dims));
}

/// Convex combination (1-t) a + t b of two states with identical dims.
inline DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double t) {
  if (a.dims() != b.dims()) {
    throw Error(ErrorCode::dimension_mismatch,
                "mixing states with dims " + dims_to_string(a.dims()) + " and " +
                    dims_to_string(b.dims()));
  }
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::invalid_argument, "mixing weight outside [0,1]");
  return validate_density((1.0 - t) * a.matrix() + t * b.matrix(), a.dims());
}

namespace detail {

// Offsets into the composite basis contributed by a subset of the factors,
// enumerated row-major over that subset.
inline std::vector<Index> subsystem_offsets(std::span<const Index> dims,
                                            std::span<const Index> subset) {
  std::vector<Index> strides(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) strides[i - 1] = strides[i] * dims[i];

  std::vector<Index> offsets{0};
  for (Index k : subset) {
    std::vector<Index> next;
    next.reserve(offsets.size() * static_cast<std::size_t>(dims[k]));
    for (Index base : offsets) {
      for (Index digit = 0; digit < dims[k]; ++digit) next.push_back(base + digit * strides[k]);
    }
    offsets = std::move(next);
  }
  return offsets;
}

}  // namespace detail

/// Partial trace of a raw matrix over every factor not listed in `keep`.
/// `keep` must be sorted, unique and in range.
inline Matrix partial_trace_matrix(const Matrix& m, std::span<const Index> dims,
                                   std::span<const Index> keep) {
  std::vector<Index> traced;
  for (Index k = 0; k < static_cast<Index>(dims.size()); ++k) {
    if (!std::binary_search(keep.begin(), keep.end(), k)) traced.push_back(k);
  }
  const std::vector<Index> kept_off = detail::subsystem_offsets(dims, keep);
  const std::vector<Index> traced_off = detail::subsystem_offsets(dims, traced);

  const auto dk = static_cast<Index>(kept_off.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Index i = 0; i < dk; ++i) {
    for (Index j = 0; j < dk; ++j) {
      Complex acc{0.0, 0.0};
      for (Index t : traced_off) acc += m(kept_off[i] + t, kept_off[j] + t);
      out(i, j) = acc;
    }
  }
  return out;
}

/// Marginal on the (zero-based) subsystems in `keep`; the result keeps the
/// original factor order regardless of the order given.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<Index> keep) {
  if (keep.empty()) throw Error(ErrorCode::invalid_subsystem, "keep set is empty");
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw Error(ErrorCode::invalid_subsystem, "duplicate subsystem index");
  }
  const auto n = static_cast<Index>(rho.parties());
  if (keep.front() < 0 || keep.back() >= n) {
    throw Error(ErrorCode::invalid_subsystem,
                "subsystem index out of range for " + std::to_string(n) + " parties");
  }
  Dims kept_dims;
  for (Index k : keep) kept_dims.push_back(rho.dims()[static_cast<std::size_t>(k)]);
  return validate_density(partial_trace_matrix(rho.matrix(), rho.dims(), keep),
                          std::move(kept_dims));
}

}  // namespace qmi
