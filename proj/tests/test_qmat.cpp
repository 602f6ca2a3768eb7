#include <gtest/gtest.h>

#include "qmi/qmat.hpp"
#include "test_util.hpp"

namespace qmi {
namespace {

using testing::random_hermitian;

Matrix diag(std::initializer_list<double> v) {
  RealVector d(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) d(i++) = x;
  return d.cast<Complex>().asDiagonal();
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_z() { return diag({1, -1}); }

TEST(Kron, IdentityTimesIdentity) {
  const auto k = kron(HermitianOperator::identity(2), HermitianOperator::identity(2));
  EXPECT_EQ(k.dim(), 4);
  EXPECT_EQ(max_abs_diff(k.matrix(), Matrix::Identity(4, 4)), 0.0);
}

TEST(Kron, ProjectorProduct) {
  const HermitianOperator p(diag({1, 0}));
  EXPECT_EQ(max_abs_diff(kron(p, p).matrix(), diag({1, 0, 0, 0})), 0.0);
}

TEST(Kron, PauliZTensorIdentity) {
  const auto k = kron(HermitianOperator(pauli_z()), HermitianOperator::identity(2));
  EXPECT_EQ(max_abs_diff(k.matrix(), diag({1, 1, -1, -1})), 0.0);
}

TEST(Kron, EntrywiseFormulaOnRandomInputs) {
  Engine rng = make_engine(11);
  const Matrix a = random_hermitian(3, rng);
  const Matrix b = random_hermitian(2, rng);
  const Matrix k = kron(a, b);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      for (Index p = 0; p < 2; ++p)
        for (Index q = 0; q < 2; ++q) EXPECT_EQ(k(i * 2 + p, j * 2 + q), a(i, j) * b(p, q));
}

TEST(Kron, AssociativeOnRandomTriples) {
  Engine rng = make_engine(12);
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianOperator a(random_hermitian(2, rng));
    const HermitianOperator b(random_hermitian(3, rng));
    const HermitianOperator c(random_hermitian(2, rng));
    EXPECT_LE(max_abs_diff(kron(kron(a, b), c).matrix(), kron(a, kron(b, c)).matrix()), 1e-12);
  }
}

TEST(HermitianOperator, RejectsNonHermitian) {
  Matrix m(2, 2);
  m << 1, 0.5, 0.4, 0;
  try {
    HermitianOperator h(m);
    FAIL() << "accepted a non-Hermitian matrix";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_hermitian);
  }
}

TEST(HermitianOperator, SymmetrizesWithinTolerance) {
  Matrix m(2, 2);
  m << 1, Complex(0.5, 1e-13), Complex(0.5, 0), 0;
  const HermitianOperator h(m);
  EXPECT_EQ(h.matrix(), h.matrix().adjoint());
}

TEST(HermEigen, DiagonalInput) {
  const Spectrum s = herm_eigen(HermitianOperator(diag({0.25, -0.25})));
  EXPECT_DOUBLE_EQ(s.eigenvalues(0), 0.25);
  EXPECT_DOUBLE_EQ(s.eigenvalues(1), -0.25);
}

TEST(HermEigen, Identity) {
  const Spectrum s = herm_eigen(HermitianOperator::identity(5));
  for (Index i = 0; i < 5; ++i) EXPECT_NEAR(s.eigenvalues(i), 1.0, 1e-15);
}

TEST(HermEigen, RotatedPauli) {
  // (X + Z)/sqrt 2 has characteristic polynomial x^2 - 1.
  const Spectrum s = herm_eigen(HermitianOperator((pauli_x() + pauli_z()) / std::sqrt(2.0)));
  EXPECT_NEAR(s.eigenvalues(0), 1.0, 1e-14);
  EXPECT_NEAR(s.eigenvalues(1), -1.0, 1e-14);
}

TEST(HermEigen, ReconstructionAndUnitarityOnRandomInputs) {
  Engine rng = make_engine(13);
  for (Index d : {1, 2, 5, 16, 64}) {
    const HermitianOperator h(random_hermitian(d, rng));
    const Spectrum s = herm_eigen(h);
    EXPECT_LE(max_abs_diff(s.reconstruct(), h.matrix()), 1e-9) << "d=" << d;
    EXPECT_LE(max_abs_diff(s.eigenvectors.adjoint() * s.eigenvectors, Matrix::Identity(d, d)), 1e-9);
    for (Index i = 1; i < d; ++i) EXPECT_GE(s.eigenvalues(i - 1), s.eigenvalues(i));
  }
}

TEST(OperatorAbs, DiagonalInput) {
  EXPECT_LE(max_abs_diff(operator_abs(HermitianOperator(diag({0.25, -0.25}))).matrix(),
                         diag({0.25, 0.25})),
            1e-15);
}

TEST(OperatorAbs, PsdInputUnchanged) {
  Engine rng = make_engine(14);
  const DensityMatrix rho = induced_mixed({4}, 4, rng);
  EXPECT_LE(max_abs_diff(operator_abs(rho.op()).matrix(), rho.matrix()), 1e-12);
}

TEST(OperatorAbs, DifferenceOfDiagonalStates) {
  const HermitianOperator d = HermitianOperator(diag({1, 0})) - HermitianOperator(diag({0.75, 0.25}));
  EXPECT_LE(max_abs_diff(operator_abs(d).matrix(), diag({0.25, 0.25})), 1e-15);
}

TEST(OperatorAbs, PropertiesOnRandomInputs) {
  Engine rng = make_engine(15);
  for (int trial = 0; trial < 50; ++trial) {
    const HermitianOperator h(random_hermitian(1 + trial % 8, rng));
    const HermitianOperator a = operator_abs(h);
    EXPECT_GE(herm_eigen(a).eigenvalues.minCoeff(), -1e-9);
    EXPECT_GE(herm_eigen(a - h).eigenvalues.minCoeff(), -1e-9);
    EXPECT_GE(herm_eigen(a + h).eigenvalues.minCoeff(), -1e-9);
    EXPECT_LE(max_abs_diff(a.matrix() * h.matrix(), h.matrix() * a.matrix()), 1e-9);
  }
}

TEST(TraceNorm, FixedPoints) {
  EXPECT_EQ(trace_norm(HermitianOperator::zero(3)), 0.0);
  EXPECT_DOUBLE_EQ(trace_norm(HermitianOperator(diag({1, -1}))), 2.0);
  EXPECT_DOUBLE_EQ(trace_norm(HermitianOperator(diag({0.25, -0.25}))), 0.5);
}

TEST(TraceNorm, EqualsSupremumOverContractionsWithSignWitness) {
  Engine rng = make_engine(16);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 2 + trial % 6;
    const HermitianOperator h(random_hermitian(d, rng));
    const double tn = trace_norm(h);
    EXPECT_NEAR(tn, operator_abs(h).trace(), 1e-12);

    const Spectrum s = herm_eigen(h);
    const HermitianOperator witness = spectral_apply(s, [](double x) { return x >= 0 ? 1.0 : -1.0; });
    EXPECT_NEAR(std::abs((h.matrix() * witness.matrix()).trace()), tn, 1e-9);

    // Random Hermitian contractions never beat the witness.
    for (int k = 0; k < 20; ++k) {
      const HermitianOperator a(random_hermitian(d, rng));
      const double norm = herm_eigen(a).eigenvalues.cwiseAbs().maxCoeff();
      const Matrix contraction = a.matrix() / norm;
      EXPECT_LE(std::abs((h.matrix() * contraction).trace()), tn + 1e-12);
    }
  }
}

TEST(PartialTrace, BellMarginalIsMaximallyMixed) {
  Vector psi = Vector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  const DensityMatrix bell = pure_state(psi, {2, 2});
  const DensityMatrix m = partial_trace(bell, {1});
  EXPECT_EQ(m.dims(), Dims{2});
  EXPECT_LE(max_abs_diff(m.matrix(), Matrix::Identity(2, 2) / 2.0), 1e-15);
}

TEST(PartialTrace, ProductStateReturnsFactor) {
  Engine rng = make_engine(17);
  const DensityMatrix rho = induced_mixed({3}, 3, rng);
  const DensityMatrix tau = induced_mixed({2}, 2, rng);
  EXPECT_LE(max_abs_diff(partial_trace(tensor(rho, tau), {0}).matrix(), rho.matrix()), 1e-14);
  EXPECT_LE(max_abs_diff(partial_trace(tensor(rho, tau), {1}).matrix(), tau.matrix()), 1e-14);
}

TEST(PartialTrace, GhzKeepOuterFactors) {
  Vector psi = Vector::Zero(8);
  psi(0) = psi(7) = 1.0 / std::sqrt(2.0);
  const DensityMatrix ghz = pure_state(psi, {2, 2, 2});
  // Summing the GHZ density matrix over the middle index leaves
  // (|00><00| + |11><11|)/2 on factors 1 and 3.
  const DensityMatrix m = partial_trace(ghz, {0, 2});
  EXPECT_EQ(m.dims(), (Dims{2, 2}));
  EXPECT_LE(max_abs_diff(m.matrix(), diag({0.5, 0, 0, 0.5})), 1e-15);
}

TEST(PartialTrace, KeepOrderIsNormalized) {
  Engine rng = make_engine(18);
  const DensityMatrix rho = induced_mixed({2, 3, 2}, 4, rng);
  EXPECT_EQ(partial_trace(rho, {2, 0}).matrix(), partial_trace(rho, {0, 2}).matrix());
}

TEST(PartialTrace, InvalidIndices) {
  const DensityMatrix rho = maximally_mixed({2, 2});
  for (std::vector<Index> keep : {std::vector<Index>{}, {2}, {-1}, {0, 0}}) {
    try {
      partial_trace(rho, keep);
      FAIL() << "accepted invalid keep set";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::invalid_subsystem);
    }
  }
}

TEST(PartialTrace, DualToEmbeddingOnRandomStates) {
  Engine rng = make_engine(19);
  const Dims dims{2, 3, 2};
  const std::vector<std::vector<Index>> keeps{{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho = induced_mixed(dims, 1 + trial, rng);
    for (const auto& keep : keeps) {
      const DensityMatrix m = partial_trace(rho, keep);
      EXPECT_NEAR(m.op().trace(), 1.0, 1e-12);
      EXPECT_GE(herm_eigen(m.op()).eigenvalues.minCoeff(), -1e-12);
      const Matrix a = random_hermitian(m.dim(), rng);
      const Complex lhs = (m.matrix() * a).trace();
      const Complex rhs = (rho.matrix() * testing::embed(a, dims, keep)).trace();
      EXPECT_LE(std::abs(lhs - rhs), 1e-12);
    }
  }
}

TEST(ValidateDensity, AcceptsMaximallyMixed) {
  const DensityMatrix rho = validate_density(Matrix::Identity(2, 2) / 2.0, {2});
  EXPECT_EQ(rho.dims(), Dims{2});
}

TEST(ValidateDensity, RejectsNegativeEigenvalue) {
  try {
    validate_density(diag({1.5, -0.5}), {2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::negative_eigenvalue);
    EXPECT_NE(std::string(e.what()).find("-0.5"), std::string::npos);
  }
}

TEST(ValidateDensity, ClampsAndRenormalizesTinyNegative) {
  const DensityMatrix rho = validate_density(diag({1 + 1e-11, -1e-11}), {2});
  EXPECT_EQ(rho.matrix()(1, 1).real(), 0.0);
  EXPECT_NEAR(rho.op().trace(), 1.0, 1e-15);
  EXPECT_GE(herm_eigen(rho.op()).eigenvalues.minCoeff(), 0.0);
}

TEST(ValidateDensity, DistinctErrorCodes) {
  auto code_of = [](const Matrix& m, Dims dims) {
    try {
      validate_density(m, std::move(dims));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::invalid_argument;
  };
  Matrix nonherm(2, 2);
  nonherm << 0.5, 0.1, 0.0, 0.5;
  EXPECT_EQ(code_of(nonherm, {2}), ErrorCode::not_hermitian);
  EXPECT_EQ(code_of(diag({0.6, 0.6}), {2}), ErrorCode::trace_mismatch);
  EXPECT_EQ(code_of(diag({0.5, 0.5}), {3}), ErrorCode::dims_mismatch);
  EXPECT_EQ(code_of(Matrix::Zero(2, 3), {2}), ErrorCode::not_square);
}

TEST(ValidateDensity, HaarStatesUpToDim64Pass) {
  Engine rng = make_engine(20);
  for (Index d : {2, 8, 32, 64}) {
    const DensityMatrix rho = induced_mixed({d}, d, rng);
    EXPECT_NEAR(rho.op().trace(), 1.0, 1e-10);
    EXPECT_GE(herm_eigen(rho.op()).eigenvalues.minCoeff(), -1e-10);
    const DensityMatrix pure = haar_pure({d}, rng);
    EXPECT_NEAR(pure.op().trace(), 1.0, 1e-10);
  }
}

}  // namespace
}  // namespace qmi
