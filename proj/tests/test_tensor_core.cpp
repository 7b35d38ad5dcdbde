#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tubal/tubal.hpp"

using tubal::Dims;
using tubal::Tensor3;

namespace {

Tensor3 diag_tube_tensor(std::size_t n3) {
  Tensor3 a(2, 2, n3);
  for (std::size_t k = 0; k < n3; ++k) {
    a(0, 0, k) = 3.0;
    a(1, 1, k) = 4.0;
  }
  return a;
}

}  // namespace

TEST(Tensor, LayoutIsIFastestThenJThenK) {
  Tensor3 a(Dims{2, 3, 2}, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  EXPECT_EQ(a(1, 0, 0), 1.0);
  EXPECT_EQ(a(0, 1, 0), 2.0);
  EXPECT_EQ(a(0, 0, 1), 6.0);
  EXPECT_EQ(a(1, 2, 1), 11.0);
}

TEST(Tensor, RejectsNonFiniteAndLengthMismatch) {
  EXPECT_THROW(Tensor3(Dims{1, 1, 2}, {1.0}), tubal::InvalidArgument);
  EXPECT_THROW(Tensor3(Dims{1, 1, 1}, {std::nan("")}), tubal::InvalidArgument);
  EXPECT_THROW(Tensor3(Dims{1, 1, 1}, {INFINITY}), tubal::InvalidArgument);
  EXPECT_THROW(Tensor3(Dims{0, 1, 1}), tubal::InvalidArgument);
}

TEST(Mask, RejectsNonBinary) {
  EXPECT_THROW(tubal::ObservationMask(Dims{1, 1, 2}, std::vector<std::uint8_t>{0, 2}), tubal::InvalidArgument);
  const tubal::ObservationMask m(Dims{1, 1, 2}, std::vector<std::uint8_t>{0, 1});
  EXPECT_EQ(m.count(), 1u);
}

TEST(Unfold, StacksFrontalSlices) {
  Tensor3 a(Dims{1, 1, 2}, {5.0, 7.0});
  const Eigen::MatrixXd m = tubal::unfold(a);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 1);
  EXPECT_EQ(m(0, 0), 5.0);
  EXPECT_EQ(m(1, 0), 7.0);
  EXPECT_TRUE(tubal::unfold(Tensor3(3, 2, 2)).isZero());
  EXPECT_EQ(tubal::fold(m, a.dims()), a);
}

TEST(Unfold, FoldInvertsUnfold) {
  std::mt19937_64 gen(1);
  const Tensor3 a = oracle::random_tensor({3, 4, 5}, gen);
  EXPECT_EQ(tubal::fold(tubal::unfold(a), a.dims()), a);
  EXPECT_THROW(tubal::fold(Eigen::MatrixXd::Zero(5, 4), Dims{3, 4, 5}), tubal::InvalidArgument);
}

TEST(Fourier, ImpulseAndConstantTubes) {
  const auto impulse = tubal::dft_mode3(Tensor3(Dims{1, 1, 3}, {1, 0, 0}));
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(std::abs(impulse.slice(k)(0, 0) - 1.0), 0.0, 1e-15);
  const auto constant = tubal::dft_mode3(Tensor3(Dims{1, 1, 3}, {1, 1, 1}));
  EXPECT_NEAR(std::abs(constant.slice(0)(0, 0) - 3.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(constant.slice(1)(0, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(constant.slice(2)(0, 0)), 0.0, 1e-15);
  EXPECT_LE((tubal::idft_mode3(impulse) - Tensor3(Dims{1, 1, 3}, {1, 0, 0})).max_abs(), 1e-15);
}

TEST(Fourier, MatchesDirectSumAndIsConjugateSymmetric) {
  std::mt19937_64 gen(2);
  for (std::size_t n3 : {1u, 2u, 3u, 4u, 7u, 8u}) {
    const Tensor3 a = oracle::random_tensor({3, 2, n3}, gen);
    const auto spec = tubal::dft_mode3(a);
    const auto ref = oracle::dft(a);
    for (std::size_t k = 0; k < n3; ++k) EXPECT_LT((spec.slice(k) - ref[k]).norm(), 1e-12) << n3 << " " << k;
    EXPECT_TRUE(spec.conjugate_symmetric());
    EXPECT_EQ(spec.slice(0).imag().norm(), 0.0);
    if (n3 % 2 == 0) {
      EXPECT_EQ(spec.slice(n3 / 2).imag().norm(), 0.0);
    }
  }
}

TEST(Fourier, RoundTrip) {
  std::mt19937_64 gen(3);
  const Tensor3 a = oracle::random_tensor({4, 4, 6}, gen);
  EXPECT_LE(oracle::rel_diff(tubal::idft_mode3(tubal::dft_mode3(a)), a), 1e-12);
  for (int trial = 0; trial < 30; ++trial) {
    const Tensor3 b = oracle::random_tensor(oracle::random_dims(gen, 16, 16, 16), gen);
    EXPECT_LE(oracle::rel_diff(tubal::idft_mode3(tubal::dft_mode3(b)), b), 1e-12);
  }
}

TEST(Fourier, BrokenSymmetryIsRejected) {
  std::vector<Eigen::MatrixXcd> slices(3, Eigen::MatrixXcd::Zero(1, 1));
  slices[1](0, 0) = {0.0, 1.0};
  EXPECT_THROW(tubal::idft_mode3(tubal::SpectralTensor3(Dims{1, 1, 3}, slices)), tubal::NumericalError);
}

TEST(TProduct, MatrixCaseWhenN3IsOne) {
  const Tensor3 a(Dims{2, 2, 1}, {1, 3, 2, 4});
  const Tensor3 b(Dims{2, 1, 1}, {1, 1});
  const Tensor3 c = tubal::t_product(a, b);
  EXPECT_NEAR(c(0, 0, 0), 3.0, 1e-14);
  EXPECT_NEAR(c(1, 0, 0), 7.0, 1e-14);
}

TEST(TProduct, IdentityLaw) {
  std::mt19937_64 gen(4);
  const Tensor3 a = oracle::random_tensor({3, 3, 4}, gen);
  const Tensor3 id = tubal::identity_tensor(3, 4);
  EXPECT_LE(oracle::rel_diff(tubal::t_product(a, id), a), 1e-14);
  EXPECT_LE(oracle::rel_diff(tubal::t_product(id, a), a), 1e-14);
}

TEST(TProduct, MatchesBlockCirculantOracle) {
  std::mt19937_64 gen(5);
  const Tensor3 a = oracle::random_tensor({2, 2, 3}, gen);
  const Tensor3 b = oracle::random_tensor({2, 2, 3}, gen);
  EXPECT_LE(oracle::rel_diff(tubal::t_product(a, b), oracle::t_product(a, b)), 1e-10);
  for (int trial = 0; trial < 100; ++trial) {
    const Dims da = oracle::random_dims(gen, 4, 4, 4);
    const std::size_t n2 = std::uniform_int_distribution<std::size_t>(1, 4)(gen);
    const Tensor3 x = oracle::random_tensor(da, gen);
    const Tensor3 y = oracle::random_tensor({da.n2, n2, da.n3}, gen);
    EXPECT_LE(oracle::rel_diff(tubal::t_product(x, y), oracle::t_product(x, y)), 1e-10);
  }
}

TEST(TProduct, Associative) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n3 = 1 + trial % 6;
    const Tensor3 a = oracle::random_tensor({3, 4, n3}, gen);
    const Tensor3 b = oracle::random_tensor({4, 2, n3}, gen);
    const Tensor3 c = oracle::random_tensor({2, 5, n3}, gen);
    const Tensor3 left = tubal::t_product(tubal::t_product(a, b), c);
    const Tensor3 right = tubal::t_product(a, tubal::t_product(b, c));
    EXPECT_LE(oracle::rel_diff(left, right), 1e-9);
  }
}

TEST(TProduct, RejectsNonConformable) {
  EXPECT_THROW(tubal::t_product(Tensor3(2, 3, 4), Tensor3(2, 3, 4)), tubal::InvalidArgument);
  EXPECT_THROW(tubal::t_product(Tensor3(2, 3, 4), Tensor3(3, 3, 5)), tubal::InvalidArgument);
}

TEST(ConjTranspose, InvolutionAndMatrixCase) {
  std::mt19937_64 gen(7);
  const Tensor3 a = oracle::random_tensor({3, 4, 5}, gen);
  EXPECT_EQ(tubal::conj_transpose(tubal::conj_transpose(a)), a);
  const Tensor3 m = oracle::random_tensor({2, 3, 1}, gen);
  const Tensor3 mt = tubal::conj_transpose(m);
  ASSERT_EQ(mt.dims(), (Dims{3, 2, 1}));
  EXPECT_EQ(Eigen::MatrixXd(mt.slice(0)), Eigen::MatrixXd(m.slice(0).transpose()));
}

TEST(ConjTranspose, ReversesProducts) {
  std::mt19937_64 gen(8);
  const Tensor3 a = oracle::random_tensor({3, 4, 5}, gen);
  const Tensor3 b = oracle::random_tensor({4, 2, 5}, gen);
  const Tensor3 lhs = tubal::conj_transpose(tubal::t_product(a, b));
  const Tensor3 rhs = tubal::t_product(tubal::conj_transpose(b), tubal::conj_transpose(a));
  EXPECT_LE(oracle::rel_diff(lhs, rhs), 1e-10);
}

TEST(Identity, SpectralSlicesAreIdentityAndTensorIsOrthogonal) {
  const Tensor3 id = tubal::identity_tensor(3, 5);
  const auto spec = tubal::dft_mode3(id);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_LT((spec.slice(k) - Eigen::MatrixXcd::Identity(3, 3)).norm(), 1e-15);
  }
  EXPECT_LE(oracle::rel_diff(tubal::t_product(id, tubal::conj_transpose(id)), id), 1e-15);
  EXPECT_NEAR(tubal::tensor_nuclear_norm(tubal::identity_tensor(2, 3)), 2.0, 1e-12);
}

TEST(TSvd, ZeroTensor) {
  const auto f = tubal::t_svd(Tensor3(3, 2, 4));
  EXPECT_EQ(f.s.frobenius_norm(), 0.0);
  EXPECT_LE(oracle::orthogonality_residual(f.u), 1e-8);
  EXPECT_LE(oracle::orthogonality_residual(f.v), 1e-8);
}

TEST(TSvd, ConstantDiagonalTubes) {
  const Tensor3 a = diag_tube_tensor(3);
  const auto sd = tubal::spectral_singular_values(a);
  EXPECT_NEAR(sd(0, 0), 12.0, 1e-12);
  EXPECT_NEAR(sd(1, 0), 9.0, 1e-12);
  EXPECT_NEAR(sd.rightCols(2).norm(), 0.0, 1e-12);
  const auto f = tubal::t_svd(a);
  const Tensor3 rec = tubal::t_product(tubal::t_product(f.u, f.s), tubal::conj_transpose(f.v));
  EXPECT_LE(oracle::rel_diff(rec, a), 1e-8);
}

TEST(TSvd, FactorInvariantsOnRandomShapes) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 60; ++trial) {
    const Dims d = trial == 0 ? Dims{5, 4, 3} : oracle::random_dims(gen, 9, 9, 8);
    const Tensor3 a = oracle::random_tensor(d, gen);
    const auto f = tubal::t_svd(a);
    ASSERT_EQ(f.u.dims(), (Dims{d.n1, d.n1, d.n3}));
    ASSERT_EQ(f.s.dims(), d);
    ASSERT_EQ(f.v.dims(), (Dims{d.n2, d.n2, d.n3}));
    const Tensor3 rec = tubal::t_product(tubal::t_product(f.u, f.s), tubal::conj_transpose(f.v));
    EXPECT_LE(oracle::rel_diff(rec, a), 1e-8) << tubal::to_string(d);
    EXPECT_LE(oracle::orthogonality_residual(f.u), 1e-8);
    EXPECT_LE(oracle::orthogonality_residual(f.v), 1e-8);
    EXPECT_LE(oracle::orthogonality_residual(tubal::conj_transpose(f.u)), 1e-8);
    for (std::size_t k = 0; k < d.n3; ++k) {
      for (std::size_t j = 0; j < d.n2; ++j) {
        for (std::size_t i = 0; i < d.n1; ++i) {
          if (i != j) {
            EXPECT_EQ(f.s(i, j, k), 0.0);
          }
        }
      }
    }
    const auto sd = tubal::spectral_singular_values(a);
    EXPECT_LE((sd - oracle::spectral_singular_values(a)).norm(), 1e-10 * std::max(1.0, sd.norm()));
    for (Eigen::Index k = 0; k < sd.cols(); ++k) {
      for (Eigen::Index i = 0; i < sd.rows(); ++i) {
        EXPECT_GE(sd(i, k), 0.0);
        if (i > 0) {
          EXPECT_LE(sd(i, k), sd(i - 1, k));
        }
      }
    }
  }
}

TEST(TSvd, ParallelSlicesAreBitIdenticalToSerial) {
  std::mt19937_64 gen(10);
  const Tensor3 a = oracle::random_tensor({40, 36, 7}, gen);
  tubal::set_worker_threads(1);
  const auto serial = tubal::t_svd(a);
  const auto sd_serial = tubal::spectral_singular_values(a);
  tubal::set_worker_threads(4);
  const auto parallel = tubal::t_svd(a);
  const auto sd_parallel = tubal::spectral_singular_values(a);
  tubal::set_worker_threads(0);
  EXPECT_EQ(serial.u, parallel.u);
  EXPECT_EQ(serial.s, parallel.s);
  EXPECT_EQ(serial.v, parallel.v);
  EXPECT_EQ(sd_serial, sd_parallel);
}

TEST(NuclearNorm, ExamplesAndOracle) {
  EXPECT_EQ(tubal::tensor_nuclear_norm(Tensor3(2, 3, 4)), 0.0);
  EXPECT_NEAR(tubal::tensor_nuclear_norm(diag_tube_tensor(3)), 7.0, 1e-12);
  EXPECT_NEAR(tubal::tensor_nuclear_norm(diag_tube_tensor(4)), 7.0, 1e-12);
  std::mt19937_64 gen(11);
  const Tensor3 m = oracle::random_tensor({5, 3, 1}, gen);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(m.slice(0)));
  EXPECT_NEAR(tubal::tensor_nuclear_norm(m), svd.singularValues().sum(), 1e-12);
}

TEST(NuclearNorm, FormulasAgree) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor3 a = oracle::random_tensor(oracle::random_dims(gen, 10, 10, 9), gen);
    const auto f = tubal::nuclear_norm_formulas(a);
    EXPECT_LE(oracle::rel_diff(f.first_slice, f.spectral_mean), 1e-9);
    EXPECT_LE(oracle::rel_diff(f.spectral_mean, oracle::tensor_nuclear_norm(a)), 1e-10);
  }
}

TEST(TubalRank, Examples) {
  EXPECT_EQ(tubal::tubal_rank(Tensor3(3, 3, 3)), 0u);
  EXPECT_EQ(tubal::tubal_rank(tubal::identity_tensor(3, 4)), 3u);
  std::mt19937_64 gen(13);
  const Tensor3 p = oracle::random_tensor({20, 3, 5}, gen);
  const Tensor3 q = oracle::random_tensor({3, 20, 5}, gen);
  EXPECT_EQ(tubal::tubal_rank(tubal::t_product(p, q)), 3u);
}

TEST(Permute, DefinitionAndInverse) {
  std::mt19937_64 gen(14);
  const Tensor3 a = oracle::random_tensor({2, 3, 4}, gen);
  EXPECT_EQ(tubal::permute_modes(a, {0, 1, 2}), a);
  const tubal::ModePermutation swap{1, 0, 2};
  EXPECT_EQ(tubal::permute_modes(tubal::permute_modes(a, swap), swap), a);
  const tubal::ModePermutation cycle{2, 0, 1};
  const Tensor3 b = tubal::permute_modes(a, cycle);
  ASSERT_EQ(b.dims(), (Dims{4, 2, 3}));
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(b(k, i, j), a(i, j, k));
    }
  }
  EXPECT_EQ(tubal::permute_modes(b, tubal::inverse_permutation(cycle)), a);
  EXPECT_THROW(tubal::check_permutation({0, 0, 1}), tubal::InvalidArgument);
}

TEST(DegenerateDims, CalculusHandlesUnitExtents) {
  std::mt19937_64 gen(15);
  for (const Dims d : {Dims{1, 1, 1}, Dims{1, 5, 3}, Dims{4, 1, 2}, Dims{3, 3, 1}}) {
    const Tensor3 a = oracle::random_tensor(d, gen);
    const auto f = tubal::t_svd(a);
    const Tensor3 rec = tubal::t_product(tubal::t_product(f.u, f.s), tubal::conj_transpose(f.v));
    EXPECT_LE(oracle::rel_diff(rec, a), 1e-8) << tubal::to_string(d);
    EXPECT_LE(oracle::rel_diff(tubal::tensor_nuclear_norm(a), oracle::tensor_nuclear_norm(a)), 1e-10);
  }
}
