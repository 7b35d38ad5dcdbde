#pragma once

// Brute-force reference implementations used only by the tests. None of them
// goes through the library's transform or SVD code paths.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tubal/tubal.hpp"

namespace oracle {

using tubal::Dims;
using tubal::Tensor3;

inline Tensor3 random_tensor(Dims d, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Tensor3 t(d);
  for (double& v : t.values()) v = normal(gen);
  return t;
}

inline Dims random_dims(std::mt19937_64& gen, std::size_t max1, std::size_t max2, std::size_t max3) {
  std::uniform_int_distribution<std::size_t> a(1, max1);
  std::uniform_int_distribution<std::size_t> b(1, max2);
  std::uniform_int_distribution<std::size_t> c(1, max3);
  return {a(gen), b(gen), c(gen)};
}

/// bcirc(A): the (n1 n3) x (m n3) block-circulant matrix of frontal slices.
inline Eigen::MatrixXd block_circulant(const Tensor3& a) {
  const Dims d = a.dims();
  const auto r = static_cast<Eigen::Index>(d.n1);
  const auto c = static_cast<Eigen::Index>(d.n2);
  Eigen::MatrixXd out(r * static_cast<Eigen::Index>(d.n3), c * static_cast<Eigen::Index>(d.n3));
  for (std::size_t bi = 0; bi < d.n3; ++bi) {
    for (std::size_t bj = 0; bj < d.n3; ++bj) {
      const std::size_t k = (bi + d.n3 - bj) % d.n3;
      out.block(static_cast<Eigen::Index>(bi) * r, static_cast<Eigen::Index>(bj) * c, r, c) = a.slice(k);
    }
  }
  return out;
}

/// fold(bcirc(A) * unfold(B)).
inline Tensor3 t_product(const Tensor3& a, const Tensor3& b) {
  const Eigen::MatrixXd prod = block_circulant(a) * tubal::unfold(b);
  return tubal::fold(prod, Dims{a.dims().n1, b.dims().n2, a.dims().n3});
}

/// Direct O(n3^2) DFT along mode 3, all n3 slices.
inline std::vector<Eigen::MatrixXcd> dft(const Tensor3& a) {
  const Dims d = a.dims();
  std::vector<Eigen::MatrixXcd> out(d.n3, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d.n1),
                                                                 static_cast<Eigen::Index>(d.n2)));
  for (std::size_t k = 0; k < d.n3; ++k) {
    for (std::size_t t = 0; t < d.n3; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * t) / static_cast<double>(d.n3);
      out[k] += std::polar(1.0, angle) * a.slice(t).cast<std::complex<double>>();
    }
  }
  return out;
}

/// Singular values of every spectral slice via Eigen's Jacobi SVD.
inline Eigen::MatrixXd spectral_singular_values(const Tensor3& a) {
  const auto slices = dft(a);
  const Dims d = a.dims();
  Eigen::MatrixXd sd(static_cast<Eigen::Index>(std::min(d.n1, d.n2)), static_cast<Eigen::Index>(d.n3));
  for (std::size_t k = 0; k < d.n3; ++k) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(slices[k]);
    sd.col(static_cast<Eigen::Index>(k)) = svd.singularValues();
  }
  return sd;
}

inline double tensor_nuclear_norm(const Tensor3& a) {
  return oracle::spectral_singular_values(a).sum() / static_cast<double>(a.dims().n3);
}

/// Full-spectrum singular value thresholding: shrink every spectral singular
/// value of every slice by tau(i, k), rebuild all slices, inverse DFT directly.
inline Tensor3 spectral_svt(const Tensor3& y, const Eigen::MatrixXd& tau) {
  const Dims d = y.dims();
  const auto slices = dft(y);
  std::vector<Eigen::MatrixXcd> shrunk(d.n3);
  for (std::size_t k = 0; k < d.n3; ++k) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(slices[k], Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      s(i) = std::max(s(i) - tau(i, static_cast<Eigen::Index>(k)), 0.0);
    }
    shrunk[k] = svd.matrixU() * s.cast<std::complex<double>>().asDiagonal() * svd.matrixV().adjoint();
  }
  Tensor3 out(d);
  for (std::size_t t = 0; t < d.n3; ++t) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d.n1), static_cast<Eigen::Index>(d.n2));
    for (std::size_t k = 0; k < d.n3; ++k) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k * t) / static_cast<double>(d.n3);
      acc += std::polar(1.0, angle) * shrunk[k];
    }
    out.slice(t) = acc.real() / static_cast<double>(d.n3);
  }
  return out;
}

inline double rel_diff(const Tensor3& a, const Tensor3& b) {
  const double denom = std::max(b.frobenius_norm(), 1e-300);
  return (a - b).frobenius_norm() / denom;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// ||A^T * A - I||_F for the t-product (orthogonality residual).
inline double orthogonality_residual(const Tensor3& q) {
  const Tensor3 prod = oracle::t_product(tubal::conj_transpose(q), q);
  return (prod - tubal::identity_tensor(q.dims().n2, q.dims().n3)).frobenius_norm();
}

}  // namespace oracle
