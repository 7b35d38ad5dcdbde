#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "tubal/error.hpp"
#include "tubal/fourier.hpp"
#include "tubal/tensor.hpp"

namespace tubal {

/// Stacks the frontal slices vertically: [A(:,:,1); A(:,:,2); ...; A(:,:,n3)].
inline Eigen::MatrixXd unfold(const Tensor3& a) {
  const Dims d = a.dims();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(d.n1 * d.n3), static_cast<Eigen::Index>(d.n2));
  for (std::size_t k = 0; k < d.n3; ++k) {
    m.middleRows(static_cast<Eigen::Index>(k * d.n1), static_cast<Eigen::Index>(d.n1)) = a.slice(k);
  }
  return m;
}

/// Inverse of unfold.
inline Tensor3 fold(const Eigen::MatrixXd& m, const Dims& dims) {
  detail::require(dims.valid(), "fold: dims must be positive");
  detail::require(static_cast<std::size_t>(m.rows()) == dims.n1 * dims.n3 &&
                      static_cast<std::size_t>(m.cols()) == dims.n2,
                  "fold: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      ", expected " + std::to_string(dims.n1 * dims.n3) + "x" +
                      std::to_string(dims.n2));
  detail::require(m.allFinite(), "fold: tensor entries must be finite");
  Tensor3 a(dims);
  for (std::size_t k = 0; k < dims.n3; ++k) {
    a.slice(k) = m.middleRows(static_cast<Eigen::Index>(k * dims.n1), static_cast<Eigen::Index>(dims.n1));
  }
  return a;
}

/**
 * t-product C = A * B of an n1 x m x n3 tensor with an m x n2 x n3 tensor.
 * Multiplies matching spectral slices and transforms back; only the half
 * spectrum is formed since both operands are real.
 */
inline Tensor3 t_product(const Tensor3& a, const Tensor3& b) {
  const Dims da = a.dims();
  const Dims db = b.dims();
  detail::require(da.n2 == db.n1 && da.n3 == db.n3,
                  "t_product: cannot multiply " + to_string(da) + " by " + to_string(db));
  const auto abar = detail::dft_half(a);
  const auto bbar = detail::dft_half(b);
  std::vector<Eigen::MatrixXcd> cbar(abar.size());
  for (std::size_t k = 0; k < abar.size(); ++k) cbar[k] = abar[k] * bbar[k];
  return detail::idft_half(cbar, Dims{da.n1, db.n2, da.n3});
}

/// Tensor transpose: slice 1 transposed, slice k >= 2 is the transpose of
/// slice n3 + 2 - k (1-based).
inline Tensor3 conj_transpose(const Tensor3& a) {
  const Dims d = a.dims();
  Tensor3 out(Dims{d.n2, d.n1, d.n3});
  out.slice(0) = a.slice(0).transpose();
  for (std::size_t k = 1; k < d.n3; ++k) out.slice(k) = a.slice(d.n3 - k).transpose();
  return out;
}

/// n x n x n3 tensor whose first frontal slice is the identity, rest zero.
inline Tensor3 identity_tensor(std::size_t n, std::size_t n3) {
  Tensor3 id(Dims{n, n, n3});
  id.slice(0).setIdentity();
  return id;
}

using ModePermutation = std::array<std::size_t, 3>;

inline void check_permutation(const ModePermutation& p) {
  std::array<bool, 3> seen{};
  for (auto axis : p) {
    detail::require(axis < 3 && !seen[axis], "mode permutation must reorder {0, 1, 2}");
    seen[axis] = true;
  }
}

inline ModePermutation inverse_permutation(const ModePermutation& p) {
  check_permutation(p);
  ModePermutation inv{};
  for (std::size_t d = 0; d < 3; ++d) inv[p[d]] = d;
  return inv;
}

/**
 * Reorders tensor axes: output axis d is input axis perm[d] (0-based), so
 * perm = {2, 0, 1} maps an n1 x n2 x n3 tensor to n3 x n1 x n2 with
 * out(k, i, j) = in(i, j, k).
 */
inline Tensor3 permute_modes(const Tensor3& a, const ModePermutation& perm) {
  check_permutation(perm);
  const std::array<std::size_t, 3> in_ext{a.dims().n1, a.dims().n2, a.dims().n3};
  const Dims od{in_ext[perm[0]], in_ext[perm[1]], in_ext[perm[2]]};
  Tensor3 out(od);
  std::array<std::size_t, 3> src{};
  for (std::size_t k = 0; k < od.n3; ++k) {
    for (std::size_t j = 0; j < od.n2; ++j) {
      for (std::size_t i = 0; i < od.n1; ++i) {
        src[perm[0]] = i;
        src[perm[1]] = j;
        src[perm[2]] = k;
        out(i, j, k) = a(src[0], src[1], src[2]);
      }
    }
  }
  return out;
}

inline ObservationMask permute_modes(const ObservationMask& mask, const ModePermutation& perm) {
  return ObservationMask::from_tensor(permute_modes(mask.to_tensor(), perm));
}

}  // namespace tubal
