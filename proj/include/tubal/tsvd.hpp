#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tubal/error.hpp"
#include "tubal/fourier.hpp"
#include "tubal/parallel.hpp"
#include "tubal/svd_backend.hpp"
#include "tubal/tensor.hpp"

namespace tubal {

/// A = U * S * V^T under the t-product, U and V orthogonal, S f-diagonal.
struct TSVDFactors {
  Tensor3 u;  // n1 x n1 x n3
  Tensor3 s;  // n1 x n2 x n3
  Tensor3 v;  // n2 x n2 x n3
};

/// Spectral singular values: a min(n1,n2) x n3 matrix whose column k holds the
/// (real, nonnegative, nonincreasing) singular values of spectral slice k.
using SpectralDiagonal = Eigen::MatrixXd;

namespace detail {

// Per-slice SVDs are worth a thread only once the slices are non-trivial.
constexpr std::size_t kParallelSliceEntries = 32 * 32;

inline std::size_t min_parallel_for(const Dims& d) {
  return d.slice_size() >= kParallelSliceEntries ? 2 : static_cast<std::size_t>(-1);
}

/// Singular values of the half spectrum, columns k >= half filled by symmetry.
inline SpectralDiagonal spectral_diagonal_from_half(const std::vector<Eigen::MatrixXcd>& half,
                                                    const Dims& d) {
  const std::size_t p = std::min(d.n1, d.n2);
  SpectralDiagonal sd(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(d.n3));
  parallel_for(
      half.size(),
      [&](std::size_t k) {
        sd.col(static_cast<Eigen::Index>(k)) =
            svd_spectral_slice(half[k], self_conjugate_slice(k, d.n3), SvdVectors::none).s;
      },
      min_parallel_for(d));
  for (std::size_t k = half.size(); k < d.n3; ++k) {
    sd.col(static_cast<Eigen::Index>(k)) = sd.col(static_cast<Eigen::Index>(d.n3 - k));
  }
  return sd;
}

}  // namespace detail

inline SpectralDiagonal spectral_singular_values(const Tensor3& a) {
  detail::require(!a.empty(), "spectral_singular_values: empty tensor");
  return detail::spectral_diagonal_from_half(detail::dft_half(a), a.dims());
}

/**
 * t-SVD via the half spectrum.
 *
 * Slices k = 0 .. floor(n3/2) are factorized directly (real SVD for the DC
 * and Nyquist slices), the remaining slices are the complex conjugates of
 * their partners. Factorizing each slice independently would leave the
 * inverse transform with complex entries whenever the slice SVDs pick
 * inconsistent phases; the conjugate fill makes U, S, V exactly real.
 */
inline TSVDFactors t_svd(const Tensor3& a) {
  detail::require(!a.empty(), "t_svd: empty tensor");
  const Dims d = a.dims();
  const auto half = detail::dft_half(a);
  const std::size_t h = half.size();
  std::vector<Eigen::MatrixXcd> ubar(h);
  std::vector<Eigen::MatrixXcd> sbar(h);
  std::vector<Eigen::MatrixXcd> vbar(h);
  parallel_for(
      h,
      [&](std::size_t k) {
        auto f = detail::svd_spectral_slice(half[k], self_conjugate_slice(k, d.n3),
                                            detail::SvdVectors::full);
        ubar[k] = std::move(f.u);
        vbar[k] = std::move(f.v);
        sbar[k] = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d.n1),
                                         static_cast<Eigen::Index>(d.n2));
        sbar[k].diagonal().real() = f.s;
      },
      detail::min_parallel_for(d));
  return {detail::idft_half(ubar, Dims{d.n1, d.n1, d.n3}), detail::idft_half(sbar, d),
          detail::idft_half(vbar, Dims{d.n2, d.n2, d.n3})};
}

/// Both expressions of the tensor nuclear norm: the sum of the first frontal
/// slice's diagonal of S (recovered by a full inverse transform of the
/// f-diagonal spectrum) and the spectral singular-value sum divided by n3.
struct NuclearNormFormulas {
  double first_slice = 0.0;
  double spectral_mean = 0.0;
};

inline NuclearNormFormulas nuclear_norm_formulas(const SpectralDiagonal& sd, const Dims& d) {
  NuclearNormFormulas out;
  double total = 0.0;
  for (Eigen::Index k = 0; k < sd.cols(); ++k) {
    for (Eigen::Index i = 0; i < sd.rows(); ++i) total += sd(i, k);
  }
  out.spectral_mean = total / static_cast<double>(d.n3);

  std::vector<Eigen::MatrixXcd> sbar(d.n3);
  for (std::size_t k = 0; k < d.n3; ++k) {
    sbar[k] = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d.n1), static_cast<Eigen::Index>(d.n2));
    sbar[k].diagonal().real() = sd.col(static_cast<Eigen::Index>(k));
  }
  const Tensor3 s = idft_mode3(SpectralTensor3(d, std::move(sbar)));
  for (std::size_t i = 0; i < std::min(d.n1, d.n2); ++i) out.first_slice += s(i, i, 0);
  return out;
}

inline NuclearNormFormulas nuclear_norm_formulas(const Tensor3& a) {
  return nuclear_norm_formulas(spectral_singular_values(a), a.dims());
}

/// Tensor nuclear norm. Throws NumericalError if the two formulas disagree by
/// more than 1e-9 relative.
inline double tensor_nuclear_norm(const SpectralDiagonal& sd, const Dims& d) {
  const auto f = nuclear_norm_formulas(sd, d);
  const double scale = std::max({std::abs(f.spectral_mean), std::abs(f.first_slice), 1e-300});
  if (std::abs(f.first_slice - f.spectral_mean) > 1e-9 * scale) {
    throw NumericalError("tensor nuclear norm formulas disagree: " + std::to_string(f.first_slice) +
                         " vs " + std::to_string(f.spectral_mean));
  }
  return f.spectral_mean;
}

inline double tensor_nuclear_norm(const Tensor3& a) {
  return tensor_nuclear_norm(spectral_singular_values(a), a.dims());
}

/// Largest per-slice count of spectral singular values above
/// tol * (largest spectral singular value overall).
inline std::size_t tubal_rank(const SpectralDiagonal& sd, double tol) {
  detail::require(tol >= 0.0, "tubal_rank: tol must be nonnegative");
  const double top = sd.size() > 0 ? sd.maxCoeff() : 0.0;
  if (top <= 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < sd.cols(); ++k) {
    std::size_t c = 0;
    for (Eigen::Index i = 0; i < sd.rows(); ++i) c += sd(i, k) > tol * top ? 1 : 0;
    rank = std::max(rank, c);
  }
  return rank;
}

inline std::size_t tubal_rank(const Tensor3& a, double tol = 1e-9) {
  return tubal_rank(spectral_singular_values(a), tol);
}

}  // namespace tubal
