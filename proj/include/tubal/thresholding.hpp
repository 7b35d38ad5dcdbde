#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tubal/error.hpp"
#include "tubal/fourier.hpp"
#include "tubal/parallel.hpp"
#include "tubal/svd_backend.hpp"
#include "tubal/tensor.hpp"
#include "tubal/tsvd.hpp"

namespace tubal {

/// sgn(z) * max(|z| - tau, 0).
inline double soft_threshold(double z, double tau) {
  detail::require(tau >= 0.0, "soft_threshold: tau must be nonnegative");
  const double mag = std::abs(z) - tau;
  if (mag <= 0.0) return 0.0;
  return z > 0.0 ? mag : -mag;
}

/// Nonnegative, finite per-entry thresholds.
class WeightTensor {
 public:
  explicit WeightTensor(Tensor3 weights) : w_(std::move(weights)) {
    for (double v : w_.values()) detail::require(v >= 0.0, "weights must be nonnegative");
  }

  static WeightTensor constant(Dims dims, double value) {
    return WeightTensor(Tensor3::constant(dims, value));
  }

  /// Diagonal-supported weights W(i,i,k) = sd(i,k), indexed by spectral slice.
  static WeightTensor spectral_diagonal(Dims dims, const SpectralDiagonal& sd) {
    const std::size_t p = std::min(dims.n1, dims.n2);
    detail::require(static_cast<std::size_t>(sd.rows()) == p &&
                        static_cast<std::size_t>(sd.cols()) == dims.n3,
                    "spectral weights must be min(n1,n2) x n3");
    Tensor3 w(dims);
    for (std::size_t k = 0; k < dims.n3; ++k) {
      for (std::size_t i = 0; i < p; ++i) {
        w(i, i, k) = sd(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      }
    }
    return WeightTensor(std::move(w));
  }

  [[nodiscard]] const Tensor3& tensor() const { return w_; }
  [[nodiscard]] const Dims& dims() const { return w_.dims(); }

 private:
  Tensor3 w_;
};

namespace detail {

/// out = T_{scale * w}(x) without materializing the scaled weights.
inline Tensor3 soft_threshold_scaled(const Tensor3& x, const Tensor3& w, double scale) {
  require(x.dims() == w.dims(), "generalized_soft_threshold: shape mismatch " + to_string(x.dims()) +
                                    " vs " + to_string(w.dims()));
  Tensor3 out(x.dims());
  auto src = x.values();
  auto thr = w.values();
  auto dst = out.values();
  for (std::size_t n = 0; n < src.size(); ++n) {
    const double mag = std::abs(src[n]) - scale * thr[n];
    dst[n] = mag <= 0.0 ? 0.0 : (src[n] > 0.0 ? mag : -mag);
  }
  return out;
}

inline void check_spectral_weights(const SpectralDiagonal& w, const Dims& d) {
  const std::size_t p = std::min(d.n1, d.n2);
  require(static_cast<std::size_t>(w.rows()) == p && static_cast<std::size_t>(w.cols()) == d.n3,
          "spectral weights must be min(n1,n2) x n3");
  require(w.allFinite() && (w.size() == 0 || w.minCoeff() >= 0.0),
          "spectral weights must be finite and nonnegative");
  const double tol = 1e-12 * std::max(1.0, w.size() > 0 ? w.maxCoeff() : 0.0);
  for (std::size_t k = 1; k < d.n3; ++k) {
    const double gap = (w.col(static_cast<Eigen::Index>(k)) -
                        w.col(static_cast<Eigen::Index>(d.n3 - k)))
                           .cwiseAbs()
                           .maxCoeff();
    require(gap <= tol, "spectral weights break conjugate symmetry between slices " +
                            std::to_string(k) + " and " + std::to_string(d.n3 - k));
  }
}

}  // namespace detail

/// Elementwise soft thresholding with per-entry thresholds W.
inline Tensor3 generalized_soft_threshold(const Tensor3& x, const WeightTensor& w) {
  return detail::soft_threshold_scaled(x, w.tensor(), 1.0);
}

/**
 * Generalized tensor singular value thresholding with spectral weights.
 *
 * Spectral singular value S̄(i,i,k) of y is shrunk by scale * weights(i,k),
 * then the shrunk spectrum is recomposed with the same singular vectors and
 * transformed back. weights must satisfy weights(:,k) == weights(:,n3-k) so
 * the result is real.
 */
inline Tensor3 generalized_tsvt(const Tensor3& y, const SpectralDiagonal& weights, double scale = 1.0) {
  detail::require(!y.empty(), "generalized_tsvt: empty tensor");
  detail::require(std::isfinite(scale) && scale >= 0.0, "generalized_tsvt: scale must be >= 0");
  const Dims d = y.dims();
  detail::check_spectral_weights(weights, d);
  auto half = detail::dft_half(y);
  parallel_for(
      half.size(),
      [&](std::size_t k) {
        auto f = detail::svd_spectral_slice(half[k], self_conjugate_slice(k, d.n3),
                                            detail::SvdVectors::thin);
        const auto kk = static_cast<Eigen::Index>(k);
        Eigen::VectorXd shrunk = (f.s - scale * weights.col(kk)).cwiseMax(0.0);
        Eigen::Index keep = 0;
        while (keep < shrunk.size() && shrunk(keep) > 0.0) ++keep;
        // Weights need not be monotone, so a zero can precede a positive value.
        for (Eigen::Index i = keep; i < shrunk.size(); ++i) {
          if (shrunk(i) > 0.0) keep = i + 1;
        }
        if (keep == 0) {
          half[k].setZero();
          return;
        }
        half[k].noalias() = f.u.leftCols(keep) * shrunk.head(keep).asDiagonal() *
                            f.v.leftCols(keep).adjoint();
        if (self_conjugate_slice(k, d.n3)) half[k].imag().setZero();
      },
      detail::min_parallel_for(d));
  return detail::idft_half(half, d);
}

/// Weight-tensor form. W must vanish off the diagonal (i != j); W(i,i,k)
/// thresholds spectral slice k.
inline Tensor3 generalized_tsvt(const Tensor3& y, const WeightTensor& w) {
  const Dims d = y.dims();
  detail::require(w.dims() == d, "generalized_tsvt: weight shape mismatch");
  const std::size_t p = std::min(d.n1, d.n2);
  SpectralDiagonal sd(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(d.n3));
  for (std::size_t k = 0; k < d.n3; ++k) {
    for (std::size_t j = 0; j < d.n2; ++j) {
      for (std::size_t i = 0; i < d.n1; ++i) {
        const double v = w.tensor()(i, j, k);
        if (i == j) {
          sd(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
        } else {
          detail::require(v == 0.0, "generalized_tsvt: weights must be diagonal-supported");
        }
      }
    }
  }
  return generalized_tsvt(y, sd, 1.0);
}

/// Takes o where the mask is set and m elsewhere.
inline Tensor3 project_observed(const Tensor3& m, const Tensor3& o, const ObservationMask& mask) {
  detail::require(m.dims() == o.dims() && o.dims() == mask.dims(), "project_observed: dims mismatch");
  Tensor3 out = m;
  auto dst = out.values();
  auto obs = o.values();
  for (std::size_t n = 0; n < dst.size(); ++n) {
    if (mask.observed(n)) dst[n] = obs[n];
  }
  return out;
}

}  // namespace tubal
