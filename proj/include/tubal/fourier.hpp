#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tubal/error.hpp"
#include "tubal/tensor.hpp"

namespace tubal {

/**
 * Frontal slices of a tensor after the DFT along mode 3.
 *
 * Convention: forward transform is unnormalized,
 *   Abar(:,:,k) = sum_t A(:,:,t) * exp(-2*pi*i*k*t/n3)   (0-based k, t),
 * and the inverse carries the 1/n3 factor. The spectrum of a real tensor is
 * conjugate symmetric: slice k equals conj(slice n3-k) for k >= 1.
 */
class SpectralTensor3 {
 public:
  SpectralTensor3() = default;

  SpectralTensor3(Dims dims, std::vector<Eigen::MatrixXcd> slices)
      : dims_(dims), slices_(std::move(slices)) {
    detail::require(dims.valid(), "spectral dims must be positive");
    detail::require(slices_.size() == dims.n3, "spectral tensor needs n3 slices");
    for (const auto& s : slices_) {
      detail::require(static_cast<std::size_t>(s.rows()) == dims.n1 &&
                          static_cast<std::size_t>(s.cols()) == dims.n2,
                      "spectral slice shape mismatch");
    }
  }

  [[nodiscard]] const Dims& dims() const { return dims_; }
  [[nodiscard]] const Eigen::MatrixXcd& slice(std::size_t k) const { return slices_[k]; }
  Eigen::MatrixXcd& slice(std::size_t k) { return slices_[k]; }
  [[nodiscard]] const std::vector<Eigen::MatrixXcd>& slices() const { return slices_; }

  [[nodiscard]] double frobenius_norm() const {
    double s = 0.0;
    for (const auto& m : slices_) s += m.squaredNorm();
    return std::sqrt(s);
  }

  /// Checks slice k == conj(slice n3-k) and a real first slice, both within
  /// rel_tol * ||Abar||_F.
  [[nodiscard]] bool conjugate_symmetric(double rel_tol = 1e-10) const {
    const double tol = rel_tol * frobenius_norm();
    if (slices_.empty()) return true;
    if (slices_[0].imag().cwiseAbs().maxCoeff() > tol) return false;
    for (std::size_t k = 1; k < dims_.n3; ++k) {
      const double gap = (slices_[k] - slices_[dims_.n3 - k].conjugate()).cwiseAbs().maxCoeff();
      if (gap > tol) return false;
    }
    return true;
  }

 private:
  Dims dims_{};
  std::vector<Eigen::MatrixXcd> slices_;
};

/// Number of spectral slices that determine a real tensor's spectrum:
/// k = 0 .. floor(n3/2).
constexpr std::size_t half_spectrum_size(std::size_t n3) { return n3 / 2 + 1; }

/// True for the slices that are their own conjugate partner (DC, and the
/// Nyquist slice when n3 is even). Those slices are real for real input.
constexpr bool self_conjugate_slice(std::size_t k, std::size_t n3) {
  return k == 0 || (n3 % 2 == 0 && k == n3 / 2);
}

namespace detail {

/// cos/sin of 2*pi*m/n3 for m in [0, n3), exact at quarter turns.
struct Twiddles {
  std::vector<double> cos;
  std::vector<double> sin;

  explicit Twiddles(std::size_t n3) : cos(n3), sin(n3) {
    for (std::size_t m = 0; m < n3; ++m) {
      if ((4 * m) % n3 == 0) {
        static constexpr double c[4] = {1.0, 0.0, -1.0, 0.0};
        static constexpr double s[4] = {0.0, 1.0, 0.0, -1.0};
        const std::size_t q = 4 * m / n3;
        cos[m] = c[q];
        sin[m] = s[q];
      } else {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n3);
        cos[m] = std::cos(theta);
        sin[m] = std::sin(theta);
      }
    }
  }
};

/// Spectral slices k = 0 .. floor(n3/2) of a real tensor. Self-conjugate
/// slices come out with an exactly zero imaginary part.
inline std::vector<Eigen::MatrixXcd> dft_half(const Tensor3& a) {
  const Dims d = a.dims();
  const std::size_t h = half_spectrum_size(d.n3);
  const Twiddles tw(d.n3);
  const auto rows = static_cast<Eigen::Index>(d.n1);
  const auto cols = static_cast<Eigen::Index>(d.n2);
  std::vector<Eigen::MatrixXcd> out(h);
  Eigen::MatrixXd re(rows, cols);
  Eigen::MatrixXd im(rows, cols);
  for (std::size_t k = 0; k < h; ++k) {
    re.setZero();
    im.setZero();
    const bool real_slice = self_conjugate_slice(k, d.n3);
    for (std::size_t t = 0; t < d.n3; ++t) {
      const std::size_t m = (k * t) % d.n3;
      re.noalias() += tw.cos[m] * a.slice(t);
      if (!real_slice) im.noalias() -= tw.sin[m] * a.slice(t);
    }
    out[k].resize(rows, cols);
    out[k].real() = re;
    out[k].imag() = im;
  }
  return out;
}

/// Inverse transform from the half spectrum, assuming conjugate symmetry.
/// The result is real by construction.
inline Tensor3 idft_half(const std::vector<Eigen::MatrixXcd>& half, const Dims& d) {
  const std::size_t n3 = d.n3;
  detail::require(half.size() == half_spectrum_size(n3), "idft_half: wrong slice count");
  const Twiddles tw(n3);
  const double scale = 1.0 / static_cast<double>(n3);
  const std::size_t paired_end = (n3 % 2 == 0) ? n3 / 2 : n3 / 2 + 1;
  Tensor3 out(d);
  for (std::size_t t = 0; t < n3; ++t) {
    auto dst = out.slice(t);
    dst = half[0].real();
    for (std::size_t k = 1; k < paired_end; ++k) {
      const std::size_t m = (k * t) % n3;
      dst.noalias() += (2.0 * tw.cos[m]) * half[k].real();
      dst.noalias() -= (2.0 * tw.sin[m]) * half[k].imag();
    }
    if (n3 % 2 == 0 && n3 > 1) {
      const double sign = (t % 2 == 0) ? 1.0 : -1.0;
      dst.noalias() += sign * half[n3 / 2].real();
    }
    dst *= scale;
  }
  return out;
}

/// Completes a half spectrum into all n3 slices by conjugation.
inline std::vector<Eigen::MatrixXcd> conjugate_fill(std::vector<Eigen::MatrixXcd> half,
                                                    std::size_t n3) {
  half.resize(n3);
  for (std::size_t k = half_spectrum_size(n3); k < n3; ++k) half[k] = half[n3 - k].conjugate();
  return half;
}

}  // namespace detail

/// Mode-3 DFT (unnormalized forward). Upper slices are filled by conjugation,
/// so the result satisfies the conjugate-symmetry invariant exactly.
inline SpectralTensor3 dft_mode3(const Tensor3& a) {
  detail::require(!a.empty(), "dft_mode3: empty tensor");
  return {a.dims(), detail::conjugate_fill(detail::dft_half(a), a.dims().n3)};
}

/**
 * Inverse mode-3 DFT with the 1/n3 factor. Sums over every slice, so a broken
 * symmetry shows up as an imaginary residue; residue up to 1e-9 * ||Abar||_F
 * is discarded, anything larger raises NumericalError.
 */
inline Tensor3 idft_mode3(const SpectralTensor3& spec) {
  const Dims d = spec.dims();
  detail::require(d.valid(), "idft_mode3: empty spectral tensor");
  const detail::Twiddles tw(d.n3);
  const double scale = 1.0 / static_cast<double>(d.n3);
  const auto rows = static_cast<Eigen::Index>(d.n1);
  const auto cols = static_cast<Eigen::Index>(d.n2);
  Tensor3 out(d);
  Eigen::MatrixXd re(rows, cols);
  Eigen::MatrixXd im(rows, cols);
  double residue_sq = 0.0;
  for (std::size_t t = 0; t < d.n3; ++t) {
    re.setZero();
    im.setZero();
    for (std::size_t k = 0; k < d.n3; ++k) {
      const std::size_t m = (k * t) % d.n3;
      // (a + ib)(c + is) with exp(+i theta) = c + is
      re.noalias() += tw.cos[m] * spec.slice(k).real() - tw.sin[m] * spec.slice(k).imag();
      im.noalias() += tw.sin[m] * spec.slice(k).real() + tw.cos[m] * spec.slice(k).imag();
    }
    out.slice(t) = scale * re;
    residue_sq += (scale * im).squaredNorm();
  }
  const double limit = 1e-9 * spec.frobenius_norm();
  if (std::sqrt(residue_sq) > limit) {
    throw NumericalError("idft_mode3: imaginary residue " + std::to_string(std::sqrt(residue_sq)) +
                         " exceeds tolerance; spectrum is not conjugate symmetric");
  }
  if (!out.flat().allFinite()) throw NumericalError("idft_mode3: non-finite result");
  return out;
}

}  // namespace tubal
