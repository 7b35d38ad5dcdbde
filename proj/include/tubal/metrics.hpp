#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tubal/error.hpp"
#include "tubal/tensor.hpp"

namespace tubal {

namespace detail {
inline void require_same(const Tensor3& a, const Tensor3& b, const char* who) {
  require(a.dims() == b.dims(), std::string(who) + ": dims mismatch " + to_string(a.dims()) + " vs " +
                                    to_string(b.dims()));
}
}  // namespace detail

/// Mean squared error over all entries.
inline double mse(const Tensor3& ref, const Tensor3& est) {
  detail::require_same(ref, est, "mse");
  double s = 0.0;
  for (std::size_t n = 0; n < ref.size(); ++n) {
    const double e = ref.values()[n] - est.values()[n];
    s += e * e;
  }
  return s / static_cast<double>(ref.size());
}

/// 10 log10(peak^2 / mse); +infinity when the inputs are identical.
inline double psnr(const Tensor3& ref, const Tensor3& est, double peak) {
  detail::require(peak > 0.0 && std::isfinite(peak), "psnr: peak must be > 0");
  const double m = mse(ref, est);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / m);
}

struct SsimParams {
  double peak = 1.0;  ///< dynamic range L
  std::size_t window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

namespace detail {

inline Eigen::VectorXd gaussian_window(std::size_t size, double sigma) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(size));
  const double center = 0.5 * static_cast<double>(size - 1);
  for (std::size_t i = 0; i < size; ++i) {
    const double x = static_cast<double>(i) - center;
    w(static_cast<Eigen::Index>(i)) = std::exp(-x * x / (2.0 * sigma * sigma));
  }
  return w / w.sum();
}

/// Separable 'valid' filtering: output is (rows - wr + 1) x (cols - wc + 1).
inline Eigen::MatrixXd filter_valid(const Eigen::MatrixXd& m, const Eigen::VectorXd& wr,
                                    const Eigen::VectorXd& wc) {
  const Eigen::Index out_r = m.rows() - wr.size() + 1;
  const Eigen::Index out_c = m.cols() - wc.size() + 1;
  Eigen::MatrixXd tmp(out_r, m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < out_r; ++i) tmp(i, j) = m.col(j).segment(i, wr.size()).dot(wr);
  }
  Eigen::MatrixXd out(out_r, out_c);
  for (Eigen::Index j = 0; j < out_c; ++j) out.col(j) = tmp.middleCols(j, wc.size()) * wc;
  return out;
}

}  // namespace detail

/**
 * Single-scale SSIM per frontal slice with a Gaussian window, averaged over
 * all valid window positions of all slices. Slices smaller than the window
 * use a window clipped to the slice extent (renormalized).
 */
inline double ssim(const Tensor3& ref, const Tensor3& est, const SsimParams& params = {}) {
  detail::require_same(ref, est, "ssim");
  detail::require(params.peak > 0.0 && params.window >= 1 && params.sigma > 0.0, "ssim: bad parameters");
  const Dims d = ref.dims();
  const auto wr = detail::gaussian_window(std::min(params.window, d.n1), params.sigma);
  const auto wc = detail::gaussian_window(std::min(params.window, d.n2), params.sigma);
  const double c1 = (params.k1 * params.peak) * (params.k1 * params.peak);
  const double c2 = (params.k2 * params.peak) * (params.k2 * params.peak);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < d.n3; ++k) {
    const Eigen::MatrixXd x = ref.slice(k);
    const Eigen::MatrixXd y = est.slice(k);
    const Eigen::MatrixXd mx = detail::filter_valid(x, wr, wc);
    const Eigen::MatrixXd my = detail::filter_valid(y, wr, wc);
    const Eigen::MatrixXd sxx = detail::filter_valid(x.cwiseProduct(x), wr, wc) - mx.cwiseProduct(mx);
    const Eigen::MatrixXd syy = detail::filter_valid(y.cwiseProduct(y), wr, wc) - my.cwiseProduct(my);
    const Eigen::MatrixXd sxy = detail::filter_valid(x.cwiseProduct(y), wr, wc) - mx.cwiseProduct(my);
    for (Eigen::Index j = 0; j < mx.cols(); ++j) {
      for (Eigen::Index i = 0; i < mx.rows(); ++i) {
        const double num = (2.0 * mx(i, j) * my(i, j) + c1) * (2.0 * sxy(i, j) + c2);
        const double den =
            (mx(i, j) * mx(i, j) + my(i, j) * my(i, j) + c1) * (sxx(i, j) + syy(i, j) + c2);
        total += num / den;
        ++count;
      }
    }
  }
  return total / static_cast<double>(count);
}

/**
 * ERGAS over frontal-slice bands:
 *   100 * ratio * sqrt( (1/n3) * sum_b mse_b / mean_b^2 ),
 * mean_b being the reference band mean. A zero-mean reference band makes the
 * index undefined and raises InvalidArgument.
 */
inline double ergas(const Tensor3& ref, const Tensor3& est, double ratio = 1.0) {
  detail::require_same(ref, est, "ergas");
  const Dims d = ref.dims();
  const double band_size = static_cast<double>(d.slice_size());
  double acc = 0.0;
  for (std::size_t k = 0; k < d.n3; ++k) {
    const auto r = ref.slice(k);
    const auto e = est.slice(k);
    const double mean = r.sum() / band_size;
    detail::require(mean != 0.0, "ergas: reference band " + std::to_string(k) + " has zero mean");
    const double band_mse = (r - e).squaredNorm() / band_size;
    acc += band_mse / (mean * mean);
  }
  return 100.0 * ratio * std::sqrt(acc / static_cast<double>(d.n3));
}

struct SamResult {
  double radians = 0.0;      ///< mean spectral angle over usable tubes
  std::size_t skipped = 0;   ///< tubes with norm below 1e-12 in either input
};

/// Mean angle between matching mode-3 tubes.
inline SamResult sam(const Tensor3& ref, const Tensor3& est) {
  detail::require_same(ref, est, "sam");
  const Dims d = ref.dims();
  SamResult out;
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t j = 0; j < d.n2; ++j) {
    for (std::size_t i = 0; i < d.n1; ++i) {
      double dot = 0.0;
      double nr = 0.0;
      double ne = 0.0;
      for (std::size_t k = 0; k < d.n3; ++k) {
        const double a = ref(i, j, k);
        const double b = est(i, j, k);
        dot += a * b;
        nr += a * a;
        ne += b * b;
      }
      nr = std::sqrt(nr);
      ne = std::sqrt(ne);
      if (nr < 1e-12 || ne < 1e-12) {
        ++out.skipped;
        continue;
      }
      total += std::acos(std::clamp(dot / (nr * ne), -1.0, 1.0));
      ++used;
    }
  }
  detail::require(used > 0, "sam: every tube is degenerate");
  out.radians = total / static_cast<double>(used);
  return out;
}

/// All indexes at once. ERGAS and SAM are empty when undefined for the input.
struct MetricsReport {
  double mse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  std::optional<double> ergas;
  std::optional<double> sam;
  std::size_t sam_skipped = 0;
};

inline MetricsReport evaluate_metrics(const Tensor3& ref, const Tensor3& est, double peak) {
  MetricsReport r;
  r.mse = mse(ref, est);
  r.psnr = psnr(ref, est, peak);
  r.ssim = ssim(ref, est, SsimParams{.peak = peak});
  try {
    r.ergas = ergas(ref, est);
  } catch (const InvalidArgument&) {
  }
  try {
    const auto s = sam(ref, est);
    r.sam = s.radians;
    r.sam_skipped = s.skipped;
  } catch (const InvalidArgument&) {
    r.sam_skipped = ref.dims().n1 * ref.dims().n2;
  }
  return r;
}

}  // namespace tubal
