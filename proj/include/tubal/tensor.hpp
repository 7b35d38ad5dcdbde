#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tubal/error.hpp"

namespace tubal {

/// Extents of a 3-way array. Valid tensors have every extent >= 1.
struct Dims {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t n3 = 0;

  [[nodiscard]] constexpr std::size_t size() const { return n1 * n2 * n3; }
  [[nodiscard]] constexpr std::size_t slice_size() const { return n1 * n2; }
  [[nodiscard]] constexpr bool valid() const { return n1 > 0 && n2 > 0 && n3 > 0; }
  friend constexpr bool operator==(const Dims&, const Dims&) = default;
};

inline std::string to_string(const Dims& d) {
  return std::to_string(d.n1) + "x" + std::to_string(d.n2) + "x" + std::to_string(d.n3);
}

using SliceMap = Eigen::Map<Eigen::MatrixXd>;
using ConstSliceMap = Eigen::Map<const Eigen::MatrixXd>;

/**
 * Dense real n1 x n2 x n3 tensor.
 *
 * Storage is column-major in (i, j, k): i runs fastest, then j, then k, so
 * every frontal slice A(:,:,k) is a contiguous column-major n1 x n2 block and
 * can be viewed as an Eigen matrix without copying.
 *
 * A default-constructed tensor is empty (all extents zero); every other
 * constructor requires positive extents and finite entries.
 */
class Tensor3 {
 public:
  Tensor3() = default;

  explicit Tensor3(Dims dims) : dims_(dims), data_(dims.size(), 0.0) { check_dims(dims); }

  Tensor3(std::size_t n1, std::size_t n2, std::size_t n3) : Tensor3(Dims{n1, n2, n3}) {}

  Tensor3(Dims dims, std::vector<double> values) : dims_(dims), data_(std::move(values)) {
    check_dims(dims);
    detail::require(data_.size() == dims.size(),
                    "tensor data length " + std::to_string(data_.size()) +
                        " does not match dims " + to_string(dims));
    for (double v : data_) {
      detail::require(std::isfinite(v), "tensor entries must be finite");
    }
  }

  static Tensor3 zeros(Dims dims) { return Tensor3(dims); }

  static Tensor3 constant(Dims dims, double value) {
    detail::require(std::isfinite(value), "tensor entries must be finite");
    Tensor3 t(dims);
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
  }

  /// Builds a tensor whose k-th frontal slice is slices[k].
  static Tensor3 from_slices(const std::vector<Eigen::MatrixXd>& slices) {
    detail::require(!slices.empty(), "from_slices needs at least one slice");
    const auto rows = static_cast<std::size_t>(slices.front().rows());
    const auto cols = static_cast<std::size_t>(slices.front().cols());
    Tensor3 t(Dims{rows, cols, slices.size()});
    for (std::size_t k = 0; k < slices.size(); ++k) {
      detail::require(static_cast<std::size_t>(slices[k].rows()) == rows &&
                          static_cast<std::size_t>(slices[k].cols()) == cols,
                      "from_slices: inconsistent slice shapes");
      detail::require(slices[k].allFinite(), "tensor entries must be finite");
      t.slice(k) = slices[k];
    }
    return t;
  }

  [[nodiscard]] const Dims& dims() const { return dims_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }
  [[nodiscard]] bool empty() const { return data_.empty(); }

  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return i + dims_.n1 * (j + dims_.n2 * k);
  }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[index(i, j, k)]; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[index(i, j, k)];
  }

  [[nodiscard]] std::span<double> values() { return data_; }
  [[nodiscard]] std::span<const double> values() const { return data_; }

  SliceMap slice(std::size_t k) {
    return {data_.data() + k * dims_.slice_size(), static_cast<Eigen::Index>(dims_.n1),
            static_cast<Eigen::Index>(dims_.n2)};
  }
  [[nodiscard]] ConstSliceMap slice(std::size_t k) const {
    return {data_.data() + k * dims_.slice_size(), static_cast<Eigen::Index>(dims_.n1),
            static_cast<Eigen::Index>(dims_.n2)};
  }

  /// Whole tensor as a flat column vector view.
  Eigen::Map<Eigen::VectorXd> flat() {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
  }
  [[nodiscard]] Eigen::Map<const Eigen::VectorXd> flat() const {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
  }

  // Norms use a fixed left-to-right summation order so results are
  // reproducible across builds and thread counts.
  [[nodiscard]] double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }
  [[nodiscard]] double l1_norm() const {
    double s = 0.0;
    for (double v : data_) s += std::abs(v);
    return s;
  }
  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  Tensor3& operator+=(const Tensor3& o) {
    check_same(o);
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
    return *this;
  }
  Tensor3& operator-=(const Tensor3& o) {
    check_same(o);
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= o.data_[n];
    return *this;
  }
  Tensor3& operator*=(double c) {
    for (double& v : data_) v *= c;
    return *this;
  }

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(Tensor3 a, double c) { return a *= c; }
  friend Tensor3 operator*(double c, Tensor3 a) { return a *= c; }
  friend Tensor3 operator-(Tensor3 a) { return a *= -1.0; }

  friend bool operator==(const Tensor3& a, const Tensor3& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  static void check_dims(const Dims& d) {
    detail::require(d.valid(), "tensor dims must be positive, got " + to_string(d));
  }
  void check_same(const Tensor3& o) const {
    detail::require(dims_ == o.dims_,
                    "tensor dims mismatch: " + to_string(dims_) + " vs " + to_string(o.dims_));
  }

  Dims dims_{};
  std::vector<double> data_;
};

/// max |a - b| over all entries.
inline double max_abs_diff(const Tensor3& a, const Tensor3& b) {
  detail::require(a.dims() == b.dims(), "max_abs_diff: dims mismatch");
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    m = std::max(m, std::abs(a.values()[n] - b.values()[n]));
  }
  return m;
}

/// ||a - b||_F / ||b||_F, or ||a - b||_F when b is zero.
inline double relative_error(const Tensor3& estimate, const Tensor3& reference) {
  const double ref = reference.frobenius_norm();
  const double diff = (estimate - reference).frobenius_norm();
  return ref > 0.0 ? diff / ref : diff;
}

/// Binary indicator of observed entries, same layout as Tensor3.
class ObservationMask {
 public:
  ObservationMask() = default;

  explicit ObservationMask(Dims dims, bool value = false)
      : dims_(dims), bits_(dims.size(), value ? 1 : 0) {
    detail::require(dims.valid(), "mask dims must be positive, got " + to_string(dims));
  }

  ObservationMask(Dims dims, std::vector<std::uint8_t> bits) : dims_(dims), bits_(std::move(bits)) {
    detail::require(dims.valid(), "mask dims must be positive, got " + to_string(dims));
    detail::require(bits_.size() == dims.size(), "mask length does not match dims");
    for (auto b : bits_) detail::require(b <= 1, "mask entries must be 0 or 1");
  }

  /// Interprets a real tensor of exact zeros and ones as a mask.
  static ObservationMask from_tensor(const Tensor3& t) {
    std::vector<std::uint8_t> bits(t.size());
    for (std::size_t n = 0; n < t.size(); ++n) {
      const double v = t.values()[n];
      detail::require(v == 0.0 || v == 1.0, "mask tensor entries must be 0 or 1");
      bits[n] = v == 1.0 ? 1 : 0;
    }
    return {t.dims(), std::move(bits)};
  }

  static ObservationMask ones(Dims dims) { return ObservationMask(dims, true); }
  static ObservationMask zeros(Dims dims) { return ObservationMask(dims, false); }

  [[nodiscard]] const Dims& dims() const { return dims_; }
  [[nodiscard]] std::size_t size() const { return bits_.size(); }
  [[nodiscard]] std::span<const std::uint8_t> values() const { return bits_; }

  [[nodiscard]] bool observed(std::size_t n) const { return bits_[n] != 0; }
  [[nodiscard]] bool observed(std::size_t i, std::size_t j, std::size_t k) const {
    return bits_[i + dims_.n1 * (j + dims_.n2 * k)] != 0;
  }
  void set(std::size_t n, bool v) { bits_[n] = v ? 1 : 0; }

  [[nodiscard]] std::size_t count() const {
    std::size_t c = 0;
    for (auto b : bits_) c += b;
    return c;
  }
  [[nodiscard]] bool all() const { return count() == bits_.size(); }

  [[nodiscard]] Tensor3 to_tensor() const {
    Tensor3 t(dims_);
    for (std::size_t n = 0; n < bits_.size(); ++n) t.values()[n] = bits_[n];
    return t;
  }

  friend bool operator==(const ObservationMask&, const ObservationMask&) = default;

 private:
  Dims dims_{};
  std::vector<std::uint8_t> bits_;
};

}  // namespace tubal
