#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "tubal/error.hpp"
#include "tubal/tensor.hpp"
#include "tubal/tsvd.hpp"

namespace tubal {

enum class PenaltyKind { scad, mcp };

inline const char* to_string(PenaltyKind kind) { return kind == PenaltyKind::scad ? "scad" : "mcp"; }

/// Folded-concave penalty parameters: lambda > 0, gamma > 1.
class PenaltyParams {
 public:
  PenaltyParams(PenaltyKind kind, double lambda, double gamma)
      : kind_(kind), lambda_(lambda), gamma_(gamma) {
    detail::require(std::isfinite(lambda) && lambda > 0.0, "penalty lambda must be > 0");
    detail::require(std::isfinite(gamma) && gamma > 1.0, "penalty gamma must be > 1");
  }

  /// Rank-surrogate parameters: lambda fixed to 1.
  static PenaltyParams rank(PenaltyKind kind, double gamma) { return {kind, 1.0, gamma}; }

  [[nodiscard]] PenaltyKind kind() const { return kind_; }
  [[nodiscard]] double lambda() const { return lambda_; }
  [[nodiscard]] double gamma() const { return gamma_; }

 private:
  PenaltyKind kind_;
  double lambda_;
  double gamma_;
};

/// SCAD or MCP value at t; even in t.
inline double penalty_value(const PenaltyParams& p, double t) {
  const double a = std::abs(t);
  const double lam = p.lambda();
  const double g = p.gamma();
  if (p.kind() == PenaltyKind::scad) {
    if (a <= lam) return lam * a;
    if (a <= g * lam) return (g * lam * a - 0.5 * (a * a + lam * lam)) / (g - 1.0);
    return 0.5 * (g + 1.0) * lam * lam;
  }
  if (a < g * lam) return lam * a - a * a / (2.0 * g);
  return 0.5 * g * lam * lam;
}

/// Derivative on t >= 0. At t = 0 this is the right derivative, lambda.
inline double penalty_derivative(const PenaltyParams& p, double t) {
  detail::require(t >= 0.0, "penalty_derivative: t must be nonnegative");
  const double lam = p.lambda();
  const double g = p.gamma();
  if (p.kind() == PenaltyKind::scad) {
    if (t <= lam) return lam;
    if (t <= g * lam) return (g * lam - t) / (g - 1.0);
    return 0.0;
  }
  if (t < g * lam) return lam - t / g;
  return 0.0;
}

/// Elementwise penalty sum over a tensor.
inline double sparsity_measure(const PenaltyParams& p, const Tensor3& a) {
  double s = 0.0;
  for (double v : a.values()) s += penalty_value(p, v);
  return s;
}

/// (1/n3) * sum phi_{1,gamma} over a precomputed spectral diagonal. p.lambda()
/// is ignored; the rank surrogate always uses lambda = 1.
inline double gamma_norm(const PenaltyParams& p, const SpectralDiagonal& sd, std::size_t n3) {
  const auto unit = PenaltyParams::rank(p.kind(), p.gamma());
  double s = 0.0;
  for (Eigen::Index k = 0; k < sd.cols(); ++k) {
    for (Eigen::Index i = 0; i < sd.rows(); ++i) s += penalty_value(unit, sd(i, k));
  }
  return s / static_cast<double>(n3);
}

/// gamma-norm rank surrogate; computes a fresh t-SVD spectrum of a.
inline double gamma_norm(const PenaltyParams& p, const Tensor3& a) {
  return gamma_norm(p, spectral_singular_values(a), a.dims().n3);
}

/// Tangent-line majorizer of sparsity_measure at x_old, evaluated at x.
inline double q_sparsity_value(const PenaltyParams& p, const Tensor3& x, const Tensor3& x_old) {
  detail::require(x.dims() == x_old.dims(), "q_sparsity_value: dims mismatch");
  double linear = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double old_abs = std::abs(x_old.values()[n]);
    linear += penalty_derivative(p, old_abs) * (std::abs(x.values()[n]) - old_abs);
  }
  return sparsity_measure(p, x_old) + linear;
}

/// Tangent-line majorizer of gamma_norm at the spectrum sd_old, evaluated at sd.
inline double q_rank_value(const PenaltyParams& p, const SpectralDiagonal& sd,
                           const SpectralDiagonal& sd_old, std::size_t n3) {
  detail::require(sd.rows() == sd_old.rows() && sd.cols() == sd_old.cols(),
                  "q_rank_value: spectrum shape mismatch");
  const auto unit = PenaltyParams::rank(p.kind(), p.gamma());
  double linear = 0.0;
  for (Eigen::Index k = 0; k < sd.cols(); ++k) {
    for (Eigen::Index i = 0; i < sd.rows(); ++i) {
      linear += penalty_derivative(unit, sd_old(i, k)) * (sd(i, k) - sd_old(i, k));
    }
  }
  return gamma_norm(p, sd_old, n3) + linear / static_cast<double>(n3);
}

inline double q_rank_value(const PenaltyParams& p, const Tensor3& x, const Tensor3& x_old) {
  detail::require(x.dims() == x_old.dims(), "q_rank_value: dims mismatch");
  return q_rank_value(p, spectral_singular_values(x), spectral_singular_values(x_old), x.dims().n3);
}

/// Raw rank weights phi'_{1,gamma}(sd_old(i,k)), before division by mu.
inline SpectralDiagonal rank_weights(const PenaltyParams& p, const SpectralDiagonal& sd_old) {
  const auto unit = PenaltyParams::rank(p.kind(), p.gamma());
  return sd_old.unaryExpr([&](double s) { return penalty_derivative(unit, s); });
}

}  // namespace tubal
