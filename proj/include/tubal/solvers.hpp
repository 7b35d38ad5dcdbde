#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tubal/algebra.hpp"
#include "tubal/error.hpp"
#include "tubal/penalty.hpp"
#include "tubal/random.hpp"
#include "tubal/synth.hpp"
#include "tubal/tensor.hpp"
#include "tubal/thresholding.hpp"
#include "tubal/tsvd.hpp"

namespace tubal {

enum class InitKind {
  convex,    ///< start from the convex TNN solution
  provided,  ///< start from SolverConfig::initial / initial_sparse
};

/**
 * Settings shared by the completion and RPCA solvers.
 *
 * The ADMM penalty grows as mu_{k+1} = min(rho * mu_k, mu_max). An inner run
 * stops once the constraint residual drops to inner_tol (max-abs) or after
 * inner_max_iters steps. Each MM outer iteration rebuilds the weights from
 * the previous iterate; exactly outer_iters of them are run (1 = one-step LLA).
 */
struct SolverConfig {
  PenaltyKind penalty = PenaltyKind::mcp;
  double gamma = 25.0;           ///< completion rank surrogate
  double gamma_rank = 20.0;      ///< RPCA low-rank surrogate (gamma_1)
  double gamma_sparse = 20.0;    ///< RPCA sparsity measure (gamma_2)
  std::optional<double> lambda;  ///< RPCA sparse weight, default 1/sqrt(max(n1,n2) n3)

  double mu0 = 1.0;
  double rho = 1.1;
  double mu_max = 1e10;
  double inner_tol = 1e-7;
  std::size_t inner_max_iters = 500;
  std::size_t outer_iters = 10;

  /// Divide the raw penalty derivatives by mu0 once per outer iteration
  /// instead of by the current mu_k at every inner step.
  bool freeze_weight_mu = false;

  InitKind init = InitKind::convex;
  std::optional<Tensor3> initial;         ///< X0 (completion) or L0 (RPCA)
  std::optional<Tensor3> initial_sparse;  ///< E0 (RPCA); defaults to X - L0

  /// Solve on permute_modes(input, twist) and permute the result back.
  std::optional<ModePermutation> twist;

  /// RPCA dual start: zero unless a seed is given, then standard normal.
  std::optional<std::uint64_t> dual_seed;

  void validate() const {
    detail::require(std::isfinite(mu0) && mu0 > 0.0, "mu0 must be > 0");
    detail::require(std::isfinite(rho) && rho >= 1.0, "rho must be >= 1");
    detail::require(mu_max >= mu0, "mu_max must be >= mu0");
    detail::require(std::isfinite(inner_tol) && inner_tol > 0.0, "inner_tol must be > 0");
    detail::require(inner_max_iters >= 1, "inner_max_iters must be >= 1");
    detail::require(gamma > 1.0 && gamma_rank > 1.0 && gamma_sparse > 1.0, "gamma values must be > 1");
    if (lambda) detail::require(std::isfinite(*lambda) && *lambda > 0.0, "lambda must be > 0");
    if (twist) check_permutation(*twist);
  }
};

/// Outcome of one solve. For completion only `estimate` is set; RPCA also
/// fills `sparse`.
struct SolveReport {
  Tensor3 estimate;
  Tensor3 sparse;
  /// Objective at each outer-iteration boundary; entry 0 is the start point.
  /// Completion: ||X||_gamma (TNN for the convex solver). RPCA:
  /// ||L||_gamma1 + Phi(E) (TNN(L) + lambda ||E||_1 for the convex solver).
  std::vector<double> objective_trace;
  /// Max-abs constraint residual after every inner step, all runs concatenated.
  std::vector<double> feasibility_trace;
  std::vector<std::size_t> inner_iterations;  ///< per ADMM run
  std::size_t iterations_used = 0;            ///< total inner steps
  std::size_t init_iterations = 0;            ///< inner steps spent in the convex init
  bool hit_iteration_cap = false;
};

/// Result of one inner ADMM run.
struct InnerResult {
  Tensor3 primary;  ///< X (completion) or L (RPCA)
  Tensor3 sparse;   ///< E (RPCA only)
  Tensor3 dual;
  std::vector<double> residuals;
  bool converged = false;
};

inline double default_rpca_lambda(const Dims& d) {
  return 1.0 / std::sqrt(static_cast<double>(std::max(d.n1, d.n2) * d.n3));
}

namespace detail {

inline double weight_scale(const SolverConfig& cfg, double mu) {
  return 1.0 / (cfg.freeze_weight_mu ? cfg.mu0 : mu);
}

inline SpectralDiagonal constant_spectral(const Dims& d, double value) {
  return SpectralDiagonal::Constant(static_cast<Eigen::Index>(std::min(d.n1, d.n2)),
                                    static_cast<Eigen::Index>(d.n3), value);
}

inline void append_run(SolveReport& report, const InnerResult& run) {
  report.feasibility_trace.insert(report.feasibility_trace.end(), run.residuals.begin(),
                                  run.residuals.end());
  report.inner_iterations.push_back(run.residuals.size());
  report.iterations_used += run.residuals.size();
  if (!run.converged) report.hit_iteration_cap = true;
}

inline bool feasible(const Tensor3& x, const Tensor3& observed, const ObservationMask& mask) {
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (mask.observed(n) && x.values()[n] != observed.values()[n]) return false;
  }
  return true;
}

inline SolverConfig without_twist(SolverConfig cfg) {
  cfg.twist.reset();
  return cfg;
}

}  // namespace detail

/**
 * Inner ADMM for min Q(M | X_old) s.t. M = X, X agrees with `observed` on the
 * mask. raw_weights holds phi'(S̄_old) (ones for the convex problem); the
 * threshold at step k is raw_weights / mu_k. x_start must already be feasible.
 * A full mask admits only X = observed, which is returned after one step.
 */
inline InnerResult admm_tc_inner(const Tensor3& observed, const ObservationMask& mask,
                                 const Tensor3& x_start, const SpectralDiagonal& raw_weights,
                                 const SolverConfig& cfg) {
  cfg.validate();
  const Dims d = observed.dims();
  detail::require(mask.dims() == d && x_start.dims() == d, "admm_tc_inner: dims mismatch");
  detail::require(detail::feasible(x_start, observed, mask),
                  "admm_tc_inner: starting point must match the observations on the mask");
  InnerResult out;
  out.dual = Tensor3(d);
  if (mask.all()) {
    out.primary = observed;
    out.residuals.push_back(0.0);
    out.converged = true;
    return out;
  }
  Tensor3 x = x_start;
  Tensor3& y = out.dual;
  double mu = cfg.mu0;
  for (std::size_t it = 0; it < cfg.inner_max_iters; ++it) {
    const double inv_mu = 1.0 / mu;
    const Tensor3 m = generalized_tsvt(x - inv_mu * y, raw_weights, detail::weight_scale(cfg, mu));
    x = project_observed(m + inv_mu * y, observed, mask);
    const Tensor3 gap = m - x;
    y += mu * gap;
    const double residual = gap.max_abs();
    out.residuals.push_back(residual);
    mu = std::min(cfg.rho * mu, cfg.mu_max);
    if (residual <= cfg.inner_tol) {
      out.converged = true;
      break;
    }
  }
  out.primary = std::move(x);
  return out;
}

/// Convex tensor completion: minimize TNN(X) subject to the observations,
/// starting from the zero-filled observation.
inline SolveReport convex_tc(const Tensor3& observed, const ObservationMask& mask,
                             const SolverConfig& cfg) {
  cfg.validate();
  detail::require(mask.dims() == observed.dims(), "convex_tc: mask dims mismatch");
  if (cfg.twist) {
    auto report = convex_tc(permute_modes(observed, *cfg.twist), permute_modes(mask, *cfg.twist),
                            detail::without_twist(cfg));
    report.estimate = permute_modes(report.estimate, inverse_permutation(*cfg.twist));
    return report;
  }
  const Dims d = observed.dims();
  const Tensor3 start = project_observed(Tensor3(d), observed, mask);
  SolveReport report;
  report.objective_trace.push_back(tensor_nuclear_norm(start));
  auto run = admm_tc_inner(observed, mask, start, detail::constant_spectral(d, 1.0), cfg);
  detail::append_run(report, run);
  report.estimate = std::move(run.primary);
  report.objective_trace.push_back(tensor_nuclear_norm(report.estimate));
  return report;
}

/// Non-convex completion: minimize ||X||_gamma subject to the observations by
/// MM, each outer step solving the linearized problem with admm_tc_inner.
inline SolveReport lrtc_mm(const Tensor3& observed, const ObservationMask& mask,
                           const SolverConfig& cfg) {
  cfg.validate();
  detail::require(mask.dims() == observed.dims(), "lrtc_mm: mask dims mismatch");
  if (cfg.twist) {
    SolverConfig inner = detail::without_twist(cfg);
    if (inner.initial) inner.initial = permute_modes(*inner.initial, *cfg.twist);
    auto report = lrtc_mm(permute_modes(observed, *cfg.twist), permute_modes(mask, *cfg.twist), inner);
    report.estimate = permute_modes(report.estimate, inverse_permutation(*cfg.twist));
    return report;
  }
  const auto params = PenaltyParams::rank(cfg.penalty, cfg.gamma);
  const Dims d = observed.dims();
  SolveReport report;
  Tensor3 x_old;
  if (cfg.init == InitKind::convex) {
    auto init = convex_tc(observed, mask, cfg);
    report.init_iterations = init.iterations_used;
    x_old = std::move(init.estimate);
  } else {
    detail::require(cfg.initial.has_value() && cfg.initial->dims() == d,
                    "lrtc_mm: provided init needs an initial tensor with matching dims");
    x_old = project_observed(*cfg.initial, observed, mask);
  }
  SpectralDiagonal sd_old = spectral_singular_values(x_old);
  report.objective_trace.push_back(gamma_norm(params, sd_old, d.n3));
  for (std::size_t t = 0; t < cfg.outer_iters; ++t) {
    auto run = admm_tc_inner(observed, mask, x_old, rank_weights(params, sd_old), cfg);
    detail::append_run(report, run);
    x_old = std::move(run.primary);
    sd_old = spectral_singular_values(x_old);
    report.objective_trace.push_back(gamma_norm(params, sd_old, d.n3));
  }
  report.estimate = std::move(x_old);
  return report;
}

/**
 * Inner ADMM for min Q_rank(L) + Q_sparse(E) s.t. L + E = X. rank_raw holds
 * phi'_{1,gamma1}(S̄_old) and sparse_raw holds phi'_{lambda,gamma2}(|E_old|);
 * both are divided by the current mu at each step.
 */
inline InnerResult admm_rpca_inner(const Tensor3& x, const Tensor3& l_start, const Tensor3& e_start,
                                   const SpectralDiagonal& rank_raw, const Tensor3& sparse_raw,
                                   const SolverConfig& cfg, const Tensor3& dual_start) {
  cfg.validate();
  const Dims d = x.dims();
  detail::require(l_start.dims() == d && e_start.dims() == d && sparse_raw.dims() == d &&
                      dual_start.dims() == d,
                  "admm_rpca_inner: dims mismatch");
  InnerResult out;
  Tensor3 l = l_start;
  Tensor3 e = e_start;
  out.dual = dual_start;
  Tensor3& y = out.dual;
  double mu = cfg.mu0;
  for (std::size_t it = 0; it < cfg.inner_max_iters; ++it) {
    const double inv_mu = 1.0 / mu;
    const double scale = detail::weight_scale(cfg, mu);
    l = generalized_tsvt(x - e - inv_mu * y, rank_raw, scale);
    e = detail::soft_threshold_scaled(x - l - inv_mu * y, sparse_raw, scale);
    Tensor3 gap = l + e - x;
    y += mu * gap;
    const double residual = gap.max_abs();
    out.residuals.push_back(residual);
    mu = std::min(cfg.rho * mu, cfg.mu_max);
    if (residual <= cfg.inner_tol) {
      out.converged = true;
      break;
    }
  }
  out.primary = std::move(l);
  out.sparse = std::move(e);
  return out;
}

inline InnerResult admm_rpca_inner(const Tensor3& x, const Tensor3& l_start, const Tensor3& e_start,
                                   const SpectralDiagonal& rank_raw, const Tensor3& sparse_raw,
                                   const SolverConfig& cfg) {
  return admm_rpca_inner(x, l_start, e_start, rank_raw, sparse_raw, cfg, Tensor3(x.dims()));
}

namespace detail {

inline Tensor3 rpca_dual_start(const Dims& d, const SolverConfig& cfg) {
  if (!cfg.dual_seed) return Tensor3(d);
  Rng rng(*cfg.dual_seed);
  return random_normal(d, rng);
}

}  // namespace detail

/// Convex tensor RPCA: min TNN(L) + lambda ||E||_1 s.t. L + E = X, from L = E = 0.
inline SolveReport convex_trpca(const Tensor3& x, double lambda, const SolverConfig& cfg) {
  cfg.validate();
  detail::require(std::isfinite(lambda) && lambda > 0.0, "convex_trpca: lambda must be > 0");
  if (cfg.twist) {
    auto report = convex_trpca(permute_modes(x, *cfg.twist), lambda, detail::without_twist(cfg));
    const auto inv = inverse_permutation(*cfg.twist);
    report.estimate = permute_modes(report.estimate, inv);
    report.sparse = permute_modes(report.sparse, inv);
    return report;
  }
  const Dims d = x.dims();
  SolveReport report;
  const Tensor3 zero(d);
  report.objective_trace.push_back(0.0);
  auto run = admm_rpca_inner(x, zero, zero, detail::constant_spectral(d, 1.0),
                             Tensor3::constant(d, lambda), cfg, detail::rpca_dual_start(d, cfg));
  detail::append_run(report, run);
  report.estimate = std::move(run.primary);
  report.sparse = std::move(run.sparse);
  report.objective_trace.push_back(tensor_nuclear_norm(report.estimate) + lambda * report.sparse.l1_norm());
  return report;
}

inline SolveReport convex_trpca(const Tensor3& x, const SolverConfig& cfg) {
  return convex_trpca(x, cfg.lambda.value_or(default_rpca_lambda(x.dims())), cfg);
}

/// ||L||_gamma1 + Phi_{lambda,gamma2}(E).
inline double trpca_objective(const SolverConfig& cfg, double lambda, const Tensor3& l, const Tensor3& e) {
  return gamma_norm(PenaltyParams::rank(cfg.penalty, cfg.gamma_rank), l) +
         sparsity_measure(PenaltyParams(cfg.penalty, lambda, cfg.gamma_sparse), e);
}

/// Non-convex tensor RPCA by MM over admm_rpca_inner.
inline SolveReport trpca_mm(const Tensor3& x, const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.twist) {
    SolverConfig inner = detail::without_twist(cfg);
    if (inner.initial) inner.initial = permute_modes(*inner.initial, *cfg.twist);
    if (inner.initial_sparse) inner.initial_sparse = permute_modes(*inner.initial_sparse, *cfg.twist);
    if (!inner.lambda) inner.lambda = default_rpca_lambda(x.dims());
    auto report = trpca_mm(permute_modes(x, *cfg.twist), inner);
    const auto inv = inverse_permutation(*cfg.twist);
    report.estimate = permute_modes(report.estimate, inv);
    report.sparse = permute_modes(report.sparse, inv);
    return report;
  }
  const Dims d = x.dims();
  const double lambda = cfg.lambda.value_or(default_rpca_lambda(d));
  const auto rank_params = PenaltyParams::rank(cfg.penalty, cfg.gamma_rank);
  const PenaltyParams sparse_params(cfg.penalty, lambda, cfg.gamma_sparse);

  SolveReport report;
  Tensor3 l_old;
  Tensor3 e_old;
  if (cfg.init == InitKind::convex) {
    auto init = convex_trpca(x, lambda, cfg);
    report.init_iterations = init.iterations_used;
    l_old = std::move(init.estimate);
    e_old = std::move(init.sparse);
  } else {
    detail::require(cfg.initial.has_value() && cfg.initial->dims() == d,
                    "trpca_mm: provided init needs an initial low-rank tensor with matching dims");
    l_old = *cfg.initial;
    if (cfg.initial_sparse) {
      detail::require(cfg.initial_sparse->dims() == d, "trpca_mm: initial sparse dims mismatch");
      e_old = *cfg.initial_sparse;
    } else {
      e_old = x - l_old;
    }
  }
  SpectralDiagonal sd_old = spectral_singular_values(l_old);
  auto objective = [&] {
    return gamma_norm(rank_params, sd_old, d.n3) + sparsity_measure(sparse_params, e_old);
  };
  report.objective_trace.push_back(objective());
  for (std::size_t t = 0; t < cfg.outer_iters; ++t) {
    Tensor3 sparse_raw(d);
    for (std::size_t n = 0; n < d.size(); ++n) {
      sparse_raw.values()[n] = penalty_derivative(sparse_params, std::abs(e_old.values()[n]));
    }
    auto run = admm_rpca_inner(x, l_old, e_old, rank_weights(rank_params, sd_old), sparse_raw, cfg,
                               detail::rpca_dual_start(d, cfg));
    detail::append_run(report, run);
    l_old = std::move(run.primary);
    e_old = std::move(run.sparse);
    sd_old = spectral_singular_values(l_old);
    report.objective_trace.push_back(objective());
  }
  report.estimate = std::move(l_old);
  report.sparse = std::move(e_old);
  return report;
}

}  // namespace tubal
