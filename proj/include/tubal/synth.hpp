#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "tubal/algebra.hpp"
#include "tubal/error.hpp"
#include "tubal/random.hpp"
#include "tubal/tensor.hpp"

namespace tubal {

/// Tensor with i.i.d. standard normal entries, filled in storage order.
inline Tensor3 random_normal(Dims dims, Rng& rng) {
  Tensor3 t(dims);
  for (double& v : t.values()) v = rng.normal();
  return t;
}

/// P * Q with P (n1 x r x n3) and Q (r x n2 x n3) standard normal; P is drawn
/// first from the same stream. Tubal rank r almost surely; r = 0 gives zeros.
inline Tensor3 synth_low_tubal_rank(Dims dims, std::size_t rank, std::uint64_t seed) {
  detail::require(dims.valid(), "synth_low_tubal_rank: dims must be positive");
  if (rank == 0) return Tensor3(dims);
  Rng rng(seed);
  const Tensor3 p = random_normal(Dims{dims.n1, rank, dims.n3}, rng);
  const Tensor3 q = random_normal(Dims{rank, dims.n2, dims.n3}, rng);
  return t_product(p, q);
}

/// Each entry observed independently with probability rate.
inline ObservationMask random_mask(Dims dims, double rate, std::uint64_t seed) {
  detail::require(rate >= 0.0 && rate <= 1.0, "random_mask: rate must lie in [0, 1]");
  ObservationMask mask(dims);
  Rng rng(seed);
  for (std::size_t n = 0; n < mask.size(); ++n) mask.set(n, rng.bernoulli(rate));
  return mask;
}

/// With probability p each entry is replaced by 0 or peak (fair coin).
inline Tensor3 add_salt_pepper(const Tensor3& a, double p, double peak, std::uint64_t seed) {
  detail::require(p >= 0.0 && p <= 1.0, "add_salt_pepper: probability must lie in [0, 1]");
  detail::require(std::isfinite(peak), "add_salt_pepper: peak must be finite");
  Tensor3 out = a;
  Rng rng(seed);
  for (double& v : out.values()) {
    if (rng.bernoulli(p)) v = rng.bernoulli(0.5) ? peak : 0.0;
  }
  return out;
}

/// With probability p each entry gets an additive Uniform[0, 0.1 * max|a|) draw.
inline Tensor3 add_uniform_noise(const Tensor3& a, double p, std::uint64_t seed) {
  detail::require(p >= 0.0 && p <= 1.0, "add_uniform_noise: probability must lie in [0, 1]");
  const double span = 0.1 * a.max_abs();
  Tensor3 out = a;
  Rng rng(seed);
  for (double& v : out.values()) {
    if (rng.bernoulli(p)) v += span * rng.uniform();
  }
  return out;
}

/// Additive i.i.d. N(0, sigma^2) noise on every entry.
inline Tensor3 add_gaussian_noise(const Tensor3& a, double sigma, std::uint64_t seed) {
  detail::require(sigma >= 0.0 && std::isfinite(sigma), "add_gaussian_noise: sigma must be >= 0");
  Tensor3 out = a;
  Rng rng(seed);
  for (double& v : out.values()) v += sigma * rng.normal();
  return out;
}

/// Sparse gross corruption: each entry independently, with probability
/// fraction, receives a spike of +-magnitude (fair sign).
struct SparseCorruption {
  Tensor3 corrupted;
  Tensor3 spikes;
};

inline SparseCorruption add_sparse_spikes(const Tensor3& a, double fraction, double magnitude,
                                          std::uint64_t seed) {
  detail::require(fraction >= 0.0 && fraction <= 1.0, "add_sparse_spikes: fraction must lie in [0, 1]");
  Tensor3 spikes(a.dims());
  Rng rng(seed);
  for (double& v : spikes.values()) {
    if (rng.bernoulli(fraction)) v = rng.bernoulli(0.5) ? magnitude : -magnitude;
  }
  return {a + spikes, spikes};
}

/// Affine rescale of a tensor onto [0, 1] (constant tensors map to 0).
inline Tensor3 rescale_unit_interval(const Tensor3& a) {
  double lo = a.values()[0];
  double hi = lo;
  for (double v : a.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Tensor3 out(a.dims());
  const double span = hi - lo;
  if (span <= 0.0) return out;
  for (std::size_t n = 0; n < a.size(); ++n) out.values()[n] = (a.values()[n] - lo) / span;
  return out;
}

}  // namespace tubal
