#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <string>

#include <Eigen/Dense>
#include <lapacke.h>

#include "tubal/error.hpp"

namespace tubal::detail {

/// M = U * diag(s) * V^H with s nonincreasing.
struct SliceSvd {
  Eigen::MatrixXcd u;
  Eigen::VectorXd s;
  Eigen::MatrixXcd v;
};

enum class SvdVectors { none, thin, full };

// LAPACK divide-and-conquer SVD. The contract the rest of the library relies
// on: ||M - U S V^H|| <= ~1e-12 ||M|| and nonincreasing singular values.
inline SliceSvd svd_complex(const Eigen::MatrixXcd& m, SvdVectors vectors) {
  const auto rows = static_cast<lapack_int>(m.rows());
  const auto cols = static_cast<lapack_int>(m.cols());
  const lapack_int p = std::min(rows, cols);
  const bool full = vectors == SvdVectors::full;
  const bool none = vectors == SvdVectors::none;
  const lapack_int ucols = none ? 1 : (full ? rows : p);
  const lapack_int vtrows = none ? 1 : (full ? cols : p);
  const char jobz = none ? 'N' : (full ? 'A' : 'S');
  Eigen::MatrixXcd a = m;
  SliceSvd out;
  out.u.resize(rows, ucols);
  out.s.resize(p);
  Eigen::MatrixXcd vt(vtrows, cols);
  const lapack_int info = LAPACKE_zgesdd(
      LAPACK_COL_MAJOR, jobz, rows, cols,
      reinterpret_cast<lapack_complex_double*>(a.data()), rows, out.s.data(),
      reinterpret_cast<lapack_complex_double*>(out.u.data()), rows,
      reinterpret_cast<lapack_complex_double*>(vt.data()), vtrows);
  if (info != 0) {
    throw NumericalError("complex SVD failed to converge (zgesdd info " + std::to_string(info) + ")");
  }
  if (none) {
    out.u.resize(0, 0);
  } else {
    out.v = vt.adjoint();
  }
  return out;
}

inline SliceSvd svd_real(const Eigen::MatrixXd& m, SvdVectors vectors) {
  const auto rows = static_cast<lapack_int>(m.rows());
  const auto cols = static_cast<lapack_int>(m.cols());
  const lapack_int p = std::min(rows, cols);
  const bool full = vectors == SvdVectors::full;
  const bool none = vectors == SvdVectors::none;
  const lapack_int ucols = none ? 1 : (full ? rows : p);
  const lapack_int vtrows = none ? 1 : (full ? cols : p);
  const char jobz = none ? 'N' : (full ? 'A' : 'S');
  Eigen::MatrixXd a = m;
  Eigen::MatrixXd u(rows, ucols);
  Eigen::MatrixXd vt(vtrows, cols);
  SliceSvd out;
  out.s.resize(p);
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, jobz, rows, cols, a.data(),
                                         rows, out.s.data(), u.data(), rows, vt.data(), vtrows);
  if (info != 0) {
    throw NumericalError("real SVD failed to converge (dgesdd info " + std::to_string(info) + ")");
  }
  if (!none) {
    out.u = u.cast<std::complex<double>>();
    out.v = vt.transpose().cast<std::complex<double>>();
  }
  return out;
}

/// SVD of one spectral slice. Self-conjugate slices (real for real input)
/// get a real factorization so the inverse transform stays real.
inline SliceSvd svd_spectral_slice(const Eigen::MatrixXcd& m, bool real_slice, SvdVectors vectors) {
  if (!m.allFinite()) throw NumericalError("SVD input contains non-finite entries");
  return real_slice ? svd_real(m.real(), vectors) : svd_complex(m, vectors);
}

}  // namespace tubal::detail
