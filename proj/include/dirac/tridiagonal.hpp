#pragma once

#include <lapacke.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirac/operator.hpp"

namespace dirac {

// Thin wrappers over the LAPACK symmetric tridiagonal drivers.

/// All eigenvalues, ascending (dsterf).
inline std::vector<double> eigenvalues(const BoxMatrix& b) {
  std::vector<double> d = b.diag;
  std::vector<double> e = b.offdiag;
  if (d.empty()) return d;
  const lapack_int info = LAPACKE_dsterf(static_cast<lapack_int>(d.size()), d.data(), e.data());
  if (info != 0) throw std::runtime_error("dsterf failed, info=" + std::to_string(info));
  return d;
}

namespace detail {

struct BisectionResult {
  std::vector<double> w;
  std::vector<lapack_int> iblock;
  std::vector<lapack_int> isplit;
  lapack_int count = 0;
};

inline BisectionResult stebz(const BoxMatrix& b, double lo, double hi, char order) {
  const auto n = static_cast<lapack_int>(b.dim());
  BisectionResult r;
  r.w.resize(b.dim());
  r.iblock.resize(b.dim());
  r.isplit.resize(b.dim());
  lapack_int nsplit = 0;
  const lapack_int info =
      LAPACKE_dstebz('V', order, n, lo, hi, 0, 0, 0.0, b.diag.data(), b.offdiag.data(), &r.count, &nsplit,
                     r.w.data(), r.iblock.data(), r.isplit.data());
  if (info != 0) throw std::runtime_error("dstebz failed, info=" + std::to_string(info));
  r.w.resize(static_cast<std::size_t>(r.count));
  r.iblock.resize(static_cast<std::size_t>(r.count));
  return r;
}

}  // namespace detail

/// Eigenvalues in the half-open interval (lo, hi], ascending (dstebz).
inline std::vector<double> eigenvalues_in(const BoxMatrix& b, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("eigenvalues_in: empty interval");
  return detail::stebz(b, lo, hi, 'E').w;
}

struct EigenPairs {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;  ///< unit-norm, one per value
};

/// Eigenpairs in (lo, hi] via bisection plus inverse iteration (dstebz + dstein).
inline EigenPairs eigenpairs_in(const BoxMatrix& b, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("eigenpairs_in: empty interval");
  auto r = detail::stebz(b, lo, hi, 'B');
  EigenPairs out;
  const std::size_t n = b.dim();
  const auto m = static_cast<std::size_t>(r.count);
  if (m == 0) return out;
  std::vector<double> z(n * m);
  std::vector<lapack_int> ifail(m);
  const lapack_int info = LAPACKE_dstein(LAPACK_COL_MAJOR, static_cast<lapack_int>(n), b.diag.data(),
                                         b.offdiag.data(), r.count, r.w.data(), r.iblock.data(), r.isplit.data(),
                                         z.data(), static_cast<lapack_int>(n), ifail.data());
  if (info != 0) throw std::runtime_error("dstein failed, info=" + std::to_string(info));
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return r.w[x] < r.w[y]; });
  for (std::size_t i : idx) {
    out.values.push_back(r.w[i]);
    out.vectors.emplace_back(z.begin() + static_cast<std::ptrdiff_t>(i * n),
                             z.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
  }
  return out;
}

}  // namespace dirac
