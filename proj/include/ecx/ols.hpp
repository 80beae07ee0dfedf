#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ecx/error.hpp"

namespace ecx {

struct OlsFit {
  std::vector<std::string> names;
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  std::vector<double> fitted;
  std::vector<double> residuals;
  double r_squared = 0.0;
  std::size_t n_observations = 0;
};

namespace detail {

/// Solve A x = b for several right-hand sides by Gaussian elimination
/// with partial pivoting; A is overwritten. Throws ComputationError
/// naming `names[col]` when a pivot collapses (rank deficiency).
inline void solve_inplace(std::vector<std::vector<double>>& a,
                          std::vector<std::vector<double>>& rhs,
                          const std::vector<std::string>& names,
                          double pivot_tol) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < pivot_tol)
      throw ComputationError(
          "ols: design matrix is rank deficient; column '" + names[col] +
          "' is linearly dependent on the preceding regressors");
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      std::swap(rhs[pivot], rhs[col]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      for (std::size_t c = 0; c < rhs[r].size(); ++c) rhs[r][c] -= f * rhs[col][c];
    }
  }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < rhs[r].size(); ++c) rhs[r][c] /= a[r][r];
}

}  // namespace detail

/// Ordinary least squares via the normal equations (X'X) b = X'y.
/// Columns are rescaled to unit L2 norm internally to keep the system
/// well conditioned; coefficients and standard errors are reported in
/// the original scale. R^2 is centered; it is defined as 0 when y has
/// no variance. Standard errors use sigma^2 = RSS / (n - p).
inline OlsFit ols_fit(const std::vector<std::vector<double>>& columns,
                      const std::vector<double>& y,
                      const std::vector<std::string>& names) {
  const std::size_t p = columns.size();
  const std::size_t n = y.size();
  if (p == 0 || names.size() != p)
    throw InputError("ols: empty design or name mismatch");
  for (const auto& col : columns)
    if (col.size() != n) throw InputError("ols: column length mismatch");
  if (n < p)
    throw InputError("ols: fewer observations (" + std::to_string(n) +
                     ") than coefficients (" + std::to_string(p) + ")");

  std::vector<double> scale(p);
  for (std::size_t j = 0; j < p; ++j) {
    double ss = 0.0;
    for (double v : columns[j]) ss += v * v;
    scale[j] = std::sqrt(ss);
    if (scale[j] == 0.0)
      throw ComputationError("ols: design matrix is rank deficient; column '" +
                             names[j] + "' is identically zero");
  }

  // Normal equations on the rescaled columns.
  std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
  std::vector<std::vector<double>> rhs(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += columns[i][k] * columns[j][k];
      xtx[i][j] = xtx[j][i] = s / (scale[i] * scale[j]);
    }
    double sy = 0.0;
    for (std::size_t k = 0; k < n; ++k) sy += columns[i][k] * y[k];
    rhs[i][0] = sy / scale[i];
    rhs[i][i + 1] = 1.0;  // identity block -> (X'X)^-1 on the way out
  }
  detail::solve_inplace(xtx, rhs, names, 1e-10);

  OlsFit fit;
  fit.names = names;
  fit.n_observations = n;
  fit.coefficients.resize(p);
  for (std::size_t j = 0; j < p; ++j) fit.coefficients[j] = rhs[j][0] / scale[j];

  fit.fitted.assign(n, 0.0);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < n; ++k)
      fit.fitted[k] += fit.coefficients[j] * columns[j][k];
  fit.residuals.resize(n);
  double rss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    fit.residuals[k] = y[k] - fit.fitted[k];
    rss += fit.residuals[k] * fit.residuals[k];
  }
  double ymean = 0.0;
  for (double v : y) ymean += v;
  ymean /= static_cast<double>(n);
  double tss = 0.0;
  for (double v : y) tss += (v - ymean) * (v - ymean);
  fit.r_squared = (tss > 0.0) ? 1.0 - rss / tss : 0.0;
  if (fit.r_squared < 0.0) fit.r_squared = 0.0;
  if (fit.r_squared > 1.0) fit.r_squared = 1.0;

  const double dof = static_cast<double>(n - p);
  const double sigma2 = dof > 0.0 ? rss / dof : 0.0;
  fit.standard_errors.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    // (X'X)^-1 diagonal, undoing the column rescale.
    const double inv_jj = rhs[j][j + 1] / (scale[j] * scale[j]);
    fit.standard_errors[j] = std::sqrt(std::max(0.0, sigma2 * inv_jj));
  }
  return fit;
}

}  // namespace ecx
