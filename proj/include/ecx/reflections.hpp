#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecx/core_matrix.hpp"
#include "ecx/error.hpp"
#include "ecx/stats.hpp"

namespace ecx {

/// The reflection vectors k_{c,0..N} and k_{p,0..N} of a bipartite
/// matrix. Zero-degree countries and products are excluded once, before
/// iteration (the level-1 average is undefined for them); their ids are
/// carried in excluded_countries / excluded_products. country_levels[n]
/// is aligned with countries, product_levels[n] with products.
struct ReflectionTrajectory {
  std::vector<std::string> countries;  // included, zero-degree dropped
  std::vector<std::string> products;
  std::vector<std::string> excluded_countries;
  std::vector<std::string> excluded_products;
  std::vector<std::vector<double>> country_levels;  // [level][country]
  std::vector<std::vector<double>> product_levels;  // [level][product]
  int depth = 0;

  const std::vector<double>& country_level(int n) const {
    if (n < 0 || n > depth) throw InputError("country_level: level out of range");
    return country_levels[static_cast<std::size_t>(n)];
  }
  const std::vector<double>& product_level(int n) const {
    if (n < 0 || n > depth) throw InputError("product_level: level out of range");
    return product_levels[static_cast<std::size_t>(n)];
  }
  std::optional<std::size_t> country_position(const std::string& id) const {
    auto it = std::find(countries.begin(), countries.end(), id);
    if (it == countries.end()) return std::nullopt;
    return static_cast<std::size_t>(it - countries.begin());
  }
};

/// Z-scored country values at one reflection level.
struct NormalizedScores {
  std::vector<double> values;
  int level = 0;
  double mean_used = 0.0;
  double stdev_used = 0.0;  // population stdev
};

/// Iterate the reflections
///   k_{c,N} = (1/k_{c,0}) sum_p M_cp k_{p,N-1}
///   k_{p,N} = (1/k_{p,0}) sum_c M_cp k_{c,N-1}
/// from the degree initial conditions, synchronously (level N reads only
/// level N-1), with no damping or renormalization inside the iteration.
inline ReflectionTrajectory reflect(const BipartiteMatrix& m, int depth) {
  if (depth < 0) throw InputError("reflect: depth must be >= 0");
  if (m.n_edges() == 0) throw ComputationError("reflect: nothing to iterate (no edges)");

  ReflectionTrajectory t;
  t.depth = depth;

  // Map original indices to the included submatrix.
  std::vector<std::size_t> cmap(m.n_countries(), SIZE_MAX);
  std::vector<std::size_t> pmap(m.n_products(), SIZE_MAX);
  for (std::size_t c = 0; c < m.n_countries(); ++c) {
    if (m.country_degree(c) > 0) {
      cmap[c] = t.countries.size();
      t.countries.push_back(m.countries()[c]);
    } else {
      t.excluded_countries.push_back(m.countries()[c]);
    }
  }
  for (std::size_t p = 0; p < m.n_products(); ++p) {
    if (m.product_degree(p) > 0) {
      pmap[p] = t.products.size();
      t.products.push_back(m.products()[p]);
    } else {
      t.excluded_products.push_back(m.products()[p]);
    }
  }

  const std::size_t nc = t.countries.size();
  const std::size_t np = t.products.size();
  std::vector<std::vector<std::size_t>> adj_c(nc);  // country -> products
  std::vector<std::vector<std::size_t>> adj_p(np);  // product -> countries
  for (std::size_t c = 0; c < m.n_countries(); ++c) {
    if (cmap[c] == SIZE_MAX) continue;
    for (std::size_t p : m.products_of(c)) {
      adj_c[cmap[c]].push_back(pmap[p]);
      adj_p[pmap[p]].push_back(cmap[c]);
    }
  }

  std::vector<double> kc(nc), kp(np);
  for (std::size_t i = 0; i < nc; ++i) kc[i] = static_cast<double>(adj_c[i].size());
  for (std::size_t j = 0; j < np; ++j) kp[j] = static_cast<double>(adj_p[j].size());
  t.country_levels.push_back(kc);
  t.product_levels.push_back(kp);

  for (int n = 1; n <= depth; ++n) {
    const auto& prev_c = t.country_levels.back();
    const auto& prev_p = t.product_levels.back();
    std::vector<double> next_c(nc), next_p(np);
    for (std::size_t i = 0; i < nc; ++i) {
      double s = 0.0;
      for (std::size_t j : adj_c[i]) s += prev_p[j];
      next_c[i] = s / static_cast<double>(adj_c[i].size());
    }
    for (std::size_t j = 0; j < np; ++j) {
      double s = 0.0;
      for (std::size_t i : adj_p[j]) s += prev_c[i];
      next_p[j] = s / static_cast<double>(adj_p[j].size());
    }
    t.country_levels.push_back(std::move(next_c));
    t.product_levels.push_back(std::move(next_p));
  }
  return t;
}

/// Z-scores of the country values at one level, population stdev.
inline NormalizedScores normalize(const ReflectionTrajectory& t, int level) {
  if (level < 0 || level > t.depth)
    throw InputError("normalize: level out of range");
  const auto& v = t.country_levels[static_cast<std::size_t>(level)];
  NormalizedScores out;
  out.level = level;
  out.mean_used = mean(v);
  out.stdev_used = population_stdev(v);
  if (out.stdev_used == 0.0)
    throw ComputationError("normalize: degenerate distribution at level " +
                           std::to_string(level) + " (all values identical)");
  out.values.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.values[i] = (v[i] - out.mean_used) / out.stdev_used;
  return out;
}

struct RankShiftEntry {
  std::string country;
  double rank_a = 0.0;  // average-rank ties, rank 1 = largest value
  double rank_b = 0.0;
};

struct RankShift {
  std::optional<double> spearman;  // nullopt when a level is constant
  std::vector<RankShiftEntry> entries;
};

/// How the country ranking shifts between two reflection levels.
inline RankShift rank_shift(const ReflectionTrajectory& t, int level_a, int level_b) {
  if (level_a < 0 || level_a > t.depth || level_b < 0 || level_b > t.depth)
    throw InputError("rank_shift: level out of range");
  const auto& va = t.country_levels[static_cast<std::size_t>(level_a)];
  const auto& vb = t.country_levels[static_cast<std::size_t>(level_b)];
  RankShift out;
  out.spearman = spearman(va, vb);
  const auto ra = average_ranks(va);
  const auto rb = average_ranks(vb);
  out.entries.reserve(t.countries.size());
  for (std::size_t i = 0; i < t.countries.size(); ++i)
    out.entries.push_back({t.countries[i], ra[i], rb[i]});
  return out;
}

struct LevelCorrelation {
  int level = 0;
  std::optional<double> r;  // nullopt: degenerate (zero variance)
};

struct ExternalCorrelation {
  std::vector<LevelCorrelation> levels;
  std::size_t n_intersection = 0;
  std::vector<std::string> countries_used;
};

/// Pearson correlation between k_{c,N} and an external per-country
/// series, per requested level, on the country intersection.
inline ExternalCorrelation correlate_external(
    const ReflectionTrajectory& t, const std::map<std::string, double>& series,
    const std::vector<int>& levels, bool log_transform) {
  ExternalCorrelation out;
  std::vector<std::size_t> positions;
  std::vector<double> s;
  for (std::size_t i = 0; i < t.countries.size(); ++i) {
    auto it = series.find(t.countries[i]);
    if (it == series.end()) continue;
    double v = it->second;
    if (log_transform) {
      if (!(v > 0.0))
        throw InputError("correlate_external: non-positive value for '" +
                         t.countries[i] + "' with log transform");
      v = std::log(v);
    }
    positions.push_back(i);
    s.push_back(v);
    out.countries_used.push_back(t.countries[i]);
  }
  out.n_intersection = positions.size();
  if (out.n_intersection < 3)
    throw InputError("correlate_external: insufficient overlap (" +
                     std::to_string(out.n_intersection) + " countries, need 3)");
  for (int level : levels) {
    if (level < 0 || level > t.depth)
      throw InputError("correlate_external: level out of range");
    const auto& kv = t.country_levels[static_cast<std::size_t>(level)];
    std::vector<double> k(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) k[i] = kv[positions[i]];
    out.levels.push_back({level, pearson(k, s)});
  }
  return out;
}

namespace detail {

// Dense row-major matrix product, a (n x m) * b (m x k).
inline std::vector<std::vector<double>> mat_mul(
    const std::vector<std::vector<double>>& a,
    const std::vector<std::vector<double>>& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t k = b.empty() ? 0 : b[0].size();
  std::vector<std::vector<double>> out(n, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double aij = a[i][j];
      if (aij == 0.0) continue;
      for (std::size_t l = 0; l < k; ++l) out[i][l] += aij * b[j][l];
    }
  return out;
}

inline std::vector<double> mat_vec(const std::vector<std::vector<double>>& a,
                                   const std::vector<double>& v) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
  return out;
}

}  // namespace detail

/// Consistency check of the random-walk reading of the reflections:
/// k_{.,N} equals the N-step composition of the row-stochastic operators
/// S_cp = M_cp / k_{c,0} and S_pc = M_cp / k_{p,0} applied to the
/// level-0 vector. The composition is built as an explicit dense
/// operator chain, a different evaluation route than reflect(), and the
/// maximum absolute discrepancy over both sides is returned.
inline double random_walk_check(const BipartiteMatrix& m,
                                const ReflectionTrajectory& t, int level) {
  if (level < 1) throw InputError("random_walk_check: level must be >= 1");
  if (level > t.depth) throw InputError("random_walk_check: level exceeds depth");

  const std::size_t nc = t.countries.size();
  const std::size_t np = t.products.size();

  // Row-stochastic operators on the included submatrix. Trajectory ids
  // follow matrix order; map them back by id.
  std::vector<std::vector<double>> s_cp(nc, std::vector<double>(np, 0.0));
  std::vector<std::vector<double>> s_pc(np, std::vector<double>(nc, 0.0));
  std::map<std::string, std::size_t> cpos, ppos;
  for (std::size_t i = 0; i < nc; ++i) cpos[t.countries[i]] = i;
  for (std::size_t j = 0; j < np; ++j) ppos[t.products[j]] = j;
  for (std::size_t c = 0; c < m.n_countries(); ++c) {
    auto itc = cpos.find(m.countries()[c]);
    if (itc == cpos.end()) continue;
    const std::size_t i = itc->second;
    const double cdeg = static_cast<double>(m.country_degree(c));
    for (std::size_t p : m.products_of(c)) {
      const std::size_t j = ppos.at(m.products()[p]);
      s_cp[i][j] = 1.0 / cdeg;
      s_pc[j][i] = 1.0 / static_cast<double>(m.product_degree(p));
    }
  }

  const auto& kc0 = t.country_levels[0];
  const auto& kp0 = t.product_levels[0];

  // Country side: T = S_cp * S_pc * S_cp * ... (level factors).
  double max_err = 0.0;
  {
    std::vector<std::vector<double>> op = s_cp;
    bool next_is_pc = true;
    for (int n = 2; n <= level; ++n) {
      op = detail::mat_mul(op, next_is_pc ? s_pc : s_cp);
      next_is_pc = !next_is_pc;
    }
    const auto composed =
        detail::mat_vec(op, (level % 2 == 0) ? kc0 : kp0);
    const auto& expect = t.country_levels[static_cast<std::size_t>(level)];
    for (std::size_t i = 0; i < nc; ++i)
      max_err = std::max(max_err, std::abs(composed[i] - expect[i]));
  }
  // Product side, symmetric.
  {
    std::vector<std::vector<double>> op = s_pc;
    bool next_is_cp = true;
    for (int n = 2; n <= level; ++n) {
      op = detail::mat_mul(op, next_is_cp ? s_cp : s_pc);
      next_is_cp = !next_is_cp;
    }
    const auto composed =
        detail::mat_vec(op, (level % 2 == 0) ? kp0 : kc0);
    const auto& expect = t.product_levels[static_cast<std::size_t>(level)];
    for (std::size_t j = 0; j < np; ++j)
      max_err = std::max(max_err, std::abs(composed[j] - expect[j]));
  }
  return max_err;
}

}  // namespace ecx
