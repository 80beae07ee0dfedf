#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ecx/core_matrix.hpp"
#include "ecx/error.hpp"
#include "ecx/ols.hpp"
#include "ecx/reflections.hpp"
#include "ecx/stats.hpp"

namespace ecx {

/// One external per-country series (GDP per capita PPP, population, ...).
struct CountrySeries {
  std::map<std::string, double> values;
  std::string label;
  int year = 0;
};

/// Product -> attribute-id set (e.g. employment categories per product).
struct ProductAttributeMap {
  std::map<std::string, std::set<std::string>> attributes;
};

// ---------------------------------------------------------------------------
// Labor-input diversity

struct LaborDiversityResult {
  std::vector<std::string> countries;   // included
  std::vector<double> average_inputs;   // mean |attributes(p)| over exports
  std::vector<std::string> excluded_countries;  // no mapped exported product
  double product_coverage = 0.0;  // mapped fraction of the matrix product set
  std::vector<LevelCorrelation> correlations;  // vs k_{c,0..depth}
};

/// Per-country mean attribute-set size over its exported, mapped
/// products, and its Pearson correlation with every reflection level
/// up to `depth`. Countries exporting no mapped product are excluded
/// and listed.
inline LaborDiversityResult labor_diversity(const BipartiteMatrix& m,
                                            const ProductAttributeMap& attrs,
                                            int depth = 2) {
  const ReflectionTrajectory t = reflect(m, depth);

  std::size_t mapped_products = 0;
  for (const auto& pid : m.products())
    if (attrs.attributes.count(pid)) ++mapped_products;

  LaborDiversityResult out;
  out.product_coverage =
      static_cast<double>(mapped_products) / static_cast<double>(m.n_products());

  std::vector<std::size_t> positions;  // into trajectory country vectors
  for (std::size_t i = 0; i < t.countries.size(); ++i) {
    const std::size_t c = *m.country_index(t.countries[i]);
    double sum = 0.0;
    std::size_t n_mapped = 0;
    for (std::size_t p : m.products_of(c)) {
      auto it = attrs.attributes.find(m.products()[p]);
      if (it == attrs.attributes.end()) continue;
      sum += static_cast<double>(it->second.size());
      ++n_mapped;
    }
    if (n_mapped == 0) {
      out.excluded_countries.push_back(t.countries[i]);
      continue;
    }
    out.countries.push_back(t.countries[i]);
    out.average_inputs.push_back(sum / static_cast<double>(n_mapped));
    positions.push_back(i);
  }
  if (out.countries.size() < 1)
    throw InputError("labor_diversity: no country exports a mapped product");

  for (int level = 0; level <= depth; ++level) {
    const auto& kv = t.country_levels[static_cast<std::size_t>(level)];
    std::vector<double> k(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) k[i] = kv[positions[i]];
    std::optional<double> r;
    if (k.size() >= 2) r = pearson(k, out.average_inputs);
    out.correlations.push_back({level, r});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Growth regression

struct RegressionResult {
  std::vector<std::string> coefficient_names;
  std::vector<double> coefficients;   // [intercept, gdp_t, k_N, k_N+1, ...]
  std::vector<double> standard_errors;
  double r_squared = 0.0;
  std::size_t n_observations = 0;
  std::map<std::string, double> predictions;  // country -> fitted growth
  std::map<std::string, double> observed;     // country -> log(GDP_t+dt / GDP_t)
  std::vector<std::string> dropped_countries; // outside the data intersection

  double intercept() const { return coefficients[0]; }
  double b_gdp() const { return coefficients[1]; }
  double b_k_level() const { return coefficients[2]; }
  double b_k_level_plus_1() const { return coefficients[3]; }
};

struct RegressionOptions {
  /// Regress on log GDP(t) instead of the GDP(t) level.
  bool log_gdp_regressor = false;
};

/// OLS of log(GDP(t+dt)/GDP(t)) on an intercept, GDP(t), k_{c,N}(t) and
/// k_{c,N+1}(t), computed on the intersection of both GDP series and the
/// trajectory. Countries present in the trajectory but dropped from the
/// regression are listed.
inline RegressionResult growth_regression(const CountrySeries& gdp_t,
                                          const CountrySeries& gdp_t_plus,
                                          const ReflectionTrajectory& trajectory,
                                          int level,
                                          RegressionOptions options = {}) {
  if (level < 0) throw InputError("growth_regression: level must be >= 0");
  if (level + 1 > trajectory.depth)
    throw InputError("growth_regression: trajectory depth " +
                     std::to_string(trajectory.depth) +
                     " too shallow for level " + std::to_string(level) +
                     " (needs level+1)");

  std::vector<std::string> countries;
  std::vector<double> y, g0, kn, kn1;
  RegressionResult out;
  for (std::size_t i = 0; i < trajectory.countries.size(); ++i) {
    const std::string& id = trajectory.countries[i];
    auto it0 = gdp_t.values.find(id);
    auto it1 = gdp_t_plus.values.find(id);
    if (it0 == gdp_t.values.end() || it1 == gdp_t_plus.values.end()) {
      out.dropped_countries.push_back(id);
      continue;
    }
    if (!(it0->second > 0.0) || !(it1->second > 0.0))
      throw InputError("growth_regression: non-positive GDP for '" + id + "'");
    countries.push_back(id);
    y.push_back(std::log(it1->second / it0->second));
    g0.push_back(options.log_gdp_regressor ? std::log(it0->second) : it0->second);
    kn.push_back(trajectory.country_levels[static_cast<std::size_t>(level)][i]);
    kn1.push_back(trajectory.country_levels[static_cast<std::size_t>(level + 1)][i]);
  }
  if (countries.size() < 8)
    throw InputError("growth_regression: insufficient overlap (" +
                     std::to_string(countries.size()) + " countries, need 8)");

  const std::vector<std::string> names = {
      "intercept", options.log_gdp_regressor ? "log_gdp_t" : "gdp_t",
      "k_" + std::to_string(level), "k_" + std::to_string(level + 1)};
  const std::vector<std::vector<double>> columns = {
      std::vector<double>(countries.size(), 1.0), g0, kn, kn1};
  const OlsFit fit = ols_fit(columns, y, names);

  out.coefficient_names = fit.names;
  out.coefficients = fit.coefficients;
  out.standard_errors = fit.standard_errors;
  out.r_squared = fit.r_squared;
  out.n_observations = fit.n_observations;
  for (std::size_t i = 0; i < countries.size(); ++i) {
    out.predictions[countries[i]] = fit.fitted[i];
    out.observed[countries[i]] = y[i];
  }
  return out;
}

/// One period of a pooled regression: both GDP snapshots plus the
/// trajectory measured at the start of the period.
struct RegressionPeriod {
  CountrySeries gdp_t;
  CountrySeries gdp_t_plus;
  const ReflectionTrajectory* trajectory = nullptr;
};

/// Pooled multi-period variant of growth_regression with optional
/// country dummies (first country in the pooled sample is the baseline).
/// Standard errors are plain OLS; no panel corrections.
inline RegressionResult growth_regression_pooled(
    const std::vector<RegressionPeriod>& periods, int level,
    bool country_dummies, RegressionOptions options = {}) {
  if (periods.empty()) throw InputError("growth_regression_pooled: no periods");

  std::vector<std::string> obs_country;
  std::vector<double> y, g0, kn, kn1;
  RegressionResult out;
  for (const auto& period : periods) {
    if (period.trajectory == nullptr)
      throw InputError("growth_regression_pooled: missing trajectory");
    const ReflectionTrajectory& t = *period.trajectory;
    if (level + 1 > t.depth)
      throw InputError("growth_regression_pooled: trajectory too shallow");
    for (std::size_t i = 0; i < t.countries.size(); ++i) {
      const std::string& id = t.countries[i];
      auto it0 = period.gdp_t.values.find(id);
      auto it1 = period.gdp_t_plus.values.find(id);
      if (it0 == period.gdp_t.values.end() || it1 == period.gdp_t_plus.values.end()) {
        out.dropped_countries.push_back(id);
        continue;
      }
      if (!(it0->second > 0.0) || !(it1->second > 0.0))
        throw InputError("growth_regression_pooled: non-positive GDP for '" + id + "'");
      obs_country.push_back(id);
      y.push_back(std::log(it1->second / it0->second));
      g0.push_back(options.log_gdp_regressor ? std::log(it0->second) : it0->second);
      kn.push_back(t.country_levels[static_cast<std::size_t>(level)][i]);
      kn1.push_back(t.country_levels[static_cast<std::size_t>(level + 1)][i]);
    }
  }
  if (obs_country.size() < 8)
    throw InputError("growth_regression_pooled: insufficient overlap");

  std::vector<std::string> names = {
      "intercept", options.log_gdp_regressor ? "log_gdp_t" : "gdp_t",
      "k_" + std::to_string(level), "k_" + std::to_string(level + 1)};
  std::vector<std::vector<double>> columns = {
      std::vector<double>(obs_country.size(), 1.0), g0, kn, kn1};

  if (country_dummies) {
    std::set<std::string> uniq(obs_country.begin(), obs_country.end());
    bool first = true;
    for (const auto& id : uniq) {
      if (first) { first = false; continue; }  // baseline country
      std::vector<double> dummy(obs_country.size(), 0.0);
      for (std::size_t k = 0; k < obs_country.size(); ++k)
        if (obs_country[k] == id) dummy[k] = 1.0;
      columns.push_back(std::move(dummy));
      names.push_back("dummy_" + id);
    }
  }
  const OlsFit fit = ols_fit(columns, y, names);
  out.coefficient_names = fit.names;
  out.coefficients = fit.coefficients;
  out.standard_errors = fit.standard_errors;
  out.r_squared = fit.r_squared;
  out.n_observations = fit.n_observations;
  // Pooled observations are not unique per country; keep the last fitted
  // value per id for the scatter output.
  for (std::size_t i = 0; i < obs_country.size(); ++i) {
    out.predictions[obs_country[i]] = fit.fitted[i];
    out.observed[obs_country[i]] = y[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Concentration baselines

struct BaselineIndices {
  std::vector<std::string> countries;
  std::vector<double> hhi;      // sum of squared within-country shares
  std::vector<double> entropy;  // -sum s ln s, 0 ln 0 = 0
  std::vector<std::string> excluded_countries;  // zero total exports
};

/// Herfindahl index and Shannon entropy of each country's export shares.
inline BaselineIndices baseline_indices(const ExportTable& table) {
  if (table.empty()) throw InputError("baseline_indices: no data");
  std::map<std::string, double> totals;
  for (const auto& [key, value] : table.entries()) totals[key.first] += value;

  std::map<std::string, std::pair<double, double>> acc;  // country -> (hhi, entropy)
  for (const auto& [key, value] : table.entries()) {
    const double total = totals[key.first];
    if (!(total > 0.0)) continue;
    const double s = value / total;
    if (s > 0.0) {
      acc[key.first].first += s * s;
      acc[key.first].second -= s * std::log(s);
    }
  }
  BaselineIndices out;
  for (const auto& [country, total] : totals) {
    if (!(total > 0.0)) {
      out.excluded_countries.push_back(country);
      continue;
    }
    out.countries.push_back(country);
    out.hhi.push_back(acc[country].first);
    out.entropy.push_back(acc[country].second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Path-dependent new exports

struct NewExportsOptions {
  double low_threshold = 0.1;   // RCA below this at t0
  double high_threshold = 1.0;  // RCA at or above this at t1
  double matrix_threshold = 1.0;  // builds the t0 matrix for k measures
  /// Recompute each country's product averages on a t0 matrix with that
  /// country's row removed.
  bool leave_one_out = false;
};

struct CountryNewExports {
  std::string country;
  std::vector<std::string> new_products;
  double k_c0 = 0.0;   // country's t0 diversification
  double k_c1 = 0.0;   // NaN when the country has no t0 edges
  bool in_t0_matrix = false;
  double mean_kp0 = 0.0;  // mean t0 ubiquity of the new products
  double mean_kp1 = 0.0;  // NaN when no new product had nonzero t0 degree
  std::size_t n_kp1_products = 0;  // products contributing to mean_kp1
};

struct NewExportsResult {
  std::vector<CountryNewExports> rows;  // countries with >= 1 new export
  std::vector<std::string> countries_without_new_exports;
};

namespace detail {

inline double rca_or_zero(const RcaTable& rca, const std::string& c,
                          const std::string& p) {
  auto it = rca.values.find({c, p});
  return it == rca.values.end() ? 0.0 : it->second;
}

}  // namespace detail

/// A country's new exports between two snapshots: products with
/// RCA < low_threshold at t0 (absent counts as 0) and RCA >=
/// high_threshold at t1. For each such country the mean t0 ubiquity
/// <k_p0> and mean t0 exporter diversification <k_p1> of the new
/// products are paired with the country's own t0 (k_c0, k_c1).
inline NewExportsResult new_exports(const ExportTable& t0, const ExportTable& t1,
                                    NewExportsOptions options = {}) {
  if (t0.empty() || t1.empty()) throw InputError("new_exports: empty table");
  if (!(options.low_threshold < options.high_threshold))
    throw InputError("new_exports: low_threshold must be < high_threshold");

  const RcaTable rca0 = compute_rca(t0);
  const RcaTable rca1 = compute_rca(t1);
  const BipartiteMatrix m0 = threshold_to_binary(rca0, options.matrix_threshold);
  const ReflectionTrajectory traj0 = reflect(m0, 1);

  std::map<std::string, std::size_t> cpos, ppos;  // positions in traj0
  for (std::size_t i = 0; i < traj0.countries.size(); ++i) cpos[traj0.countries[i]] = i;
  for (std::size_t j = 0; j < traj0.products.size(); ++j) ppos[traj0.products[j]] = j;

  // Candidate products per country, from the t1 side.
  std::map<std::string, std::vector<std::string>> new_by_country;
  std::set<std::string> t1_countries;
  for (const auto& [key, r1] : rca1.values) {
    t1_countries.insert(key.first);
    if (r1 < options.high_threshold) continue;
    if (detail::rca_or_zero(rca0, key.first, key.second) < options.low_threshold)
      new_by_country[key.first].push_back(key.second);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  NewExportsResult out;
  for (const auto& country : t1_countries)
    if (!new_by_country.count(country))
      out.countries_without_new_exports.push_back(country);

  for (const auto& [country, products] : new_by_country) {
    CountryNewExports row;
    row.country = country;
    row.new_products = products;

    const ReflectionTrajectory* traj = &traj0;
    ReflectionTrajectory loo_traj;
    if (options.leave_one_out) {
      // Rebuild the t0 matrix without this country's row.
      const auto ci = m0.country_index(country);
      std::vector<std::string> rest;
      for (const auto& id : m0.countries())
        if (id != country) rest.push_back(id);
      std::vector<std::pair<std::size_t, std::size_t>> edges;
      std::map<std::string, std::size_t> rest_idx;
      for (std::size_t i = 0; i < rest.size(); ++i) rest_idx[rest[i]] = i;
      for (const auto& [c, p] : m0.edges())
        if (!ci || c != *ci) edges.emplace_back(rest_idx[m0.countries()[c]], p);
      if (!rest.empty() && !edges.empty()) {
        loo_traj = reflect(BipartiteMatrix::from_edges(rest, m0.products(),
                                                       std::move(edges)), 1);
        traj = &loo_traj;
      }
    }

    std::map<std::string, std::size_t> loo_ppos;
    if (traj != &traj0)
      for (std::size_t j = 0; j < traj->products.size(); ++j)
        loo_ppos[traj->products[j]] = j;
    const auto& product_pos = (traj == &traj0) ? ppos : loo_ppos;

    double sum_kp0 = 0.0, sum_kp1 = 0.0;
    std::size_t n_kp1 = 0;
    for (const auto& pid : products) {
      auto it = product_pos.find(pid);
      if (it == product_pos.end()) continue;  // zero t0 ubiquity: adds 0
      sum_kp0 += traj->product_levels[0][it->second];
      sum_kp1 += traj->product_levels[1][it->second];
      ++n_kp1;
    }
    row.mean_kp0 = sum_kp0 / static_cast<double>(products.size());
    row.mean_kp1 = n_kp1 > 0 ? sum_kp1 / static_cast<double>(n_kp1) : nan;
    row.n_kp1_products = n_kp1;

    auto itc = cpos.find(country);
    if (itc != cpos.end()) {
      row.in_t0_matrix = true;
      row.k_c0 = traj0.country_levels[0][itc->second];
      row.k_c1 = traj0.country_levels[1][itc->second];
    } else {
      row.k_c0 = 0.0;
      row.k_c1 = nan;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace ecx
