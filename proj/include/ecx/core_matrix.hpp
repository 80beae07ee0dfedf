#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ecx/error.hpp"

namespace ecx {

/// Raw export volumes x_cp for one year. Keys are (country, product)
/// code pairs; codes are opaque strings, no classification-specific
/// validation. Values are non-negative trade dollars.
class ExportTable {
 public:
  using Key = std::pair<std::string, std::string>;

  explicit ExportTable(int year = 0) : year_(year) {}

  void add(const std::string& country, const std::string& product, double value) {
    if (!(value >= 0.0) || !std::isfinite(value))
      throw InputError("ExportTable: value for (" + country + "," + product +
                       ") must be finite and non-negative");
    auto [it, inserted] = entries_.emplace(Key{country, product}, value);
    (void)it;
    if (!inserted)
      throw InputError("ExportTable: duplicate entry (" + country + "," +
                       product + ") in year " + std::to_string(year_));
  }

  int year() const { return year_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::map<Key, double>& entries() const { return entries_; }

  std::optional<double> value(const std::string& country,
                              const std::string& product) const {
    auto it = entries_.find(Key{country, product});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

 private:
  int year_;
  std::map<Key, double> entries_;  // ordered: deterministic iteration
};

/// Revealed comparative advantage per (country, product) cell, same key
/// structure as the export table it came from.
struct RcaTable {
  int year = 0;
  std::map<ExportTable::Key, double> values;
};

/// Binary country-product matrix M_cp with index maps. Countries and
/// products with zero degree are kept in the index; isolate_countries()
/// and isolate_products() flag them.
class BipartiteMatrix {
 public:
  BipartiteMatrix(std::vector<std::string> countries,
                  std::vector<std::string> products)
      : countries_(std::move(countries)), products_(std::move(products)) {
    if (countries_.empty() || products_.empty())
      throw InputError("BipartiteMatrix: empty country or product index");
    check_unique(countries_, "country");
    check_unique(products_, "product");
    for (std::size_t i = 0; i < countries_.size(); ++i) country_index_[countries_[i]] = i;
    for (std::size_t j = 0; j < products_.size(); ++j) product_index_[products_[j]] = j;
    by_country_.resize(countries_.size());
    by_product_.resize(products_.size());
  }

  /// Bulk constructor: sorts and validates the edge list once.
  static BipartiteMatrix from_edges(
      std::vector<std::string> countries, std::vector<std::string> products,
      std::vector<std::pair<std::size_t, std::size_t>> edges) {
    BipartiteMatrix m(std::move(countries), std::move(products));
    std::sort(edges.begin(), edges.end());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto [c, p] = edges[i];
      if (c >= m.n_countries() || p >= m.n_products())
        throw InputError("BipartiteMatrix: edge index out of bounds");
      if (i > 0 && edges[i] == edges[i - 1])
        throw InputError("BipartiteMatrix: duplicate edge (" +
                         m.countries_[c] + "," + m.products_[p] + ")");
      m.by_country_[c].push_back(p);
      m.by_product_[p].push_back(c);
    }
    for (auto& v : m.by_product_) std::sort(v.begin(), v.end());
    m.n_edges_ = edges.size();
    return m;
  }

  void add_edge(std::size_t country, std::size_t product) {
    if (country >= countries_.size() || product >= products_.size())
      throw InputError("BipartiteMatrix: edge index out of bounds");
    auto& row = by_country_[country];
    auto it = std::lower_bound(row.begin(), row.end(), product);
    if (it != row.end() && *it == product)
      throw InputError("BipartiteMatrix: duplicate edge (" +
                       countries_[country] + "," + products_[product] + ")");
    row.insert(it, product);
    auto& col = by_product_[product];
    col.insert(std::lower_bound(col.begin(), col.end(), country), country);
    ++n_edges_;
  }

  bool has_edge(std::size_t country, std::size_t product) const {
    const auto& row = by_country_[country];
    return std::binary_search(row.begin(), row.end(), product);
  }

  std::size_t n_countries() const { return countries_.size(); }
  std::size_t n_products() const { return products_.size(); }
  std::size_t n_edges() const { return n_edges_; }

  const std::vector<std::string>& countries() const { return countries_; }
  const std::vector<std::string>& products() const { return products_; }

  const std::vector<std::size_t>& products_of(std::size_t country) const {
    return by_country_[country];
  }
  const std::vector<std::size_t>& countries_of(std::size_t product) const {
    return by_product_[product];
  }

  std::size_t country_degree(std::size_t country) const {
    return by_country_[country].size();
  }
  std::size_t product_degree(std::size_t product) const {
    return by_product_[product].size();
  }

  std::optional<std::size_t> country_index(const std::string& id) const {
    auto it = country_index_.find(id);
    if (it == country_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> product_index(const std::string& id) const {
    auto it = product_index_.find(id);
    if (it == product_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Edges sorted by (country, product).
  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    e.reserve(n_edges_);
    for (std::size_t c = 0; c < by_country_.size(); ++c)
      for (std::size_t p : by_country_[c]) e.emplace_back(c, p);
    return e;
  }

  std::vector<std::size_t> isolate_countries() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < by_country_.size(); ++c)
      if (by_country_[c].empty()) out.push_back(c);
    return out;
  }
  std::vector<std::size_t> isolate_products() const {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < by_product_.size(); ++p)
      if (by_product_[p].empty()) out.push_back(p);
    return out;
  }

 private:
  static void check_unique(const std::vector<std::string>& ids, const char* what) {
    std::vector<std::string> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end())
      throw InputError(std::string("BipartiteMatrix: duplicate ") + what +
                       " id '" + *dup + "'");
  }

  std::vector<std::string> countries_;
  std::vector<std::string> products_;
  std::map<std::string, std::size_t> country_index_;
  std::map<std::string, std::size_t> product_index_;
  std::vector<std::vector<std::size_t>> by_country_;
  std::vector<std::vector<std::size_t>> by_product_;
  std::size_t n_edges_ = 0;
};

/// RCA_cp = (x_cp / sum_p x_cp) / (sum_c x_cp / sum_cp x_cp).
/// Cells with x_cp = 0 get RCA = 0, as do all cells of a country with
/// zero total exports (kept, not an error).
inline RcaTable compute_rca(const ExportTable& table) {
  if (table.empty()) throw InputError("compute_rca: no data");

  std::map<std::string, double> country_total;
  std::map<std::string, double> product_total;
  double world_total = 0.0;
  for (const auto& [key, value] : table.entries()) {
    country_total[key.first] += value;
    product_total[key.second] += value;
    world_total += value;
  }
  if (!(world_total > 0.0))
    throw InputError("compute_rca: world total is zero");

  RcaTable rca;
  rca.year = table.year();
  for (const auto& [key, value] : table.entries()) {
    double r = 0.0;
    if (value > 0.0) {
      const double country_share = value / country_total[key.first];
      const double world_share = product_total[key.second] / world_total;
      r = country_share / world_share;  // world_share > 0 since value > 0
    }
    rca.values.emplace(key, r);
  }
  return rca;
}

/// Edge present iff RCA >= threshold (ties count as edges). The index
/// keeps every country and product that appears in the table, including
/// those that end up with zero degree.
inline BipartiteMatrix threshold_to_binary(const RcaTable& rca, double threshold) {
  if (!(threshold > 0.0))
    throw InputError("threshold_to_binary: threshold must be > 0");
  if (rca.values.empty()) throw InputError("threshold_to_binary: no data");

  std::map<std::string, std::size_t> cidx, pidx;
  std::vector<std::string> countries, products;
  for (const auto& [key, value] : rca.values) {
    (void)value;
    if (cidx.emplace(key.first, countries.size()).second)
      countries.push_back(key.first);
    if (pidx.emplace(key.second, products.size()).second)
      products.push_back(key.second);
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& [key, value] : rca.values)
    if (value >= threshold)
      edges.emplace_back(cidx[key.first], pidx[key.second]);
  return BipartiteMatrix::from_edges(std::move(countries), std::move(products),
                                     std::move(edges));
}

/// k_c0: row sums of M (number of products each country exports).
inline std::vector<std::size_t> diversification(const BipartiteMatrix& m) {
  std::vector<std::size_t> k(m.n_countries());
  for (std::size_t c = 0; c < m.n_countries(); ++c) k[c] = m.country_degree(c);
  return k;
}

/// k_p0: column sums of M (number of countries exporting each product).
inline std::vector<std::size_t> ubiquity(const BipartiteMatrix& m) {
  std::vector<std::size_t> k(m.n_products());
  for (std::size_t p = 0; p < m.n_products(); ++p) k[p] = m.product_degree(p);
  return k;
}

}  // namespace ecx
