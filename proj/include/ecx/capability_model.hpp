#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecx/core_matrix.hpp"
#include "ecx/error.hpp"
#include "ecx/reflections.hpp"
#include "ecx/rng.hpp"
#include "ecx/stats.hpp"

namespace ecx {

/// Bit-packed binary matrix, 64 columns per word.
class BitMatrix {
 public:
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64),
        bits_(rows * words_per_row_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t r, std::size_t c) const {
    return (bits_[r * words_per_row_ + c / 64] >> (c % 64)) & 1ULL;
  }
  void set(std::size_t r, std::size_t c, bool v) {
    auto& w = bits_[r * words_per_row_ + c / 64];
    const std::uint64_t mask = 1ULL << (c % 64);
    if (v) w |= mask; else w &= ~mask;
  }

  std::size_t row_count_ones(std::size_t r) const {
    std::size_t n = 0;
    for (std::size_t w = 0; w < words_per_row_; ++w)
      n += static_cast<std::size_t>(__builtin_popcountll(bits_[r * words_per_row_ + w]));
    return n;
  }

  /// True iff every set bit of row ra is also set in row rb of `other`.
  bool row_subset_of(std::size_t ra, const BitMatrix& other, std::size_t rb) const {
    for (std::size_t w = 0; w < words_per_row_; ++w) {
      const std::uint64_t need = bits_[ra * words_per_row_ + w];
      const std::uint64_t have = other.bits_[rb * other.words_per_row_ + w];
      if (need & ~have) return false;
    }
    return true;
  }

 private:
  std::size_t rows_, cols_, words_per_row_;
  std::vector<std::uint64_t> bits_;
};

struct CapabilityParams {
  std::size_t n_countries = 0;
  std::size_t n_products = 0;
  std::size_t n_capabilities = 0;
  double r = 0.0;  // P(country has a capability)
  double q = 0.0;  // P(product requires a capability)

  void validate() const {
    if (n_countries < 1 || n_products < 1 || n_capabilities < 1)
      throw InputError("CapabilityParams: dimensions must be >= 1");
    if (!(r >= 0.0 && r <= 1.0))
      throw InputError("CapabilityParams: r must be in [0,1]");
    if (!(q >= 0.0 && q <= 1.0))
      throw InputError("CapabilityParams: q must be in [0,1]");
  }
};

/// One sampled tripartite world: which capabilities each country has
/// (C_ca) and which capabilities each product requires (Pi_pa).
struct CapabilityWorld {
  CapabilityParams params;
  std::uint64_t seed = 0;
  BitMatrix country_capabilities;  // countries x capabilities
  BitMatrix product_requirements;  // products x capabilities
};

/// I.i.d. Bernoulli world; identical seed gives a bit-identical world.
/// Entries are drawn in a fixed row-major order, countries first.
inline CapabilityWorld sample_world(const CapabilityParams& params,
                                    std::uint64_t seed) {
  params.validate();
  CapabilityWorld w{params, seed,
                    BitMatrix(params.n_countries, params.n_capabilities),
                    BitMatrix(params.n_products, params.n_capabilities)};
  SplitMix64 rng(seed);
  for (std::size_t c = 0; c < params.n_countries; ++c)
    for (std::size_t a = 0; a < params.n_capabilities; ++a)
      w.country_capabilities.set(c, a, rng.next_bernoulli(params.r));
  for (std::size_t p = 0; p < params.n_products; ++p)
    for (std::size_t a = 0; a < params.n_capabilities; ++a)
      w.product_requirements.set(p, a, rng.next_bernoulli(params.q));
  return w;
}

/// M_cp = 1 iff country c has every capability product p requires
/// (a product requiring nothing is produced by everyone). Countries are
/// labeled c0..c{N-1}, products p0..p{M-1}.
inline BipartiteMatrix derive_matrix(const CapabilityWorld& w) {
  std::vector<std::string> countries(w.params.n_countries);
  std::vector<std::string> products(w.params.n_products);
  for (std::size_t c = 0; c < countries.size(); ++c)
    countries[c] = "c" + std::to_string(c);
  for (std::size_t p = 0; p < products.size(); ++p)
    products[p] = "p" + std::to_string(p);

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t c = 0; c < w.params.n_countries; ++c)
    for (std::size_t p = 0; p < w.params.n_products; ++p)
      if (w.product_requirements.row_subset_of(p, w.country_capabilities, c))
        edges.emplace_back(c, p);
  return BipartiteMatrix::from_edges(std::move(countries), std::move(products),
                                     std::move(edges));
}

struct EnsembleRecord {
  std::size_t replicate = 0;
  std::size_t country = 0;          // country index within its replicate
  std::size_t capability_count = 0; // sum_a C_ca
  double k_c0 = 0.0;
  double k_c1 = 0.0;
};

struct EnsembleStatistics {
  std::vector<EnsembleRecord> records;  // pooled over replicates
  std::optional<double> pearson_k0_k1;
  std::optional<double> spearman_caps_k0;
  std::optional<double> spearman_caps_k1;
  std::vector<std::size_t> degenerate_replicates;  // edgeless worlds
  std::size_t zero_product_countries = 0;          // excluded from records
};

/// Sample n_replicates independent worlds, derive each matrix, run the
/// reflections to depth 1 and pool (capability count, k_c0, k_c1) per
/// country. Replicate i draws from stream_seed(seed, i), so results do
/// not depend on evaluation order. Correlations are nullopt when pooled
/// variance is zero (e.g. r = 1 makes all countries identical).
inline EnsembleStatistics ensemble_statistics(const CapabilityParams& params,
                                              std::size_t n_replicates,
                                              std::uint64_t seed) {
  params.validate();
  if (n_replicates < 1)
    throw InputError("ensemble_statistics: n_replicates must be >= 1");

  EnsembleStatistics out;
  for (std::size_t rep = 0; rep < n_replicates; ++rep) {
    const CapabilityWorld w = sample_world(params, stream_seed(seed, rep));
    const BipartiteMatrix m = derive_matrix(w);
    if (m.n_edges() == 0) {
      out.degenerate_replicates.push_back(rep);
      continue;
    }
    const ReflectionTrajectory t = reflect(m, 1);
    out.zero_product_countries += t.excluded_countries.size();
    for (std::size_t i = 0; i < t.countries.size(); ++i) {
      const std::size_t c = *m.country_index(t.countries[i]);
      out.records.push_back({rep, c, w.country_capabilities.row_count_ones(c),
                             t.country_levels[0][i], t.country_levels[1][i]});
    }
  }

  if (out.records.size() >= 2) {
    std::vector<double> caps, k0, k1;
    caps.reserve(out.records.size());
    k0.reserve(out.records.size());
    k1.reserve(out.records.size());
    for (const auto& r : out.records) {
      caps.push_back(static_cast<double>(r.capability_count));
      k0.push_back(r.k_c0);
      k1.push_back(r.k_c1);
    }
    out.pearson_k0_k1 = pearson(k0, k1);
    out.spearman_caps_k0 = spearman(caps, k0);
    out.spearman_caps_k1 = spearman(caps, k1);
  }
  return out;
}

/// The default sweep grid: (r, q) cells around r=0.7, q=0.05 with
/// 150 countries x 1000 products x 60 capabilities. Chosen so that the
/// expected matrix density (1 - q(1-r))^{n_capabilities} stays in
/// roughly the 15-50% band for every cell.
struct SweepConfig {
  std::size_t n_countries = 150;
  std::size_t n_products = 1000;
  std::size_t n_capabilities = 60;
  std::vector<double> r_values = {0.65, 0.70, 0.75};
  std::vector<double> q_values = {0.05, 0.065, 0.08};
  std::size_t replicates = 20;
  std::uint64_t seed = 12345;

  void validate() const {
    if (r_values.empty() || q_values.empty())
      throw InputError("SweepConfig: r_values and q_values must be nonempty");
    if (replicates < 1) throw InputError("SweepConfig: replicates must be >= 1");
    for (double r : r_values)
      if (!(r >= 0.0 && r <= 1.0))
        throw InputError("SweepConfig: r value out of [0,1]");
    for (double q : q_values)
      if (!(q >= 0.0 && q <= 1.0))
        throw InputError("SweepConfig: q value out of [0,1]");
    CapabilityParams probe{n_countries, n_products, n_capabilities,
                           r_values.front(), q_values.front()};
    probe.validate();
  }
};

inline SweepConfig default_sweep_config() { return SweepConfig{}; }

}  // namespace ecx
