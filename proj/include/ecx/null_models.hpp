#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ecx/core_matrix.hpp"
#include "ecx/error.hpp"
#include "ecx/reflections.hpp"
#include "ecx/rng.hpp"
#include "ecx/stats.hpp"

namespace ecx {

/// Randomization levels, in increasing order of stringency: conserve
/// only the edge count, then one side's degree sequence, then the other,
/// then both (via double-edge swaps).
enum class NullModelLevel {
  density_only,
  preserve_country_degrees,
  preserve_product_degrees,
  preserve_both,
};

inline const char* to_string(NullModelLevel level) {
  switch (level) {
    case NullModelLevel::density_only: return "density_only";
    case NullModelLevel::preserve_country_degrees: return "preserve_country_degrees";
    case NullModelLevel::preserve_product_degrees: return "preserve_product_degrees";
    case NullModelLevel::preserve_both: return "preserve_both";
  }
  return "?";
}

struct NullModelSpec {
  NullModelLevel level = NullModelLevel::preserve_both;
  std::size_t n_samples = 1;
  std::uint64_t seed = 0;
  double swap_multiplier = 10.0;  // attempted swaps per edge (preserve_both)

  void validate() const {
    if (n_samples < 1) throw InputError("NullModelSpec: n_samples must be >= 1");
    if (!(swap_multiplier > 0.0))
      throw InputError("NullModelSpec: swap_multiplier must be > 0");
  }
};

struct NullEnsemble {
  std::vector<BipartiteMatrix> samples;
  /// preserve_both only: true when not a single swap was accepted for
  /// that sample (e.g. a complete matrix admits no legal swap), so the
  /// sample is a copy of the input.
  std::vector<bool> no_rewiring_possible;
};

namespace detail {

/// Floyd's algorithm: uniform k-subset of {0, ..., n-1}.
inline std::vector<std::size_t> sample_distinct(SplitMix64& rng, std::size_t n,
                                                std::size_t k) {
  if (k > n) throw InputError("sample_distinct: k exceeds population size");
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(k * 2);
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    const std::size_t t = static_cast<std::size_t>(rng.next_below(j + 1));
    if (chosen.insert(t).second) {
      out.push_back(t);
    } else {
      chosen.insert(j);
      out.push_back(j);
    }
  }
  return out;
}

inline BipartiteMatrix one_null_sample(const BipartiteMatrix& m,
                                       NullModelLevel level,
                                       double swap_multiplier,
                                       std::uint64_t sample_seed,
                                       bool& no_rewiring) {
  SplitMix64 rng(sample_seed);
  const std::size_t nc = m.n_countries();
  const std::size_t np = m.n_products();
  no_rewiring = false;

  switch (level) {
    case NullModelLevel::density_only: {
      std::vector<std::pair<std::size_t, std::size_t>> edges;
      for (std::size_t cell : sample_distinct(rng, nc * np, m.n_edges()))
        edges.emplace_back(cell / np, cell % np);
      return BipartiteMatrix::from_edges(m.countries(), m.products(),
                                         std::move(edges));
    }
    case NullModelLevel::preserve_country_degrees: {
      std::vector<std::pair<std::size_t, std::size_t>> edges;
      for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t p : sample_distinct(rng, np, m.country_degree(c)))
          edges.emplace_back(c, p);
      return BipartiteMatrix::from_edges(m.countries(), m.products(),
                                         std::move(edges));
    }
    case NullModelLevel::preserve_product_degrees: {
      std::vector<std::pair<std::size_t, std::size_t>> edges;
      for (std::size_t p = 0; p < np; ++p)
        for (std::size_t c : sample_distinct(rng, nc, m.product_degree(p)))
          edges.emplace_back(c, p);
      return BipartiteMatrix::from_edges(m.countries(), m.products(),
                                         std::move(edges));
    }
    case NullModelLevel::preserve_both: {
      // Double-edge swaps: (c1,p1),(c2,p2) -> (c1,p2),(c2,p1), rejected
      // when a replacement edge already exists. Conserves both degree
      // sequences exactly.
      auto edges = m.edges();
      std::unordered_set<std::uint64_t> present;
      present.reserve(edges.size() * 2);
      const auto key = [np](std::size_t c, std::size_t p) {
        return static_cast<std::uint64_t>(c) * np + p;
      };
      for (const auto& [c, p] : edges) present.insert(key(c, p));

      const std::size_t attempts = static_cast<std::size_t>(
          swap_multiplier * static_cast<double>(edges.size()));
      std::size_t accepted = 0;
      if (edges.size() >= 2) {
        for (std::size_t a = 0; a < attempts; ++a) {
          const std::size_t e1 = static_cast<std::size_t>(rng.next_below(edges.size()));
          const std::size_t e2 = static_cast<std::size_t>(rng.next_below(edges.size()));
          if (e1 == e2) continue;
          auto [c1, p1] = edges[e1];
          auto [c2, p2] = edges[e2];
          if (c1 == c2 || p1 == p2) continue;
          if (present.count(key(c1, p2)) || present.count(key(c2, p1))) continue;
          present.erase(key(c1, p1));
          present.erase(key(c2, p2));
          present.insert(key(c1, p2));
          present.insert(key(c2, p1));
          edges[e1] = {c1, p2};
          edges[e2] = {c2, p1};
          ++accepted;
        }
      }
      no_rewiring = (accepted == 0);
      return BipartiteMatrix::from_edges(m.countries(), m.products(),
                                         std::move(edges));
    }
  }
  throw InputError("randomize: unknown null model level");
}

}  // namespace detail

/// Generate spec.n_samples randomized matrices. Sample i is drawn from
/// stream_seed(spec.seed, i): the ensemble is deterministic for a given
/// (matrix, spec, seed) and independent of generation order. All four
/// levels conserve the edge count exactly.
inline NullEnsemble randomize(const BipartiteMatrix& m, const NullModelSpec& spec) {
  spec.validate();
  if (m.n_edges() == 0) throw InputError("randomize: matrix has no edges");
  NullEnsemble out;
  out.samples.reserve(spec.n_samples);
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    bool no_rewiring = false;
    out.samples.push_back(detail::one_null_sample(
        m, spec.level, spec.swap_multiplier, stream_seed(spec.seed, i), no_rewiring));
    out.no_rewiring_possible.push_back(no_rewiring);
  }
  return out;
}

struct NullComparison {
  double observed = 0.0;               // Pearson corr(k_c0, k_c1), observed matrix
  std::vector<double> null_statistics; // same statistic per usable sample
  double p_value = 0.0;                // fraction of null stats <= observed
  double null_mean = 0.0;
  double null_stdev = 0.0;             // population
  std::size_t degenerate_samples = 0;  // zero-variance samples, excluded
  std::size_t no_rewiring_samples = 0;
};

namespace detail {

inline std::optional<double> k0_k1_correlation(const BipartiteMatrix& m) {
  if (m.n_edges() == 0) return std::nullopt;
  const ReflectionTrajectory t = reflect(m, 1);
  if (t.countries.size() < 2) return std::nullopt;
  return pearson(t.country_levels[0], t.country_levels[1]);
}

}  // namespace detail

/// Observed corr(k_c0, k_c1) against its null distribution. One-sided
/// empirical p-value in the more-negative direction: the fraction of
/// null samples whose statistic is <= the observed one. Zero-variance
/// null samples are excluded from the distribution and counted.
inline NullComparison null_comparison(const BipartiteMatrix& m,
                                      const NullModelSpec& spec) {
  const auto observed = detail::k0_k1_correlation(m);
  if (!observed)
    throw ComputationError(
        "null_comparison: observed k0-k1 statistic is degenerate (zero variance)");

  const NullEnsemble ensemble = randomize(m, spec);
  NullComparison out;
  out.observed = *observed;
  for (std::size_t i = 0; i < ensemble.samples.size(); ++i) {
    if (ensemble.no_rewiring_possible[i]) ++out.no_rewiring_samples;
    const auto stat = detail::k0_k1_correlation(ensemble.samples[i]);
    if (stat)
      out.null_statistics.push_back(*stat);
    else
      ++out.degenerate_samples;
  }
  if (out.null_statistics.empty())
    throw ComputationError("null_comparison: every null sample was degenerate");

  std::size_t at_or_below = 0;
  for (double s : out.null_statistics)
    if (s <= out.observed) ++at_or_below;
  out.p_value = static_cast<double>(at_or_below) /
                static_cast<double>(out.null_statistics.size());
  out.null_mean = mean(out.null_statistics);
  out.null_stdev = population_stdev(out.null_statistics);
  return out;
}

}  // namespace ecx
