// ecx: build country-product matrices from trade data and run the
// complexity pipeline on them. Every stage is a subcommand that reads
// files and writes files, so stages can be mixed (e.g. a simulated
// matrix can be fed to the null-model stage). Outputs carry a metadata
// header and are byte-identical across reruns with identical inputs.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ecx/artifacts.hpp"
#include "ecx/capability_model.hpp"
#include "ecx/core_matrix.hpp"
#include "ecx/csv.hpp"
#include "ecx/empirics.hpp"
#include "ecx/null_models.hpp"
#include "ecx/reflections.hpp"
#include "ecx/version.hpp"

namespace fs = std::filesystem;
using ecx::csv::format_double;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitComputationError = 3;
constexpr int kExitInternalError = 4;

struct GlobalOptions {
  std::string out_dir;
  std::string format = "json";  // summary files: json or csv
  bool verbose = false;
};

void info(const GlobalOptions& g, const std::string& msg) {
  if (g.verbose) std::cerr << "ecx: " << msg << "\n";
}

fs::path out_path(const GlobalOptions& g, const std::string& name) {
  fs::path dir(g.out_dir);
  fs::create_directories(dir);
  return dir / name;
}

fs::path matrix_csv_path(std::string path) {
  fs::path p(path);
  if (p.extension() == ".json") p.replace_extension(".csv");
  return p;
}

// Input paths are checked up front, before any computation runs.
void require_readable(const std::vector<fs::path>& paths) {
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) throw ecx::InputError("cannot open file: " + p.string());
  }
}

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
  std::string trade_csv;
  double threshold = 1.0;
};

int run_ingest(const GlobalOptions& g, const IngestArgs& args) {
  require_readable({args.trade_csv});
  const auto by_year = ecx::csv::read_trade_csv(args.trade_csv);
  for (const auto& [year, table] : by_year) {
    const ecx::RcaTable rca = ecx::compute_rca(table);
    const ecx::BipartiteMatrix m = ecx::threshold_to_binary(rca, args.threshold);

    ecx::RunMetadata meta;
    meta.command = "ingest";
    meta.add_param("threshold", format_double(args.threshold));
    meta.add_param("year", std::to_string(year));
    meta.add_input(args.trade_csv);

    const std::string base = "matrix_" + std::to_string(year);
    ecx::write_matrix_artifact(out_path(g, base + ".csv"), m, args.threshold,
                               year, meta);
    std::cout << base << ": " << m.n_countries() << " countries x "
              << m.n_products() << " products, " << m.n_edges() << " edges, "
              << m.isolate_countries().size() << "+"
              << m.isolate_products().size() << " isolates\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// reflect

struct ReflectArgs {
  std::string matrix;
  int depth = 19;
  std::string gdp_csv;
  bool gdp_raw = false;  // correlate against raw GDP instead of log(GDP)
};

int run_reflect(const GlobalOptions& g, const ReflectArgs& args) {
  const fs::path mpath = matrix_csv_path(args.matrix);
  std::vector<fs::path> inputs = {mpath};
  if (!args.gdp_csv.empty()) inputs.push_back(args.gdp_csv);
  require_readable(inputs);
  const ecx::BipartiteMatrix m = ecx::read_matrix_artifact(mpath);
  const ecx::ReflectionTrajectory t = ecx::reflect(m, args.depth);

  ecx::RunMetadata meta;
  meta.command = "reflect";
  meta.add_param("depth", std::to_string(args.depth));
  meta.add_param("gdp_log", args.gdp_raw ? "false" : "true");
  meta.add_input(mpath);
  if (!args.gdp_csv.empty()) meta.add_input(args.gdp_csv);

  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + v[i];
    return s;
  };

  {
    ecx::CsvWriter w(out_path(g, "trajectory.csv"), meta,
                     {"side", "id", "level", "value"},
                     {"excluded_countries: " + join(t.excluded_countries),
                      "excluded_products: " + join(t.excluded_products)});
    for (std::size_t i = 0; i < t.countries.size(); ++i)
      for (int n = 0; n <= t.depth; ++n)
        w.write_row({"country", t.countries[i], std::to_string(n),
                     format_double(t.country_levels[n][i])});
    for (std::size_t j = 0; j < t.products.size(); ++j)
      for (int n = 0; n <= t.depth; ++n)
        w.write_row({"product", t.products[j], std::to_string(n),
                     format_double(t.product_levels[n][j])});
  }

  {
    std::vector<int> usable;
    std::string degenerate;
    for (int n = 0; n <= t.depth; ++n) {
      if (ecx::population_stdev(t.country_levels[n]) > 0.0)
        usable.push_back(n);
      else
        degenerate += (degenerate.empty() ? "" : ";") + std::to_string(n);
    }
    ecx::CsvWriter w(out_path(g, "normalized.csv"), meta,
                     {"id", "level", "zvalue"},
                     {"degenerate_levels: " + degenerate});
    for (int n : usable) {
      const ecx::NormalizedScores z = ecx::normalize(t, n);
      for (std::size_t i = 0; i < t.countries.size(); ++i)
        w.write_row({t.countries[i], std::to_string(n),
                     format_double(z.values[i])});
    }
  }

  {
    ecx::CsvWriter w(out_path(g, "ranks.csv"), meta, {"id", "level", "rank"});
    for (int n = 0; n <= t.depth; ++n) {
      const auto ranks = ecx::average_ranks(t.country_levels[n]);
      for (std::size_t i = 0; i < t.countries.size(); ++i)
        w.write_row({t.countries[i], std::to_string(n), format_double(ranks[i])});
    }
  }

  {
    ecx::CsvWriter w(out_path(g, "rankshift.csv"), meta,
                     {"level_a", "level_b", "spearman", "n"});
    if (t.countries.size() >= 2) {
      for (int n = 0; n + 2 <= t.depth; ++n) {
        const ecx::RankShift rs = ecx::rank_shift(t, n, n + 2);
        w.write_row({std::to_string(n), std::to_string(n + 2),
                     rs.spearman ? format_double(*rs.spearman) : "nan",
                     std::to_string(rs.entries.size())});
      }
    }
  }

  if (!args.gdp_csv.empty()) {
    const ecx::CountrySeries gdp = ecx::csv::read_series_csv(args.gdp_csv, "gdp");
    std::size_t overlap = 0;
    for (const auto& id : t.countries) overlap += gdp.values.count(id);
    if (overlap < 3) {
      std::cerr << "ecx: warning: correlation step skipped: only " << overlap
                << " of " << t.countries.size()
                << " matrix countries appear in " << args.gdp_csv << "\n";
    } else {
      std::vector<int> levels;
      for (int n = 0; n <= t.depth; ++n) levels.push_back(n);
      const ecx::ExternalCorrelation corr =
          ecx::correlate_external(t, gdp.values, levels, !args.gdp_raw);
      ecx::CsvWriter w(out_path(g, "correlations.csv"), meta,
                       {"level", "pearson_r", "abs_r", "n"});
      for (const auto& lc : corr.levels)
        w.write_row({std::to_string(lc.level),
                     lc.r ? format_double(*lc.r) : "nan",
                     lc.r ? format_double(std::abs(*lc.r)) : "nan",
                     std::to_string(corr.n_intersection)});
    }
  }
  info(g, "reflect: " + std::to_string(t.countries.size()) + " countries, depth " +
              std::to_string(t.depth));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool print_config = false;
};

ecx::SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ecx::InputError("cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ecx::InputError(path + ": bad JSON: " + std::string(e.what()));
  }
  ecx::SweepConfig cfg;
  try {
    if (j.contains("n_countries")) cfg.n_countries = j["n_countries"].get<std::size_t>();
    if (j.contains("n_products")) cfg.n_products = j["n_products"].get<std::size_t>();
    if (j.contains("n_capabilities"))
      cfg.n_capabilities = j["n_capabilities"].get<std::size_t>();
    if (j.contains("r_values")) cfg.r_values = j["r_values"].get<std::vector<double>>();
    if (j.contains("q_values")) cfg.q_values = j["q_values"].get<std::vector<double>>();
    if (j.contains("replicates")) cfg.replicates = j["replicates"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ecx::InputError(path + ": bad config value: " + std::string(e.what()));
  }
  return cfg;
}

nlohmann::ordered_json sweep_config_json(const ecx::SweepConfig& cfg) {
  nlohmann::ordered_json j;
  j["n_countries"] = cfg.n_countries;
  j["n_products"] = cfg.n_products;
  j["n_capabilities"] = cfg.n_capabilities;
  j["r_values"] = cfg.r_values;
  j["q_values"] = cfg.q_values;
  j["replicates"] = cfg.replicates;
  j["seed"] = cfg.seed;
  return j;
}

int run_simulate(const GlobalOptions& g, const SimulateArgs& args) {
  if (!args.config.empty()) require_readable({args.config});
  ecx::SweepConfig cfg =
      args.config.empty() ? ecx::default_sweep_config() : load_sweep_config(args.config);
  if (args.seed) cfg.seed = *args.seed;
  cfg.validate();  // fail before any sampling

  if (args.print_config) {
    std::cout << sweep_config_json(cfg).dump(2) << "\n";
    return kExitOk;
  }

  ecx::RunMetadata summary_meta;
  summary_meta.command = "simulate";
  summary_meta.add_param("config", args.config.empty() ? "builtin-default" : args.config);
  summary_meta.add_param("replicates", std::to_string(cfg.replicates));
  summary_meta.seed = std::to_string(cfg.seed);
  if (!args.config.empty()) summary_meta.add_input(args.config);

  ecx::CsvWriter summary(out_path(g, "summary.csv"), summary_meta,
                         {"r", "q", "pearson_k0_k1", "spearman_caps_k0",
                          "spearman_caps_k1", "n_records",
                          "degenerate_replicates", "zero_product_countries"});

  std::size_t cell_index = 0;
  for (double r : cfg.r_values) {
    for (double q : cfg.q_values) {
      const ecx::CapabilityParams params{cfg.n_countries, cfg.n_products,
                                         cfg.n_capabilities, r, q};
      // Each (r, q) cell draws from its own substream of the master seed.
      const std::uint64_t cell_seed = ecx::stream_seed(cfg.seed, cell_index++);
      const ecx::EnsembleStatistics stats =
          ecx::ensemble_statistics(params, cfg.replicates, cell_seed);

      ecx::RunMetadata meta = summary_meta;
      meta.params.clear();
      meta.add_param("r", format_double(r));
      meta.add_param("q", format_double(q));
      meta.add_param("n_countries", std::to_string(cfg.n_countries));
      meta.add_param("n_products", std::to_string(cfg.n_products));
      meta.add_param("n_capabilities", std::to_string(cfg.n_capabilities));
      meta.add_param("replicates", std::to_string(cfg.replicates));
      meta.seed = std::to_string(cell_seed);

      const std::string name =
          "ensemble_r" + format_double(r) + "_q" + format_double(q) + ".csv";
      ecx::CsvWriter w(out_path(g, name), meta,
                       {"replicate", "country", "capability_count", "k_c0", "k_c1"});
      for (const auto& rec : stats.records)
        w.write_row({std::to_string(rec.replicate),
                     "c" + std::to_string(rec.country),
                     std::to_string(rec.capability_count),
                     format_double(rec.k_c0), format_double(rec.k_c1)});

      summary.write_row(
          {format_double(r), format_double(q),
           stats.pearson_k0_k1 ? format_double(*stats.pearson_k0_k1) : "nan",
           stats.spearman_caps_k0 ? format_double(*stats.spearman_caps_k0) : "nan",
           stats.spearman_caps_k1 ? format_double(*stats.spearman_caps_k1) : "nan",
           std::to_string(stats.records.size()),
           std::to_string(stats.degenerate_replicates.size()),
           std::to_string(stats.zero_product_countries)});
      info(g, "simulate: cell r=" + format_double(r) + " q=" + format_double(q) +
                  " done (" + std::to_string(stats.records.size()) + " records)");
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// null

struct NullArgs {
  std::string matrix;
  std::string level = "preserve_both";
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  double swap_multiplier = 10.0;
};

ecx::NullModelLevel parse_null_level(const std::string& s) {
  if (s == "0" || s == "density" || s == "density_only")
    return ecx::NullModelLevel::density_only;
  if (s == "1" || s == "country" || s == "preserve_country_degrees")
    return ecx::NullModelLevel::preserve_country_degrees;
  if (s == "2" || s == "product" || s == "preserve_product_degrees")
    return ecx::NullModelLevel::preserve_product_degrees;
  if (s == "3" || s == "both" || s == "preserve_both")
    return ecx::NullModelLevel::preserve_both;
  throw ecx::InputError(
      "unknown null model level '" + s +
      "' (use density_only, preserve_country_degrees, preserve_product_degrees "
      "or preserve_both)");
}

int run_null(const GlobalOptions& g, const NullArgs& args) {
  const fs::path mpath = matrix_csv_path(args.matrix);
  require_readable({mpath});
  const ecx::BipartiteMatrix m = ecx::read_matrix_artifact(mpath);
  ecx::NullModelSpec spec;
  spec.level = parse_null_level(args.level);
  spec.n_samples = args.samples;
  spec.seed = args.seed;
  spec.swap_multiplier = args.swap_multiplier;

  const ecx::NullComparison cmp = ecx::null_comparison(m, spec);

  ecx::RunMetadata meta;
  meta.command = "null";
  meta.add_param("level", ecx::to_string(spec.level));
  meta.add_param("samples", std::to_string(spec.n_samples));
  meta.add_param("swap_multiplier", format_double(spec.swap_multiplier));
  meta.seed = std::to_string(spec.seed);
  meta.add_input(mpath);

  {
    ecx::CsvWriter w(out_path(g, "nulldist.csv"), meta, {"sample", "statistic"});
    for (std::size_t i = 0; i < cmp.null_statistics.size(); ++i)
      w.write_row({std::to_string(i), format_double(cmp.null_statistics[i])});
  }

  if (g.format == "csv") {
    ecx::CsvWriter w(out_path(g, "nullsummary.csv"), meta, {"key", "value"});
    w.write_row({"observed", format_double(cmp.observed)});
    w.write_row({"null_mean", format_double(cmp.null_mean)});
    w.write_row({"null_stdev", format_double(cmp.null_stdev)});
    w.write_row({"p_value", format_double(cmp.p_value)});
    w.write_row({"n_null", std::to_string(cmp.null_statistics.size())});
    w.write_row({"degenerate_samples", std::to_string(cmp.degenerate_samples)});
    w.write_row({"no_rewiring_samples", std::to_string(cmp.no_rewiring_samples)});
  } else {
    nlohmann::ordered_json j;
    j["meta"] = meta.json_block();
    j["observed"] = cmp.observed;
    j["null_mean"] = cmp.null_mean;
    j["null_stdev"] = cmp.null_stdev;
    j["p_value"] = cmp.p_value;
    j["n_null"] = cmp.null_statistics.size();
    j["degenerate_samples"] = cmp.degenerate_samples;
    j["no_rewiring_samples"] = cmp.no_rewiring_samples;
    ecx::write_json_file(out_path(g, "nullsummary.json"), j);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// regress

struct RegressArgs {
  std::string matrix;
  std::string gdp_start;
  std::string gdp_end;
  int level = 0;
  bool log_gdp = false;
};

int run_regress(const GlobalOptions& g, const RegressArgs& args) {
  const fs::path mpath = matrix_csv_path(args.matrix);
  require_readable({mpath, args.gdp_start, args.gdp_end});
  const ecx::BipartiteMatrix m = ecx::read_matrix_artifact(mpath);
  const ecx::ReflectionTrajectory t = ecx::reflect(m, args.level + 1);
  const ecx::CountrySeries gdp0 = ecx::csv::read_series_csv(args.gdp_start, "gdp_t");
  const ecx::CountrySeries gdp1 = ecx::csv::read_series_csv(args.gdp_end, "gdp_t_plus");

  ecx::RegressionOptions options;
  options.log_gdp_regressor = args.log_gdp;
  const ecx::RegressionResult res =
      ecx::growth_regression(gdp0, gdp1, t, args.level, options);

  ecx::RunMetadata meta;
  meta.command = "regress";
  meta.add_param("level", std::to_string(args.level));
  meta.add_param("log_gdp", args.log_gdp ? "true" : "false");
  meta.add_input(mpath);
  meta.add_input(args.gdp_start);
  meta.add_input(args.gdp_end);

  if (g.format == "csv") {
    std::string dropped;
    for (std::size_t i = 0; i < res.dropped_countries.size(); ++i)
      dropped += (i ? ";" : "") + res.dropped_countries[i];
    ecx::CsvWriter w(out_path(g, "regression.csv"), meta,
                     {"coefficient", "estimate", "standard_error"},
                     {"r_squared: " + format_double(res.r_squared),
                      "n_observations: " + std::to_string(res.n_observations),
                      "dropped_countries: " + dropped});
    for (std::size_t i = 0; i < res.coefficients.size(); ++i)
      w.write_row({res.coefficient_names[i], format_double(res.coefficients[i]),
                   format_double(res.standard_errors[i])});
  } else {
    nlohmann::ordered_json j;
    j["meta"] = meta.json_block();
    nlohmann::ordered_json coef = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < res.coefficients.size(); ++i)
      coef.push_back({{"name", res.coefficient_names[i]},
                      {"estimate", res.coefficients[i]},
                      {"standard_error", res.standard_errors[i]}});
    j["coefficients"] = std::move(coef);
    j["r_squared"] = res.r_squared;
    j["n_observations"] = res.n_observations;
    j["dropped_countries"] = res.dropped_countries;
    ecx::write_json_file(out_path(g, "regression.json"), j);
  }

  {
    ecx::CsvWriter w(out_path(g, "scatter.csv"), meta,
                     {"country", "predicted", "observed"});
    for (const auto& [country, predicted] : res.predictions)
      w.write_row({country, format_double(predicted),
                   format_double(res.observed.at(country))});
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// labor

struct LaborArgs {
  std::string matrix;
  std::string attributes_csv;
  int depth = 2;
};

int run_labor(const GlobalOptions& g, const LaborArgs& args) {
  const fs::path mpath = matrix_csv_path(args.matrix);
  require_readable({mpath, args.attributes_csv});
  const ecx::BipartiteMatrix m = ecx::read_matrix_artifact(mpath);
  const ecx::ProductAttributeMap attrs =
      ecx::csv::read_attributes_csv(args.attributes_csv);
  const ecx::LaborDiversityResult res =
      ecx::labor_diversity(m, attrs, args.depth);

  ecx::RunMetadata meta;
  meta.command = "labor";
  meta.add_param("depth", std::to_string(args.depth));
  meta.add_input(mpath);
  meta.add_input(args.attributes_csv);

  std::string excluded;
  for (std::size_t i = 0; i < res.excluded_countries.size(); ++i)
    excluded += (i ? ";" : "") + res.excluded_countries[i];
  {
    ecx::CsvWriter w(out_path(g, "labor.csv"), meta,
                     {"country", "average_inputs"},
                     {"product_coverage: " + format_double(res.product_coverage),
                      "excluded_countries: " + excluded});
    for (std::size_t i = 0; i < res.countries.size(); ++i)
      w.write_row({res.countries[i], format_double(res.average_inputs[i])});
  }
  {
    ecx::CsvWriter w(out_path(g, "labor_correlations.csv"), meta,
                     {"level", "pearson_r", "n"});
    for (const auto& lc : res.correlations)
      w.write_row({std::to_string(lc.level),
                   lc.r ? format_double(*lc.r) : "nan",
                   std::to_string(res.countries.size())});
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// newexports

struct NewExportsArgs {
  std::string trade_start;
  std::string trade_end;
  double low = 0.1;
  double high = 1.0;
  double matrix_threshold = 1.0;
  std::optional<int> year_start;
  std::optional<int> year_end;
  bool leave_one_out = false;
};

const ecx::ExportTable& pick_year(const std::map<int, ecx::ExportTable>& by_year,
                                  std::optional<int> year, const std::string& which) {
  if (year) {
    auto it = by_year.find(*year);
    if (it == by_year.end())
      throw ecx::InputError(which + ": year " + std::to_string(*year) +
                            " not present in file");
    return it->second;
  }
  if (by_year.size() != 1)
    throw ecx::InputError(which + ": file has " + std::to_string(by_year.size()) +
                          " years; pick one with --year-start/--year-end");
  return by_year.begin()->second;
}

int run_newexports(const GlobalOptions& g, const NewExportsArgs& args) {
  require_readable({args.trade_start, args.trade_end});
  const auto by_year0 = ecx::csv::read_trade_csv(args.trade_start);
  const auto by_year1 = ecx::csv::read_trade_csv(args.trade_end);
  const ecx::ExportTable& t0 = pick_year(by_year0, args.year_start, "--trade-start");
  const ecx::ExportTable& t1 = pick_year(by_year1, args.year_end, "--trade-end");

  ecx::NewExportsOptions options;
  options.low_threshold = args.low;
  options.high_threshold = args.high;
  options.matrix_threshold = args.matrix_threshold;
  options.leave_one_out = args.leave_one_out;
  const ecx::NewExportsResult res = ecx::new_exports(t0, t1, options);

  ecx::RunMetadata meta;
  meta.command = "newexports";
  meta.add_param("low", format_double(args.low));
  meta.add_param("high", format_double(args.high));
  meta.add_param("matrix_threshold", format_double(args.matrix_threshold));
  meta.add_param("leave_one_out", args.leave_one_out ? "true" : "false");
  meta.add_param("year_start", std::to_string(t0.year()));
  meta.add_param("year_end", std::to_string(t1.year()));
  meta.add_input(args.trade_start);
  meta.add_input(args.trade_end);

  std::string skipped;
  for (std::size_t i = 0; i < res.countries_without_new_exports.size(); ++i)
    skipped += (i ? ";" : "") + res.countries_without_new_exports[i];
  ecx::CsvWriter w(out_path(g, "newexports.csv"), meta,
                   {"country", "k_c0", "k_c1", "mean_kp0", "mean_kp1",
                    "n_new_products"},
                   {"countries_without_new_exports: " + skipped});
  for (const auto& row : res.rows)
    w.write_row({row.country, format_double(row.k_c0), format_double(row.k_c1),
                 format_double(row.mean_kp0), format_double(row.mean_kp1),
                 std::to_string(row.new_products.size())});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ecx " + std::string(ecx::kVersion) +
               " - economic complexity pipeline (trade matrices, method of "
               "reflections, capability model, null models, growth empirics)"};
  app.require_subcommand(1);

  GlobalOptions g;
  const char* env_out = std::getenv("ECX_OUT");
  g.out_dir = env_out ? env_out : ".";
  app.add_option("--out", g.out_dir,
                 "Output directory (default: $ECX_OUT or '.')");
  app.add_option("--format", g.format, "Summary file format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("-v,--verbose", g.verbose, "Progress messages on stderr");

  IngestArgs ingest;
  auto* cmd_ingest = app.add_subcommand(
      "ingest", "Trade CSV (year,country,product,value) -> RCA-thresholded "
                "matrix artifact per year");
  cmd_ingest->add_option("--trade", ingest.trade_csv, "Trade CSV file")
      ->required();
  cmd_ingest->add_option("--threshold", ingest.threshold,
                         "RCA threshold for a significant exporter (edge iff "
                         "RCA >= threshold)");

  ReflectArgs reflect;
  auto* cmd_reflect = app.add_subcommand(
      "reflect", "Matrix artifact -> reflection trajectory, z-scores, ranks "
                 "and optional GDP correlations");
  cmd_reflect->add_option("--matrix", reflect.matrix, "Matrix artifact (.csv)")
      ->required();
  cmd_reflect->add_option("--depth", reflect.depth, "Iteration depth N");
  cmd_reflect->add_option("--gdp", reflect.gdp_csv,
                          "Per-country series CSV (country,value) to correlate");
  cmd_reflect->add_flag("--gdp-raw", reflect.gdp_raw,
                        "Correlate against raw values instead of log");

  SimulateArgs simulate;
  auto* cmd_simulate = app.add_subcommand(
      "simulate", "Capability-model ensemble sweep -> per-cell CSVs + summary");
  cmd_simulate->add_option("--config", simulate.config,
                           "Sweep config JSON (defaults to the builtin grid)");
  std::uint64_t simulate_seed = 0;
  auto* simulate_seed_opt =
      cmd_simulate->add_option("--seed", simulate_seed, "Master seed override");
  cmd_simulate->add_flag("--print-config", simulate.print_config,
                         "Print the effective config and exit");

  NullArgs null_args;
  auto* cmd_null = app.add_subcommand(
      "null", "Degree-controlled randomizations of a matrix -> null "
              "distribution of corr(k_c0, k_c1)");
  cmd_null->add_option("--matrix", null_args.matrix, "Matrix artifact (.csv)")
      ->required();
  cmd_null->add_option("--level", null_args.level,
                       "Stringency: density_only | preserve_country_degrees | "
                       "preserve_product_degrees | preserve_both (or 0-3)");
  cmd_null->add_option("--samples", null_args.samples, "Number of null samples");
  cmd_null->add_option("--seed", null_args.seed, "Master seed");
  cmd_null->add_option("--swap-multiplier", null_args.swap_multiplier,
                       "Attempted swaps per edge (preserve_both)");

  RegressArgs regress;
  auto* cmd_regress = app.add_subcommand(
      "regress", "Growth regression: log(GDP_end/GDP_start) on GDP_start, "
                 "k_N and k_N+1");
  cmd_regress->add_option("--matrix", regress.matrix,
                          "Matrix artifact at the start year (.csv)")
      ->required();
  cmd_regress->add_option("--gdp-start", regress.gdp_start,
                          "GDP CSV at the start year")->required();
  cmd_regress->add_option("--gdp-end", regress.gdp_end,
                          "GDP CSV at the end year")->required();
  cmd_regress->add_option("--level", regress.level, "Reflection level N");
  cmd_regress->add_flag("--log-gdp", regress.log_gdp,
                        "Use log GDP(t) as the initial-income regressor");

  LaborArgs labor;
  auto* cmd_labor = app.add_subcommand(
      "labor", "Per-country average number of product attributes (e.g. labor "
               "inputs) with correlations against each reflection level");
  cmd_labor->add_option("--matrix", labor.matrix, "Matrix artifact (.csv)")
      ->required();
  cmd_labor->add_option("--attributes", labor.attributes_csv,
                        "Attribute CSV (product,attribute)")->required();
  cmd_labor->add_option("--depth", labor.depth, "Reflection depth to correlate");

  NewExportsArgs newexports;
  auto* cmd_newexports = app.add_subcommand(
      "newexports", "Products newly exported between two snapshots, with the "
                    "t0 network properties of those products");
  cmd_newexports->add_option("--trade-start", newexports.trade_start,
                             "Trade CSV at t0")->required();
  cmd_newexports->add_option("--trade-end", newexports.trade_end,
                             "Trade CSV at t1")->required();
  cmd_newexports->add_option("--low", newexports.low,
                             "RCA below this at t0 counts as not exported");
  cmd_newexports->add_option("--high", newexports.high,
                             "RCA at or above this at t1 counts as exported");
  cmd_newexports->add_option("--threshold", newexports.matrix_threshold,
                             "RCA threshold for the t0 matrix");
  int year_start = 0, year_end = 0;
  auto* ys = cmd_newexports->add_option("--year-start", year_start,
                                        "Year to use from --trade-start");
  auto* ye = cmd_newexports->add_option("--year-end", year_end,
                                        "Year to use from --trade-end");
  cmd_newexports->add_flag("--leave-one-out", newexports.leave_one_out,
                           "Exclude each country from its own t0 product measures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  if (*simulate_seed_opt) simulate.seed = simulate_seed;
  if (*ys) newexports.year_start = year_start;
  if (*ye) newexports.year_end = year_end;

  try {
    if (cmd_ingest->parsed()) return run_ingest(g, ingest);
    if (cmd_reflect->parsed()) return run_reflect(g, reflect);
    if (cmd_simulate->parsed()) return run_simulate(g, simulate);
    if (cmd_null->parsed()) return run_null(g, null_args);
    if (cmd_regress->parsed()) return run_regress(g, regress);
    if (cmd_labor->parsed()) return run_labor(g, labor);
    if (cmd_newexports->parsed()) return run_newexports(g, newexports);
    std::cerr << "ecx: no subcommand\n";
    return kExitInputError;
  } catch (const ecx::InputError& e) {
    std::cerr << "ecx: input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const ecx::ComputationError& e) {
    std::cerr << "ecx: computation error: " << e.what() << "\n";
    return kExitComputationError;
  } catch (const std::exception& e) {
    std::cerr << "ecx: internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
}
