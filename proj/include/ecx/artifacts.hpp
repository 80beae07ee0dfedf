#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ecx/core_matrix.hpp"
#include "ecx/csv.hpp"
#include "ecx/error.hpp"
#include "ecx/version.hpp"

namespace ecx {

/// FNV-1a 64-bit digest of a file's bytes, as hex.
inline std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path.string());
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ULL;
    }
  }
  char out[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) out[i] = hex[(h >> (60 - 4 * i)) & 0xF];
  out[16] = '\0';
  return out;
}

/// Metadata stamped at the top of every output file. Deliberately free
/// of timestamps so identical runs are byte-identical.
struct RunMetadata {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;  // ordered
  std::string seed = "-";  // "-" when the command takes no seed
  std::vector<std::pair<std::string, std::string>> inputs;  // (name, digest)

  void add_param(const std::string& key, const std::string& value) {
    params.emplace_back(key, value);
  }
  void add_input(const std::filesystem::path& path) {
    inputs.emplace_back(path.filename().string(), file_digest(path));
  }

  std::string comment_block() const {
    std::string out;
    out += "# tool: ecx " + std::string(kVersion) + "\n";
    out += "# command: " + command + "\n";
    std::string p;
    for (const auto& [k, v] : params) p += (p.empty() ? "" : " ") + k + "=" + v;
    out += "# params: " + p + "\n";
    out += "# seed: " + seed + "\n";
    for (const auto& [name, digest] : inputs)
      out += "# input: " + name + " fnv1a64=" + digest + "\n";
    return out;
  }

  nlohmann::ordered_json json_block() const {
    nlohmann::ordered_json meta;
    meta["tool"] = "ecx";
    meta["version"] = kVersion;
    meta["command"] = command;
    nlohmann::ordered_json jp;
    for (const auto& [k, v] : params) jp[k] = v;
    meta["params"] = std::move(jp);
    meta["seed"] = seed;
    nlohmann::ordered_json ji = nlohmann::ordered_json::array();
    for (const auto& [name, digest] : inputs)
      ji.push_back({{"file", name}, {"fnv1a64", digest}});
    meta["inputs"] = std::move(ji);
    return meta;
  }
};

/// CSV writer: metadata comment block, optional extra comment lines,
/// header row, then rows.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const RunMetadata& meta,
            const std::vector<std::string>& header,
            const std::vector<std::string>& comments = {}) {
    out_.open(path);
    if (!out_) throw InputError("cannot write file: " + path.string());
    out_ << meta.comment_block();
    for (const auto& c : comments) out_ << "# " << c << "\n";
    write_row(header);
  }

  void write_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i)
      out_ << (i ? "," : "") << fields[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

inline void write_json_file(const std::filesystem::path& path,
                            const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path.string());
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Matrix artifact: <base>.csv edge list + <base>.json sidecar

inline void write_matrix_artifact(const std::filesystem::path& csv_path,
                                  const BipartiteMatrix& m, double threshold,
                                  int year, const RunMetadata& meta) {
  CsvWriter w(csv_path, meta, {"country", "product"});
  for (const auto& [c, p] : m.edges())
    w.write_row({m.countries()[c], m.products()[p]});

  nlohmann::ordered_json j;
  j["meta"] = meta.json_block();
  j["year"] = year;
  j["threshold"] = threshold;
  j["n_countries"] = m.n_countries();
  j["n_products"] = m.n_products();
  j["n_edges"] = m.n_edges();
  j["countries"] = m.countries();
  j["products"] = m.products();
  nlohmann::ordered_json iso_c = nlohmann::ordered_json::array();
  for (std::size_t c : m.isolate_countries()) iso_c.push_back(m.countries()[c]);
  nlohmann::ordered_json iso_p = nlohmann::ordered_json::array();
  for (std::size_t p : m.isolate_products()) iso_p.push_back(m.products()[p]);
  j["isolate_countries"] = std::move(iso_c);
  j["isolate_products"] = std::move(iso_p);

  std::filesystem::path json_path = csv_path;
  json_path.replace_extension(".json");
  write_json_file(json_path, j);
}

/// Load a matrix artifact. The sidecar (if present) is authoritative for
/// the full country/product index, so zero-degree nodes survive the
/// round trip; without it the index is reconstructed from the edge list.
inline BipartiteMatrix read_matrix_artifact(const std::filesystem::path& csv_path) {
  std::vector<std::string> errors;
  const auto rows = csv::detail::read_rows(csv_path, {"country", "product"}, errors);
  csv::detail::throw_if_errors(csv_path, errors);

  std::vector<std::string> countries, products;
  std::filesystem::path json_path = csv_path;
  json_path.replace_extension(".json");
  if (std::filesystem::exists(json_path)) {
    std::ifstream in(json_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InputError(json_path.string() + ": bad sidecar: " + e.what());
    }
    countries = j.at("countries").get<std::vector<std::string>>();
    products = j.at("products").get<std::vector<std::string>>();
  } else {
    std::set<std::string> cset, pset;
    for (const auto& row : rows) {
      cset.insert(row.fields[0]);
      pset.insert(row.fields[1]);
    }
    countries.assign(cset.begin(), cset.end());
    products.assign(pset.begin(), pset.end());
  }
  if (countries.empty() || products.empty())
    throw InputError(csv_path.string() + ": empty matrix artifact");

  BipartiteMatrix m(countries, products);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& row : rows) {
    const auto c = m.country_index(row.fields[0]);
    const auto p = m.product_index(row.fields[1]);
    if (!c || !p)
      throw InputError(csv_path.string() + ": line " +
                       std::to_string(row.line_number) +
                       ": edge references id missing from sidecar index");
    edges.emplace_back(*c, *p);
  }
  return BipartiteMatrix::from_edges(std::move(countries), std::move(products),
                                     std::move(edges));
}

}  // namespace ecx
