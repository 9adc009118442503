#pragma once

// Run configuration, decomposition directories and report files.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "frd/alpha.hpp"
#include "frd/verify.hpp"

namespace frd {

struct RunConfig {
  int d = 2;
  int L = 3;
  int N = 2;
  double alpha = 1.5;
  double m2 = 1.0;
  double rel_tol = 1e-9;
  /// Empty means the standard schedule T_j = L^{2j}.
  std::vector<long> schedule;
  std::set<std::string> suites;  // empty means all
  std::filesystem::path out = "runs/default";
  int coarse_r = 2;
  std::vector<int> orders{0, 1, 2};
  std::vector<double> sweep_m2{0.2, 0.5, 1.0};
  bool big = false;
  int workers = 0;  // 0: library default

  /// Every violated precondition, one message each.
  std::vector<std::string> problems() const;
  /// problems() joined into one message; throws std::invalid_argument if any.
  void validate() const;

  TorusSpec spec() const { return TorusSpec(d, L, N); }
  SpectralParams params() const { return SpectralParams(alpha, m2); }
  QuadratureRule rule() const;
  BlockSchedule block_schedule() const;
  std::set<std::string> suite_set() const;
  nlohmann::json to_json() const;
};

/// `key = value` lines; '#' starts a comment. Throws on malformed lines.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);
/// Sets one field from its textual value. Throws std::invalid_argument on an
/// unknown key or unparsable value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// manifest.json plus piece_<j>.csv and remainder.csv.
void write_decomposition(const Decomposition& dec, const RunConfig& cfg,
                         const std::filesystem::path& dir);
nlohmann::json read_manifest(const std::filesystem::path& dir);
/// The run configuration recorded in a manifest.
RunConfig config_from_manifest(const nlohmann::json& manifest);
/// Largest |stored - rebuilt| / sup over every stored kernel of a directory.
double stored_kernel_defect(const Decomposition& dec, const std::filesystem::path& dir);

/// <stem>.json (no runtimes), <stem>.csv and <stem>_timings.csv.
void write_report(const VerificationReport& r, const std::filesystem::path& dir, const std::string& stem);

}  // namespace frd
