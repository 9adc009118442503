#pragma once

// Bound suites run against built decompositions. Every check becomes a report
// entry; checks a small torus cannot decide are marked not-resolvable rather
// than passed.

#include <functional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "frd/alpha.hpp"
#include "frd/window.hpp"

namespace frd {

enum class Status { pass, fail, not_resolvable, report };

const char* status_name(Status s);

struct CheckEntry {
  std::string check_id;
  std::string bound;
  nlohmann::json raw = nlohmann::json::object();
  nlohmann::json normalized = nlohmann::json::object();
  nlohmann::json fit = nlohmann::json::object();
  Status status = Status::report;
  std::string reason;
  double runtime = 0.0;
};

struct VerificationReport {
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json provenance = nlohmann::json::object();
  std::vector<CheckEntry> entries;

  void add(CheckEntry e) { entries.push_back(std::move(e)); }
  void append(const VerificationReport& other);
  /// No entry failed.
  bool passed() const;
  std::size_t count(Status s) const;
  /// Stable order by check id.
  void sort();
  /// Runtimes are left out when `timings` is false so reports are reproducible.
  nlohmann::json to_json(bool timings = true) const;
  /// check_id,bound,status,value,threshold,reason
  std::string to_csv() const;
};

/// normalized = raw · L^{per_index·i + constant} · (m²)^{m2_power} · (1 + L^{iα}m²)^{profile_power}
struct BoundSpec {
  std::string id;
  double per_index = 0.0;
  double constant = 0.0;
  double m2_power = 0.0;
  double profile_power = 0.0;
  double alpha = 1.0;
  double acceptance = 10.0;

  double normalize(double raw, int L, int index, double m2) const;

  /// sup|∂^p Γ̃_j|·L^{(d-α+p)j}·(1+L^{jα}m²)²
  static BoundSpec regularity(int d, double alpha, int p);
  /// sup|Γ̃_0|·(1+m²)
  static BoundSpec base_profile(double alpha);
  /// sup|∂_{m²}∂^p Γ̃_j|·L^{pj}·L^{j(d-2)}·(m²)^{2(1-1/α)}
  static BoundSpec mass_derivative(int d, double alpha, int p);
  /// sup|∂^l 𝒢̃_N|·L^{2Nα}m⁴·L^{N(d-α)+lN}
  static BoundSpec remainder(int d, double alpha, int l);
  /// sup|∂^l 𝒢̃_N|·L^{N(d-α)+lN}, meaningful for m² >= L^{-Nα}
  static BoundSpec remainder_threshold(int d, double alpha, int l);
  /// sup|∂_{m²}∂^l 𝒢̃_N|·L^{lN}·L^{(N+1)d}·m⁴
  static BoundSpec remainder_derivative(int d, double alpha, int l);
};

struct Collapse {
  std::vector<double> constants;
  double ratio = 0.0;
  bool pass = false;
};

/// Normalized constants per scale and their max/min ratio; needs >= 3 scales.
Collapse scaling_collapse(const std::vector<int>& indices, const std::vector<double>& values,
                          const BoundSpec& bound, int L, double m2);

/// One window study per scale j ∈ [j_lo, j_hi] of the standard schedule with
/// base L, all on one spectral node set.
struct ScaleSeries {
  int d = 0;
  int L = 0;
  double alpha = 0.0;
  double m2 = 0.0;
  std::vector<int> js;
  std::vector<WindowStudy> studies;

  double sup(int j, int p) const;
  double sup_dm2(int j, int p) const;
  double max_refine_defect() const;
};

ScaleSeries measure_scales(int d, int L, const SpectralParams& P, int j_lo, int j_hi,
                           const QuadratureRule& rule, const WindowConfig& cfg);

/// Pass iff difference <= c_fit · modulus (with a relative slack of 1e-12).
CheckEntry continuity_entry(const std::string& id, double m1, double m2, double difference,
                            double modulus, double c_fit);

struct ContinuityPair {
  double m1;
  double m2;
};

/// Entries for each pair: difference(m1, m2) against c_fit · modulus(m1, m2).
std::vector<CheckEntry> continuity_check(const std::string& id, const std::vector<ContinuityPair>& pairs,
                                         const std::function<double(double, double)>& difference,
                                         const std::function<double(double, double)>& modulus,
                                         double c_fit);

struct SuiteOptions {
  std::vector<double> window_masses{1e-3, 1e-2};
  std::vector<double> continuity_masses{0.3, 0.5, 0.8, 1.2};
  /// Also fit c_fit at the geometric midpoints of consecutive continuity
  /// masses; the mean-value bound needs the derivative across each interval.
  bool continuity_midpoints = true;
  std::vector<double> base_profile_masses{1e-2, 1e-1, 1.0, 10.0, 100.0};
  int j_lo = 1;
  int j_hi = 5;
  std::vector<int> orders{0, 1, 2};
  int coarse_r = 2;
  WindowConfig window;
  double collapse_factor = 10.0;
  double coarse_factor = 4.0;
  double eps_range_K = 4.5;
};

const std::vector<std::string>& all_suites();

/// Max over axes k of sup|∂_k^l f|.
double sup_forward_diff(const TorusField& f, int l);

/// Continuity of torus pieces and remainder over every pair of the given
/// decompositions (same torus and α, built with mass derivatives). c_fit is
/// the largest normalized derivative seen across them.
VerificationReport sweep_continuity(const std::vector<Decomposition>& decs);

VerificationReport run_suite(const Decomposition& dec, const std::set<std::string>& suites,
                             const SuiteOptions& opts = {});

}  // namespace frd
