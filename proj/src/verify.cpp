#include "frd/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include "frd/fourier.hpp"

namespace frd {

using nlohmann::json;

const char* status_name(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::not_resolvable: return "not-resolvable";
    case Status::report: return "report";
  }
  return "?";
}

void VerificationReport::append(const VerificationReport& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

bool VerificationReport::passed() const {
  return std::none_of(entries.begin(), entries.end(), [](const CheckEntry& e) { return e.status == Status::fail; });
}

std::size_t VerificationReport::count(Status s) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [s](const CheckEntry& e) { return e.status == s; }));
}

void VerificationReport::sort() {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const CheckEntry& a, const CheckEntry& b) { return a.check_id < b.check_id; });
}

json VerificationReport::to_json(bool timings) const {
  json out;
  out["params"] = params;
  out["provenance"] = provenance;
  json list = json::array();
  for (const auto& e : entries) {
    json j;
    j["check_id"] = e.check_id;
    j["bound"] = e.bound;
    j["raw"] = e.raw;
    j["normalized"] = e.normalized;
    j["fit"] = e.fit;
    j["status"] = status_name(e.status);
    j["pass"] = e.status == Status::pass;
    j["reason"] = e.reason;
    if (timings) j["runtime"] = e.runtime;
    list.push_back(std::move(j));
  }
  out["checks"] = std::move(list);
  out["summary"] = {{"pass", count(Status::pass)},
                    {"fail", count(Status::fail)},
                    {"not_resolvable", count(Status::not_resolvable)},
                    {"report", count(Status::report)}};
  return out;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string number_field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj[key].is_number()) return "";
  return num(obj[key].get<double>());
}

}  // namespace

std::string VerificationReport::to_csv() const {
  std::ostringstream os;
  os << "check_id,bound,status,value,threshold,reason\n";
  for (const auto& e : entries) {
    os << csv_field(e.check_id) << ',' << csv_field(e.bound) << ',' << status_name(e.status) << ','
       << number_field(e.normalized, "value") << ',' << number_field(e.normalized, "threshold") << ','
       << csv_field(e.reason) << '\n';
  }
  return os.str();
}

double BoundSpec::normalize(double raw, int L, int index, double m2) const {
  const double l = static_cast<double>(L);
  double v = raw * std::pow(l, per_index * index + constant);
  if (m2_power != 0.0) v *= std::pow(m2, m2_power);
  if (profile_power != 0.0) v *= std::pow(1.0 + std::pow(l, index * alpha) * m2, profile_power);
  return v;
}

BoundSpec BoundSpec::regularity(int d, double alpha, int p) {
  BoundSpec b;
  b.id = "1.14";
  b.per_index = d - alpha + p;
  b.profile_power = 2.0;
  b.alpha = alpha;
  return b;
}

BoundSpec BoundSpec::base_profile(double alpha) {
  BoundSpec b;
  b.id = "1.141";
  b.profile_power = 1.0;  // (1 + L^0 m²)
  b.alpha = alpha;
  return b;
}

BoundSpec BoundSpec::mass_derivative(int d, double alpha, int p) {
  BoundSpec b;
  b.id = "1.102";
  b.per_index = p + d - 2.0;
  b.m2_power = 2.0 * (1.0 - 1.0 / alpha);
  b.alpha = alpha;
  return b;
}

BoundSpec BoundSpec::remainder(int d, double alpha, int l) {
  BoundSpec b;
  b.id = "1.7";
  b.per_index = 2.0 * alpha + (d - alpha) + l;
  b.m2_power = 2.0;
  b.alpha = alpha;
  return b;
}

BoundSpec BoundSpec::remainder_threshold(int d, double alpha, int l) {
  BoundSpec b;
  b.id = "1.77";
  b.per_index = d - alpha + l;
  b.alpha = alpha;
  return b;
}

BoundSpec BoundSpec::remainder_derivative(int d, double alpha, int l) {
  BoundSpec b;
  b.id = "1.104";
  b.per_index = l + d;
  b.constant = d;
  b.m2_power = 2.0;
  b.alpha = alpha;
  return b;
}

Collapse scaling_collapse(const std::vector<int>& indices, const std::vector<double>& values,
                          const BoundSpec& bound, int L, double m2) {
  if (indices.size() != values.size()) throw std::invalid_argument("one value per scale index");
  if (indices.size() < 3) throw std::invalid_argument("scaling collapse needs at least 3 scales");
  Collapse c;
  for (std::size_t i = 0; i < values.size(); ++i) c.constants.push_back(bound.normalize(values[i], L, indices[i], m2));
  const auto [lo, hi] = std::minmax_element(c.constants.begin(), c.constants.end());
  c.ratio = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  c.pass = c.ratio <= bound.acceptance;
  return c;
}

namespace {

std::size_t series_slot(const ScaleSeries& s, int j) {
  const auto it = std::find(s.js.begin(), s.js.end(), j);
  if (it == s.js.end()) throw std::out_of_range("scale not in series");
  return static_cast<std::size_t>(it - s.js.begin());
}

}  // namespace

double ScaleSeries::sup(int j, int p) const { return studies[series_slot(*this, j)].value.sup(p); }

double ScaleSeries::sup_dm2(int j, int p) const { return studies[series_slot(*this, j)].dm2.sup(p); }

double ScaleSeries::max_refine_defect() const {
  double m = 0.0;
  for (const auto& s : studies) m = std::max(m, s.refine_defect);
  return m;
}

ScaleSeries measure_scales(int d, int L, const SpectralParams& P, int j_lo, int j_hi,
                           const QuadratureRule& rule, const WindowConfig& cfg) {
  if (j_lo < 0 || j_hi < j_lo) throw std::invalid_argument("scale range needs 0 <= j_lo <= j_hi");
  ScaleSeries s;
  s.d = d;
  s.L = L;
  s.alpha = P.alpha;
  s.m2 = P.m2;
  const SpectralNodes nodes = window_nodes(d, ipow(L, 2 * (j_hi + 1)), P, rule);
  for (int j = j_lo; j <= j_hi; ++j) {
    const long Ta = j == 0 ? 0 : ipow(L, 2 * j);
    s.js.push_back(j);
    s.studies.push_back(window_study(d, Ta, ipow(L, 2 * (j + 1)), nodes, cfg));
  }
  return s;
}

CheckEntry continuity_entry(const std::string& id, double m1, double m2, double difference,
                            double modulus, double c_fit) {
  CheckEntry e;
  e.check_id = id;
  e.bound = id.find("1.105") != std::string::npos ? "1.105" : "1.103";
  e.raw = {{"m1_sq", m1}, {"m2_sq", m2}, {"difference", difference}};
  const double threshold = c_fit * modulus;
  e.normalized = {{"value", difference}, {"threshold", threshold}};
  e.fit = {{"c_fit", c_fit}, {"modulus", modulus}};
  e.status = difference <= threshold * (1.0 + 1e-12) ? Status::pass : Status::fail;
  return e;
}

std::vector<CheckEntry> continuity_check(const std::string& id, const std::vector<ContinuityPair>& pairs,
                                         const std::function<double(double, double)>& difference,
                                         const std::function<double(double, double)>& modulus,
                                         double c_fit) {
  std::vector<CheckEntry> out;
  for (const auto& pr : pairs) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckEntry e = continuity_entry(id + ".m2=" + short_num(pr.m1) + "," + short_num(pr.m2), pr.m1, pr.m2,
                                    difference(pr.m1, pr.m2), modulus(pr.m1, pr.m2), c_fit);
    e.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(e));
  }
  return out;
}

const std::vector<std::string>& all_suites() {
  static const std::vector<std::string> s{"range",      "psd",        "reconstruct", "scaling", "remainder",
                                          "mass",       "continuity", "coarse",      "fourier"};
  return s;
}

double sup_forward_diff(const TorusField& f, int l) {
  if (l == 0) return norms(f).sup;
  double m = 0.0;
  for (int k = 0; k < f.spec().d(); ++k) m = std::max(m, norms(forward_diff(f, MultiIndex::axis(f.spec().d(), k, l))).sup);
  return m;
}

namespace {

double sup_diff(const TorusField& f, int l) { return sup_forward_diff(f, l); }

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs_diff(const TorusField& a, const TorusField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

CheckEntry threshold_entry(std::string id, std::string bound, double value, double threshold, json raw = json::object()) {
  CheckEntry e;
  e.check_id = std::move(id);
  e.bound = std::move(bound);
  e.raw = std::move(raw);
  e.normalized = {{"value", value}, {"threshold", threshold}};
  e.status = value <= threshold ? Status::pass : Status::fail;
  return e;
}

CheckEntry report_entry(std::string id, std::string bound, double value, std::string reason, json raw = json::object()) {
  CheckEntry e;
  e.check_id = std::move(id);
  e.bound = std::move(bound);
  e.raw = std::move(raw);
  e.normalized = {{"value", value}};
  e.status = Status::report;
  e.reason = std::move(reason);
  return e;
}

CheckEntry unresolved_entry(std::string id, std::string bound, std::string reason) {
  CheckEntry e;
  e.check_id = std::move(id);
  e.bound = std::move(bound);
  e.status = Status::not_resolvable;
  e.reason = std::move(reason);
  return e;
}

CheckEntry collapse_entry(const std::string& id, const Collapse& c, const std::vector<int>& js,
                          const std::vector<double>& raw, const BoundSpec& b) {
  CheckEntry e;
  e.check_id = id;
  e.bound = b.id;
  e.raw = {{"j", js}, {"sup", raw}};
  e.normalized = {{"value", c.ratio}, {"threshold", b.acceptance}, {"constants", c.constants}};
  e.fit = {{"max_constant", *std::max_element(c.constants.begin(), c.constants.end())}};
  e.status = c.pass ? Status::pass : Status::fail;
  return e;
}

/// Max outside the l1 ball of radius Tb-1, relative to the sup.
double outside_ratio(const TorusField& k, long Tb) {
  double out = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const Coord c = k.spec().coords(i);
    long r = 0;
    for (long v : c) r += std::abs(v);
    if (r >= Tb) out = std::max(out, std::abs(k[i]));
  }
  const double sup = norms(k).sup;
  return sup > 0.0 ? out / sup : 0.0;
}

/// Units in the last place between two doubles of the same sign.
long long ulp_distance(double a, double b) {
  if (a == b) return 0;
  if (std::signbit(a) != std::signbit(b)) return std::numeric_limits<long long>::max();
  long long ia, ib;
  std::memcpy(&ia, &a, sizeof a);
  std::memcpy(&ib, &b, sizeof b);
  return std::llabs(ia - ib);
}

class SuiteRunner {
 public:
  SuiteRunner(const Decomposition& dec, const SuiteOptions& opts)
      : dec_(dec), opts_(opts), d_(dec.spec.d()), L_(dec.spec.L()), N_(dec.spec.N()),
        alpha_(dec.params.alpha), m2_(dec.params.m2) {}

  void run(const std::string& suite) {
    if (suite == "range") range();
    else if (suite == "psd") psd();
    else if (suite == "reconstruct") reconstruct();
    else if (suite == "scaling") scaling();
    else if (suite == "remainder") remainder();
    else if (suite == "mass") mass();
    else if (suite == "continuity") continuity();
    else if (suite == "coarse") coarse();
    else if (suite == "fourier") fourier();
    else throw std::invalid_argument("unknown suite: " + suite);
  }

  VerificationReport report;

 private:
  template <class F>
  void timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckEntry e = f();
    e.runtime = elapsed(t0);
    report.add(std::move(e));
  }

  bool windows_available() const { return d_ >= 2; }
  bool derivative_regime() const { return alpha_ > 1.0 && alpha_ < 2.0; }

  const ScaleSeries& series(int L, double m2, int j_lo, int j_hi) {
    const auto key = std::make_tuple(L, m2, j_lo, j_hi);
    auto it = series_.find(key);
    if (it == series_.end())
      it = series_.emplace(key, measure_scales(d_, L, SpectralParams(alpha_, m2), j_lo, j_hi, dec_.rule, opts_.window)).first;
    return it->second;
  }

  const Decomposition& with_dm2() {
    if (!dec_.dm2_pieces.empty()) return dec_;
    if (!dm2_) {
      AssembleOptions o;
      o.mass_derivatives = true;
      o.layout = &dec_.nodes;
      dm2_ = assemble(dec_.spec, dec_.params, dec_.rule, dec_.schedule, o);
    }
    return *dm2_;
  }

  std::vector<int> scales() const {
    std::vector<int> js;
    for (int j = opts_.j_lo; j <= opts_.j_hi; ++j) js.push_back(j);
    return js;
  }

  void range() {
    const double diam = static_cast<double>(d_) * static_cast<double>(dec_.spec.half());
    for (const auto& pc : dec_.pieces) {
      const std::string j = std::to_string(pc.j);
      if (!pc.ranges.resolvable) {
        const std::string why = "2*T_{j+1} = " + std::to_string(2 * pc.Tb) + " >= M = " + std::to_string(dec_.spec.side());
        report.add(unresolved_entry("range.exact.j" + j, "1.4", why));
        report.add(unresolved_entry("range.exact_s.j" + j, "1.4", why));
      } else {
        timed([&] {
          return threshold_entry("range.exact.j" + j, "1.4", outside_ratio(pc.kernel, pc.Tb), 1e-15,
                                 {{"radius", pc.Tb - 1}});
        });
        timed([&] {
          const ScaleKernelS k = build_block_kernel(dec_.spec, pc.j, 1.0, dec_.schedule);
          return threshold_entry("range.exact_s.j" + j, "1.4", outside_ratio(k.kernel, pc.Tb), 1e-15,
                                 {{"radius", pc.Tb - 1}, {"s", 1.0}});
        });
      }
      const double limit = opts_.eps_range_K * std::pow(static_cast<double>(L_), pc.j + 1);
      if (limit >= diam) {
        report.add(unresolved_entry("range.eps.j" + j, "1.4",
                                    "K*L^{j+1} = " + short_num(limit) + " reaches the torus l1 diameter"));
      } else {
        CheckEntry e = threshold_entry("range.eps.j" + j, "1.4",
                                       pc.ranges.eps_l1 / std::pow(static_cast<double>(L_), pc.j + 1), opts_.eps_range_K,
                                       {{"eps_l1", pc.ranges.eps_l1}, {"eps_l2", pc.ranges.eps_l2}, {"eps_linf", pc.ranges.eps_linf}});
        report.add(std::move(e));
      }
    }
  }

  void psd() {
    for (const auto& pc : dec_.pieces)
      report.add(threshold_entry("psd.piece.j" + std::to_string(pc.j), "1.2", std::max(0.0, -min_of(pc.symbol)), 1e-12,
                                 {{"min_symbol", min_of(pc.symbol)}}));
    report.add(threshold_entry("psd.remainder", "1.2", std::max(0.0, -min_of(dec_.remainder.symbol)), 1e-12,
                               {{"min_symbol", min_of(dec_.remainder.symbol)}}));
    timed([&] {
      const TorusField t = dec_.total();
      const double mn = *std::min_element(t.values().begin(), t.values().end());
      return threshold_entry("psd.total_pointwise", "1.2", std::max(0.0, -mn), 1e-10, {{"min_value", mn}});
    });
  }

  void reconstruct() {
    timed([&] {
      const double ref = norms(dec_.exact).sup;
      const double defect = max_abs_diff(dec_.total(), dec_.exact);
      return threshold_entry("reconstruct.defect", "1.2", defect / ref, 1e-7, {{"defect", defect}, {"sup_exact", ref}});
    });
    double zero = 0.0;
    for (const auto& pc : dec_.pieces) zero += pc.symbol[0];
    zero += dec_.remainder.symbol[0];
    const double inv = 1.0 / m2_;
    report.add(threshold_entry("reconstruct.zero_momentum", "2.2", std::abs(zero - inv) / inv, 1e-8,
                               {{"sum", zero}, {"inverse_mass", inv}}));
    {
      CheckEntry e = threshold_entry("reconstruct.exact_zero_mode", "2.2", std::abs(dec_.exact_symbol[0] - inv), 0.0,
                                     {{"value", dec_.exact_symbol[0]}});
      report.add(std::move(e));
    }
    timed([&] {
      double worst = 0.0;
      for (std::size_t i = 0; i < dec_.quadrature_resolvent.size(); ++i) {
        double s = dec_.remainder.symbol[i];
        for (const auto& pc : dec_.pieces) s += pc.symbol[i];
        worst = std::max(worst, std::abs(s - dec_.quadrature_resolvent[i]) / dec_.quadrature_resolvent[i]);
      }
      return threshold_entry("reconstruct.identity", "1.2", worst, 1e-13);
    });
  }

  void remainder() {
    const double inv = 1.0 / m2_;
    timed([&] {
      TorusField alt = dec_.exact;
      for (const auto& pc : dec_.pieces) alt -= pc.kernel;
      const double a = norms(alt).sup;
      const double b = norms(dec_.remainder.field).sup;
      const double ref = norms(dec_.exact).sup;
      return threshold_entry("remainder.subtraction_route", "1.7", std::abs(a - b) / ref, 2.0 * dec_.rule.rel_tol,
                             {{"sup_remainder", b}, {"sup_subtracted", a}, {"sup_exact", ref}});
    });
    const double g0 = dec_.remainder.symbol[0];
    report.add(threshold_entry("remainder.zero_coefficient", "1.7", g0 * m2_, 1.0 + 1e-12,
                               {{"coefficient", g0}, {"inverse_mass", inv}}));
    const double thr = std::pow(static_cast<double>(L_), -N_ * alpha_);
    for (int l : {0, 1}) {
      const double raw = sup_diff(dec_.remainder.field, l);
      const BoundSpec b7 = BoundSpec::remainder(d_, alpha_, l);
      const BoundSpec b77 = BoundSpec::remainder_threshold(d_, alpha_, l);
      report.add(report_entry("remainder.1.7.l" + std::to_string(l), b7.id, b7.normalize(raw, L_, N_, m2_),
                              "constant compared across N and m2 by the caller", {{"sup", raw}, {"N", N_}}));
      report.add(report_entry("remainder.1.77.l" + std::to_string(l), b77.id, b77.normalize(raw, L_, N_, m2_),
                              m2_ >= thr ? "m2 >= L^{-N alpha}: threshold regime applies"
                                         : "m2 < L^{-N alpha}: outside the threshold regime",
                              {{"sup", raw}, {"N", N_}, {"threshold_m2", thr}}));
    }
  }

  void mass() {
    const Decomposition& dm = with_dm2();
    timed([&] {
      // central difference on the same panel layout
      const double h = 1e-4 * m2_;
      AssembleOptions o;
      o.layout = &dec_.nodes;
      plus_ = assemble(dec_.spec, SpectralParams(alpha_, m2_ + h), dec_.rule, dec_.schedule, o);
      minus_ = assemble(dec_.spec, SpectralParams(alpha_, m2_ - h), dec_.rule, dec_.schedule, o);
      CheckEntry e;
      e.check_id = "mass.fd.setup";
      e.bound = "1.102";
      e.status = Status::report;
      e.raw = {{"h", h}};
      e.reason = "finite-difference builds";
      return e;
    });
    const double h = 1e-4 * m2_;
    auto fd_entry = [&](const std::string& id, const TorusField& p, const TorusField& m, const TorusField& q) {
      TorusField fd = p;
      fd -= m;
      fd *= 1.0 / (2.0 * h);
      const double ref = norms(q).sup;
      return threshold_entry(id, "1.102", max_abs_diff(fd, q) / ref, 1e-5, {{"sup_quadrature", ref}});
    };
    for (int j = 0; j < N_; ++j)
      report.add(fd_entry("mass.fd.j" + std::to_string(j), plus_->pieces[j].kernel, minus_->pieces[j].kernel,
                          dm.dm2_pieces[j].kernel));
    report.add(fd_entry("mass.fd.remainder", plus_->remainder.field, minus_->remainder.field, dm.dm2_remainder->field));
    plus_.reset();
    minus_.reset();

    for (int l : {0, 1}) {
      const double raw = sup_diff(dm.dm2_remainder->field, l);
      const BoundSpec b = BoundSpec::remainder_derivative(d_, alpha_, l);
      report.add(report_entry("mass.1.104.l" + std::to_string(l), b.id, b.normalize(raw, L_, N_, m2_),
                              "constant compared across N by the caller", {{"sup", raw}, {"N", N_}}));
    }

    if (!windows_available()) {
      report.add(unresolved_entry("mass.1.102", "1.102", "window studies need d >= 2"));
      return;
    }
    if (!derivative_regime()) {
      report.add(report_entry("mass.1.102", "1.102", 0.0, "bound applies only for 1 < alpha < 2"));
      return;
    }
    const std::vector<int> js = scales();
    for (double m : opts_.window_masses) {
      const auto t0 = std::chrono::steady_clock::now();
      const ScaleSeries& s = series(L_, m, opts_.j_lo, opts_.j_hi);
      for (int p : opts_.orders) {
        std::vector<double> raw;
        for (int j : js) raw.push_back(s.sup_dm2(j, p));
        BoundSpec b = BoundSpec::mass_derivative(d_, alpha_, p);
        b.acceptance = opts_.collapse_factor;
        CheckEntry e = collapse_entry("mass.1.102.m2=" + short_num(m) + ".p" + std::to_string(p),
                                      scaling_collapse(js, raw, b, L_, m), js, raw, b);
        e.runtime = elapsed(t0);
        report.add(std::move(e));
      }
    }
  }

  void scaling() {
    if (!windows_available()) {
      report.add(unresolved_entry("scaling.1.14", "1.14", "window studies need d >= 2"));
      return;
    }
    const std::vector<int> js = scales();
    for (double m : opts_.window_masses) {
      const auto t0 = std::chrono::steady_clock::now();
      const ScaleSeries& s = series(L_, m, opts_.j_lo, opts_.j_hi);
      for (int p : opts_.orders) {
        std::vector<double> raw;
        for (int j : js) raw.push_back(s.sup(j, p));
        BoundSpec b = BoundSpec::regularity(d_, alpha_, p);
        b.acceptance = opts_.collapse_factor;
        CheckEntry e = collapse_entry("scaling.1.14.m2=" + short_num(m) + ".p" + std::to_string(p),
                                      scaling_collapse(js, raw, b, L_, m), js, raw, b);
        e.runtime = elapsed(t0);
        report.add(std::move(e));
      }
      report.add(threshold_entry("scaling.refine.m2=" + short_num(m), "1.14", s.max_refine_defect(), 1e-6,
                                 {{"n", opts_.window.n}, {"n_ref", opts_.window.n_ref}}));
    }

    // j = 0 profile across masses
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<WindowStudy> base;
    for (double m : opts_.base_profile_masses) {
      const SpectralParams P(alpha_, m);
      base.push_back(window_study(d_, 0, ipow(L_, 2), window_nodes(d_, ipow(L_, 2), P, dec_.rule), opts_.window));
    }
    const BoundSpec b = BoundSpec::base_profile(alpha_);
    for (int p : opts_.orders) {
      std::vector<double> raw, c;
      for (std::size_t i = 0; i < base.size(); ++i) {
        raw.push_back(base[i].value.sup(p));
        c.push_back(b.normalize(raw.back(), L_, 0, opts_.base_profile_masses[i]));
      }
      const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
      CheckEntry e = threshold_entry("scaling.1.141.p" + std::to_string(p), b.id, *hi / *lo, opts_.collapse_factor,
                                     {{"m2", opts_.base_profile_masses}, {"sup", raw}});
      e.normalized["constants"] = c;
      e.runtime = elapsed(t0);
      report.add(std::move(e));
    }
  }

  /// c_fit for pieces: max normalized D over every measured mass, times α/(2-α).
  double piece_c_fit(int p, const std::vector<double>& masses) {
    double c = 0.0;
    const BoundSpec b = BoundSpec::mass_derivative(d_, alpha_, p);
    for (double m : masses) {
      const ScaleSeries& s = series(L_, m, opts_.j_lo, opts_.j_hi);
      for (int j : s.js) c = std::max(c, b.normalize(s.sup_dm2(j, p), L_, j, m));
    }
    return c * alpha_ / (2.0 - alpha_);
  }

  void continuity() {
    if (!derivative_regime()) {
      report.add(report_entry("continuity", "1.103", 0.0, "bounds apply only for 1 < alpha < 2"));
      return;
    }
    const auto& cm = opts_.continuity_masses;
    std::vector<ContinuityPair> pairs;
    for (std::size_t a = 0; a < cm.size(); ++a)
      for (std::size_t b = a + 1; b < cm.size(); ++b) pairs.push_back({cm[a], cm[b]});

    std::vector<double> fit_masses(cm.begin(), cm.end());
    if (opts_.continuity_midpoints) {
      std::vector<double> sorted = fit_masses;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 1; i < sorted.size(); ++i) fit_masses.push_back(std::sqrt(sorted[i - 1] * sorted[i]));
    }

    if (windows_available()) {
      std::vector<double> masses = opts_.window_masses;
      masses.insert(masses.end(), fit_masses.begin(), fit_masses.end());
      const double e = (2.0 - alpha_) / alpha_;
      for (int p : opts_.orders) {
        const double c_fit = piece_c_fit(p, masses);
        for (int j : scales()) {
          auto diff = [&](double m1, double m2) {
            const ScaleSeries& s1 = series(L_, m1, opts_.j_lo, opts_.j_hi);
            const ScaleSeries& s2 = series(L_, m2, opts_.j_lo, opts_.j_hi);
            return profile_difference(s1.studies[series_slot(s1, j)].value, s2.studies[series_slot(s2, j)].value, p);
          };
          auto modulus = [&](double m1, double m2) {
            return std::pow(static_cast<double>(L_), -j * (d_ - 2.0) - p * j) * std::abs(std::pow(m1, e) - std::pow(m2, e));
          };
          for (auto& entry : continuity_check("continuity.1.103.j" + std::to_string(j) + ".p" + std::to_string(p), pairs,
                                              diff, modulus, c_fit))
            report.add(std::move(entry));
        }
      }
    } else {
      report.add(unresolved_entry("continuity.1.103", "1.103", "window studies need d >= 2"));
    }

    // remainder on the torus
    std::map<double, Decomposition> decs;
    for (double m : fit_masses) {
      AssembleOptions o;
      o.mass_derivatives = true;
      decs.emplace(m, assemble(dec_.spec, SpectralParams(alpha_, m), dec_.rule, dec_.schedule, o));
    }
    for (int l : {0, 1}) {
      const BoundSpec b = BoundSpec::remainder_derivative(d_, alpha_, l);
      double c_fit = 0.0;
      for (const auto& [m, dm] : decs) c_fit = std::max(c_fit, b.normalize(sup_diff(dm.dm2_remainder->field, l), L_, N_, m));
      auto diff = [&](double m1, double m2) {
        TorusField f = decs.at(m1).remainder.field;
        f -= decs.at(m2).remainder.field;
        return sup_diff(f, l);
      };
      auto modulus = [&](double m1, double m2) {
        const double l_ = static_cast<double>(L_);
        return std::pow(l_, -l * N_) * std::pow(l_, -(N_ + 1.0) * d_) * std::abs(m1 - m2) / (m1 * m2);
      };
      for (auto& entry : continuity_check("continuity.1.105.l" + std::to_string(l), pairs, diff, modulus, c_fit))
        report.add(std::move(entry));
    }
  }

  void coarse() {
    const int r = opts_.coarse_r;
    if (r < 2 || r > N_) {
      report.add(unresolved_entry("coarse.total_exact", "1.1411", "coarse factor must lie in [2, N]"));
    } else {
      timed([&] {
        const CoarseDecomposition cg = coarse_grain(dec_, r);
        const TorusField a = cg.total();
        const TorusField b = dec_.total();
        long long worst = 0;
        for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, ulp_distance(a[i], b[i]));
        // Only a single group reproduces the fine left fold addition for addition.
        const bool same_order = cg.pieces.size() == 1 && cg.folded.empty();
        CheckEntry e = threshold_entry("coarse.total_exact", "1.1411", static_cast<double>(worst), same_order ? 0.0 : 4.0,
                                       {{"max_ulp", worst}, {"groups", cg.pieces.size()}, {"folded", cg.folded.size()}});
        if (!same_order) e.reason = "several groups reorder the additions; a few ulp allowed";
        return e;
      });
      const CoarseDecomposition cg = coarse_grain(dec_, r);
      const double diam = static_cast<double>(d_) * static_cast<double>(dec_.spec.half());
      for (std::size_t j = 0; j < cg.pieces.size(); ++j) {
        const double limit = opts_.eps_range_K * std::pow(static_cast<double>(cg.L_prime), static_cast<double>(j) + 1.0);
        const std::string id = "coarse.eps.j" + std::to_string(j);
        if (limit >= diam) {
          report.add(unresolved_entry(id, "1.4", "K*L'^{j+1} reaches the torus l1 diameter"));
          continue;
        }
        const double eps = 1e-12 * norms(cg.pieces[j]).sup;
        const long R = range_of(cg.pieces[j], Metric::l1, eps);
        report.add(threshold_entry(id, "1.4", R / std::pow(static_cast<double>(cg.L_prime), j + 1.0),
                                   opts_.eps_range_K, {{"eps_l1", R}}));
      }
    }

    if (!windows_available() || !derivative_regime()) {
      report.add(report_entry("coarse.1.102", "1.102", 0.0, "coarse constants need d >= 2 and 1 < alpha < 2"));
      return;
    }
    const int Lp = static_cast<int>(ipow(L_, r));
    const int jc_hi = (opts_.j_hi - (r - 1)) / r;
    if (jc_hi < 1) {
      report.add(unresolved_entry("coarse.1.102", "1.102", "fine scale range too short for a coarse scale"));
      return;
    }
    for (double m : opts_.window_masses) {
      const auto t0 = std::chrono::steady_clock::now();
      const ScaleSeries& coarse = series(Lp, m, 1, jc_hi);
      const ScaleSeries& fine = series(L_, m, opts_.j_lo, opts_.j_hi);
      for (int p : opts_.orders) {
        const BoundSpec b = BoundSpec::mass_derivative(d_, alpha_, p);
        const BoundSpec b14 = BoundSpec::regularity(d_, alpha_, p);
        for (int jc = 1; jc <= jc_hi; ++jc) {
          const int jf = r * jc;
          if (jf < opts_.j_lo || jf > opts_.j_hi) continue;
          const std::string tag = ".m2=" + short_num(m) + ".p" + std::to_string(p) + ".j" + std::to_string(jc);
          const double Dc = b.normalize(coarse.sup_dm2(jc, p), Lp, jc, m);
          const double Df = b.normalize(fine.sup_dm2(jf, p), L_, jf, m);
          const double ratio = std::max(Dc / Df, Df / Dc);
          const json raw = {{"coarse", Dc}, {"fine", Df}, {"L_prime", Lp}, {"fine_j", jf}};
          const bool asserted = (d_ == 3 && p == 0) || (d_ == 2 && p >= 1);
          CheckEntry e;
          if (asserted) {
            e = threshold_entry("coarse.1.102" + tag, "1.102", ratio, opts_.coarse_factor, raw);
          } else {
            e = report_entry("coarse.1.102" + tag, "1.102", ratio,
                             d_ == 2 && p == 0 ? "d = 2, p = 0: constant grows like log L'" : "not asserted for this (d, p)",
                             raw);
          }
          e.runtime = elapsed(t0);
          report.add(std::move(e));
          const double Bc = b14.normalize(coarse.sup(jc, p), Lp, jc, m);
          const double Bf = b14.normalize(fine.sup(jf, p), L_, jf, m);
          report.add(report_entry("coarse.1.14" + tag, "1.14", std::max(Bc / Bf, Bf / Bc), "regularity constants, reported",
                                  {{"coarse", Bc}, {"fine", Bf}}));
        }
      }
    }
  }

  void fourier() {
    timed([&] {
      const DecayFit fit = decay_fit(dec_.spec, dec_.remainder.symbol, N_, {0, 1, 2});
      bool adequate = true;
      json per = json::object();
      for (const auto& [l, ok] : fit.adequate) {
        per[std::to_string(l)] = ok;
        adequate = adequate && ok;
      }
      CheckEntry e;
      e.check_id = "fourier.decay_fit";
      e.bound = "2.273";
      e.raw = {{"used", fit.used}, {"excluded", fit.excluded}};
      e.normalized = {{"value", fit.k}, {"threshold", 3.0}};
      e.fit = {{"C", fit.C}, {"k", fit.k}, {"residual", fit.residual}, {"majorizes", fit.majorizes}, {"adequate", per}};
      e.status = fit.k >= 3.0 && adequate && fit.majorizes ? Status::pass : Status::fail;
      if (e.status == Status::fail) e.reason = "k < 3, inadequate for some order, or envelope not majorizing";
      return e;
    });
    {
      Coord q(d_, 0);
      q[0] = dec_.spec.half();
      const double edge = std::abs(dec_.remainder.symbol[dec_.spec.index(q)]);
      const double g0 = std::abs(dec_.remainder.symbol[0]);
      report.add(threshold_entry("fourier.edge", "2.273", edge / g0, 1e-10, {{"edge", edge}, {"zero", g0}}));
    }
    timed([&] {
      const TorusField& f = dec_.pieces.front().kernel;
      const ComplexField a = dft(forward_diff(f, MultiIndex::axis(d_, 0)));
      const ComplexField b = dft(f);
      const MomentumGrid grid(dec_.spec);
      double worst = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < a.values.size(); ++i) {
        const Complex mult = std::polar(1.0, grid.momentum(i)[0]) - 1.0;
        worst = std::max(worst, std::abs(a.values[i] - mult * b.values[i]));
        scale = std::max(scale, std::abs(b.values[i]));
      }
      return threshold_entry("fourier.multiplier", "2.275", worst / scale, 1e-13);
    });
  }

  const Decomposition& dec_;
  const SuiteOptions& opts_;
  int d_, L_, N_;
  double alpha_, m2_;
  std::map<std::tuple<int, double, int, int>, ScaleSeries> series_;
  std::optional<Decomposition> dm2_, plus_, minus_;
};

}  // namespace

VerificationReport sweep_continuity(const std::vector<Decomposition>& decs) {
  VerificationReport r;
  if (decs.size() < 2) throw std::invalid_argument("continuity needs at least two decompositions");
  const Decomposition& ref = decs.front();
  const int d = ref.spec.d(), L = ref.spec.L(), N = ref.spec.N();
  const double alpha = ref.params.alpha;
  for (const auto& dec : decs) {
    if (!(dec.spec == ref.spec) || dec.params.alpha != alpha) throw std::invalid_argument("decompositions differ in torus or alpha");
    if (!dec.dm2_remainder) throw std::invalid_argument("continuity needs decompositions built with mass derivatives");
  }
  std::vector<ContinuityPair> pairs;
  for (std::size_t a = 0; a < decs.size(); ++a)
    for (std::size_t b = a + 1; b < decs.size(); ++b) pairs.push_back({decs[a].params.m2, decs[b].params.m2});
  auto find = [&](double m) -> const Decomposition& {
    for (const auto& dec : decs)
      if (dec.params.m2 == m) return dec;
    throw std::out_of_range("mass not in sweep");
  };
  const double Ld = static_cast<double>(L);

  if (alpha > 1.0 && alpha < 2.0) {
    const double e = (2.0 - alpha) / alpha;
    for (int j = 0; j < N; ++j) {
      for (int l : {0, 1}) {
        const BoundSpec b = BoundSpec::mass_derivative(d, alpha, l);
        double c = 0.0;
        for (const auto& dec : decs) c = std::max(c, b.normalize(sup_diff(dec.dm2_pieces[j].kernel, l), L, j, dec.params.m2));
        auto diff = [&](double m1, double m2) {
          TorusField f = find(m1).pieces[j].kernel;
          f -= find(m2).pieces[j].kernel;
          return sup_diff(f, l);
        };
        auto modulus = [&](double m1, double m2) {
          return std::pow(Ld, -j * (d - 2.0) - l * j) * std::abs(std::pow(m1, e) - std::pow(m2, e));
        };
        for (auto& entry : continuity_check("continuity.1.103.torus.j" + std::to_string(j) + ".p" + std::to_string(l), pairs,
                                            diff, modulus, c * alpha / (2.0 - alpha)))
          r.add(std::move(entry));
      }
    }
  } else {
    r.add(report_entry("continuity.1.103.torus", "1.103", 0.0, "bounds apply only for 1 < alpha < 2"));
  }
  for (int l : {0, 1}) {
    const BoundSpec b = BoundSpec::remainder_derivative(d, alpha, l);
    double c = 0.0;
    for (const auto& dec : decs) c = std::max(c, b.normalize(sup_diff(dec.dm2_remainder->field, l), L, N, dec.params.m2));
    auto diff = [&](double m1, double m2) {
      TorusField f = find(m1).remainder.field;
      f -= find(m2).remainder.field;
      return sup_diff(f, l);
    };
    auto modulus = [&](double m1, double m2) {
      return std::pow(Ld, -l * N) * std::pow(Ld, -(N + 1.0) * d) * std::abs(m1 - m2) / (m1 * m2);
    };
    for (auto& entry : continuity_check("continuity.1.105.l" + std::to_string(l), pairs, diff, modulus, c)) r.add(std::move(entry));
  }
  r.params = {{"d", d}, {"L", L}, {"N", N}, {"alpha", alpha}};
  std::vector<double> masses;
  for (const auto& dec : decs) masses.push_back(dec.params.m2);
  r.params["m2"] = masses;
  r.sort();
  return r;
}

VerificationReport run_suite(const Decomposition& dec, const std::set<std::string>& suites,
                             const SuiteOptions& opts) {
  for (const auto& s : suites)
    if (std::find(all_suites().begin(), all_suites().end(), s) == all_suites().end())
      throw std::invalid_argument("unknown suite: " + s);
  SuiteRunner runner(dec, opts);
  // fixed order so shared window series are built once
  for (const auto& s : all_suites())
    if (suites.count(s)) runner.run(s);
  VerificationReport& r = runner.report;
  r.params = {{"d", dec.spec.d()},       {"L", dec.spec.L()},           {"N", dec.spec.N()},
              {"alpha", dec.params.alpha}, {"m2", dec.params.m2},       {"rel_tol", dec.rule.rel_tol},
              {"schedule", dec.schedule.T}, {"suites", std::vector<std::string>(suites.begin(), suites.end())}};
  r.provenance = {{"quad_nodes", dec.quad_nodes},
                  {"quad_panel_width", dec.quad_panel_width},
                  {"quad_error", dec.quad_error},
                  {"window_n", opts.window.n},
                  {"window_n_ref", opts.window.n_ref},
                  {"collapse_factor", opts.collapse_factor},
                  {"coarse_factor", opts.coarse_factor},
                  {"eps_range_K", opts.eps_range_K}};
  r.sort();
  return std::move(r);
}

}  // namespace frd
