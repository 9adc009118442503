#include "frd/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace frd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": not a number: " + v);
  }
  if (used != v.size()) throw std::invalid_argument(key + ": not a number: " + v);
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long x;
  try {
    x = std::stol(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": not an integer: " + v);
  }
  if (used != v.size()) throw std::invalid_argument(key + ": not an integer: " + v);
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument(key + ": not a boolean: " + v);
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

}  // namespace

std::vector<std::string> RunConfig::problems() const {
  std::vector<std::string> p;
  if (d < 2) p.push_back("d must be >= 2");
  if (L < 3 || L % 2 == 0) p.push_back("L must be odd and >= 3");
  if (N < 2) p.push_back("N must be >= 2");
  if (!(alpha > 0.0 && alpha < 2.0)) p.push_back("alpha must lie in the open interval (0, 2)");
  if (!(m2 > 0.0) || !std::isfinite(m2)) p.push_back("m2 must be > 0: the torus resolvent is valid only when m ≠ 0");
  if (!(rel_tol > 0.0 && rel_tol < 1e-3)) p.push_back("rel_tol must lie in (0, 1e-3)");
  if (coarse_r < 1) p.push_back("coarse_r must be >= 1");
  for (int o : orders)
    if (o < 0 || o > 2) p.push_back("derivative orders must lie in 0..2");
  for (double m : sweep_m2)
    if (!(m > 0.0)) p.push_back("sweep masses must be > 0");
  if (workers < 0) p.push_back("workers must be >= 0");
  for (const auto& s : suites)
    if (std::find(all_suites().begin(), all_suites().end(), s) == all_suites().end()) p.push_back("unknown suite: " + s);
  if (!schedule.empty()) {
    if (static_cast<int>(schedule.size()) != N + 1) p.push_back("schedule must list N + 1 cut points");
    if (schedule.front() != 0) p.push_back("schedule must start at 0");
    for (std::size_t i = 1; i < schedule.size(); ++i)
      if (schedule[i] <= schedule[i - 1]) p.push_back("schedule must be strictly increasing");
  }
  if (p.empty()) {
    try {
      const TorusSpec s(d, L, N);
      if (!big && (L >= 9 || s.volume() > 200000))
        p.push_back("heavy fixture (L >= 9 or volume > 200000) needs --big");
    } catch (const std::exception& e) {
      p.push_back(e.what());
    }
  }
  return p;
}

void RunConfig::validate() const {
  const auto p = problems();
  if (p.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& s : p) msg += "\n  " + s;
  throw std::invalid_argument(msg);
}

QuadratureRule RunConfig::rule() const {
  QuadratureRule r;
  r.rel_tol = rel_tol;
  return r;
}

BlockSchedule RunConfig::block_schedule() const {
  return schedule.empty() ? BlockSchedule::standard(L, N) : BlockSchedule(schedule);
}

std::set<std::string> RunConfig::suite_set() const {
  if (!suites.empty()) return suites;
  return {all_suites().begin(), all_suites().end()};
}

json RunConfig::to_json() const {
  return {{"d", d},
          {"L", L},
          {"N", N},
          {"alpha", alpha},
          {"m2", m2},
          {"rel_tol", rel_tol},
          {"schedule", block_schedule().T},
          {"coarse_r", coarse_r},
          {"orders", orders}};
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int n = 0;
  while (std::getline(ss, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(n) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(n) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot read config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& v) {
  std::string key = raw_key;
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "d") cfg.d = static_cast<int>(to_long(key, v));
  else if (key == "L") cfg.L = static_cast<int>(to_long(key, v));
  else if (key == "N") cfg.N = static_cast<int>(to_long(key, v));
  else if (key == "alpha") cfg.alpha = to_double(key, v);
  else if (key == "m2") cfg.m2 = to_double(key, v);
  else if (key == "rel_tol") cfg.rel_tol = to_double(key, v);
  else if (key == "out") cfg.out = v;
  else if (key == "coarse_r") cfg.coarse_r = static_cast<int>(to_long(key, v));
  else if (key == "big") cfg.big = to_bool(key, v);
  else if (key == "workers") cfg.workers = static_cast<int>(to_long(key, v));
  else if (key == "suites") {
    cfg.suites.clear();
    for (const auto& s : split_list(v))
      if (s != "all") cfg.suites.insert(s);
  } else if (key == "schedule") {
    cfg.schedule.clear();
    for (const auto& s : split_list(v)) cfg.schedule.push_back(to_long(key, s));
  } else if (key == "orders") {
    cfg.orders.clear();
    for (const auto& s : split_list(v)) cfg.orders.push_back(static_cast<int>(to_long(key, s)));
  } else if (key == "sweep_m2") {
    cfg.sweep_m2.clear();
    for (const auto& s : split_list(v)) cfg.sweep_m2.push_back(to_double(key, s));
  } else {
    throw std::invalid_argument("unknown config key: " + raw_key);
  }
}

void write_decomposition(const Decomposition& dec, const RunConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  json pieces = json::array();
  for (const auto& pc : dec.pieces) {
    const std::string file = "piece_" + std::to_string(pc.j) + ".csv";
    std::ofstream os(dir / file);
    write_csv(os, pc.kernel);
    const Norms n = norms(pc.kernel);
    pieces.push_back({{"j", pc.j},
                      {"Ta", pc.Ta},
                      {"Tb", pc.Tb},
                      {"file", file},
                      {"sup", n.sup},
                      {"l1", n.l1},
                      {"exact_range", pc.ranges.exact},
                      {"resolvable", pc.ranges.resolvable},
                      {"eps_range_l1", pc.ranges.eps_l1},
                      {"eps_range_l2", pc.ranges.eps_l2},
                      {"eps_range_linf", pc.ranges.eps_linf}});
  }
  {
    std::ofstream os(dir / "remainder.csv");
    write_csv(os, dec.remainder.field);
  }
  const Norms rn = norms(dec.remainder.field);
  json m;
  m["config"] = cfg.to_json();
  m["schedule"] = dec.schedule.T;
  m["tolerances"] = {{"rel_tol", dec.rule.rel_tol},
                     {"gauss_order", dec.rule.order},
                     {"window", dec.rule.window},
                     {"quad_error", dec.quad_error},
                     {"quad_nodes", dec.quad_nodes},
                     {"quad_panel_width", dec.quad_panel_width}};
  m["pieces"] = std::move(pieces);
  m["remainder"] = {{"file", "remainder.csv"}, {"sup", rn.sup}, {"l1", rn.l1}};
  m["exact_sup"] = norms(dec.exact).sup;
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

json read_manifest(const fs::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw std::invalid_argument("no manifest.json in " + dir.string());
  return json::parse(is);
}

RunConfig config_from_manifest(const json& manifest) {
  const json& c = manifest.at("config");
  RunConfig cfg;
  cfg.d = c.at("d");
  cfg.L = c.at("L");
  cfg.N = c.at("N");
  cfg.alpha = c.at("alpha");
  cfg.m2 = c.at("m2");
  cfg.rel_tol = c.at("rel_tol");
  cfg.schedule = c.at("schedule").get<std::vector<long>>();
  cfg.coarse_r = c.value("coarse_r", 2);
  cfg.orders = c.value("orders", std::vector<int>{0, 1, 2});
  return cfg;
}

double stored_kernel_defect(const Decomposition& dec, const fs::path& dir) {
  const json m = read_manifest(dir);
  double worst = 0.0;
  auto compare = [&](const std::string& file, const TorusField& ref) {
    std::ifstream is(dir / file);
    if (!is) throw std::invalid_argument("missing kernel file " + file);
    const TorusField stored = read_csv(is, dec.spec);
    const double sup = norms(ref).sup;
    for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(stored[i] - ref[i]) / sup);
  };
  for (const auto& p : m.at("pieces")) compare(p.at("file"), dec.pieces.at(p.at("j").get<int>()).kernel);
  compare(m.at("remainder").at("file"), dec.remainder.field);
  return worst;
}

void write_report(const VerificationReport& r, const fs::path& dir, const std::string& stem) {
  fs::create_directories(dir);
  write_text(dir / (stem + ".json"), r.to_json(false).dump(2) + "\n");
  write_text(dir / (stem + ".csv"), r.to_csv());
  std::ostringstream t;
  t << "check_id,runtime\n";
  char buf[32];
  for (const auto& e : r.entries) {
    std::snprintf(buf, sizeof buf, "%.6f", e.runtime);
    t << e.check_id << ',' << buf << '\n';
  }
  write_text(dir / (stem + "_timings.csv"), t.str());
}

}  // namespace frd
