// frd: build fractional finite-range decompositions and check their bounds.
//
// Exit codes: 0 pass, 1 verification failure, 2 usage or configuration error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "frd/alpha.hpp"
#include "frd/io.hpp"
#include "frd/kernels.hpp"
#include "frd/spectral.hpp"
#include "frd/verify.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flag values as given on the command line, keyed like the config file.
struct FlagSet {
  std::map<std::string, std::string> values;
  std::string config;

  void attach(CLI::App* app) {
    static const std::pair<const char*, const char*> flags[] = {
        {"d", "lattice dimension (>= 2)"},
        {"L", "block factor (odd, >= 3)"},
        {"N", "number of pieces (>= 2)"},
        {"alpha", "fractional order in (0, 2)"},
        {"m2", "mass squared (> 0)"},
        {"rel-tol", "quadrature relative tolerance"},
        {"out", "output directory"},
        {"suites", "comma list of suites, or all"},
        {"schedule", "comma list of cut points T_0..T_N"},
        {"coarse-r", "coarse-graining factor"},
        {"orders", "comma list of derivative orders"},
        {"workers", "worker threads (default: FRD_WORKERS or all cores)"},
    };
    for (const auto& [name, help] : flags) app->add_option(std::string("--") + name, values[name], help);
    app->add_option("--config", config, "key = value config file");
    app->add_flag("--big", big, "allow heavy fixtures (L >= 9)");
  }

  frd::RunConfig resolve(const CLI::App* app) const {
    frd::RunConfig cfg;
    try {
      if (!config.empty())
        for (const auto& [k, v] : frd::read_config_file(config)) frd::apply_setting(cfg, k, v);
      for (const auto& [k, v] : values)
        if (app->count("--" + k)) frd::apply_setting(cfg, k, v);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (big) cfg.big = true;
    if (!app->count("--workers"))
      if (const char* env = std::getenv("FRD_WORKERS")) {
        try {
          frd::apply_setting(cfg, "workers", env);
        } catch (const std::invalid_argument& e) {
          throw UsageError(std::string("FRD_WORKERS: ") + e.what());
        }
      }
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (cfg.workers > 0) frd::set_worker_count(cfg.workers);
    return cfg;
  }

  bool big = false;
};

frd::SuiteOptions suite_options(const frd::RunConfig& cfg) {
  frd::SuiteOptions o;
  o.orders = cfg.orders;
  o.coarse_r = cfg.coarse_r;
  return o;
}

void print_summary(const frd::VerificationReport& r, const std::filesystem::path& where) {
  using frd::Status;
  std::printf("%zu pass, %zu fail, %zu not-resolvable, %zu report -> %s\n", r.count(Status::pass),
              r.count(Status::fail), r.count(Status::not_resolvable), r.count(Status::report), where.string().c_str());
  for (const auto& e : r.entries)
    if (e.status == Status::fail) std::printf("  FAIL %s %s\n", e.check_id.c_str(), e.reason.c_str());
}

int cmd_decompose(const frd::RunConfig& cfg) {
  const frd::Decomposition dec = frd::assemble(cfg.spec(), cfg.params(), cfg.rule(), cfg.block_schedule());
  frd::write_decomposition(dec, cfg, cfg.out);
  std::printf("%zu pieces + remainder, %zu spectral nodes, %.2f s -> %s\n", dec.pieces.size(), dec.quad_nodes,
              dec.build_seconds, cfg.out.string().c_str());
  return kPass;
}

int cmd_verify(frd::RunConfig cfg, const std::string& from) {
  std::optional<std::filesystem::path> stored;
  if (!from.empty()) {
    frd::RunConfig m;
    try {
      m = frd::config_from_manifest(frd::read_manifest(from));
    } catch (const std::exception& e) {
      throw UsageError(std::string("cannot load decomposition: ") + e.what());
    }
    m.suites = cfg.suites;
    m.out = cfg.out;
    m.big = cfg.big;
    m.workers = cfg.workers;
    cfg = m;
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    stored = from;
  }
  const frd::Decomposition dec = frd::assemble(cfg.spec(), cfg.params(), cfg.rule(), cfg.block_schedule());
  frd::VerificationReport r = frd::run_suite(dec, cfg.suite_set(), suite_options(cfg));
  if (stored) {
    frd::CheckEntry e;
    e.check_id = "io.stored_kernels";
    e.bound = "1.2";
    const double defect = frd::stored_kernel_defect(dec, *stored);
    e.normalized = {{"value", defect}, {"threshold", 1e-14}};
    e.status = defect <= 1e-14 ? frd::Status::pass : frd::Status::fail;
    r.add(std::move(e));
    r.sort();
  }
  frd::write_report(r, cfg.out, "report");
  print_summary(r, cfg.out / "report.json");
  return r.passed() ? kPass : kFail;
}

int cmd_sweep(const frd::RunConfig& base) {
  std::set<std::string> suites = base.suites;
  if (suites.empty()) suites = {"range", "psd", "reconstruct", "remainder", "fourier"};
  std::vector<frd::Decomposition> decs;
  bool ok = true;
  for (double m : base.sweep_m2) {
    frd::RunConfig cfg = base;
    cfg.m2 = m;
    frd::AssembleOptions o;
    o.mass_derivatives = true;
    decs.push_back(frd::assemble(cfg.spec(), cfg.params(), cfg.rule(), cfg.block_schedule(), o));
    char tag[64];
    std::snprintf(tag, sizeof tag, "m2=%g", m);
    const frd::VerificationReport r = frd::run_suite(decs.back(), suites, suite_options(cfg));
    frd::write_report(r, base.out / tag, "report");
    print_summary(r, base.out / tag / "report.json");
    ok = ok && r.passed();
  }
  if (decs.size() >= 2) {
    const frd::VerificationReport c = frd::sweep_continuity(decs);
    frd::write_report(c, base.out, "continuity");
    print_summary(c, base.out / "continuity.json");
    ok = ok && c.passed();
  }
  return ok ? kPass : kFail;
}

// Stieltjes oracle grid plus a harness check of every bound normalization.
int cmd_selftest(const frd::RunConfig& cfg) {
  const frd::QuadratureRule rule = cfg.rule();
  double worst = 0.0;
  int n = 0;
  for (double alpha : {0.5, 1.0, 1.5, 1.8}) {
    for (double m2 : {0.0, 0.1, 1.0, 10.0}) {
      const frd::SpectralParams P(alpha, m2);
      for (int k = 0; k < 13; ++k) {
        const double lambda = std::pow(10.0, -3.0 + 0.5 * k);
        worst = std::max(worst, frd::stieltjes_check(lambda, P, rule).rel_err);
        ++n;
      }
    }
  }
  const bool stieltjes_ok = worst <= 1e-8;
  std::printf("stieltjes: %d points, max rel err %.3g (%s)\n", n, worst, stieltjes_ok ? "pass" : "fail");

  // values saturating each normalization must collapse to ratio 1
  bool harness_ok = true;
  const int d = 2, L = 3;
  const double alpha = 1.5, m2 = 0.01;
  const std::vector<int> js{1, 2, 3, 4};
  for (const auto& b : {frd::BoundSpec::regularity(d, alpha, 1), frd::BoundSpec::mass_derivative(d, alpha, 2),
                        frd::BoundSpec::remainder(d, alpha, 1), frd::BoundSpec::remainder_threshold(d, alpha, 0),
                        frd::BoundSpec::remainder_derivative(d, alpha, 1)}) {
    std::vector<double> v;
    for (int j : js) v.push_back(3.0 / b.normalize(1.0, L, j, m2));
    const frd::Collapse c = frd::scaling_collapse(js, v, b, L, m2);
    const bool ok = std::abs(c.ratio - 1.0) <= 1e-12;
    harness_ok = harness_ok && ok;
    std::printf("normalization %s: ratio %.15g (%s)\n", b.id.c_str(), c.ratio, ok ? "pass" : "fail");
  }
  return stieltjes_ok && harness_ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-range decompositions of fractional lattice resolvents"};
  app.require_subcommand(1);

  FlagSet f_dec, f_ver, f_sweep, f_self;
  CLI::App* dec = app.add_subcommand("decompose", "build a decomposition and write it to --out");
  f_dec.attach(dec);
  CLI::App* ver = app.add_subcommand("verify", "run bound suites on a built or stored decomposition");
  f_ver.attach(ver);
  std::string from;
  ver->add_option("--from", from, "decomposition directory written by decompose");
  CLI::App* sweep = app.add_subcommand("sweep", "run suites over an m2 grid plus a combined continuity report");
  f_sweep.attach(sweep);
  std::string sweep_grid;
  sweep->add_option("--sweep-m2", sweep_grid, "comma list of m2 values");
  CLI::App* self = app.add_subcommand("selftest", "Stieltjes oracle grid and normalization harness");
  f_self.attach(self);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (dec->parsed()) return cmd_decompose(f_dec.resolve(dec));
    if (ver->parsed()) return cmd_verify(f_ver.resolve(ver), from);
    if (sweep->parsed()) {
      frd::RunConfig cfg = f_sweep.resolve(sweep);
      if (!sweep_grid.empty()) {
        try {
          frd::apply_setting(cfg, "sweep_m2", sweep_grid);
          cfg.validate();
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
      }
      return cmd_sweep(cfg);
    }
    if (self->parsed()) return cmd_selftest(f_self.resolve(self));
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failed: %s\n", e.what());
    return kFail;
  }
  return kUsage;
}
