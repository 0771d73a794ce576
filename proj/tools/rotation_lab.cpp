// rotation-lab: command-line front end.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rotlab/bohr.hpp"
#include "rotlab/cfrac.hpp"
#include "rotlab/correlations.hpp"
#include "rotlab/experiments.hpp"
#include "rotlab/ostrowski.hpp"
#include "rotlab/sieve.hpp"

using namespace rotlab;

namespace {

enum Exit { kOk = 0, kChecksFailed = 1, kUnknown = 2, kPrecision = 3, kBudget = 4, kInput = 5 };

struct Common {
  std::string alpha = "sqrt2";
  std::uint64_t x = 1000;
  std::vector<std::string> alphas;
  std::vector<std::uint64_t> xs;
  std::vector<unsigned> ks;
  std::string roughness;
  std::uint64_t z = 0;
  unsigned k = 2;
  std::string rect = "-1:1";
  double rho = 1e-2;
  std::vector<std::uint64_t> mod;
  std::string out;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

RoughnessSpec roughness_of(const Common& c) {
  if (!c.roughness.empty()) return RoughnessSpec::parse(c.roughness);
  return RoughnessSpec::parse("fixed:" + std::to_string(c.z == 0 ? 1 : c.z));
}

Rect rect_of(const Common& c) {
  Rect r = parse_rect(c.rect);
  if (r.size() == 1 && c.k > 2) r.assign(c.k - 1, r.front());
  if (r.size() + 1 != c.k && c.k != 2) throw PreconditionError("--rect needs k - 1 sides");
  return r;
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
  if (!f) throw Error("cannot write " + name);
  f << text;
}

int cmd_cf(const Common& c, std::size_t depth) {
  const auto cf = ContinuedFraction::expand(parse_alpha(c.alpha), depth);
  std::printf("alpha %s\n", cf.alpha().canonical().c_str());
  std::printf("k,a,p,q,delta\n");
  for (std::size_t i = 0; i <= cf.depth(); ++i) {
    std::printf("%zu,%llu,%s,%s,%s\n", i, static_cast<unsigned long long>(cf.a(i)), cf.p(i).get_str().c_str(),
                cf.q(i).get_str().c_str(), cf.delta(i).to_string(20).c_str());
  }
  return kOk;
}

int cmd_ostrowski(const Common& c, std::size_t depth, const std::string& real) {
  const auto cf = ContinuedFraction::expand(parse_alpha(c.alpha), depth);
  if (!real.empty()) {
    const auto r = encode_real(cf, std::stod(real), cf.depth() - 1);
    std::printf("%s\n", format_digits(r.digits).c_str());
    return kOk;
  }
  const auto digits = encode_int(cf, c.x);
  std::printf("%s\n", format_digits(digits).c_str());
  const auto phase = ostrowski_phase(cf, digits);
  std::printf("phase %s\n", phase.to_string(20).c_str());
  return kOk;
}

int cmd_bohr(const Common& c, bool at_one) {
  EnumerateOptions opt;
  opt.workers = c.workers;
  const auto iv = at_one ? BohrInterval::at_one(c.rho) : BohrInterval::at_zero(c.rho);
  const auto b = bohr_enumerate(parse_alpha(c.alpha), c.x, iv, opt);
  std::printf("size %zu ratio %.6f boundary %llu uncertain %llu\n", b.size(), b.cardinality_ratio(),
              static_cast<unsigned long long>(b.boundary_hits), static_cast<unsigned long long>(b.uncertain));
  std::string csv = std::string(kResidueCsvHeader) + "\n";
  for (auto d : c.mod) csv += residue_profile(b.members, d).csv_rows();
  if (!c.mod.empty()) {
    if (c.out.empty()) {
      std::fputs(csv.c_str(), stdout);
    } else {
      write_file(c.out, "residues.csv", csv);
    }
  }
  return b.uncertain == 0 ? kOk : kPrecision;
}

int cmd_sieve(const Common& c, const std::vector<std::int64_t>& h, bool list) {
  const auto spec = roughness_of(c);
  if (!h.empty()) {
    const auto t = tuple_count(c.x, spec.eval(c.x), h);
    const std::string csv = std::string(kTupleCsvHeader) + "\n" + t.csv_row();
    if (c.out.empty()) {
      std::fputs(csv.c_str(), stdout);
    } else {
      write_file(c.out, "tuples.csv", csv);
    }
    return kOk;
  }
  const auto r = rough_enumerate(c.x, spec, RoughMode::triangular);
  std::printf("x %llu z %llu phi %llu\n", static_cast<unsigned long long>(c.x), static_cast<unsigned long long>(r.z),
              static_cast<unsigned long long>(r.phi()));
  if (list) {
    std::string csv = "n\n";
    for (auto n : r.members) csv += std::to_string(n) + "\n";
    if (c.out.empty()) {
      std::fputs(csv.c_str(), stdout);
    } else {
      write_file(c.out, "rough.csv", csv);
    }
  }
  return kOk;
}

int cmd_correlate(const Common& c) {
  const auto pts = build_points(parse_alpha(c.alpha), c.x, roughness_of(c), RoughMode::triangular);
  CorrelationOptions opt;
  opt.workers = c.workers;
  const auto r = r_k(pts, rect_of(c), opt);
  const std::string csv = std::string(kCorrelationCsvHeader) + "\n" + r.csv_row();
  if (c.out.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_file(c.out, "correlations.csv", csv);
  }
  return kOk;
}

int cmd_gaps(const Common& c, bool wrap, unsigned bins, double t_max) {
  const auto pts = build_points(parse_alpha(c.alpha), c.x, roughness_of(c), RoughMode::triangular);
  const auto h = gap_histogram(pts, bins, t_max, wrap);
  std::printf("N %zu KS %.6f\n", pts.size(), h.ks);
  const std::string csv = std::string(kGapCsvHeader) + "\n" + h.csv_rows();
  if (c.out.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_file(c.out, "gaps.csv", csv);
  }
  return kOk;
}

int cmd_list(bool as_json) {
  if (as_json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : list_experiments()) j.push_back({{"name", e.name}, {"description", e.description}});
    std::printf("%s\n", j.dump(2).c_str());
  } else {
    for (const auto& e : list_experiments()) std::printf("%-20s %s\n", e.name.c_str(), e.description.c_str());
  }
  return kOk;
}

int cmd_run(const std::string& name, const std::string& config_path, const CLI::App& run, const Common& c) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) throw PreconditionError("cannot read config " + config_path);
    std::stringstream ss;
    ss << f.rdbuf();
    cfg = parse_config(ss.str());
    if (!name.empty() && name != cfg.name) throw PreconditionError("experiment name differs from the config");
  } else {
    cfg = default_config(name);
  }
  if (run.count("--alpha")) cfg.alpha = c.alphas;
  if (run.count("--x")) cfg.x = c.xs;
  if (run.count("--roughness")) cfg.roughness = c.roughness;
  if (run.count("--z")) cfg.roughness = "fixed:" + std::to_string(c.z);
  if (run.count("--k")) cfg.k = c.ks;
  if (run.count("--rect")) cfg.rect = {c.rect};
  if (run.count("--rho")) cfg.rho = c.rho;
  if (run.count("--mod")) cfg.d = c.mod;
  if (run.count("--out")) cfg.out = c.out;
  if (run.count("--seed")) cfg.seed = c.seed;
  if (run.count("--workers")) cfg.workers = c.workers;
  const auto result = run_experiment(cfg);
  for (const auto& ch : result.checks) {
    std::printf("%s %s value=%.6g expect %s\n", ch.pass ? "PASS" : "FAIL", ch.name.c_str(), ch.value,
                ch.expect.c_str());
  }
  std::printf("summary %s\n", (std::filesystem::path(cfg.out) / "summary.json").string().c_str());
  return result.pass() ? kOk : kChecksFailed;
}

void add_common(CLI::App* app, Common& c, bool roughness, bool lists = false) {
  const char* alpha_help = "golden | sqrt2 | surd:P,D,Q | cf:a0;a1,...|period:b1,... | cf-poly:d";
  if (lists) {
    app->add_option("--alpha", c.alphas, alpha_help);
    app->add_option("--x", c.xs, "upper ends x_1,x_2,...")->delimiter(',');
  } else {
    app->add_option("--alpha", c.alpha, alpha_help);
    app->add_option("--x", c.x, "upper end of the range");
  }
  app->add_option("--workers", c.workers, "worker threads");
  app->add_option("--out", c.out, "output directory");
  if (roughness) {
    app->add_option("--roughness", c.roughness, "paper | fixed:z | power:c");
    app->add_option("--z", c.z, "shorthand for fixed:z");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotation-lab: irrational rotations of rough numbers"};
  app.require_subcommand(1);
  Common c;
  std::size_t depth = 20;
  std::string real;
  bool at_one = false, list = false, wrap = false, as_json = false;
  std::vector<std::int64_t> h;
  unsigned bins = 40;
  double t_max = 4.0;
  std::string name, config_path;

  auto* cf = app.add_subcommand("cf", "continued fraction data");
  add_common(cf, c, false);
  cf->add_option("--k", depth, "expansion depth");

  auto* ost = app.add_subcommand("ostrowski", "Ostrowski digits of --x (or of a real --real)");
  add_common(ost, c, false);
  ost->add_option("--k", depth, "expansion depth");
  ost->add_option("--real", real, "real number in [-1, 1) to expand");

  auto* bohr = app.add_subcommand("bohr", "Bohr set {n <= x : {n alpha} in [0, rho)}");
  add_common(bohr, c, false);
  bohr->add_option("--rho", c.rho, "interval length");
  bohr->add_flag("--at-one", at_one, "use [1 - rho, 1)");
  bohr->add_option("--mod", c.mod, "moduli for residue profiles")->delimiter(',');

  auto* sieve = app.add_subcommand("sieve", "rough numbers and tuple counts");
  add_common(sieve, c, true);
  sieve->add_option("--offsets", h, "tuple offsets h_1,...")->delimiter(',');
  sieve->add_flag("--list", list, "emit the rough numbers");

  auto* corr = app.add_subcommand("correlate", "R_k of {a alpha} over rough a <= x");
  add_common(corr, c, true);
  corr->add_option("--k", c.k, "correlation order");
  corr->add_option("--rect", c.rect, "lo:hi[,lo:hi...]");

  auto* gaps = app.add_subcommand("gaps", "scaled gap histogram");
  add_common(gaps, c, true);
  gaps->add_flag("--wrap", wrap, "include the gap across 0");
  gaps->add_option("--bins", bins, "bin count");
  gaps->add_option("--t-max", t_max, "upper histogram edge");

  auto* exp = app.add_subcommand("experiment", "named experiments");
  exp->require_subcommand(1);
  auto* exp_list = exp->add_subcommand("list", "list experiments");
  exp_list->add_flag("--json", as_json, "JSON array");
  auto* exp_run = exp->add_subcommand("run", "run an experiment");
  exp_run->add_option("name", name, "experiment name");
  exp_run->add_option("--config", config_path, "JSON config (schema_version 1)");
  add_common(exp_run, c, true, true);
  exp_run->add_option("--k", c.ks, "correlation orders")->delimiter(',');
  exp_run->add_option("--rect", c.rect, "lo:hi[,lo:hi...]");
  exp_run->add_option("--rho", c.rho, "interval length");
  exp_run->add_option("--mod", c.mod, "moduli")->delimiter(',');
  exp_run->add_option("--seed", c.seed, "64-bit seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cf) return cmd_cf(c, depth);
    if (*ost) return cmd_ostrowski(c, depth, real);
    if (*bohr) return cmd_bohr(c, at_one);
    if (*sieve) return cmd_sieve(c, h, list);
    if (*corr) return cmd_correlate(c);
    if (*gaps) return cmd_gaps(c, wrap, bins, t_max);
    if (*exp_list) return cmd_list(as_json);
    if (*exp_run) {
      if (name.empty() && config_path.empty()) throw PreconditionError("experiment run needs a name or --config");
      return cmd_run(name, config_path, *exp_run, c);
    }
  } catch (const UnknownExperiment& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUnknown;
  } catch (const PrecisionError& e) {
    std::fprintf(stderr, "precision audit failed: %s\n", e.what());
    return kPrecision;
  } catch (const BudgetError& e) {
    std::fprintf(stderr, "budget exceeded: %s\n", e.what());
    return kBudget;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInput;
  }
  return kOk;
}
