#include "rotlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rotlab/bohr.hpp"
#include "rotlab/cfrac.hpp"
#include "rotlab/correlations.hpp"
#include "rotlab/sieve.hpp"
#include "rotlab/walk.hpp"

namespace rotlab {

using nlohmann::json;

namespace {

const std::vector<ExperimentInfo> kExperiments = {
    {"thm11_correlations", "R_k of a rough rotation against vol(R)"},
    {"thm11_gaps", "scaled nearest-neighbour gaps against Exp(1)"},
    {"thm12_blowup", "R_2 along convergent-aligned scales, with a badly approximable control"},
    {"thm13_residues", "Bohr set residue classes mod d"},
    {"lemma31_tuples", "rough k-tuple counts against the singular series"},
    {"keylemma_average", "singular series averaged over a Bohr set"},
    {"sandwich_check", "cylinder sets bracketing a Bohr set"},
    {"walk_mixing", "total variation of a random walk on Z_d"},
};

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

class Run {
 public:
  explicit Run(const ExperimentConfig& c) : result_{} {
    result_.config = c;
    std::filesystem::create_directories(c.out);
  }

  void write(const std::string& file, const std::string& header, const std::string& rows) {
    std::ofstream f(std::filesystem::path(result_.config.out) / file, std::ios::binary);
    if (!f) throw Error("cannot write " + file);
    f << header << '\n' << rows;
    result_.files.push_back(file);
  }

  void check(std::string name, bool pass, double value, std::string expect) {
    result_.checks.push_back({std::move(name), pass, value, std::move(expect)});
  }

  void band(const std::string& name, double value, double lo, double hi) {
    check(name, value >= lo && value <= hi, value, "[" + fmt(lo) + ", " + fmt(hi) + "]");
  }

  void audit(const BohrSet& b) {
    result_.boundary_hits += b.boundary_hits;
    result_.uncertain += b.uncertain;
  }

  const ExperimentConfig& cfg() const { return result_.config; }
  ExperimentResult& result() { return result_; }

 private:
  ExperimentResult result_;
};

std::uint64_t max_x(const ExperimentConfig& c) { return *std::max_element(c.x.begin(), c.x.end()); }

void correlations(Run& run) {
  const auto& c = run.cfg();
  const auto spec = RoughnessSpec::parse(c.roughness);
  const SpfTable table(max_x(c), kDefaultSegment, c.workers);
  std::string rows;
  for (const auto& a : c.alpha) {
    for (auto x : c.x) {
      const auto pts = build_points(parse_alpha(a), x, spec, RoughMode::triangular, &table);
      for (const auto& text : c.rect) {
        CorrelationOptions opt;
        opt.workers = c.workers;
        const auto r = r_k(pts, parse_rect(text), opt);
        rows += r.csv_row();
        const double tol = r.k == 2 ? 0.15 : 0.2;
        run.band("R" + std::to_string(r.k) + "[" + text + "] " + a + " x=" + std::to_string(x), r.value,
                 r.volume * (1 - tol), r.volume * (1 + tol));
      }
    }
  }
  run.write("correlations.csv", kCorrelationCsvHeader, rows);
}

void gaps(Run& run) {
  const auto& c = run.cfg();
  const auto spec = RoughnessSpec::parse(c.roughness);
  const SpfTable table(max_x(c), kDefaultSegment, c.workers);
  for (const auto& a : c.alpha) {
    for (auto x : c.x) {
      const auto pts = build_points(parse_alpha(a), x, spec, RoughMode::triangular, &table);
      const auto h = gap_histogram(pts);
      const std::string tag = sanitize(a) + "_" + std::to_string(x);
      run.write("gaps_" + tag + ".csv", kGapCsvHeader, h.csv_rows());
      run.check("KS " + a + " x=" + std::to_string(x), h.ks < 0.1, h.ks, "< 0.1");
      // i.i.d. control of the same size, reported only
      const auto uni = gap_histogram(uniform_points(pts.size(), c.seed));
      run.write("gaps_uniform_" + tag + ".csv", kGapCsvHeader, uni.csv_rows());
    }
  }
}

void blowup(Run& run) {
  const auto& c = run.cfg();
  const auto spec = RoughnessSpec::parse(c.roughness);
  const double s = parse_rect(c.rect.front()).front().hi;
  const AlphaSpec target = parse_alpha(c.alpha.front());
  std::vector<std::uint64_t> xs;
  for (const auto& [k, x] : convergent_scales(target, spec, 1000, max_x(c))) xs.push_back(x);
  const auto scan = blowup_scan(target, spec, xs, s, c.workers);
  run.write("blowup_" + sanitize(c.alpha.front()) + ".csv", kScanCsvHeader, scan.csv_rows());
  run.check("max normalized R2 " + c.alpha.front(), scan.max_normalized > 3.0, scan.max_normalized, "> 3");
  for (std::size_t i = 1; i < c.alpha.size(); ++i) {
    const auto ctrl = blowup_scan(parse_alpha(c.alpha[i]), spec, xs, s, c.workers);
    run.write("blowup_" + sanitize(c.alpha[i]) + ".csv", kScanCsvHeader, ctrl.csv_rows());
    double lo = ctrl.rows.empty() ? 0.0 : 1e300, hi = 0.0;
    for (const auto& r : ctrl.rows) {
      lo = std::min(lo, r.normalized);
      hi = std::max(hi, r.normalized);
    }
    run.band("control min " + c.alpha[i], lo, 0.7, 1.3);
    run.band("control max " + c.alpha[i], hi, 0.7, 1.3);
  }
}

void residues(Run& run) {
  const auto& c = run.cfg();
  for (const auto& a : c.alpha) {
    std::vector<std::vector<double>> dev(c.d.size());
    for (auto x : c.x) {
      EnumerateOptions opt;
      opt.workers = c.workers;
      const auto b = bohr_enumerate(parse_alpha(a), x, BohrInterval::at_zero(c.rho), opt);
      run.audit(b);
      std::string rows;
      for (std::size_t i = 0; i < c.d.size(); ++i) {
        const auto p = residue_profile(b.members, c.d[i]);
        rows += p.csv_rows();
        dev[i].push_back(p.max_deviation());
      }
      run.write("residues_" + sanitize(a) + "_" + std::to_string(x) + ".csv", kResidueCsvHeader, rows);
    }
    for (std::size_t i = 0; i < c.d.size(); ++i) {
      const std::string tag = a + " d=" + std::to_string(c.d[i]);
      run.check("max deviation " + tag, dev[i].back() < 0.1, dev[i].back(), "< 0.1 at the largest x");
      run.check("deviation decreases " + tag, dev[i].back() <= dev[i].front(), dev[i].back(),
                "<= " + fmt(dev[i].front()));
    }
  }
}

void tuples(Run& run) {
  const auto& c = run.cfg();
  const std::uint64_t z = RoughnessSpec::parse(c.roughness).eval(max_x(c));
  std::string rows;
  const auto small = tuple_count(1000, 5, {6});
  rows += small.csv_row();
  run.check("x=1000 z=5 h=6 exact", small.exact == 199, static_cast<double>(small.exact), "199");
  run.check("x=1000 z=5 h=6 ratio", std::abs(small.ratio() - 1) < 0.005, small.ratio(), "within 0.5% of 1");
  const auto parity = tuple_count(5000, 2, {3});
  rows += parity.csv_row();
  run.check("parity obstruction", parity.exact == 0 && parity.predicted == 0.0, static_cast<double>(parity.exact),
            "exact = predicted = 0");
  const SpfTable table(max_x(c), kDefaultSegment, c.workers);
  for (auto x : c.x) {
    for (const std::vector<std::int64_t>& h : {std::vector<std::int64_t>{2}, {6}, {2, 6}}) {
      const auto t = tuple_count(x, std::min(z, x), h, &table);
      rows += t.csv_row();
      if (h.size() == 1 && h[0] == 2) {
        run.check("x=" + std::to_string(x) + " z=" + std::to_string(t.z) + " h=2 ratio",
                  std::abs(t.ratio() - 1) < 0.05, t.ratio(), "within 5% of 1");
      }
    }
  }
  run.write("tuples.csv", kTupleCsvHeader, rows);
}

void keylemma(Run& run) {
  const auto& c = run.cfg();
  const std::uint64_t z = RoughnessSpec::parse(c.roughness).eval(max_x(c));
  std::string rows;
  for (const auto& a : c.alpha) {
    for (auto x : c.x) {
      EnumerateOptions opt;
      opt.workers = c.workers;
      const auto b = bohr_enumerate(parse_alpha(a), x, BohrInterval::at_zero(c.rho), opt);
      run.audit(b);
      for (auto k : c.k) {
        const auto r = key_lemma_average(b.members, z, k);
        char buf[256];
        std::snprintf(buf, sizeof buf, "%u,%llu,%llu,%s,%.12f,%.12f,%.8f\n", k, static_cast<unsigned long long>(z),
                      static_cast<unsigned long long>(r.members), r.tuples.get_str().c_str(), r.average.get_d(),
                      r.normal.get_d(), r.ratio);
        rows += buf;
        const double tol = k == 2 ? 0.1 : 0.15;
        run.band("ratio k=" + std::to_string(k) + " " + a + " x=" + std::to_string(x), r.ratio, 1 - tol, 1 + tol);
      }
    }
  }
  run.write("keylemma.csv", "k,z,members,tuples,average,normal,ratio", rows);
}

void sandwich_check(Run& run) {
  const auto& c = run.cfg();
  std::string rows;
  for (const auto& a : c.alpha) {
    for (auto x : c.x) {
      const auto r = sandwich(parse_alpha(a), x, BohrInterval::at_zero(c.rho), c.l);
      for (const auto& p : r.s_minus) rows += a + "," + std::to_string(x) + ",minus,\"" + format_digits(p) + "\"\n";
      for (const auto& p : r.s_plus) rows += a + "," + std::to_string(x) + ",plus,\"" + format_digits(p) + "\"\n";
      const std::string tag = a + " x=" + std::to_string(x);
      run.check("inclusions " + tag, r.inclusions_hold(), r.inclusions_hold() ? 1.0 : 0.0, "S- within B within S+");
      const double frac = r.bohr_size == 0 ? 0.0 : static_cast<double>(r.symmetric_difference) / r.bohr_size;
      run.check("symmetric difference " + tag, frac <= 0.2, frac, "<= 0.2 |B|");
    }
  }
  run.write("sandwich.csv", "alpha,x,side,digits", rows);
}

void walk(Run& run) {
  const auto& c = run.cfg();
  const std::uint64_t steps = c.l;
  std::string rows;
  for (auto d : c.d) {
    const auto spec = WalkSpec::uniform_steps(d, {0, 1}, steps);
    const auto r = walk_distribution(spec, true);
    // dense transition-matrix power applied to theta
    std::vector<std::vector<double>> m(d, std::vector<double>(d, 0.0));
    for (std::uint64_t i = 0; i < d; ++i) {
      for (std::uint64_t s = 0; s < d; ++s) m[i][(i + s) % d] += spec.mu[s].get_d();
    }
    std::vector<double> p(d);
    for (std::uint64_t i = 0; i < d; ++i) p[i] = spec.theta[i].get_d();
    double worst = 0.0;
    bool bounded = true, monotone = true;
    for (std::uint64_t n = 0; n <= steps; ++n) {
      double tv = 0.0;
      for (auto v : p) tv += std::abs(v - 1.0 / static_cast<double>(d));
      tv /= 2;
      worst = std::max(worst, std::abs(tv - r.tv[n]));
      const double bound = 2 * std::pow(r.tau, static_cast<double>(n));
      bounded = bounded && r.tv[n] <= bound + 1e-15;
      if (n > 0) monotone = monotone && r.tv[n] <= r.tv[n - 1] + 1e-15;
      char buf[200];
      std::snprintf(buf, sizeof buf, "%llu,%llu,%.17g,%.17g,%.17g\n", static_cast<unsigned long long>(d),
                    static_cast<unsigned long long>(n), r.tv[n], tv, bound);
      rows += buf;
      std::vector<double> q(d, 0.0);
      for (std::uint64_t i = 0; i < d; ++i) {
        for (std::uint64_t j = 0; j < d; ++j) q[j] += p[i] * m[i][j];
      }
      p = q;
    }
    const std::string tag = "d=" + std::to_string(d);
    run.check("matrix oracle " + tag, worst <= 1e-12, worst, "<= 1e-12");
    run.check("TV <= 2 tau^n " + tag, bounded, r.tau, "tau = max |mu^(j)|");
    run.check("TV non-increasing " + tag, monotone, monotone ? 1.0 : 0.0, "monotone");
  }
  run.write("walk.csv", "d,n,tv,oracle,bound", rows);
}

template <typename T>
std::vector<T> one_or_many(const json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

}  // namespace

const std::vector<ExperimentInfo>& list_experiments() { return kExperiments; }

bool known_experiment(const std::string& name) {
  return std::any_of(kExperiments.begin(), kExperiments.end(), [&](const auto& e) { return e.name == name; });
}

ExperimentConfig default_config(const std::string& name) {
  if (!known_experiment(name)) throw UnknownExperiment("unknown experiment '" + name + "'");
  ExperimentConfig c;
  c.name = name;
  c.alpha = {"sqrt2"};
  c.x = {1000000};
  c.roughness = "fixed:30";
  c.k = {2};
  c.rect = {"-1:1"};
  c.rho = 2e-3;
  c.d = {2, 3, 5};
  c.l = 6;
  c.seed = 1;
  c.out = "out/" + name;
  if (name == "thm11_correlations") {
    c.k = {2, 3};
    c.rect = {"-1:1", "0:2", "-1:1,-1:1"};
  } else if (name == "thm12_blowup") {
    c.alpha = {"cf-poly:2", "sqrt2"};
    c.roughness = "paper";
  } else if (name == "thm13_residues") {
    c.alpha = {"golden", "sqrt2"};
    c.x = {10000, 1000000};
  } else if (name == "lemma31_tuples") {
    c.x = {100000};
  } else if (name == "keylemma_average") {
    c.k = {2, 3};
  } else if (name == "sandwich_check") {
    c.x = {100000};
    c.rho = 1e-3;
    c.l = 10;
  } else if (name == "walk_mixing") {
    c.d = {3};
    c.l = 30;
  }
  return c;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw PreconditionError("config must be a JSON object");
  static const std::set<std::string> fields{"schema_version", "experiment", "alpha", "x",    "roughness", "k",
                                            "rect",           "rho",        "d",     "l",    "seed",      "out",
                                            "workers"};
  for (const auto& [key, value] : j.items()) {
    if (!fields.count(key)) throw PreconditionError("unknown config field '" + key + "'");
  }
  if (!j.contains("schema_version") || j["schema_version"] != kConfigSchemaVersion) {
    throw PreconditionError("config needs schema_version 1");
  }
  if (!j.contains("experiment") || !j["experiment"].is_string()) throw PreconditionError("config needs experiment");
  ExperimentConfig c = default_config(j["experiment"].get<std::string>());
  try {
    if (j.contains("alpha")) c.alpha = one_or_many<std::string>(j["alpha"]);
    if (j.contains("x")) c.x = one_or_many<std::uint64_t>(j["x"]);
    if (j.contains("roughness")) c.roughness = j["roughness"].get<std::string>();
    if (j.contains("k")) c.k = one_or_many<unsigned>(j["k"]);
    if (j.contains("rect")) c.rect = one_or_many<std::string>(j["rect"]);
    if (j.contains("rho")) c.rho = j["rho"].get<double>();
    if (j.contains("d")) c.d = one_or_many<std::uint64_t>(j["d"]);
    if (j.contains("l")) c.l = j["l"].get<unsigned>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("workers")) c.workers = j["workers"].get<unsigned>();
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("bad config value: ") + e.what());
  }
  return c;
}

std::string ExperimentConfig::to_json() const {
  json j{{"schema_version", kConfigSchemaVersion},
         {"experiment", name},
         {"alpha", alpha},
         {"x", x},
         {"roughness", roughness},
         {"k", k},
         {"rect", rect},
         {"rho", rho},
         {"d", d},
         {"l", l},
         {"seed", seed},
         {"out", out},
         {"workers", workers}};
  return j.dump(2);
}

bool ExperimentResult::pass() const {
  return uncertain == 0 && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string ExperimentResult::summary_json() const {
  json checks_j = json::array();
  for (const auto& c : checks) {
    checks_j.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"expect", c.expect}});
  }
  json inputs = json::parse(config.to_json());
  inputs.erase("out");
  inputs.erase("workers");
  json j{{"schema_version", kConfigSchemaVersion},
         {"experiment", config.name},
         {"inputs", inputs},
         {"outputs", files},
         {"checks", checks_j},
         {"boundary", {{"hits", boundary_hits}, {"uncertain", uncertain}}},
         {"pass", pass()},
         {"wall_time_s", wall_time}};
  return j.dump(2) + "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (!known_experiment(config.name)) throw UnknownExperiment("unknown experiment '" + config.name + "'");
  require(!config.alpha.empty() && !config.x.empty(), "config needs alpha and x");
  const auto start = std::chrono::steady_clock::now();
  Run run(config);
  const auto& n = config.name;
  if (n == "thm11_correlations") {
    correlations(run);
  } else if (n == "thm11_gaps") {
    gaps(run);
  } else if (n == "thm12_blowup") {
    blowup(run);
  } else if (n == "thm13_residues") {
    residues(run);
  } else if (n == "lemma31_tuples") {
    tuples(run);
  } else if (n == "keylemma_average") {
    keylemma(run);
  } else if (n == "sandwich_check") {
    sandwich_check(run);
  } else {
    walk(run);
  }
  auto& result = run.result();
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  {
    std::ofstream f(std::filesystem::path(config.out) / "summary.json", std::ios::binary);
    f << result.summary_json();
  }
  if (result.uncertain > 0) {
    throw PrecisionError(std::to_string(result.uncertain) + " memberships within the certified error of an endpoint");
  }
  return result;
}

}  // namespace rotlab
