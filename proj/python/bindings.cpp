#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rotlab/bohr.hpp"
#include "rotlab/cfrac.hpp"
#include "rotlab/correlations.hpp"
#include "rotlab/experiments.hpp"
#include "rotlab/ostrowski.hpp"
#include "rotlab/sieve.hpp"
#include "rotlab/walk.hpp"

namespace py = pybind11;
using namespace rotlab;

namespace {

py::object to_int(const mpz_class& z) { return py::int_(py::str(z.get_str())); }

py::object to_fraction(const mpq_class& q) {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls(to_int(q.get_num()), to_int(q.get_den()));
}

Rect to_rect(const std::vector<std::pair<double, double>>& sides) {
  Rect r;
  for (const auto& [lo, hi] : sides) r.push_back({lo, hi});
  return r;
}

py::dict cf_data(const std::string& alpha, std::size_t depth) {
  const auto cf = ContinuedFraction::expand(parse_alpha(alpha), depth);
  py::list p, q, delta;
  for (std::size_t i = 0; i <= cf.depth(); ++i) {
    p.append(to_int(cf.p(i)));
    q.append(to_int(cf.q(i)));
    delta.append(static_cast<double>(cf.delta_ld(i)));
  }
  py::dict d;
  d["alpha"] = cf.alpha().canonical();
  d["a"] = cf.digits();
  d["p"] = p;
  d["q"] = q;
  d["delta"] = delta;
  return d;
}

PointSet points(const std::string& alpha, std::uint64_t x, const std::string& roughness, bool sequence) {
  return build_points(parse_alpha(alpha), x, RoughnessSpec::parse(roughness),
                      sequence ? RoughMode::sequence : RoughMode::triangular);
}

}  // namespace

PYBIND11_MODULE(_rotlab, m) {
  m.doc() = "Irrational rotations of rough numbers";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_MemoryError);
  py::register_exception<PrecisionError>(m, "PrecisionError", PyExc_ArithmeticError);
  py::register_exception<UnknownExperiment>(m, "UnknownExperiment", PyExc_KeyError);

  m.def("canonical_alpha", [](const std::string& s) { return parse_alpha(s).canonical(); });
  m.def("continued_fraction", &cf_data, py::arg("alpha"), py::arg("depth") = 20);
  m.def("frac_part", [](const std::string& alpha, std::uint64_t n) {
    return static_cast<double>(Rotation(parse_alpha(alpha)).frac_part(n).value());
  });

  m.def(
      "ostrowski_encode",
      [](const std::string& alpha, std::uint64_t n, std::size_t depth) {
        return encode_int(ContinuedFraction::expand(parse_alpha(alpha), depth), n);
      },
      py::arg("alpha"), py::arg("n"), py::arg("depth") = 60);
  m.def(
      "ostrowski_decode",
      [](const std::string& alpha, const Digits& digits, std::size_t depth) {
        return decode_int(ContinuedFraction::expand(parse_alpha(alpha), depth), digits);
      },
      py::arg("alpha"), py::arg("digits"), py::arg("depth") = 60);

  m.def(
      "bohr_enumerate",
      [](const std::string& alpha, std::uint64_t x, double rho, bool at_one, unsigned workers) {
        EnumerateOptions opt;
        opt.workers = workers;
        const auto iv = at_one ? BohrInterval::at_one(rho) : BohrInterval::at_zero(rho);
        py::gil_scoped_release release;
        return bohr_enumerate(parse_alpha(alpha), x, iv, opt).members;
      },
      py::arg("alpha"), py::arg("x"), py::arg("rho"), py::arg("at_one") = false, py::arg("workers") = 1);
  m.def("residue_counts", [](const std::vector<std::uint64_t>& members, std::uint64_t d) {
    return residue_profile(members, d).counts;
  });

  m.def(
      "rough_numbers",
      [](std::uint64_t x, const std::string& roughness, bool sequence) {
        return rough_enumerate(x, RoughnessSpec::parse(roughness),
                               sequence ? RoughMode::sequence : RoughMode::triangular)
            .members;
      },
      py::arg("x"), py::arg("roughness"), py::arg("sequence") = false);
  m.def("phi", [](std::uint64_t x, std::uint64_t z) { return phi(x, z); });
  m.def("singular_series", [](const std::vector<std::int64_t>& h, std::uint64_t z) {
    return to_fraction(singular_series(h, z).value);
  });
  m.def("tuple_count", [](std::uint64_t x, std::uint64_t z, const std::vector<std::int64_t>& h) {
    const auto t = tuple_count(x, z, h);
    py::dict d;
    d["exact"] = t.exact;
    d["predicted"] = to_fraction(t.predicted_exact);
    d["ratio"] = t.ratio();
    d["csv_row"] = t.csv_row();
    return d;
  });
  m.def("cute_identity", [](std::uint64_t p, unsigned k) {
    const auto c = cute_identity_check(p, k);
    return py::make_tuple(to_fraction(c.lhs), to_fraction(c.rhs), c.pass);
  });

  m.def(
      "r_k",
      [](const std::vector<double>& values, const std::vector<std::pair<double, double>>& rect, bool closed,
         unsigned workers) {
        CorrelationOptions opt;
        opt.closed = closed;
        opt.workers = workers;
        return to_int(r_k(PointSet::from_doubles(values), to_rect(rect), opt).count);
      },
      py::arg("values"), py::arg("rect"), py::arg("closed") = false, py::arg("workers") = 1);
  m.def(
      "rough_correlation",
      [](const std::string& alpha, std::uint64_t x, const std::string& roughness,
         const std::vector<std::pair<double, double>>& rect, unsigned workers) {
        const auto pts = points(alpha, x, roughness, false);
        CorrelationOptions opt;
        opt.workers = workers;
        const auto r = r_k(pts, to_rect(rect), opt);
        return py::make_tuple(r.n, to_int(r.count), r.value);
      },
      py::arg("alpha"), py::arg("x"), py::arg("roughness"), py::arg("rect"), py::arg("workers") = 1);
  m.def(
      "gap_ks",
      [](const std::string& alpha, std::uint64_t x, const std::string& roughness, bool wrap) {
        return gap_histogram(points(alpha, x, roughness, false), 40, 4.0, wrap).ks;
      },
      py::arg("alpha"), py::arg("x"), py::arg("roughness"), py::arg("wrap") = false);
  m.def("key_lemma_ratio", [](const std::vector<std::uint64_t>& members, std::uint64_t z, unsigned k) {
    const auto r = key_lemma_average(members, z, k);
    return py::make_tuple(to_fraction(r.average), to_fraction(r.normal));
  });

  m.def(
      "walk_tv",
      [](std::uint64_t d, const std::vector<std::uint64_t>& support, std::uint64_t steps) {
        return walk_distribution(WalkSpec::uniform_steps(d, support, steps), true).tv;
      },
      py::arg("d"), py::arg("support"), py::arg("steps"));

  m.def("list_experiments", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : list_experiments()) out.emplace_back(e.name, e.description);
    return out;
  });
  m.def("run_experiment", [](const std::string& config_json) {
    const auto cfg = parse_config(config_json);
    py::gil_scoped_release release;
    return run_experiment(cfg).summary_json();
  });

  py::dict headers;
  headers["correlation"] = kCorrelationCsvHeader;
  headers["gaps"] = kGapCsvHeader;
  headers["blowup"] = kScanCsvHeader;
  headers["residues"] = kResidueCsvHeader;
  headers["tuples"] = kTupleCsvHeader;
  m.attr("CSV_HEADERS") = headers;
}
