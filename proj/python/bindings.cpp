#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <tuple>

#include "hbss/cli.hpp"
#include "hbss/errors.hpp"
#include "hbss/koszul.hpp"
#include "hbss/module.hpp"
#include "hbss/smith.hpp"

namespace py = pybind11;
using namespace hbss;

namespace {

// exponent 0 is Z_(p), 1 is F_p, k > 1 is Z/p^k.
Coefficients coefficients(long prime, int exponent) {
  if (!is_prime(prime)) throw ValidationError("prime " + std::to_string(prime) + " is not prime");
  if (exponent < 0) throw ValidationError("exponent must be >= 0");
  if (exponent == 0) return Coefficients::p_local(prime);
  if (exponent == 1) return Coefficients::prime_field(prime);
  return Coefficients::prime_power(prime, exponent);
}

using GeneratorSpec = std::tuple<std::string, int, bool>;

GradedRing make_ring(long prime, int exponent, const std::vector<GeneratorSpec>& generators) {
  std::vector<RingGenerator> gens;
  for (const auto& [name, degree, invertible] : generators) gens.push_back({name, degree, invertible});
  return GradedRing(coefficients(prime, exponent), gens);
}

Scalar to_scalar(const py::handle& x) {
  if (py::isinstance<py::int_>(x)) return Scalar(py::str(x).cast<std::string>(), 10);
  if (py::isinstance<py::str>(x)) {
    Scalar q;
    if (q.set_str(x.cast<std::string>(), 10) != 0) throw ValidationError("not a rational: " + x.cast<std::string>());
    q.canonicalize();
    return q;
  }
  throw ValidationError("matrix entries must be int or 'a/b' strings");
}

py::object to_python(const Scalar& x) {
  if (x.get_den() == 1) return py::int_(py::str(x.get_num().get_str()));
  return py::str(x.get_str());
}

py::list cells_of(const BigradedModule& m) {
  py::list out;
  for (const auto& [key, cell] : m.cells) {
    if (cell.shape.is_zero()) continue;
    py::dict d;
    d["s"] = key.first;
    d["t"] = key.second;
    d["free_rank"] = cell.shape.free_rank;
    d["torsion"] = cell.shape.torsion;
    d["labels"] = cell.labels;
    out.append(d);
  }
  return out;
}

py::dict smith(const std::vector<std::vector<py::object>>& rows, long prime, int exponent) {
  const Coefficients ctx = coefficients(prime, exponent);
  DenseMatrix dense;
  std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (const auto& row : rows) {
    if (row.size() != cols) throw ValidationError("ragged matrix");
    Vector v;
    for (const auto& x : row) v.push_back(to_scalar(x));
    dense.push_back(std::move(v));
  }
  const ExactMatrix m = ExactMatrix::from_dense(ctx, dense, static_cast<int>(cols));
  const SmithForm f = smith_normal_form(m);
  const CokernelShape c = cokernel_shape(m);
  auto to_lists = [](const ExactMatrix& a) {
    py::list out;
    for (int i = 0; i < a.rows(); ++i) {
      py::list r;
      for (int j = 0; j < a.cols(); ++j) r.append(to_python(a.at(i, j)));
      out.append(r);
    }
    return out;
  };
  py::dict d;
  d["rank"] = f.rank;
  d["exponents"] = f.exponents;
  d["diagonal"] = to_lists(f.diagonal);
  d["left"] = to_lists(f.left);
  d["right"] = to_lists(f.right);
  d["cokernel_free_rank"] = c.free_rank;
  d["cokernel_torsion"] = c.torsion;
  return d;
}

py::dict regularity(long prime, const std::vector<GeneratorSpec>& generators, const std::vector<std::string>& sequence,
                    int degree_min, int degree_max, int max_filtration) {
  const GradedRing ring = make_ring(prime, 0, generators);
  const RegularSequence seq = RegularSequence::parse(ring, sequence);
  const Window window{degree_min, degree_max, max_filtration, 1};
  window.validate();
  GradedModule module = GradedModule::cyclic(ring, {}, truncation_cap(seq, max_filtration));
  const RegularityReport r = regularity_check(module, seq, window);
  py::dict d;
  d["regular"] = r.regular;
  d["summary"] = r.summary();
  return d;
}

py::dict tor_ext(long prime, const std::vector<GeneratorSpec>& generators, const std::vector<std::string>& sequence,
                 int degree_min, int degree_max) {
  const GradedRing ring = make_ring(prime, 0, generators);
  const RegularSequence seq = RegularSequence::parse(ring, sequence);
  const GradedModule l = quotient_module(GradedModule::cyclic(ring, {}), seq, 1);
  const Window window{degree_min, degree_max, 1, 1};
  window.validate();
  py::dict d;
  d["tor"] = cells_of(koszul_homology(seq, l, window).tor);
  d["ext"] = cells_of(ext_groups(seq, l, window).ext);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact Bockstein spectral sequence engine";

  auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<SyntaxError>(m, "SyntaxError", error);
  py::register_exception<ValidationError>(m, "ValidationError", error);
  py::register_exception<NonRegular>(m, "NonRegular", error);
  py::register_exception<WindowTooSmall>(m, "WindowTooSmall", error);
  py::register_exception<IoError>(m, "IoError", error);
  py::register_exception<PhaseError>(m, "PhaseError", error);

  m.def("presets", &preset_names, "Names of the built-in problems.");
  m.def("preset_text", &preset_text, py::arg("name"), "Problem description text of a built-in problem.");
  m.def(
      "canonical", [](const std::string& text) { return print_spec(parse_spec(text)); }, py::arg("text"),
      "Validate a problem description and return its canonical text.");
  m.def(
      "run_json",
      [](const std::string& text) {
        const ProblemSpec spec = parse_spec(text);
        py::gil_scoped_release release;
        return to_json(run(spec));
      },
      py::arg("text"), "Run a problem description and return the JSON report.");
  m.def(
      "run_table",
      [](const std::string& text) {
        const ProblemSpec spec = parse_spec(text);
        py::gil_scoped_release release;
        return to_table(run(spec));
      },
      py::arg("text"), "Run a problem description and return the text report.");
  m.def("exit_code", [](const std::string& text) {
    try {
      run(parse_spec(text));
      return 0;
    } catch (const std::exception& e) {
      return exit_code_for(e);
    }
  }, py::arg("text"), "Exit code the command line tool returns for this description.");
  m.def("smith_normal_form", &smith, py::arg("rows"), py::arg("prime"), py::arg("exponent") = 0,
        "Smith form U*M*V = D over Z_(p) (exponent 0), F_p (1) or Z/p^k (k).");
  m.def("regularity", &regularity, py::arg("prime"), py::arg("generators"), py::arg("sequence"),
        py::arg("degree_min"), py::arg("degree_max"), py::arg("max_filtration") = 1,
        "Regularity of a sequence on the p-local polynomial ring over a degree window.");
  m.def("tor_ext", &tor_ext, py::arg("prime"), py::arg("generators"), py::arg("sequence"), py::arg("degree_min"),
        py::arg("degree_max"), "Nonzero cells of Tor and Ext of L = T/I over T.");
}
