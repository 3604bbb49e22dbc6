#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "conslaw/corpus.hpp"
#include "conslaw/sysfile.hpp"
#include "conslaw/text.hpp"
#include "conslaw/variational.hpp"

namespace py = pybind11;
using namespace conslaw;

namespace {

LoadOptions options(const std::map<std::string, long>& constants) {
  LoadOptions o;
  for (const auto& [k, v] : constants) o.constants[k] = Rational(v);
  return o;
}

std::vector<std::string> show(const VectorFunction& v, const Context& ctx) {
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(to_string(e, ctx));
  return out;
}

// A loaded system file; expressions are exchanged as text.
class System {
 public:
  explicit System(SystemFile f) : f_(std::move(f)) {}

  const Context& ctx() const { return *f_.ctx; }
  const DiffSystem& at(int level) const { return level < 0 ? f_.system() : f_.system_at(level); }
  VectorFunction tuple(const std::string& t) const { return f_.has_cv(t) ? f_.cv(t) : f_.parse_tuple(t); }
  const PotentialStructure& top() const {
    if (!f_.top()) fail(ErrorCode::InvalidSystem, "the file defines no potential system");
    return *f_.top();
  }

  int levels() const { return static_cast<int>(f_.levels.size()); }
  std::vector<std::string> conserved_vectors() const {
    std::vector<std::string> out;
    for (const auto& [name, v] : f_.cvs) out.push_back(name);
    return out;
  }
  std::vector<std::string> equations(int level) const {
    std::vector<std::string> out;
    for (const auto& e : at(level).equations())
      out.push_back(to_string(e.lead, ctx()) + " = " + to_string(e.solved, ctx()));
    return out;
  }
  std::string reduce(const std::string& e, int level) const { return to_string(at(level).reduce(f_.parse(e)), ctx()); }
  bool is_conserved(const std::string& t, int level) const { return verify_conserved_vector(tuple(t), at(level)); }
  std::vector<std::string> characteristic(const std::string& t, int level) const {
    return show(extract_characteristic(tuple(t), at(level)).lambda.components, ctx());
  }
  bool is_cosymmetry(const std::string& t, int level) const { return cosymmetry_test(f_.parse_tuple(t), at(level)); }
  bool equivalent(const std::string& a, const std::string& b, int level) const {
    return equivalent_conserved_vectors(tuple(a), tuple(b), at(level));
  }
  std::string purity(const std::string& t) const {
    const auto& P = top();
    auto r = purity_test(extract_characteristic(tuple(t), P.system).lambda, P, tuple(t));
    return r.trivial ? "trivial" : verdict_name(r.verdict);
  }
  std::vector<std::string> localize(const std::string& t) const {
    return show(localize_conserved_vector(tuple(t), top()), ctx());
  }
  std::string phi(const std::string& t) const {
    auto ab = f_.parse_tuple(t);
    if (ab.size() != 2) fail(ErrorCode::ArityMismatch, "phi needs two components");
    return to_string(solve_null_divergence_2d(ab[0], ab[1], f_.base), ctx());
  }
  std::string text() const { return print_system_file(f_); }

 private:
  SystemFile f_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact conservation law computations for PDE systems and their potential systems";

  auto err = py::register_exception<Error>(m, "ConslawError", PyExc_ValueError);
  (void)err;

  py::class_<System>(m, "System")
      .def_property_readonly("levels", &System::levels)
      .def("conserved_vectors", &System::conserved_vectors)
      .def("equations", &System::equations, py::arg("level") = -1)
      .def("reduce", &System::reduce, py::arg("expr"), py::arg("level") = -1)
      .def("is_conserved", &System::is_conserved, py::arg("cv"), py::arg("level") = -1)
      .def("characteristic", &System::characteristic, py::arg("cv"), py::arg("level") = -1)
      .def("is_cosymmetry", &System::is_cosymmetry, py::arg("multipliers"), py::arg("level") = -1)
      .def("equivalent", &System::equivalent, py::arg("a"), py::arg("b"), py::arg("level") = -1)
      .def("purity", &System::purity, py::arg("cv"))
      .def("localize", &System::localize, py::arg("cv"))
      .def("phi", &System::phi, py::arg("alpha_beta"))
      .def("to_text", &System::text);

  m.def(
      "load",
      [](const std::string& text, const std::map<std::string, long>& constants) {
        return System(parse_system_file(text, options(constants)));
      },
      py::arg("text"), py::arg("constants") = std::map<std::string, long>{});
  m.def(
      "load_file",
      [](const std::string& path, const std::map<std::string, long>& constants) {
        return System(load_system_file(path, options(constants)));
      },
      py::arg("path"), py::arg("constants") = std::map<std::string, long>{});
  m.def(
      "euler",
      [](const std::string& expr, const std::string& dep, const std::string& header) {
        auto f = parse_system_file(header);
        return to_string(conslaw::euler(f.parse(expr), dep, *f.ctx), *f.ctx);
      },
      py::arg("expr"), py::arg("dep") = "u", py::arg("header") = "indep t x\ndep u v\n");
  m.def("corpus_names", [] {
    std::vector<std::string> out;
    for (const auto& f : builtin_corpus()) out.push_back(f.name);
    return out;
  });
  m.def(
      "run_corpus",
      [](const std::string& filter) {
        std::vector<py::dict> out;
        for (const auto& r : conslaw::run_corpus(filter).results) {
          py::dict d;
          d["id"] = r.id;
          d["instance"] = r.instance;
          d["pass"] = r.pass;
          d["detail"] = r.detail;
          out.push_back(d);
        }
        return out;
      },
      py::arg("filter") = "");
}
