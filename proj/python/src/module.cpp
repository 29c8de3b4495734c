#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gmclab/analysis.hpp"
#include "gmclab/experiments.hpp"

namespace py = pybind11;
using namespace gmclab;

namespace {

KernelSpec kernel_by_name(const std::string& family, int d, double T) {
  KernelSpec k;
  k.family = parse_family(family);
  k.d = d;
  k.T = T;
  k.validate();
  return k;
}

FieldGrid sample_field(const std::string& family, int d, int grid, int level, std::uint64_t seed,
                       std::uint64_t replica) {
  FieldSynthesizer s(kernel_by_name(family, d, 1.0), Lattice(d, grid));
  return s.field(level, seed, replica);
}

py::dict measure_dict(const AtomicMeasure& m) {
  py::dict out;
  std::vector<double> x, y;
  for (const auto& p : m.positions) {
    x.push_back(p[0]);
    y.push_back(p[1]);
  }
  out["x"] = x;
  if (m.d == 2) out["y"] = y;
  out["mass"] = m.masses;
  out["log_mass"] = m.log_masses;
  return out;
}

}  // namespace

PYBIND11_MODULE(_gmclab, m) {
  m.doc() = "Gaussian multiplicative chaos and atomic chaos toolkit";
  m.attr("__version__") = artifact_version();

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("partial_kernel", [](const std::string& family, int d, int n, double r) {
    return partial_kernel_radial(kernel_by_name(family, d, 1.0), n, r);
  }, py::arg("family"), py::arg("d"), py::arg("n"), py::arg("r"));
  m.def("level_increment", [](const std::string& family, int d, int n, double r) {
    return level_increment_radial(kernel_by_name(family, d, 1.0), n, r);
  }, py::arg("family"), py::arg("d"), py::arg("n"), py::arg("r"));

  m.def("xi", &xi, py::arg("gamma2"), py::arg("d"), py::arg("q"));
  m.def("xi_bar", &xi_bar, py::arg("gamma2"), py::arg("alpha"), py::arg("d"), py::arg("q"));
  m.def("kpz_solve", &kpz_solve, py::arg("dim_leb"), py::arg("gamma2"), py::arg("d"));
  m.def("kpz_solve_dual", &kpz_solve_dual, py::arg("dim_leb"), py::arg("gamma2"), py::arg("d"));
  m.def("moment_relation_constant", &moment_relation_constant, py::arg("beta"), py::arg("alpha"));

  m.def("field", [](const std::string& family, int d, int grid, int level, std::uint64_t seed, std::uint64_t replica) {
    return sample_field(family, d, grid, level, seed, replica).values;
  }, py::arg("family") = "exact1d", py::arg("d") = 1, py::arg("grid") = 256, py::arg("level") = 6,
     py::arg("seed") = 1, py::arg("replica") = 0);

  m.def("chaos", [](double gamma2, const std::string& family, int d, int grid, int level, std::uint64_t seed,
                    std::uint64_t replica) {
    return build_chaos(sample_field(family, d, grid, level, seed, replica), gamma2).masses;
  }, py::arg("gamma2"), py::arg("family") = "exact1d", py::arg("d") = 1, py::arg("grid") = 256,
     py::arg("level") = 6, py::arg("seed") = 1, py::arg("replica") = 0);

  m.def("atomic_chaos", [](double gamma2, double z_min, const std::string& family, int d, int grid, int level,
                           std::uint64_t seed, std::uint64_t replica) {
    const double alpha = alpha_from_gamma(gamma2, d).alpha;
    const auto field = sample_field(family, d, grid, level, seed, replica);
    RngStream rng(seed, {replica, static_cast<std::uint64_t>(level), StreamPurpose::kAtoms});
    const auto atoms = sample_stable_atoms(field.lattice.domain(), alpha, z_min, rng);
    return measure_dict(build_atomic_direct(field, gamma2, alpha, atoms));
  }, py::arg("gamma2"), py::arg("z_min"), py::arg("family") = "exact1d", py::arg("d") = 1, py::arg("grid") = 256,
     py::arg("level") = 6, py::arg("seed") = 1, py::arg("replica") = 0);

  m.def("hill", [](const std::vector<double>& samples, std::size_t k) {
    const auto h = hill_tail_index(samples, k);
    py::dict out;
    out["estimate"] = h.estimate;
    out["ci"] = py::make_tuple(h.ci_lo, h.ci_hi);
    out["k"] = h.k;
    out["stable"] = h.stable;
    out["drift"] = h.drift;
    return out;
  }, py::arg("samples"), py::arg("k"));

  m.def("validate", [](const std::string& subcommand, const std::map<std::string, std::string>& config) {
    return validate_config(make_config(parse_subcommand(subcommand), config));
  }, py::arg("subcommand"), py::arg("config") = std::map<std::string, std::string>{});

  m.def("run", [](const std::string& subcommand, const std::map<std::string, std::string>& config) {
    const auto cfg = make_config(parse_subcommand(subcommand), config);
    RunResult r;
    {
      py::gil_scoped_release release;
      r = run_experiment(cfg);
    }
    py::dict out;
    out["passed"] = r.passed();
    out["out"] = r.out;
    py::list checks;
    for (const auto& c : r.checks) {
      py::dict d;
      d["name"] = c.name;
      d["pass"] = c.pass;
      d["detail"] = c.detail;
      checks.append(d);
    }
    out["checks"] = checks;
    py::list files;
    for (const auto& f : r.files) files.append(f.name);
    out["files"] = files;
    return out;
  }, py::arg("subcommand"), py::arg("config"));
}
