#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pflab/oracle.hpp"
#include "pflab/runner.hpp"

namespace py = pybind11;
using namespace pflab;

namespace {

py::dict hyp_row(const HypothesisRow& r) {
  py::dict d;
  d["name"] = r.name;
  d["status"] = hyp_status_name(r.status);
  d["grid_norm"] = r.grid_norm;
  d["refined_ratio"] = r.refined_ratio;
  d["note"] = r.note;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() =
      "finite laboratory for atom-field Hamiltonians: model assembly, "
      "spectra, golden-rule constants, commutator positivity scans";

  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);

  mod.def(
      "validate",
      [](const std::string& text, double i1b_a) {
        ExperimentConfig cfg = parse_experiment(text);
        py::list out;
        for (const auto& r : validate_hypotheses(cfg, i1b_a))
          out.append(hyp_row(r));
        return out;
      },
      py::arg("config"), py::arg("i1b_a") = 1.5,
      "hypothesis report for the coupling profiles of a config");

  mod.def(
      "hamiltonian_dense",
      [](const std::string& text, double lam, int dim_cap) {
        ExperimentConfig cfg = parse_experiment(text);
        Model m = build_model(cfg, lam);
        if (m.dim() > dim_cap)
          throw std::runtime_error("model dimension " +
                                   std::to_string(m.dim()) +
                                   " exceeds dim_cap");
        return MatC(hamiltonian(m).m);
      },
      py::arg("config"), py::arg("lam"), py::arg("dim_cap") = 4000,
      "densified Hamiltonian of the configured model");

  mod.def(
      "spectrum",
      [](const std::string& text, double lam, double lo, double hi,
         int dense_cap, std::uint64_t seed) {
        ExperimentConfig cfg = parse_experiment(text);
        Model m = build_model(cfg, lam);
        SparseOp H = hamiltonian(m);
        EigenResult er;
        if (lo < hi) {
          WindowOpts w;
          w.seed = seed;
          er = eig_window(H, lo, hi, w);
        } else {
          er = eig_dense(H, dense_cap);
        }
        return py::make_tuple(VecR(er.values), VecR(er.residuals));
      },
      py::arg("config"), py::arg("lam"), py::arg("lo") = 0.0,
      py::arg("hi") = 0.0, py::arg("dense_cap") = 8000, py::arg("seed") = 1,
      "(values, residuals); pass lo < hi for a windowed solve");

  mod.def(
      "fgr",
      [](const std::string& text, int i0, double eps) {
        ExperimentConfig cfg = parse_experiment(text);
        Model m = build_model(cfg, 0.0);
        FgrMatrix f = fgr_matrix(m, i0, eps);
        py::dict d;
        d["c1"] = f.c1;
        d["c2"] = f.c2;
        return d;
      },
      py::arg("config"), py::arg("i0"), py::arg("eps"),
      "level-shift constants at threshold i0 and resolution eps");

  mod.def(
      "fgr_analytic",
      [](const std::string& text, int i0) {
        ExperimentConfig cfg = parse_experiment(text);
        FgrAnalytic f = fgr_analytic(make_atom(cfg.K), i0, build_continuum(cfg));
        py::dict d;
        d["c1"] = f.c1;
        d["c2"] = f.c2;
        d["sum_empty"] = f.sum_empty;
        return d;
      },
      py::arg("config"), py::arg("i0"),
      "eps -> 0 golden-rule constants from the continuum profiles");

  mod.def("vanhove_shift", &oracle_vanhove_shift, py::arg("lam"),
          py::arg("v"), py::arg("omega"),
          "ground shift -lam^2/2 sum |v|^2/omega of a commuting coupling");

  mod.def(
      "run",
      [](const std::string& text, const std::string& command,
         const std::string& out_dir, int workers, std::uint64_t seed,
         bool strict) {
        ExperimentConfig cfg = parse_experiment(text);
        cfg.command = command;
        RunOptions opt;
        opt.out_dir = out_dir;
        opt.workers = workers;
        opt.seed = seed;
        opt.strict = strict;
        Artifacts a = run_experiment(cfg, opt);
        write_artifacts(a, cfg, opt, 0.0, command);
        py::dict d;
        py::dict files;
        for (const auto& [name, bytes] : a.files) files[py::str(name)] = bytes;
        d["files"] = files;
        d["log"] = a.log;
        d["hypothesis_violation"] = a.hypothesis_violation;
        return d;
      },
      py::arg("config"), py::arg("command"), py::arg("out_dir"),
      py::arg("workers") = 1, py::arg("seed") = 1, py::arg("strict") = false,
      "execute a command and write its artifacts; returns them in-memory too");
}
