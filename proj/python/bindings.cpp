// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "holofredholm/convlab.hpp"
#include "holofredholm/errors.hpp"
#include "holofredholm/linalg.hpp"
#include "holofredholm/models.hpp"
#include "holofredholm/nep.hpp"

namespace py = pybind11;
using namespace holofredholm;

namespace {

ModelProblem build(const std::string& name, const std::map<std::string, double>& params,
                   const std::vector<Index>& levels) {
  const ModelRegistry registry = ModelRegistry::with_defaults();
  const ModelEntry& entry = registry.get(name);
  std::map<std::string, double> filled;
  for (const ModelParam& p : entry.params) filled[p.name] = p.default_value;
  for (const auto& [key, value] : params) {
    if (!filled.count(key)) throw UsageError("model " + name + " has no parameter " + key);
    filled[key] = value;
  }
  return entry.build(filled, levels);
}

// Picks the isolating contour when asked, else the spectral window.
Contour default_contour(const ModelProblem& mp, bool isolating) {
  if (mp.suggested_contours.empty()) throw UsageError("model has no suggested contour");
  return isolating ? mp.suggested_contours.back() : mp.suggested_contours.front();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Galerkin eigenvalue approximation for holomorphic Fredholm operator functions";

  py::register_exception<Error>(m, "HolofredholmError", PyExc_RuntimeError);

  py::class_<Contour>(m, "Contour")
      .def(py::init([](Complex center, double rx, double ry, int nodes) { return Contour{center, rx, ry, nodes}; }),
           py::arg("center"), py::arg("rx"), py::arg("ry"), py::arg("nodes") = 64)
      .def_static("circle", &Contour::circle, py::arg("center"), py::arg("radius"), py::arg("nodes") = 64)
      .def_readwrite("center", &Contour::center)
      .def_readwrite("rx", &Contour::rx)
      .def_readwrite("ry", &Contour::ry)
      .def_readwrite("nodes", &Contour::nodes)
      .def("contains", &Contour::contains);

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("probe_rank", &SolverOptions::probe_rank)
      .def_readwrite("rank_tol", &SolverOptions::rank_tol)
      .def_readwrite("cluster_tol", &SolverOptions::cluster_tol)
      .def_readwrite("residual_tol", &SolverOptions::residual_tol)
      .def_readwrite("max_moments", &SolverOptions::max_moments)
      .def_readwrite("seed", &SolverOptions::seed);

  py::class_<Eigenpair>(m, "Eigenpair")
      .def_readonly("value", &Eigenpair::lambda)
      .def_readonly("geo", &Eigenpair::geo)
      .def_readonly("alg", &Eigenpair::alg)
      .def_readonly("kappa", &Eigenpair::kappa)
      .def_readonly("residual", &Eigenpair::residual)
      .def_readonly("vectors", &Eigenpair::vectors);

  m.def("list_models", [] { return ModelRegistry::with_defaults().names(); });

  m.def(
      "build_model",
      [](const std::string& name, const std::map<std::string, double>& params, const std::vector<Index>& levels) {
        const ModelProblem mp = build(name, params, levels);
        py::dict d;
        d["name"] = mp.name;
        d["dim"] = mp.f.dim();
        std::vector<Index> dims;
        for (std::size_t n = 0; n < mp.hierarchy.num_levels(); ++n) dims.push_back(mp.hierarchy.level_dim(n));
        d["level_dims"] = dims;
        d["mesh_widths"] = mp.mesh_widths;
        d["reference_eigenvalues"] = mp.reference_eigenvalues;
        d["contours"] = mp.suggested_contours;
        d["negative_control"] = mp.negative_control;
        return d;
      },
      py::arg("name"), py::arg("params") = std::map<std::string, double>{}, py::arg("levels") = std::vector<Index>{});

  m.def(
      "solve",
      [](const std::string& name, const std::map<std::string, double>& params, const std::vector<Index>& levels,
         std::optional<Contour> contour, std::optional<std::size_t> level, const SolverOptions& opts) {
        const ModelProblem mp = build(name, params, levels);
        const Contour c = contour.value_or(default_contour(mp, false));
        const SpectralResult r = level ? contour_eigensolve(compress(mp.hierarchy, *level, mp.f), c, opts)
                                       : contour_eigensolve(mp.f, c, opts);
        return r.eigenvalues;
      },
      py::arg("name"), py::arg("params") = std::map<std::string, double>{}, py::arg("levels") = std::vector<Index>{},
      py::arg("contour") = std::nullopt, py::arg("level") = std::nullopt, py::arg("options") = SolverOptions{},
      "Eigenvalues inside the contour, on the reference space or on one Galerkin level.");

  m.def(
      "convergence_study",
      [](const std::string& name, const std::map<std::string, double>& params, const std::vector<Index>& levels) {
        const ModelProblem mp = build(name, params, levels);
        const ConvergenceRecord r = convergence_study(mp.hierarchy, mp.f, default_contour(mp, true), mp.mesh_widths);
        py::dict d;
        d["lambda0"] = r.lambda0;
        d["kappa"] = r.kappa;
        d["dim_g"] = r.dim_g;
        d["csv"] = r.to_csv();
        d["orders"] = py::dict(py::arg("eig") = r.orders.eig, py::arg("mean") = r.orders.mean,
                               py::arg("vec") = r.orders.vec, py::arg("delta") = r.orders.delta,
                               py::arg("delta_star") = r.orders.delta_star);
        return d;
      },
      py::arg("name"), py::arg("params") = std::map<std::string, double>{}, py::arg("levels") = std::vector<Index>{});

  m.def("fit_order", &fit_order, py::arg("h"), py::arg("err"));

  m.def(
      "min_max_gsv",
      [](const CMatrix& gram, const CMatrix& b) {
        const GsvRange r = min_max_gsv(GramSpace(gram), b);
        return py::make_tuple(r.min, r.max);
      },
      py::arg("gram"), py::arg("b"));
}
