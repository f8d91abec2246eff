// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

/// @file models.hpp
/// @brief Built-in model problems and their independent reference oracles.

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "holofredholm/galerkin.hpp"
#include "holofredholm/nep.hpp"
#include "holofredholm/opfun.hpp"
#include "holofredholm/tco.hpp"

namespace holofredholm {

struct ModelProblem {
  std::string name;
  HolomorphicOpFunction f;
  GalerkinHierarchy hierarchy;
  TCWitness witness;
  std::vector<double> mesh_widths;
  std::vector<Complex> reference_eigenvalues;
  /// How the reference eigenvalues were obtained.
  std::string reference_source;
  /// The first entry is the spectral window; the last one isolates a single
  /// eigenvalue and is used by convergence studies.
  std::vector<Contour> suggested_contours;
  /// Point used for compatibility reports (also the witness probe).
  Complex tcompat_lambda{0.0, 0.0};
  /// Circle in the resolvent set used for stability scans.
  Complex stability_center{0.0, 0.0};
  double stability_radius = 0.5;
  /// True for variants built to fail the compatibility check.
  bool negative_control = false;
};

/// Finite element data of a 1D P1 discretization with Dirichlet conditions.
struct P1Matrices {
  CMatrix stiffness;
  CMatrix mass;
  CMatrix laplace;
};

/// Assembles interior-node P1 matrices for the given nodes; coefficient(a, b)
/// must return the mean of the diffusion coefficient over [a, b].
P1Matrices assemble_p1(const std::vector<double>& nodes, const std::function<double(double, double)>& coefficient);

/// Interpolation of coarse P1 hat functions at fine interior nodes.
CMatrix p1_prolongation(const std::vector<double>& coarse_nodes, const std::vector<double>& fine_nodes);

/// Result of the compact-shift search.
struct ShiftResult {
  CMatrix k_form;
  double scale = 0.0;
  double constant = 0.0;
};

/// Smallest s in @p scales with coercivity_constant(T^*A(probe) + s shift) > 1e-6,
/// where @p shift_form is the form matrix of the shift operator.  Throws
/// WitnessError when no scale succeeds.
ShiftResult coercivity_search(const HolomorphicOpFunction& f, const CMatrix& t, Complex probe,
                              const CMatrix& shift_form, const std::vector<double>& scales);

/// Default scale list for coercivity_search.
std::vector<double> default_shift_scales();

/// Dirichlet eigenvalues of -(s u')' = lambda u on (-1,1) with s = sp on
/// (-1,0) and s = -sm on (0,1), lying in [lo, hi], from the transmission
/// conditions at 0 solved by bracketed root finding.
std::vector<double> sign_changing_dispersion_roots(double sp, double sm, double lo, double hi);

/// Eigenvalues of K0 + z/(z-1) K1 - z M within the disk |z - center| < radius,
/// via companion linearization of (z-1)(K0 - z M) + z K1.  Roots within 1e-8
/// of 0 or 1 are discarded.  Every returned value has a verified residual.
std::vector<Complex> metamaterial_linearization_eigenvalues(const CMatrix& k0, const CMatrix& k1, const CMatrix& m,
                                                            Complex center, double radius);

/// With @p asymmetric the meshes are images of uniform ones under
/// x -> x + grading (1 - x^2), so they are not symmetric about 0.
ModelProblem build_sign_changing(double sigma_plus, double sigma_minus, const std::vector<Index>& level_cells = {},
                                 Index reference_cells = 2048, bool asymmetric = false, double grading = 0.05);
ModelProblem build_metamaterial(const std::vector<Index>& level_cells = {}, Index reference_cells = 2048);
ModelProblem build_jordan_toy(double epsilon = 0.1);
/// C^3 family with a Jordan block at 0 whose coarse level splits it into
/// -e +- sqrt(e (1 + e)).
ModelProblem build_jordan_split_family(double epsilon);
/// Coercive control: -u'' = lambda u on (0,1).
ModelProblem build_laplacian(const std::vector<Index>& level_cells = {}, Index reference_cells = 2048);

struct ModelParam {
  std::string name;
  double default_value = 0.0;
  std::string description;
};

struct ModelEntry {
  std::string name;
  std::string description;
  std::vector<ModelParam> params;
  /// Builds the model from parameter values and level cell counts (empty = default).
  std::function<ModelProblem(const std::map<std::string, double>&, const std::vector<Index>&)> build;
};

class ModelRegistry {
 public:
  /// Registry with the four built-in models.
  static ModelRegistry with_defaults();

  void add(ModelEntry entry);
  bool contains(const std::string& name) const;
  const ModelEntry& get(const std::string& name) const;
  std::vector<std::string> names() const;
  /// One line per model: name, description and parameter schema.
  std::string listing() const;

 private:
  std::vector<ModelEntry> entries_;
};

}  // namespace holofredholm
