// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#include "holofredholm/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "holofredholm/convlab.hpp"
#include "holofredholm/errors.hpp"
#include "holofredholm/report.hpp"
#include "holofredholm/tco.hpp"

namespace holofredholm {

namespace {

const std::set<std::string> kExperiments = {"solve", "tcompat", "converge", "stability", "pollution"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("key '" + key + "': not a finite number: '" + v + "'");
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
  }
  return out;
}

double positive(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (!(x > 0.0)) throw ConfigError("key '" + key + "' must be positive");
  return x;
}

int positive_int(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < 1 || x > 1'000'000) throw ConfigError("key '" + key + "' must be a positive integer");
  return static_cast<int>(x);
}

std::string complex_str(Complex z) { return format_double(z.real()) + (z.imag() < 0 ? "" : "+") + format_double(z.imag()) + "i"; }

void add_check(std::ostringstream& summary, bool& all_ok, const CheckResult& c) {
  summary << (c.ok ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  all_ok = all_ok && c.ok;
}

Contour pick_contour(const ExperimentConfig& cfg, const ModelProblem& mp, bool isolating = false) {
  if (cfg.contour) return *cfg.contour;
  if (mp.suggested_contours.empty()) throw ConfigError("model has no suggested contour; set contour.* keys");
  return isolating ? mp.suggested_contours.back() : mp.suggested_contours.front();
}

// Same contour scaled up by at most 25%, kept clear of the poles.
Contour enlarged(const Contour& c, const HolomorphicOpFunction& f) {
  double factor = 1.25;
  for (const Complex& p : f.domain().poles) {
    const double dx = (p.real() - c.center.real()) / c.rx, dy = (p.imag() - c.center.imag()) / c.ry;
    const double level = std::sqrt(dx * dx + dy * dy);
    if (level <= factor) factor = std::max(1.0, 0.5 * (1.0 + level));
  }
  return Contour{c.center, c.rx * factor, c.ry * factor, c.nodes};
}

ExperimentOutcome run_solve(const ExperimentConfig& cfg, const ModelProblem& mp) {
  const Contour c = pick_contour(cfg, mp);
  const SpectralResult res = contour_eigensolve(mp.f, c, cfg.solver);
  ExperimentOutcome out;
  out.report_csv = res.to_csv();
  std::ostringstream s;
  s << "experiment solve on " << mp.name << " (dim " << mp.f.dim() << ")\n";
  s << "eigenvalues found: " << res.eigenvalues.size() << ", total algebraic multiplicity " << res.total_alg << "\n";
  bool ok = true;
  if (!mp.reference_eigenvalues.empty()) {
    std::ostringstream d;
    bool match = true;
    for (const auto& e : res.eigenvalues) {
      double best = std::numeric_limits<double>::infinity();
      for (const Complex& r : mp.reference_eigenvalues) best = std::min(best, std::abs(e.lambda - r));
      if (best > cfg.solve_match_tol * std::max(1.0, std::abs(e.lambda))) {
        match = false;
        d << complex_str(e.lambda) << " is " << best << " from the reference; ";
      }
    }
    for (const Complex& r : mp.reference_eigenvalues) {
      if (!c.contains(r)) continue;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& e : res.eigenvalues) best = std::min(best, std::abs(e.lambda - r));
      if (best > cfg.solve_match_tol * std::max(1.0, std::abs(r))) {
        match = false;
        d << "reference " << complex_str(r) << " not found; ";
      }
    }
    if (match) d << "every eigenvalue matches the model reference within relative " << cfg.solve_match_tol;
    add_check(s, ok, CheckResult{"reference agreement", match, d.str()});
  }
  out.status = ok ? 0 : 1;
  out.summary = s.str();
  return out;
}

ExperimentOutcome run_tcompat(const ExperimentConfig& cfg, const ModelProblem& mp) {
  const Complex lambda = cfg.tcompat_lambda.value_or(mp.tcompat_lambda);
  const CompatibilityReport rep = compatibility_report(mp.hierarchy, mp.f, mp.witness, lambda, cfg.tcompat_tol);
  ExperimentOutcome out;
  out.report_csv = rep.to_csv();
  std::ostringstream s;
  s << "experiment tcompat on " << mp.name << " at lambda = " << complex_str(lambda) << "\n";
  s << "witness: |T| = " << rep.t_norm << ", |T^-1| = " << rep.t_inv_norm << ", shift scale " << mp.witness.k_scale
    << ", coercivity constant " << mp.witness.constant << "\n";
  bool ok = true;
  std::ostringstream d;
  d << "tol " << rep.tol << ", last discrete norm " << (rep.records.empty() ? 0.0 : rep.records.back().disc_norm);
  add_check(s, ok, CheckResult{"T-compatibility verdict", rep.verdict, d.str()});
  if (rep.verdict) {
    add_check(s, ok, check_norm_estimates(rep));
    add_check(s, ok, check_stability_bound(rep));
  }
  out.status = ok ? 0 : 1;
  out.summary = s.str();
  return out;
}

ExperimentOutcome run_converge(const ExperimentConfig& cfg, const ModelProblem& mp) {
  const Contour c = pick_contour(cfg, mp, true);
  const ConvergenceRecord rec = convergence_study(mp.hierarchy, mp.f, c, mp.mesh_widths, cfg.solver);
  ExperimentOutcome out;
  out.report_csv = rec.to_csv();
  out.svg = rec.to_svg();
  std::ostringstream s;
  s << "experiment converge on " << mp.name << "\n";
  s << "lambda0 = " << complex_str(rec.lambda0) << ", kappa = " << rec.kappa << ", dim G = " << rec.dim_g << "\n";
  s << "fitted orders: eig " << rec.orders.eig << ", mean " << rec.orders.mean << ", vec " << rec.orders.vec
    << ", delta " << rec.orders.delta << ", delta* " << rec.orders.delta_star << "\n";
  bool ok = true;
  add_check(s, ok, check_multiplicity(rec));
  add_check(s, ok, check_approximability(rec));
  add_check(s, ok, check_delta_monotone(rec));
  if (rec.fit_note.empty()) {
    add_check(s, ok, check_order_law(rec));
    add_check(s, ok, check_vector_bound(rec));
  } else {
    s << "SKIP eigenvalue order law: " << rec.fit_note << "\n";
    s << "SKIP eigenvector bound: " << rec.fit_note << "\n";
  }
  out.status = ok ? 0 : 1;
  out.summary = s.str();
  return out;
}

ExperimentOutcome run_stability(const ExperimentConfig& cfg, const ModelProblem& mp) {
  const Complex center = cfg.stability_center.value_or(mp.stability_center);
  const double radius = cfg.stability_radius.value_or(mp.stability_radius);
  const std::vector<Complex> samples = circle_samples(center, radius, cfg.stability_samples);
  const std::vector<double> sups = resolvent_stability_scan(mp.hierarchy, mp.f, samples);
  ExperimentOutcome out;
  out.report_csv = csv_line({"n", "dim", "sup_resolvent"});
  for (std::size_t n = 0; n < sups.size(); ++n) {
    out.report_csv += csv_line({std::to_string(n), std::to_string(mp.hierarchy.level_dim(n)), format_double(sups[n])});
  }
  std::ostringstream s;
  s << "experiment stability on " << mp.name << ": circle center " << complex_str(center) << ", radius " << radius
    << ", " << samples.size() << " samples\n";
  bool ok = true;
  const std::size_t start = sups.size() > 3 ? sups.size() - 3 : 0;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool finite = true;
  for (std::size_t n = 0; n < sups.size(); ++n) finite = finite && std::isfinite(sups[n]);
  for (std::size_t n = start; n < sups.size(); ++n) {
    lo = std::min(lo, sups[n]);
    hi = std::max(hi, sups[n]);
  }
  std::ostringstream d1, d2;
  d1 << (finite ? "every level invertible on the circle" : "a level is singular on the circle");
  add_check(s, ok, CheckResult{"finite resolvent norms", finite, d1.str()});
  if (sups.size() < 3) {
    s << "SKIP resolvent stability: needs at least 3 levels, got " << sups.size() << "\n";
  } else {
    const bool flat = finite && hi < 2.0 * lo;
    d2 << "max/min over the last " << (sups.size() - start) << " levels = " << hi / lo;
    add_check(s, ok, CheckResult{"resolvent stability", flat, d2.str()});
  }
  out.status = ok ? 0 : 1;
  out.summary = s.str();
  return out;
}

ExperimentOutcome run_pollution(const ExperimentConfig& cfg, const ModelProblem& mp) {
  const Contour window = pick_contour(cfg, mp);
  const Contour wide = enlarged(window, mp.f);
  const SpectralResult ref = contour_eigensolve(mp.f, wide, cfg.solver);
  std::vector<Complex> spectrum;
  for (const auto& e : ref.eigenvalues) spectrum.push_back(e.lambda);
  std::vector<PollutionLevel> levels =
      pollution_scan(mp.hierarchy, mp.f, window, spectrum, cfg.pollution_tol_match.value_or(1.0), cfg.solver);
  const double tol = cfg.pollution_tol_match.value_or(pollution_tolerance(levels, spectrum, window, mp.mesh_widths));
  if (std::isfinite(tol)) {
    flag_spurious(levels, spectrum, tol);
  } else {
    for (auto& l : levels) l.spurious.clear();
  }
  ExperimentOutcome out;
  out.report_csv = csv_line({"n", "dim", "eigenvalues", "spurious"});
  for (const auto& l : levels) {
    out.report_csv += csv_line({std::to_string(l.n), std::to_string(mp.hierarchy.level_dim(l.n)),
                                std::to_string(l.eigenvalues.size()), std::to_string(l.spurious.size())});
  }
  std::ostringstream s;
  s << "experiment pollution on " << mp.name << ": " << spectrum.size() << " reference eigenvalues, tol_match "
    << (std::isfinite(tol) ? format_double(tol) : std::string("unavailable")) << "\n";
  bool ok = true;
  bool clean = true;
  std::ostringstream d;
  const std::size_t start = levels.size() > 2 ? levels.size() - 2 : 0;
  for (std::size_t i = start; i < levels.size(); ++i) {
    for (const Complex& z : levels[i].spurious) {
      clean = false;
      d << "level " << levels[i].n << ": " << complex_str(z) << "; ";
    }
  }
  if (!std::isfinite(tol)) {
    s << "SKIP no spectral pollution: tol_match needs an order fit over at least 3 levels; set pollution.tol_match\n";
  } else {
    if (clean) d << "no spurious eigenvalues on the two finest levels";
    add_check(s, ok, CheckResult{"no spectral pollution", clean, d.str()});
  }
  out.status = ok ? 0 : 1;
  out.summary = s.str();
  return out;
}

}  // namespace

std::vector<Index> parse_levels(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    const long long v = to_integer("levels", t);
    if (v < 1) throw ConfigError("levels must be positive integers");
    out.push_back(static_cast<Index>(v));
  }
  if (out.empty()) throw ConfigError("levels must list at least one cell count");
  return out;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const ModelRegistry& registry) {
  ExperimentConfig cfg;
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (!kv.emplace(key, value).second) throw ConfigError("duplicate key '" + key + "'");
  }

  if (!kv.count("model")) throw ConfigError("missing key 'model'");
  if (!kv.count("experiment")) throw ConfigError("missing key 'experiment'");
  cfg.model = kv.at("model");
  if (!registry.contains(cfg.model)) throw ConfigError("unknown model '" + cfg.model + "'");
  cfg.experiment = kv.at("experiment");
  if (!kExperiments.count(cfg.experiment)) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  const ModelEntry& entry = registry.get(cfg.model);
  for (const auto& p : entry.params) cfg.model_params[p.name] = p.default_value;

  std::optional<double> cre, cim, crx, cry;
  std::optional<int> cnodes;
  std::optional<double> tre, tim, sre, sim;
  for (const auto& [key, value] : kv) {
    if (key == "model" || key == "experiment") continue;
    if (key.rfind("model.", 0) == 0) {
      const std::string name = key.substr(6);
      if (!cfg.model_params.count(name)) throw ConfigError("model '" + cfg.model + "' has no parameter '" + name + "'");
      cfg.model_params[name] = to_double(key, value);
    } else if (key == "levels") {
      cfg.levels = parse_levels(value);
    } else if (key == "contour.center_re") {
      cre = to_double(key, value);
    } else if (key == "contour.center_im") {
      cim = to_double(key, value);
    } else if (key == "contour.rx") {
      crx = positive(key, value);
    } else if (key == "contour.ry") {
      cry = positive(key, value);
    } else if (key == "contour.nodes") {
      cnodes = positive_int(key, value);
    } else if (key == "solver.probe_rank") {
      cfg.solver.probe_rank = positive_int(key, value);
    } else if (key == "solver.rank_tol") {
      cfg.solver.rank_tol = positive(key, value);
    } else if (key == "solver.cluster_tol") {
      cfg.solver.cluster_tol = positive(key, value);
    } else if (key == "solver.residual_tol") {
      cfg.solver.residual_tol = positive(key, value);
    } else if (key == "solver.min_moments") {
      cfg.solver.min_moments = positive_int(key, value);
    } else if (key == "solver.max_moments") {
      cfg.solver.max_moments = positive_int(key, value);
    } else if (key == "solver.max_condition") {
      cfg.solver.max_condition = positive(key, value);
    } else if (key == "solve.match_tol") {
      cfg.solve_match_tol = positive(key, value);
    } else if (key == "tcompat.tol") {
      cfg.tcompat_tol = positive(key, value);
    } else if (key == "tcompat.lambda_re") {
      tre = to_double(key, value);
    } else if (key == "tcompat.lambda_im") {
      tim = to_double(key, value);
    } else if (key == "stability.center_re") {
      sre = to_double(key, value);
    } else if (key == "stability.center_im") {
      sim = to_double(key, value);
    } else if (key == "stability.radius") {
      cfg.stability_radius = positive(key, value);
    } else if (key == "stability.samples") {
      cfg.stability_samples = positive_int(key, value);
    } else if (key == "pollution.tol_match") {
      cfg.pollution_tol_match = positive(key, value);
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "seed") {
      const long long s = to_integer(key, value);
      if (s < 0) throw ConfigError("seed must be non-negative");
      cfg.solver.seed = static_cast<std::uint64_t>(s);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  if (cfg.solver.max_moments < cfg.solver.min_moments) throw ConfigError("solver.max_moments < solver.min_moments");
  if (cre || cim || crx || cry || cnodes) {
    if (!cre || !crx) throw ConfigError("contour needs at least contour.center_re and contour.rx");
    Contour c{Complex(*cre, cim.value_or(0.0)), *crx, cry.value_or(*crx), cnodes.value_or(64)};
    try {
      c.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("contour: ") + e.what());
    }
    cfg.contour = c;
  }
  if (tre || tim) cfg.tcompat_lambda = Complex(tre.value_or(0.0), tim.value_or(0.0));
  if (sre || sim) cfg.stability_center = Complex(sre.value_or(0.0), sim.value_or(0.0));
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path, const ModelRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), registry);
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const ModelRegistry& registry) {
  const ModelEntry& entry = registry.get(cfg.model);
  std::optional<ModelProblem> mp;
  try {
    mp.emplace(entry.build(cfg.model_params, cfg.levels));
  } catch (const UsageError& e) {
    throw ConfigError(std::string("model setup: ") + e.what());
  }
  try {
    if (cfg.experiment == "solve") return run_solve(cfg, *mp);
    if (cfg.experiment == "tcompat") return run_tcompat(cfg, *mp);
    if (cfg.experiment == "converge") return run_converge(cfg, *mp);
    if (cfg.experiment == "stability") return run_stability(cfg, *mp);
    if (cfg.experiment == "pollution") return run_pollution(cfg, *mp);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    ExperimentOutcome out;
    out.status = 1;
    out.summary = "experiment " + cfg.experiment + " on " + cfg.model + "\nFAIL " + e.what() + "\n";
    return out;
  }
  throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

int run(const ExperimentConfig& config, const ModelRegistry& registry) {
  const ExperimentOutcome out = run_experiment(config, registry);
  std::filesystem::create_directories(config.output_dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(config.output_dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (config.output_dir / name).string());
    f << content;
  };
  write("report.csv", out.report_csv);
  write("summary.txt", out.summary + (out.status == 0 ? "status: pass\n" : "status: fail\n"));
  if (!out.svg.empty()) write("convergence.svg", out.svg);
  return out.status;
}

}  // namespace holofredholm
