// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#include "holofredholm/opfun.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "holofredholm/errors.hpp"

namespace holofredholm {

namespace {

std::vector<Complex> trimmed(std::vector<Complex> c) {
  while (c.size() > 1 && c.back() == Complex(0.0, 0.0)) c.pop_back();
  if (c.empty()) c.push_back(0.0);
  return c;
}

Complex horner(const std::vector<Complex>& c, Complex z) {
  Complex acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

// Coefficients of t -> p(z + t) up to order `order`.
std::vector<Complex> taylor_shift(const std::vector<Complex>& p, Complex z, int order) {
  std::vector<Complex> work = p;
  std::vector<Complex> out(static_cast<size_t>(order) + 1, 0.0);
  // Repeated synthetic division by (x - z) yields the shifted coefficients.
  for (int k = 0; k <= order && !work.empty(); ++k) {
    Complex rem = 0.0;
    std::vector<Complex> quot(work.size() > 1 ? work.size() - 1 : 0);
    for (size_t i = work.size(); i-- > 0;) {
      rem = rem * z + work[i];
      if (i > 0) quot[i - 1] = rem;
    }
    out[static_cast<size_t>(k)] = rem;
    work = std::move(quot);
  }
  return out;
}

std::vector<Complex> polynomial_roots(const std::vector<Complex>& c) {
  const size_t deg = c.size() - 1;
  if (deg == 0) return {};
  CMatrix companion = CMatrix::Zero(static_cast<Index>(deg), static_cast<Index>(deg));
  for (size_t i = 1; i < deg; ++i) companion(static_cast<Index>(i), static_cast<Index>(i - 1)) = 1.0;
  for (size_t i = 0; i < deg; ++i) companion(static_cast<Index>(i), static_cast<Index>(deg - 1)) = -c[i] / c[deg];
  Eigen::ComplexEigenSolver<CMatrix> eig(companion, false);
  std::vector<Complex> roots(deg);
  for (size_t i = 0; i < deg; ++i) roots[i] = eig.eigenvalues()(static_cast<Index>(i));
  return roots;
}

double factorial(int j) {
  double f = 1.0;
  for (int i = 2; i <= j; ++i) f *= i;
  return f;
}

std::vector<Complex> conj_all(const std::vector<Complex>& v) {
  std::vector<Complex> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = std::conj(v[i]);
  return out;
}

bool all_real(const std::vector<Complex>& v) {
  for (const auto& c : v) {
    if (c.imag() != 0.0) return false;
  }
  return true;
}

std::string format_coeffs(const std::vector<Complex>& v) {
  std::ostringstream out;
  out << "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    if (v[i].imag() == 0.0) {
      out << v[i].real();
    } else {
      out << v[i].real() << (v[i].imag() < 0 ? "-" : "+") << std::abs(v[i].imag()) << "i";
    }
  }
  out << "]";
  return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// ScalarHolo

ScalarHolo ScalarHolo::polynomial(std::vector<Complex> coeffs) {
  ScalarHolo s;
  s.kind_ = Kind::Polynomial;
  s.num_ = trimmed(std::move(coeffs));
  s.den_ = {1.0};
  return s;
}

ScalarHolo ScalarHolo::rational(std::vector<Complex> num, std::vector<Complex> den) {
  den = trimmed(std::move(den));
  if (den.size() == 1 && den[0] == Complex(0.0, 0.0)) throw UsageError("ScalarHolo::rational: zero denominator");
  if (den.size() == 1) {
    for (auto& c : num) c /= den[0];
    return polynomial(std::move(num));
  }
  ScalarHolo s;
  s.kind_ = Kind::Rational;
  s.num_ = trimmed(std::move(num));
  s.den_ = std::move(den);
  s.poles_ = polynomial_roots(s.den_);
  return s;
}

ScalarHolo ScalarHolo::opaque(std::function<Complex(Complex)> f, std::vector<Complex> poles, int max_order,
                              std::string label) {
  if (!f) throw UsageError("ScalarHolo::opaque: empty callable");
  if (max_order < 0) throw UsageError("ScalarHolo::opaque: negative derivative order limit");
  ScalarHolo s;
  s.kind_ = Kind::Opaque;
  s.fn_ = std::move(f);
  s.poles_ = std::move(poles);
  s.max_order_ = max_order;
  s.label_ = std::move(label);
  return s;
}

double ScalarHolo::pole_distance(Complex z) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : poles_) d = std::min(d, std::abs(z - p));
  return d;
}

void ScalarHolo::check_point(Complex z) const {
  for (const auto& p : poles_) {
    if (std::abs(z - p) < kPoleGuard) {
      std::ostringstream msg;
      msg << "point " << z << " is within " << kPoleGuard << " of the pole " << p;
      throw DomainError(msg.str());
    }
  }
}

Complex ScalarHolo::operator()(Complex z) const {
  check_point(z);
  switch (kind_) {
    case Kind::Polynomial:
      return horner(num_, z);
    case Kind::Rational:
      return horner(num_, z) / horner(den_, z);
    case Kind::Opaque:
      return fn_(z);
  }
  return 0.0;
}

Complex ScalarHolo::derivative(Complex z, int j) const {
  if (j < 0) throw UsageError("ScalarHolo::derivative: negative order");
  if (j == 0) return (*this)(z);
  check_point(z);
  if (kind_ == Kind::Opaque) {
    if (j > max_order_) {
      std::ostringstream msg;
      msg << "derivative order " << j << " exceeds the declared limit " << max_order_ << " of " << label_;
      throw UsageError(msg.str());
    }
    return cauchy_derivative(z, j, std::min(0.1, 0.5 * pole_distance(z)));
  }
  const std::vector<Complex> p = taylor_shift(num_, z, j);
  if (kind_ == Kind::Polynomial) return p[static_cast<size_t>(j)] * factorial(j);
  const std::vector<Complex> q = taylor_shift(den_, z, j);
  std::vector<Complex> f(static_cast<size_t>(j) + 1);
  for (size_t k = 0; k <= static_cast<size_t>(j); ++k) {
    Complex acc = p[k];
    for (size_t i = 1; i <= k; ++i) acc -= q[i] * f[k - i];
    f[k] = acc / q[0];
  }
  return f[static_cast<size_t>(j)] * factorial(j);
}

Complex ScalarHolo::cauchy_derivative(Complex z, int j, double radius, int nodes) const {
  if (j < 0) throw UsageError("ScalarHolo::cauchy_derivative: negative order");
  if (nodes < 1 || !(radius > 0.0)) throw UsageError("ScalarHolo::cauchy_derivative: need positive radius and nodes");
  if (radius >= pole_distance(z)) {
    std::ostringstream msg;
    msg << "Cauchy circle of radius " << radius << " around " << z << " encloses a pole";
    throw DomainError(msg.str());
  }
  Complex acc = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const Complex w = std::polar(1.0, 2.0 * std::numbers::pi * k / nodes);
    acc += (*this)(z + radius * w) * std::pow(w, -j);
  }
  return acc / static_cast<double>(nodes) * factorial(j) / std::pow(radius, j);
}

ScalarHolo ScalarHolo::conj_reflected() const {
  ScalarHolo s = *this;
  s.num_ = conj_all(num_);
  s.den_ = conj_all(den_);
  s.poles_ = conj_all(poles_);
  if (kind_ == Kind::Opaque) {
    auto f = fn_;
    s.fn_ = [f](Complex w) { return std::conj(f(std::conj(w))); };
    s.label_ = "conj(" + label_ + ")";
  }
  return s;
}

bool ScalarHolo::is_real() const { return kind_ != Kind::Opaque && all_real(num_) && all_real(den_); }

std::string ScalarHolo::describe() const {
  switch (kind_) {
    case Kind::Polynomial:
      return "poly" + format_coeffs(num_);
    case Kind::Rational:
      return "rational" + format_coeffs(num_) + "/" + format_coeffs(den_);
    case Kind::Opaque:
      return label_;
  }
  return {};
}

bool Domain::contains(Complex z) const { return std::abs(z - center) <= radius; }

// ---------------------------------------------------------------------------
// HolomorphicOpFunction

struct HolomorphicOpFunction::Cache {
  std::once_flag once;
  std::vector<double> norms;
  std::once_flag sparse_once;
  /// Empty unless every form is sparse.
  std::vector<std::shared_ptr<const SparseCMatrix>> sparse_forms;
};

HolomorphicOpFunction::HolomorphicOpFunction(GramSpace space, std::vector<ScalarHolo> scalars,
                                             std::vector<CMatrix> forms, Domain domain)
    : space_(std::move(space)),
      scalars_(std::move(scalars)),
      forms_(std::move(forms)),
      domain_(std::move(domain)),
      cache_(std::make_shared<Cache>()) {
  if (scalars_.empty()) throw UsageError("HolomorphicOpFunction: at least one term is required");
  if (scalars_.size() != forms_.size()) throw UsageError("HolomorphicOpFunction: scalar and matrix counts differ");
  for (const auto& f : forms_) {
    if (f.rows() != space_.dim() || f.cols() != space_.dim()) {
      throw UsageError("HolomorphicOpFunction: term matrix does not match the space dimension");
    }
  }
  for (const auto& s : scalars_) {
    for (const auto& p : s.poles()) domain_.poles.push_back(p);
  }
}

HolomorphicOpFunction HolomorphicOpFunction::from_operators(const GramSpace& space, std::vector<ScalarHolo> scalars,
                                                            const std::vector<CMatrix>& ops, Domain domain) {
  std::vector<CMatrix> forms;
  forms.reserve(ops.size());
  for (const auto& a : ops) {
    if (a.rows() != space.dim() || a.cols() != space.dim()) {
      throw UsageError("HolomorphicOpFunction: term matrix does not match the space dimension");
    }
    forms.push_back(space.apply(a));
  }
  return HolomorphicOpFunction(space, std::move(scalars), std::move(forms), std::move(domain));
}

CMatrix HolomorphicOpFunction::op_matrix(std::size_t i) const { return space_.solve(forms_.at(i)); }

double HolomorphicOpFunction::pole_distance(Complex z) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : domain_.poles) d = std::min(d, std::abs(z - p));
  return d;
}

void HolomorphicOpFunction::check_point(Complex z) const {
  if (!domain_.contains(z)) {
    std::ostringstream msg;
    msg << "point " << z << " lies outside the domain disk centred at " << domain_.center << " with radius "
        << domain_.radius;
    throw DomainError(msg.str());
  }
  for (const auto& p : domain_.poles) {
    if (std::abs(z - p) < kPoleGuard) {
      std::ostringstream msg;
      msg << "point " << z << " is within " << kPoleGuard << " of the pole " << p;
      throw DomainError(msg.str());
    }
  }
}

CMatrix HolomorphicOpFunction::evaluate_form(Complex z) const {
  check_point(z);
  CMatrix out = scalars_[0](z) * forms_[0];
  for (size_t i = 1; i < forms_.size(); ++i) out += scalars_[i](z) * forms_[i];
  return out;
}

LuSolver HolomorphicOpFunction::factorize(Complex z) const {
  check_point(z);
  std::call_once(cache_->sparse_once, [this] {
    std::vector<std::shared_ptr<const SparseCMatrix>> sparse;
    for (const auto& f : forms_) {
      auto s = sparse_if_sparse(f);
      if (!s) return;
      sparse.push_back(std::move(s));
    }
    cache_->sparse_forms = std::move(sparse);
  });
  const auto& sparse = cache_->sparse_forms;
  if (sparse.empty()) return LuSolver(evaluate_form(z));
  SparseCMatrix out = scalars_[0](z) * *sparse[0];
  for (size_t i = 1; i < sparse.size(); ++i) out += scalars_[i](z) * *sparse[i];
  return LuSolver(out);
}

CMatrix HolomorphicOpFunction::derivative_form(Complex z, int j) const {
  check_point(z);
  CMatrix out = CMatrix::Zero(dim(), dim());
  for (size_t i = 0; i < forms_.size(); ++i) {
    const Complex c = scalars_[i].derivative(z, j);
    if (c != Complex(0.0, 0.0)) out += c * forms_[i];
  }
  return out;
}

CMatrix HolomorphicOpFunction::evaluate(Complex z) const { return space_.solve(evaluate_form(z)); }

CMatrix HolomorphicOpFunction::derivative(Complex z, int j) const { return space_.solve(derivative_form(z, j)); }

HolomorphicOpFunction HolomorphicOpFunction::adjoint_function() const {
  std::vector<ScalarHolo> scalars;
  std::vector<CMatrix> forms;
  for (size_t i = 0; i < forms_.size(); ++i) {
    scalars.push_back(scalars_[i].conj_reflected());
    forms.push_back(forms_[i].adjoint());
  }
  Domain dom;
  dom.center = std::conj(domain_.center);
  dom.radius = domain_.radius;
  // Scalar poles are re-added by the constructor; keep only the extra ones.
  std::vector<Complex> extra = domain_.poles;
  for (const auto& s : scalars_) {
    for (const auto& p : s.poles()) {
      for (auto it = extra.begin(); it != extra.end(); ++it) {
        if (*it == p) {
          extra.erase(it);
          break;
        }
      }
    }
  }
  dom.poles = conj_all(extra);
  return HolomorphicOpFunction(space_, std::move(scalars), std::move(forms), std::move(dom));
}

bool HolomorphicOpFunction::is_self_adjoint(double rel_tol) const {
  for (size_t i = 0; i < forms_.size(); ++i) {
    if (!scalars_[i].is_real()) return false;
    const double scale = forms_[i].cwiseAbs().maxCoeff();
    if ((forms_[i] - forms_[i].adjoint()).cwiseAbs().maxCoeff() > rel_tol * scale) return false;
  }
  return true;
}

const std::vector<double>& HolomorphicOpFunction::term_norms() const {
  std::call_once(cache_->once, [this] {
    cache_->norms.resize(forms_.size());
    for (size_t i = 0; i < forms_.size(); ++i) cache_->norms[i] = form_norm(space_, forms_[i]);
  });
  return cache_->norms;
}

double HolomorphicOpFunction::norm_bound(Complex z) const {
  const auto& norms = term_norms();
  double acc = 0.0;
  for (size_t i = 0; i < forms_.size(); ++i) acc += std::abs(scalars_[i](z)) * norms[i];
  return acc;
}

CMatrix contour_integral(const HolomorphicOpFunction& f, Complex center, double radius, int nodes) {
  if (nodes < 1 || !(radius > 0.0)) throw UsageError("contour_integral: need positive radius and nodes");
  if (f.pole_distance(center) <= radius) throw ContourError("contour_integral: circle touches or encloses a pole");
  CMatrix acc = CMatrix::Zero(f.dim(), f.dim());
  for (int k = 0; k < nodes; ++k) {
    const Complex w = std::polar(1.0, 2.0 * std::numbers::pi * k / nodes);
    const Complex dz = Complex(0.0, 1.0) * radius * w * (2.0 * std::numbers::pi / nodes);
    acc += f.evaluate(center + radius * w) * dz;
  }
  return acc;
}

}  // namespace holofredholm
