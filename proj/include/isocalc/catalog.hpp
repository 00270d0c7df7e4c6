#ifndef ISOCALC_CATALOG_HPP
#define ISOCALC_CATALOG_HPP

#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "isocalc/vector_field.hpp"

namespace isocalc {

template <typename Real>
std::string format_param(Real v) {
  std::ostringstream os;
  os << static_cast<double>(v);
  return os.str();
}

/// Real function of one variable with its derivative.
template <typename Real>
struct ScalarFunction {
  std::string name;
  std::function<Real(Real)> f;
  std::function<Real(Real)> df;  ///< may be empty where f has kinks
  bool c1 = false;
  bool c2 = false;
  std::optional<Real> lipschitz_constant;
};

template <typename Real>
ScalarFunction<Real> scalar_function(const std::string& name, const std::vector<Real>& params = {}) {
  auto param = [&](std::size_t i, Real fallback) { return i < params.size() ? params[i] : fallback; };
  ScalarFunction<Real> s;
  s.name = name;
  if (name == "identity") {
    s.f = [](Real x) { return x; };
    s.df = [](Real) { return Real(1); };
    s.c1 = s.c2 = true;
    s.lipschitz_constant = Real(1);
  } else if (name == "square") {
    s.f = [](Real x) { return x * x; };
    s.df = [](Real x) { return 2 * x; };
    s.c1 = s.c2 = true;
  } else if (name == "abs") {
    s.f = [](Real x) { return std::abs(x); };
    s.lipschitz_constant = Real(1);
  } else if (name == "exp") {
    s.f = [](Real x) { return std::exp(x); };
    s.df = [](Real x) { return std::exp(x); };
    s.c1 = s.c2 = true;
  } else if (name == "sqrt_shifted") {
    // sqrt(x + c); NaN left of -c.
    const Real c = param(0, Real(2));
    s.name = "sqrt_shifted:" + format_param(c);
    s.f = [c](Real x) { return x + c >= 0 ? std::sqrt(x + c) : std::numeric_limits<Real>::quiet_NaN(); };
    s.df = [c](Real x) { return x + c > 0 ? 1 / (2 * std::sqrt(x + c)) : std::numeric_limits<Real>::quiet_NaN(); };
    s.c1 = s.c2 = true;
  } else if (name == "soft_threshold") {
    const Real lambda = param(0, Real(1));
    if (lambda < 0) throw InvalidInput("soft_threshold: threshold must be non-negative");
    s.name = "soft_threshold:" + format_param(lambda);
    s.f = [lambda](Real x) { return (x > 0 ? Real(1) : x < 0 ? Real(-1) : Real(0)) * std::max<Real>(std::abs(x) - lambda, 0); };
    s.lipschitz_constant = Real(1);
  } else {
    throw InvalidInput("unknown scalar function '" + name + "'");
  }
  return s;
}

/// F(x) = (f(x_1), ..., f(x_d)).
template <typename Real>
VectorField<Real> scalar_lift(const ScalarFunction<Real>& s) {
  VectorField<Real> field;
  field.eval = [f = s.f](const RealVector<Real>& x) { return RealVector<Real>(x.unaryExpr(f)); };
  if (s.c1 && s.df)
    field.analytic_jacobian = [df = s.df](const RealVector<Real>& x) {
      return RealMatrix<Real>(x.unaryExpr(df).asDiagonal());
    };
  field.meta.name = "scalar_lift:" + s.name;
  field.meta.claims_block_constant = true;
  field.meta.claims_c1_point_symmetric = s.c1;
  field.meta.claims_c2 = s.c2;
  field.meta.lipschitz_constant = s.lipschitz_constant;
  return field;
}

/// Constant field c (1, ..., 1); L_F(A) = c I.
template <typename Real>
VectorField<Real> constant_field(Real c) {
  VectorField<Real> field;
  field.eval = [c](const RealVector<Real>& x) { return RealVector<Real>::Constant(x.size(), c); };
  field.analytic_jacobian = [](const RealVector<Real>& x) { return RealMatrix<Real>::Zero(x.size(), x.size()); };
  field.meta = {"constant:" + format_param(c), true, true, true, Real(0)};
  return field;
}

/// F = (1, 0, ..., 0): the projector onto the top eigenvector. Not
/// block-constant, so L_F is only defined where the top eigenvalue is simple.
template <typename Real>
VectorField<Real> top_block_projection() {
  VectorField<Real> field;
  field.eval = [](const RealVector<Real>& x) {
    RealVector<Real> y = RealVector<Real>::Zero(x.size());
    if (x.size() > 0) y(0) = 1;
    return y;
  };
  field.meta = {"top_block_projection", false, false, false, std::nullopt};
  return field;
}

/// F(x1, x2) = (x1 - x2, 0) on x1 >= x2. Its extension is
/// (relu(x1 - x2), relu(x2 - x1)), Lipschitz with constant sqrt(2), not C^1 on
/// the diagonal.
template <typename Real>
VectorField<Real> paper_gap_linear() {
  VectorField<Real> field;
  field.dim = 2;
  field.eval = [](const RealVector<Real>& x) { return RealVector<Real>{{x(0) - x(1), Real(0)}}; };
  field.meta = {"paper_gap_linear", true, false, false, std::sqrt(Real(2))};
  return field;
}

/// F(x1, x2) = ((x1 - x2)^2, 0): C^1 point-symmetric but not a gradient field.
template <typename Real>
VectorField<Real> paper_gap_square() {
  VectorField<Real> field;
  field.dim = 2;
  field.eval = [](const RealVector<Real>& x) {
    const Real g = x(0) - x(1);
    return RealVector<Real>{{g * g, Real(0)}};
  };
  field.analytic_jacobian = [](const RealVector<Real>& x) {
    const Real g = x(0) - x(1);
    RealMatrix<Real> j = RealMatrix<Real>::Zero(2, 2);
    // The nonzero component sits at whichever coordinate is larger.
    const Index row = g >= 0 ? 0 : 1;
    j(row, 0) = 2 * g;
    j(row, 1) = -2 * g;
    return j;
  };
  field.meta = {"paper_gap_square", true, true, false, std::nullopt};
  return field;
}

/// F_m(x) = x_m (1 + c mean(x)). Smooth, permutation-equivariant and not
/// conservative; its Jacobian has nonzero, non-symmetric t. L_F(A) equals
/// A + (c/d) tr(A) A.
template <typename Real>
VectorField<Real> trace_coupled(Real c) {
  VectorField<Real> field;
  field.eval = [c](const RealVector<Real>& x) {
    const Real mean = x.size() ? x.mean() : Real(0);
    return RealVector<Real>(x * (1 + c * mean));
  };
  field.analytic_jacobian = [c](const RealVector<Real>& x) {
    const Index d = x.size();
    const Real mean = d ? x.mean() : Real(0);
    RealMatrix<Real> j = (c / Real(d)) * x * RealVector<Real>::Ones(d).transpose();
    j.diagonal().array() += 1 + c * mean;
    return j;
  };
  field.meta = {"trace_coupled:" + format_param(c), true, true, true, std::nullopt};
  return field;
}

/// Looks up a catalog member. `params` holds the numeric parameters that follow
/// the name in a field-spec string.
template <typename Real>
VectorField<Real> builtin(const std::string& name, const std::vector<Real>& params = {}) {
  auto param = [&](std::size_t i, Real fallback) { return i < params.size() ? params[i] : fallback; };
  if (name == "scalar_lift") throw InvalidInput("scalar_lift needs a function name, e.g. scalar_lift:square");
  if (name == "soft_threshold" || name == "sqrt_shifted") return scalar_lift(scalar_function<Real>(name, params));
  if (name == "constant") return constant_field<Real>(param(0, Real(1)));
  if (name == "top_block_projection") return top_block_projection<Real>();
  if (name == "paper_gap_linear") return paper_gap_linear<Real>();
  if (name == "paper_gap_square") return paper_gap_square<Real>();
  if (name == "trace_coupled") return trace_coupled<Real>(param(0, Real(1)));
  throw InvalidInput("unknown vector field '" + name + "'");
}

/// Parses "scalar_lift:square", "soft_threshold:1.0", "top_block_projection",
/// "scalar_lift:sqrt_shifted:2", ...
template <typename Real>
VectorField<Real> parse_field_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty() || parts[0].empty()) throw InvalidInput("empty field spec");
  auto numbers_from = [&](std::size_t first) {
    std::vector<Real> out;
    for (std::size_t i = first; i < parts.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(parts[i].c_str(), &end);
      if (parts[i].empty() || *end != '\0' || !std::isfinite(v))
        throw InvalidInput("bad numeric parameter '" + parts[i] + "' in field spec '" + spec + "'");
      out.push_back(static_cast<Real>(v));
    }
    return out;
  };
  if (parts[0] == "scalar_lift") {
    if (parts.size() < 2) throw InvalidInput("scalar_lift needs a function name, e.g. scalar_lift:square");
    return scalar_lift(scalar_function<Real>(parts[1], numbers_from(2)));
  }
  return builtin<Real>(parts[0], numbers_from(1));
}

struct CatalogEntry {
  std::string spec;
  std::string description;
};

inline std::vector<CatalogEntry> catalog_entries() {
  return {
      {"scalar_lift:identity", "f(x) = x elementwise"},
      {"scalar_lift:square", "f(x) = x^2 elementwise"},
      {"scalar_lift:abs", "f(x) = |x| elementwise"},
      {"scalar_lift:exp", "f(x) = exp(x) elementwise"},
      {"sqrt_shifted:c", "f(x) = sqrt(x + c) elementwise, c defaults to 2"},
      {"soft_threshold:lambda", "f(x) = sign(x) max(|x| - lambda, 0) elementwise"},
      {"constant:c", "F(x) = (c, ..., c)"},
      {"top_block_projection", "F(x) = (1, 0, ..., 0), not block-constant"},
      {"paper_gap_linear", "F(x1, x2) = (x1 - x2, 0), d = 2"},
      {"paper_gap_square", "F(x1, x2) = ((x1 - x2)^2, 0), d = 2"},
      {"trace_coupled:c", "F_m(x) = x_m (1 + c mean(x)), c defaults to 1"},
  };
}

}  // namespace isocalc

#endif  // ISOCALC_CATALOG_HPP
