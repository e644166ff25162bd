#include "simplexsmooth/simulation.hpp"

#include <cmath>

namespace simplexsmooth {

namespace {

void require_bivariate(const SimplexPoint& s) {
  if (s.dim() != 2)
    throw Error("benchmark targets are defined on S_2");
}

Matrix hessian2(double h11, double h12, double h22) {
  Matrix h(2);
  h(0, 0) = h11;
  h(0, 1) = h12;
  h(1, 0) = h12;
  h(1, 1) = h22;
  return h;
}

} // namespace

double target_value(int id, const SimplexPoint& s) {
  require_bivariate(s);
  const double x = s[0];
  const double y = s[1];
  switch (id) {
  case 0:
    return 1.0 + 2.0 * x - 3.0 * y;
  case 1:
    return x * y;
  case 2:
    return std::log(1.0 + x + y);
  case 3:
    return std::sin(x) + std::cos(y);
  case 4:
    return std::sqrt(x) + std::sqrt(y);
  case 5:
    return (x + 0.25) * (x + 0.25) + (y + 0.75) * (y + 0.75);
  case 6:
    return (1.0 + x) * std::exp(y);
  default:
    throw Error("target id " + std::to_string(id) + " out of range (0..6)");
  }
}

Matrix target_hessian(int id, const SimplexPoint& s) {
  require_bivariate(s);
  const double x = s[0];
  const double y = s[1];
  switch (id) {
  case 0:
    return Matrix(2);
  case 1:
    return hessian2(0.0, 1.0, 0.0);
  case 2: {
    const double t = -1.0 / ((1.0 + x + y) * (1.0 + x + y));
    return hessian2(t, t, t);
  }
  case 3:
    return hessian2(-std::sin(x), 0.0, -std::cos(y));
  case 4:
    return hessian2(-0.25 * std::pow(x, -1.5), 0.0, -0.25 * std::pow(y, -1.5));
  case 5:
    return hessian2(2.0, 0.0, 2.0);
  case 6:
    return hessian2(0.0, std::exp(y), (1.0 + x) * std::exp(y));
  default:
    throw Error("target id " + std::to_string(id) + " out of range (0..6)");
  }
}

TargetFunction target(int id) {
  target_value(id, SimplexPoint{0.25, 0.25});
  TargetFunction t;
  t.id = id;
  t.name = "m" + std::to_string(id);
  t.value = [id](const SimplexPoint& s) { return target_value(id, s); };
  t.hessian = [id](const SimplexPoint& s) { return target_hessian(id, s); };
  return t;
}

TargetFunction affine_target(double intercept, std::vector<double> slope) {
  TargetFunction t;
  t.id = 0;
  t.name = "affine";
  const std::size_t d = slope.size();
  t.value = [intercept, slope](const SimplexPoint& s) {
    if (s.dim() != slope.size())
      throw Error("affine target dimension mismatch");
    double v = intercept;
    for (std::size_t i = 0; i < slope.size(); ++i)
      v += slope[i] * s[i];
    return v;
  };
  t.hessian = [d](const SimplexPoint&) { return Matrix(d); };
  return t;
}

} // namespace simplexsmooth
