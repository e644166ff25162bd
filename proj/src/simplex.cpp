#include "simplexsmooth/simplex.hpp"

#include "simplexsmooth/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace simplexsmooth {

namespace {

void require(bool cond, const char* what) {
  if (!cond)
    throw Error(what);
}

// (e) * log(base) with 0 * log 0 = 0.
double log_power(double exponent, double base) {
  if (exponent == 0.0)
    return 0.0;
  if (base <= 0.0)
    return exponent > 0.0 ? -std::numeric_limits<double>::infinity()
                          : std::numeric_limits<double>::infinity();
  return exponent * std::log(base);
}

} // namespace

SimplexPoint::SimplexPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  require(!coords_.empty(), "simplex point must have dimension >= 1");
  for (double& c : coords_) {
    require(std::isfinite(c), "simplex point has a non-finite coordinate");
    require(c >= -kSimplexTolerance, "simplex point has a negative coordinate");
    if (c < 0.0)
      c = 0.0;
  }
  double sum = std::accumulate(coords_.begin(), coords_.end(), 0.0);
  require(sum <= 1.0 + kSimplexTolerance, "simplex point coordinates sum above 1");
  if (sum > 1.0) {
    for (double& c : coords_)
      c /= sum;
    sum = std::min(1.0, std::accumulate(coords_.begin(), coords_.end(), 0.0));
  }
  l1_ = sum;
}

DirichletParams::DirichletParams(std::vector<double> u_, double v_)
    : u(std::move(u_)), v(v_) {
  require(!u.empty(), "Dirichlet parameters need dimension >= 1");
  for (double ui : u)
    require(std::isfinite(ui) && ui > 0.0, "Dirichlet parameter u_i must be positive");
  require(std::isfinite(v) && v > 0.0, "Dirichlet parameter v must be positive");
}

KernelSpec::KernelSpec(SimplexPoint s_, double b_) : s(std::move(s_)), b(b_) {
  require(s.dim() >= 1, "kernel evaluation point is empty");
  require(std::isfinite(b) && b > 0.0, "bandwidth must be positive and finite");
}

double log_normalizing_constant(const DirichletParams& p) {
  double total = p.v;
  double log_denominator = std::lgamma(p.v);
  for (double ui : p.u) {
    total += ui;
    log_denominator += std::lgamma(ui);
  }
  return std::lgamma(total) - log_denominator;
}

double log_dirichlet_density(const DirichletParams& p, const SimplexPoint& x) {
  if (p.dim() != x.dim())
    throw Error("dimension mismatch between Dirichlet parameters and point");
  double value = log_normalizing_constant(p);
  for (std::size_t i = 0; i < x.dim(); ++i)
    value += log_power(p.u[i] - 1.0, x[i]);
  value += log_power(p.v - 1.0, x.remainder());
  return value;
}

DirichletParams kernel_params(const KernelSpec& spec) {
  std::vector<double> u(spec.dim());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = spec.s[i] / spec.b + 1.0;
  return DirichletParams(std::move(u), spec.s.remainder() / spec.b + 1.0);
}

double kernel_weight(const KernelSpec& spec, const SimplexPoint& x) {
  return std::exp(log_dirichlet_density(kernel_params(spec), x));
}

SimplexPoint sample_dirichlet(const DirichletParams& p, Rng& rng) {
  std::vector<double> g(p.dim());
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = rng.gamma(p.u[i]);
    total += g[i];
  }
  total += rng.gamma(p.v);
  for (double& gi : g)
    gi /= total;
  return SimplexPoint(std::move(g));
}

SimplexPoint sample_uniform_simplex(std::size_t d, Rng& rng) {
  require(d >= 1, "simplex dimension must be >= 1");
  std::vector<double> e(d);
  double total = 0.0;
  for (double& ei : e) {
    ei = rng.exponential();
    total += ei;
  }
  total += rng.exponential();
  for (double& ei : e)
    ei /= total;
  return SimplexPoint(std::move(e));
}

std::vector<double> exact_mean(const KernelSpec& spec) {
  const double d = static_cast<double>(spec.dim());
  const double a0 = 1.0 / spec.b + d + 1.0;
  std::vector<double> mean(spec.dim());
  for (std::size_t k = 0; k < mean.size(); ++k)
    mean[k] = (spec.s[k] / spec.b + 1.0) / a0;
  return mean;
}

double exact_central_second_moment(const KernelSpec& spec, std::size_t k, std::size_t l) {
  if (k >= spec.dim() || l >= spec.dim())
    throw Error("moment index out of range");
  const double b = spec.b;
  const double d = static_cast<double>(spec.dim());
  const double sk = spec.s[k];
  const double sl = spec.s[l];
  const double ak = sk / b + 1.0;
  const double al = sl / b + 1.0;
  const double a0 = 1.0 / b + d + 1.0;
  const double delta = k == l ? 1.0 : 0.0;
  const double cov = (ak * delta - ak * al / a0) / (a0 * (a0 + 1.0));
  return cov + (ak / a0) * (al / a0) - sk * (al / a0) - sl * (ak / a0) + sk * sl;
}

double a_b_closed_form(const KernelSpec& spec) {
  const DirichletParams p = kernel_params(spec);
  std::vector<double> u2(p.dim());
  for (std::size_t i = 0; i < u2.size(); ++i)
    u2[i] = 2.0 * p.u[i] - 1.0;
  const DirichletParams squared(std::move(u2), 2.0 * p.v - 1.0);
  return std::exp(2.0 * log_normalizing_constant(p) - log_normalizing_constant(squared));
}

double a_b_uniform_bound(const KernelSpec& spec) {
  const double d = static_cast<double>(spec.dim());
  const double b = spec.b;
  double product = spec.s.remainder();
  for (double si : spec.s.coords())
    product *= si;
  if (product <= 0.0)
    return std::numeric_limits<double>::infinity();
  const double log_bound = 0.5 * (d + 1.0) * std::log(b) +
                           (d + 0.5) * std::log(1.0 / b + d) -
                           0.5 * d * std::log(4.0 * std::numbers::pi) - 0.5 * std::log(product);
  return std::exp(log_bound);
}

void check_index_set(const IndexSet& J, std::size_t d) {
  for (std::size_t i = 0; i < J.size(); ++i) {
    require(J[i] < d, "index set entry out of range");
    require(i == 0 || J[i - 1] < J[i], "index set must be sorted and unique");
  }
}

double psi(const SimplexPoint& s, const IndexSet& J) {
  check_index_set(J, s.dim());
  const std::size_t d = s.dim();
  double product = s.remainder();
  for (std::size_t i = 0; i < d; ++i)
    if (!std::binary_search(J.begin(), J.end(), i))
      product *= s[i];
  if (!(product > 0.0))
    throw Error("boundary-degenerate psi: zero factor under the root");
  const double free_dims = static_cast<double>(d - J.size());
  return 1.0 / std::sqrt(std::pow(4.0 * std::numbers::pi, free_dims) * product);
}

double boundary_gamma_factor(double lambda) {
  require(lambda > 0.0, "boundary limit lambda must be positive");
  return std::exp(std::lgamma(2.0 * lambda + 1.0) - (2.0 * lambda + 1.0) * std::numbers::ln2 -
                  2.0 * std::lgamma(lambda + 1.0));
}

double a_b_asymptotic(const KernelSpec& spec, const IndexSet& J, std::span<const double> lambda) {
  require(lambda.size() == J.size(), "lambda must have one entry per index in J");
  double value = std::pow(spec.b, -0.5 * static_cast<double>(spec.dim() + J.size())) * psi(spec.s, J);
  for (double l : lambda)
    value *= boundary_gamma_factor(l);
  return value;
}

double factorial(std::size_t d) {
  double f = 1.0;
  for (std::size_t i = 2; i <= d; ++i)
    f *= static_cast<double>(i);
  return f;
}

std::string format_round_trip(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

} // namespace simplexsmooth
