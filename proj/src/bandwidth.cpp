#include "simplexsmooth/bandwidth.hpp"

#include "simplexsmooth/parallel.hpp"
#include "simplexsmooth/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace simplexsmooth {

void BandwidthSearch::validate() const {
  if (!(b_min > 0.0 && b_min < b_max && std::isfinite(b_max)))
    throw Error("bandwidth search needs 0 < b_min < b_max");
  if (coarse_grid_size < 8)
    throw Error("bandwidth search needs coarse_grid_size >= 8");
  if (!(refine_tolerance > 0.0))
    throw Error("bandwidth search needs refine_tolerance > 0");
}

namespace {

ScorePoint evaluate(const ScoreFunction& score, double b) {
  ScorePoint p{b, std::numeric_limits<double>::infinity(), false};
  try {
    const double value = score(b);
    if (std::isfinite(value)) {
      p.score = value;
      p.ok = true;
    }
  } catch (const Error&) {
  }
  return p;
}

double score_or_inf(const ScorePoint& p) {
  return p.ok ? p.score : std::numeric_limits<double>::infinity();
}

} // namespace

SelectionResult minimize_score(const ScoreFunction& score, const BandwidthSearch& search,
                               unsigned threads) {
  search.validate();
  const std::size_t m = static_cast<std::size_t>(search.coarse_grid_size);
  const double log_lo = std::log(search.b_min);
  const double log_hi = std::log(search.b_max);

  std::vector<ScorePoint> coarse(m);
  parallel_for(m, threads, [&](std::size_t i) {
    const double t = static_cast<double>(i) / static_cast<double>(m - 1);
    double b = std::exp(log_lo + t * (log_hi - log_lo));
    if (i == 0)
      b = search.b_min;
    if (i == m - 1)
      b = search.b_max;
    coarse[i] = evaluate(score, b);
  });

  std::size_t best = m;
  for (std::size_t i = 0; i < m; ++i)
    if (coarse[i].ok && (best == m || coarse[i].score < coarse[best].score))
      best = i;
  if (best == m)
    throw Error("bandwidth selection failed: the score could not be evaluated at any grid point");

  SelectionResult result;
  result.score_curve = coarse;
  result.boundary_hit = best == 0 || best == m - 1;

  if (!result.boundary_hit) {
    // Golden-section search in log b on the bracketing triple.
    constexpr double inv_phi = 0.6180339887498948482;
    double a = std::log(coarse[best - 1].b);
    double c = std::log(coarse[best + 1].b);
    double x1 = c - inv_phi * (c - a);
    double x2 = a + inv_phi * (c - a);
    ScorePoint p1 = evaluate(score, std::exp(x1));
    ScorePoint p2 = evaluate(score, std::exp(x2));
    result.score_curve.push_back(p1);
    result.score_curve.push_back(p2);
    const double log_tol = std::log1p(search.refine_tolerance);
    while (c - a > log_tol) {
      if (score_or_inf(p1) <= score_or_inf(p2)) {
        c = x2;
        x2 = x1;
        p2 = p1;
        x1 = c - inv_phi * (c - a);
        p1 = evaluate(score, std::exp(x1));
        result.score_curve.push_back(p1);
      } else {
        a = x1;
        x1 = x2;
        p1 = p2;
        x2 = a + inv_phi * (c - a);
        p2 = evaluate(score, std::exp(x2));
        result.score_curve.push_back(p2);
      }
    }
  }

  std::stable_sort(result.score_curve.begin(), result.score_curve.end(),
                   [](const ScorePoint& l, const ScorePoint& r) { return l.b < r.b; });
  const ScorePoint* argmin = nullptr;
  for (const ScorePoint& p : result.score_curve)
    if (p.ok && (argmin == nullptr || p.score < argmin->score))
      argmin = &p;
  result.b_hat = argmin->b;
  result.score = argmin->score;
  return result;
}

double lscv_score(const PointEstimator& estimator, const TargetFunctionRef& target,
                  std::span<const SimplexPoint> eval_points) {
  if (eval_points.empty())
    throw Error("LSCV needs at least one evaluation point");
  long double sum = 0.0L;
  for (const SimplexPoint& u : eval_points) {
    double estimate;
    try {
      estimate = estimator(u);
    } catch (const Error& e) {
      std::ostringstream os;
      os.precision(6);
      os << "LSCV estimator failed at U=(";
      for (std::size_t i = 0; i < u.dim(); ++i)
        os << (i ? ", " : "") << u[i];
      os << "): " << e.what();
      throw Error(os.str());
    }
    const double r = estimate - target(u);
    sum += static_cast<long double>(r) * r;
  }
  const double d = static_cast<double>(eval_points.front().dim());
  return static_cast<double>(sum / static_cast<long double>(eval_points.size())) / factorial(static_cast<std::size_t>(d));
}

double lscv_score(Method method, const KernelSmoother& smoother, double b,
                  const TargetFunctionRef& target, std::span<const SimplexPoint> eval_points) {
  return lscv_score([&](const SimplexPoint& u) { return smoother.estimate(method, b, u); }, target,
                    eval_points);
}

SelectionResult lscv_select(Method method, const Dataset& data, const TargetFunctionRef& target,
                            std::span<const SimplexPoint> eval_points,
                            const BandwidthSearch& search, unsigned threads) {
  const KernelSmoother smoother(data);
  return minimize_score(
      [&](double b) { return lscv_score(method, smoother, b, target, eval_points); }, search,
      threads);
}

double loocv_score(const KernelSmoother& smoother, double b, Method method) {
  const Dataset& data = smoother.data();
  if (data.size() < 2)
    throw Error("LOOCV needs at least two rows");
  long double sum = 0.0L;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double prediction;
    try {
      prediction = smoother.estimate(method, b, data.design()[i], i);
    } catch (const Error& e) {
      throw Error("LOOCV fit without row " + std::to_string(i) + " failed: " + e.what());
    }
    const double r = data.responses()[i] - prediction;
    sum += static_cast<long double>(r) * r;
  }
  return static_cast<double>(sum / static_cast<long double>(data.size()));
}

double loocv_score(const Dataset& data, double b, Method method) {
  return loocv_score(KernelSmoother(data), b, method);
}

SelectionResult loocv_select(const Dataset& data, Method method, const BandwidthSearch& search,
                             unsigned threads) {
  const KernelSmoother smoother(data);
  return minimize_score([&](double b) { return loocv_score(smoother, b, method); }, search,
                        threads);
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    m(i, i) = 1.0;
  return m;
}

Matrix Matrix::symmetrized() const {
  Matrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
  return out;
}

double h_term(const Matrix& hessian, const SimplexPoint& s, const IndexSet& J,
              std::span<const double> lambda) {
  const std::size_t d = s.dim();
  check_index_set(J, d);
  if (hessian.n != d)
    throw Error("Hessian dimension does not match the evaluation point");
  double sum = 0.0;
  if (J.size() == d) {
    if (lambda.size() != d)
      throw Error("h_term with J = [d] needs one lambda per coordinate");
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t l = 0; l < d; ++l)
        sum += 0.5 * ((k == l ? lambda[k] + 1.0 : 0.0) + 1.0) * hessian(k, l);
    return sum;
  }
  auto in_j = [&](std::size_t i) { return std::binary_search(J.begin(), J.end(), i); };
  for (std::size_t k = 0; k < d; ++k) {
    if (in_j(k))
      continue;
    for (std::size_t l = 0; l < d; ++l) {
      if (in_j(l))
        continue;
      sum += 0.5 * ((k == l ? s[k] : 0.0) - s[k] * s[l]) * hessian(k, l);
    }
  }
  return sum;
}

double h_term(const HessianField& hessian, const SimplexPoint& s, const IndexSet& J,
              std::span<const double> lambda) {
  return h_term(hessian(s).symmetrized(), s, J, lambda);
}

double default_hessian_step(const SimplexPoint& s) {
  double sup = 0.0;
  for (double c : s.coords())
    sup = std::max(sup, std::abs(c));
  return std::pow(std::numeric_limits<double>::epsilon(), 0.25) * std::max(sup, 0.1);
}

Matrix hessian_fd(const TargetFunctionRef& m, const SimplexPoint& s, double step) {
  const std::size_t d = s.dim();
  const double h = step > 0.0 ? step : default_hessian_step(s);
  for (double c : s.coords())
    if (!(c > 2.0 * h))
      throw Error("hessian_fd: insufficient clearance from the simplex boundary");
  if (!(s.remainder() > 2.0 * h))
    throw Error("hessian_fd: insufficient clearance from the simplex boundary");

  auto at = [&](std::size_t k, double dk, std::size_t l, double dl) {
    std::vector<double> c = s.vec();
    c[k] += dk;
    c[l] += dl;
    return m(SimplexPoint(std::move(c)));
  };
  const double centre = m(s);
  Matrix out(d);
  for (std::size_t k = 0; k < d; ++k) {
    out(k, k) = (at(k, h, k, 0.0) - 2.0 * centre + at(k, -h, k, 0.0)) / (h * h);
    for (std::size_t l = k + 1; l < d; ++l) {
      const double v = (at(k, h, l, h) - at(k, h, l, -h) - at(k, -h, l, h) + at(k, -h, l, -h)) /
                       (4.0 * h * h);
      out(k, l) = v;
      out(l, k) = v;
    }
  }
  return out;
}

double b_opt_local(const SimplexPoint& s, const IndexSet& J, std::span<const double> lambda,
                   double sigma2, double f, double h, double n) {
  if (h == 0.0)
    throw Error("bias term vanishes; MSE-optimal b undefined");
  if (!(sigma2 > 0.0) || !(f > 0.0) || !(n > 0.0))
    throw Error("b_opt_local needs sigma2 > 0, f > 0 and n > 0");
  const std::size_t d = s.dim();
  const double full = J.size() == d ? 1.0 : 0.0;
  const double dj = static_cast<double>(d + J.size());
  const double rate = dj + 4.0 + 4.0 * full;
  const double variance = a_b_asymptotic(KernelSpec(s, 1.0), J, lambda) * sigma2 / f;
  const double inner = dj / (4.0 + 4.0 * full) * variance / (h * h) / n;
  return std::pow(inner, 2.0 / rate);
}

namespace {
void check_integrals(double n, double variance_integral, double bias_integral) {
  if (!(variance_integral > 0.0) || !(bias_integral > 0.0))
    throw Error("MISE integrals must be positive");
  if (!(n > 0.0))
    throw Error("sample size must be positive");
}
} // namespace

double b_opt_global(double n, double variance_integral, double bias_integral, std::size_t d) {
  check_integrals(n, variance_integral, bias_integral);
  const double dd = static_cast<double>(d);
  const double e = 2.0 / (dd + 4.0);
  return std::pow(n, -e) * std::pow(dd / 4.0, e) * std::pow(variance_integral, e) *
         std::pow(bias_integral, -e);
}

double mise_asymptotic(double b, double n, double variance_integral, double bias_integral,
                       std::size_t d) {
  if (!(b > 0.0) || !(n >= 1.0))
    throw Error("mise_asymptotic needs b > 0 and n >= 1");
  return variance_integral / (n * std::pow(b, 0.5 * static_cast<double>(d))) +
         b * b * bias_integral;
}

double mise_at_optimum(double n, double variance_integral, double bias_integral, std::size_t d) {
  check_integrals(n, variance_integral, bias_integral);
  const double dd = static_cast<double>(d);
  return std::pow(n, -4.0 / (dd + 4.0)) * (1.0 + dd / 4.0) / std::pow(dd / 4.0, dd / (dd + 4.0)) *
         std::pow(variance_integral, 4.0 / (dd + 4.0)) * std::pow(bias_integral, dd / (dd + 4.0));
}

PluginBandwidth plugin_bandwidth(const HessianField& hessian, const TargetFunctionRef& sigma2,
                                 const TargetFunctionRef& design_density, double n, std::size_t d,
                                 std::size_t samples, Rng& rng) {
  if (samples == 0)
    throw Error("plugin_bandwidth needs at least one Monte Carlo sample");
  long double variance_sum = 0.0L;
  long double bias_sum = 0.0L;
  const IndexSet none;
  for (std::size_t i = 0; i < samples; ++i) {
    const SimplexPoint u = sample_uniform_simplex(d, rng);
    variance_sum += psi(u, none) * sigma2(u) / design_density(u);
    const double h = h_term(hessian, u, none);
    bias_sum += static_cast<long double>(h) * h;
  }
  const double volume = 1.0 / factorial(d);
  PluginBandwidth out;
  out.variance_integral = static_cast<double>(variance_sum / samples) * volume;
  out.bias_integral = static_cast<double>(bias_sum / samples) * volume;
  out.b_opt = b_opt_global(n, out.variance_integral, out.bias_integral, d);
  return out;
}

} // namespace simplexsmooth
