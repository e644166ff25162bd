#include "simplexsmooth/simulation.hpp"

#include "simplexsmooth/parallel.hpp"
#include "simplexsmooth/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace simplexsmooth {

std::vector<SimplexPoint> mesh(int k) {
  if (k < 2)
    throw Error("mesh needs k >= 2");
  const double kd = static_cast<double>(k);
  const double w = (kd - 1.0 / std::sqrt(2.0)) / (kd - 1.0);
  std::vector<SimplexPoint> points;
  points.reserve(static_cast<std::size_t>(k * (k + 1) / 2));
  for (int j = 1; j <= k; ++j)
    for (int i = 1; i <= j; ++i)
      points.emplace_back(std::vector<double>{(w * (i - 1) + 0.5) / (kd + 1.0),
                                              (w * (k - j) + 0.5) / (kd + 1.0)});
  return points;
}

Dataset gen_responses(const TargetFunction& m, const std::vector<SimplexPoint>& design,
                      double noise_sd, Rng& rng) {
  if (design.empty())
    throw Error("gen_responses needs a nonempty design");
  if (!(noise_sd >= 0.0))
    throw Error("noise_sd must be nonnegative");
  std::vector<double> y(design.size());
  for (std::size_t i = 0; i < design.size(); ++i) {
    y[i] = m(design[i]);
    if (noise_sd > 0.0)
      y[i] += noise_sd * rng.normal();
  }
  return Dataset(design, std::move(y));
}

std::vector<SimplexPoint> sample_uniform_points(std::size_t d, std::size_t count, Rng& rng) {
  std::vector<SimplexPoint> points;
  points.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    points.push_back(sample_uniform_simplex(d, rng));
  return points;
}

BoundaryDraw sample_boundary_region(std::size_t d, double delta, Rng& rng) {
  if (!(delta > 0.0))
    throw Error("boundary buffer delta must be positive");
  BoundaryDraw draw;
  draw.covers_simplex = delta >= 1.0 / static_cast<double>(d + 1);
  while (draw.attempts < kMaxRejectionAttempts) {
    ++draw.attempts;
    SimplexPoint x = sample_uniform_simplex(d, rng);
    bool in_shell = x.remainder() < delta;
    for (double c : x.coords())
      in_shell = in_shell || c < delta;
    if (in_shell) {
      draw.point = std::move(x);
      return draw;
    }
  }
  throw Error("boundary rejection sampler exceeded its attempt cap");
}

double boundary_buffer(std::size_t n) {
  return std::pow(static_cast<double>(n), -1.0 / 3.0) / 5.0;
}

DirichletParams random_design_params() { return DirichletParams({2.0, 2.0}, 2.0); }

double random_design_density(const SimplexPoint& x) {
  if (x.dim() != 2)
    throw Error("random design density is defined on S_2");
  return 120.0 * x[0] * x[1] * x.remainder();
}

namespace {

double squared_error_mean(const PointEstimator& estimate, const TargetFunctionRef& m,
                          std::span<const SimplexPoint> points,
                          double (*weight)(const SimplexPoint&)) {
  if (points.empty())
    throw Error("integrated squared error needs at least one evaluation point");
  long double sum = 0.0L;
  for (const SimplexPoint& p : points) {
    const double r = estimate(p) - m(p);
    long double term = static_cast<long double>(r) * r;
    if (weight)
      term *= weight(p);
    sum += term;
  }
  return static_cast<double>(sum / static_cast<long double>(points.size())) / 2.0;
}

PointEstimator bind(Method method, const KernelSmoother& smoother, double b) {
  return [method, &smoother, b](const SimplexPoint& p) { return smoother.estimate(method, b, p); };
}

} // namespace

double ise_plain(const PointEstimator& estimate, const TargetFunctionRef& m,
                 std::span<const SimplexPoint> eval_points) {
  return squared_error_mean(estimate, m, eval_points, nullptr);
}
double ise_plain(Method method, const KernelSmoother& smoother, double b_hat,
                 const TargetFunctionRef& m, std::span<const SimplexPoint> eval_points) {
  return ise_plain(bind(method, smoother, b_hat), m, eval_points);
}

double ise_boundary(const PointEstimator& estimate, const TargetFunctionRef& m,
                    std::span<const SimplexPoint> boundary_points) {
  return squared_error_mean(estimate, m, boundary_points, nullptr);
}
double ise_boundary(Method method, const KernelSmoother& smoother, double b_hat,
                    const TargetFunctionRef& m, std::span<const SimplexPoint> boundary_points) {
  return ise_boundary(bind(method, smoother, b_hat), m, boundary_points);
}

double ise_weighted(const PointEstimator& estimate, const TargetFunctionRef& m,
                    std::span<const SimplexPoint> eval_points) {
  return squared_error_mean(estimate, m, eval_points, &random_design_density);
}
double ise_weighted(Method method, const KernelSmoother& smoother, double b_hat,
                    const TargetFunctionRef& m, std::span<const SimplexPoint> eval_points) {
  return ise_weighted(bind(method, smoother, b_hat), m, eval_points);
}

std::string to_string(IseVariant v) {
  switch (v) {
  case IseVariant::Plain:
    return "plain";
  case IseVariant::Boundary:
    return "boundary";
  case IseVariant::Weighted:
    return "weighted";
  }
  return "plain";
}

IseVariant parse_variant(const std::string& name) {
  if (name == "plain")
    return IseVariant::Plain;
  if (name == "boundary")
    return IseVariant::Boundary;
  if (name == "weighted")
    return IseVariant::Weighted;
  throw Error("unknown ISE variant '" + name + "' (expected plain, boundary or weighted)");
}

void ExperimentConfig::validate() const {
  if (methods.empty())
    throw Error("experiment needs at least one method");
  if (targets.empty())
    throw Error("experiment needs at least one target");
  if (k_values.empty())
    throw Error("experiment needs at least one k value");
  for (int k : k_values)
    if (k < 2)
      throw Error("mesh size k must be >= 2");
  for (int t : targets)
    target(t);
  if (replications < 1)
    throw Error("replications must be >= 1");
  if (!(noise_sd >= 0.0))
    throw Error("noise_sd must be nonnegative");
  if (eval_sample_size == 0)
    throw Error("eval_sample_size must be positive");
  search.validate();
}

bool SimulationReport::complete() const {
  return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.second.complete(); });
}

double quantile(std::vector<double> values, double p) {
  if (values.empty())
    throw Error("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

CellSummary summarize(std::span<const double> values) {
  CellSummary s;
  s.completed = static_cast<int>(values.size());
  if (values.empty()) {
    s.mean = s.median = s.sd = s.iqr = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  long double sum = 0.0L;
  for (double v : values)
    sum += v;
  const long double mean = sum / static_cast<long double>(values.size());
  long double ss = 0.0L;
  for (double v : values)
    ss += (v - mean) * (v - mean);
  s.mean = static_cast<double>(mean);
  s.sd = values.size() > 1 ? static_cast<double>(std::sqrt(ss / (values.size() - 1))) : 0.0;
  const std::vector<double> copy(values.begin(), values.end());
  s.median = quantile(copy, 0.5);
  s.iqr = quantile(copy, 0.75) - quantile(copy, 0.25);
  return s;
}

namespace {

std::string join_ints(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i)
    out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

// Stream tags for the independent random sub-streams of one replication.
enum StreamTag : std::uint64_t { kDesign = 1, kNoise = 2, kLscvSample = 3, kErrorSample = 4 };

struct UnitResult {
  std::vector<double> ise;
  std::vector<double> bandwidth;
  std::vector<bool> ok;
};

} // namespace

SimulationReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t n_targets = cfg.targets.size();
  const std::size_t n_k = cfg.k_values.size();
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t n_methods = cfg.methods.size();
  const std::size_t units = n_targets * n_k * reps;

  std::vector<std::vector<SimplexPoint>> meshes;
  for (int k : cfg.k_values)
    meshes.push_back(mesh(k));
  std::vector<TargetFunction> targets;
  for (int t : cfg.targets)
    targets.push_back(target(t));

  std::vector<UnitResult> results(units);
  parallel_for(units, cfg.threads, [&](std::size_t unit) {
    const std::size_t r = unit % reps;
    const std::size_t ki = (unit / reps) % n_k;
    const std::size_t ti = unit / (reps * n_k);
    const int k = cfg.k_values[ki];
    const TargetFunction& m = targets[ti];
    const std::uint64_t rep_seed = cfg.base_seed + r;
    const std::uint64_t k_tag = static_cast<std::uint64_t>(k);
    const std::uint64_t cell_tag = k_tag * 64 + static_cast<std::uint64_t>(m.id);

    UnitResult& out = results[unit];
    out.ise.assign(n_methods, 0.0);
    out.bandwidth.assign(n_methods, 0.0);
    out.ok.assign(n_methods, false);

    std::vector<SimplexPoint> design;
    if (cfg.random_design) {
      Rng rng(derive_seed(rep_seed, kDesign, k_tag));
      const DirichletParams law = random_design_params();
      const std::size_t n = meshes[ki].size();
      design.reserve(n);
      for (std::size_t i = 0; i < n; ++i)
        design.push_back(sample_dirichlet(law, rng));
    } else {
      design = meshes[ki];
    }
    Rng noise_rng(derive_seed(rep_seed, kNoise, cell_tag));
    const KernelSmoother smoother(gen_responses(m, design, cfg.noise_sd, noise_rng));

    Rng lscv_rng(derive_seed(rep_seed, kLscvSample, k_tag));
    const std::vector<SimplexPoint> lscv_points =
        sample_uniform_points(2, cfg.eval_sample_size, lscv_rng);

    Rng error_rng(derive_seed(rep_seed, kErrorSample, k_tag));
    std::vector<SimplexPoint> error_points;
    if (cfg.variant == IseVariant::Boundary) {
      const double delta = boundary_buffer(design.size());
      error_points.reserve(cfg.eval_sample_size);
      for (std::size_t i = 0; i < cfg.eval_sample_size; ++i)
        error_points.push_back(sample_boundary_region(2, delta, error_rng).point);
    } else {
      error_points = sample_uniform_points(2, cfg.eval_sample_size, error_rng);
    }

    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      const Method method = cfg.methods[mi];
      try {
        const SelectionResult sel = minimize_score(
            [&](double b) { return lscv_score(method, smoother, b, m.value, lscv_points); },
            cfg.search);
        double ise = 0.0;
        switch (cfg.variant) {
        case IseVariant::Plain:
          ise = ise_plain(method, smoother, sel.b_hat, m.value, error_points);
          break;
        case IseVariant::Boundary:
          ise = ise_boundary(method, smoother, sel.b_hat, m.value, error_points);
          break;
        case IseVariant::Weighted:
          ise = ise_weighted(method, smoother, sel.b_hat, m.value, error_points);
          break;
        }
        out.ise[mi] = ise;
        out.bandwidth[mi] = sel.b_hat;
        out.ok[mi] = true;
      } catch (const Error&) {
        out.ok[mi] = false;
      }
    }
  });

  SimulationReport report;
  report.header = {
      {"methods",
       [&] {
         std::string s;
         for (std::size_t i = 0; i < cfg.methods.size(); ++i)
           s += (i ? "," : "") + to_string(cfg.methods[i]);
         return s;
       }()},
      {"targets", join_ints(cfg.targets)},
      {"k", join_ints(cfg.k_values)},
      {"design", cfg.random_design ? "dirichlet(2,2,2)" : "mesh"},
      {"replications", std::to_string(cfg.replications)},
      {"noise", "gaussian"},
      {"noise_sd", format_round_trip(cfg.noise_sd)},
      {"base_seed", std::to_string(cfg.base_seed)},
      {"eval_sample_size", std::to_string(cfg.eval_sample_size)},
      {"variant", to_string(cfg.variant)},
      {"bandwidth_search",
       format_round_trip(cfg.search.b_min) + ":" + format_round_trip(cfg.search.b_max) + ":" +
           std::to_string(cfg.search.coarse_grid_size) + ":" +
           format_round_trip(cfg.search.refine_tolerance)},
  };

  for (std::size_t ti = 0; ti < n_targets; ++ti) {
    for (std::size_t ki = 0; ki < n_k; ++ki) {
      for (std::size_t mi = 0; mi < n_methods; ++mi) {
        std::vector<double> values;
        long double bandwidth_sum = 0.0L;
        int failed = 0;
        for (std::size_t r = 0; r < reps; ++r) {
          const UnitResult& u = results[(ti * n_k + ki) * reps + r];
          if (u.ok[mi]) {
            values.push_back(u.ise[mi]);
            bandwidth_sum += u.bandwidth[mi];
          } else {
            ++failed;
          }
        }
        CellSummary cell = summarize(values);
        cell.failed = failed;
        cell.mean_bandwidth =
            values.empty() ? std::numeric_limits<double>::quiet_NaN()
                           : static_cast<double>(bandwidth_sum / static_cast<long double>(values.size()));
        const ReportKey key{cfg.targets[ti], meshes[ki].size(), cfg.methods[mi]};
        report.cells[key] = cell;
      }
    }
  }
  return report;
}

Proposition1Report verify_proposition1(const Proposition1Config& cfg, const TargetFunction& m) {
  if (cfg.replications < 2)
    throw Error("verify_proposition1 needs at least two replications");
  if (!(cfg.sigma >= 0.0) || cfg.n < 1)
    throw Error("verify_proposition1 needs sigma >= 0 and n >= 1");
  const std::size_t d = cfg.s.dim();
  if (cfg.design && cfg.design->dim() != d)
    throw Error("design law dimension does not match s");
  const KernelSpec spec(cfg.s, cfg.b);

  std::vector<double> estimates(static_cast<std::size_t>(cfg.replications));
  parallel_for(estimates.size(), cfg.threads, [&](std::size_t r) {
    Rng rng(derive_seed(cfg.seed, r));
    std::vector<SimplexPoint> design;
    design.reserve(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i)
      design.push_back(cfg.design ? sample_dirichlet(*cfg.design, rng)
                                  : sample_uniform_simplex(d, rng));
    const KernelSmoother smoother(gen_responses(m, design, cfg.sigma, rng));
    estimates[r] = smoother.estimate(cfg.method, cfg.b, cfg.s);
  });

  const double truth = m(cfg.s);
  const long double R = static_cast<long double>(estimates.size());
  long double sum = 0.0L;
  for (double e : estimates)
    sum += e;
  const long double mean = sum / R;
  long double m2 = 0.0L, m4 = 0.0L;
  for (double e : estimates) {
    const long double c = e - mean;
    m2 += c * c;
    m4 += c * c * c * c;
  }
  const long double var = m2 / (R - 1.0L);

  Proposition1Report rep;
  rep.replications = cfg.replications;
  rep.mean_estimate = static_cast<double>(mean);
  rep.measured_bias = static_cast<double>(mean) - truth;
  rep.bias_standard_error = static_cast<double>(std::sqrt(var / R));
  rep.measured_variance = static_cast<double>(var);
  const long double central4 = m4 / R;
  const long double pop_var = m2 / R;
  rep.variance_standard_error =
      static_cast<double>(std::sqrt(std::max(0.0L, central4 - pop_var * pop_var) / R));
  rep.design_density = cfg.design ? std::exp(log_dirichlet_density(*cfg.design, cfg.s))
                                  : factorial(d);
  rep.predicted_bias = cfg.b * h_term(m.hessian, cfg.s, IndexSet{});
  const double noise = cfg.sigma * cfg.sigma / rep.design_density / static_cast<double>(cfg.n);
  rep.predicted_variance =
      std::pow(cfg.b, -0.5 * static_cast<double>(d)) * psi(cfg.s, IndexSet{}) * noise;
  rep.predicted_variance_exact_ab = a_b_closed_form(spec) * noise;
  rep.variance_ratio =
      rep.predicted_variance > 0.0 ? rep.measured_variance / rep.predicted_variance : 0.0;
  return rep;
}

} // namespace simplexsmooth
