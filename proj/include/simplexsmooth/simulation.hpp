#pragma once

#include "simplexsmooth/bandwidth.hpp"
#include "simplexsmooth/estimators.hpp"
#include "simplexsmooth/simplex.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace simplexsmooth {

class Rng;

//! Regression target with analytic Hessian.
struct TargetFunction {
  int id = 0;
  std::string name;
  std::function<double(const SimplexPoint&)> value;
  HessianField hessian;

  double operator()(const SimplexPoint& s) const { return value(s); }
};

/// Bivariate benchmark targets m_1..m_6; id 0 is the affine check target
/// 1 + 2 s_1 - 3 s_2.
TargetFunction target(int id);
double target_value(int id, const SimplexPoint& s);
Matrix target_hessian(int id, const SimplexPoint& s);

/// Affine function a + c^T s in any dimension.
TargetFunction affine_target(double intercept, std::vector<double> slope);

/// Fixed design M_k on S_2, k(k+1)/2 points strictly inside the simplex.
std::vector<SimplexPoint> mesh(int k);

/// Y_i = m(x_i) + eps_i with eps_i ~ N(0, noise_sd^2).
Dataset gen_responses(const TargetFunction& m, const std::vector<SimplexPoint>& design,
                      double noise_sd, Rng& rng);

/// Uniform points on S_d.
std::vector<SimplexPoint> sample_uniform_points(std::size_t d, std::size_t count, Rng& rng);

//! Draw from the boundary shell S_d \ S_d(delta).
struct BoundaryDraw {
  SimplexPoint point;
  /// delta >= 1/(d+1): S_d(delta) is (almost) empty and the shell is all of S_d.
  bool covers_simplex = false;
  std::size_t attempts = 0;
};

inline constexpr std::size_t kMaxRejectionAttempts = 1'000'000;

/// Uniform on S_d \ S_d(delta) by rejection from U(S_d).
BoundaryDraw sample_boundary_region(std::size_t d, double delta, Rng& rng);

/// Buffer delta = n^{-1/3}/5 used for boundary errors.
double boundary_buffer(std::size_t n);

/// Dirichlet(2 x 1, 2) design density on S_2, f(x) = 120 x_1 x_2 (1 - x_1 - x_2).
double random_design_density(const SimplexPoint& x);
DirichletParams random_design_params();

/// (1/N) sum |estimate(p) - m(p)|^2 / 2 over the eval points.
double ise_plain(const PointEstimator& estimate, const TargetFunctionRef& m,
                 std::span<const SimplexPoint> eval_points);
double ise_plain(Method method, const KernelSmoother& smoother, double b_hat,
                 const TargetFunctionRef& m, std::span<const SimplexPoint> eval_points);

/// Same accumulation as ise_plain, over boundary-shell points.
double ise_boundary(const PointEstimator& estimate, const TargetFunctionRef& m,
                    std::span<const SimplexPoint> boundary_points);
double ise_boundary(Method method, const KernelSmoother& smoother, double b_hat,
                    const TargetFunctionRef& m, std::span<const SimplexPoint> boundary_points);

/// (1/N) sum |estimate(p) - m(p)|^2 f(p) / 2 with f the random-design density.
double ise_weighted(const PointEstimator& estimate, const TargetFunctionRef& m,
                    std::span<const SimplexPoint> eval_points);
double ise_weighted(Method method, const KernelSmoother& smoother, double b_hat,
                    const TargetFunctionRef& m, std::span<const SimplexPoint> eval_points);

enum class IseVariant { Plain, Boundary, Weighted };
std::string to_string(IseVariant v);
IseVariant parse_variant(const std::string& name);

struct ExperimentConfig {
  std::vector<Method> methods{Method::LL, Method::NW};
  std::vector<int> targets{1, 2, 3, 4, 5, 6};
  /// Sample size is k(k+1)/2 in both design modes.
  std::vector<int> k_values{7};
  bool random_design = false;
  int replications = 100;
  double noise_sd = 0.1;
  std::uint64_t base_seed = 1;
  std::size_t eval_sample_size = 1000;
  IseVariant variant = IseVariant::Plain;
  BandwidthSearch search{};
  unsigned threads = 1;

  void validate() const;
};

//! Summary of the R error values of one (target, n, method) cell.
struct CellSummary {
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  double iqr = 0.0;
  double mean_bandwidth = 0.0;
  int completed = 0;
  int failed = 0;

  bool complete() const { return failed == 0; }
};

struct ReportKey {
  int target = 0;
  std::size_t n = 0;
  Method method = Method::LL;

  auto operator<=>(const ReportKey&) const = default;
};

struct SimulationReport {
  std::map<ReportKey, CellSummary> cells;
  /// Resolved configuration, echoed as comment lines by emit_report.
  std::vector<std::pair<std::string, std::string>> header;

  bool complete() const;
};

/// Type-7 quantile: linear interpolation at position 1 + p (n - 1).
double quantile(std::vector<double> values, double p);
CellSummary summarize(std::span<const double> values);

SimulationReport run_experiment(const ExperimentConfig& cfg);

struct Proposition1Config {
  SimplexPoint s{1.0 / 3.0, 1.0 / 3.0};
  std::size_t n = 2000;
  double b = 0.05;
  double sigma = 0.1;
  /// Design law; empty means uniform on S_d.
  std::optional<DirichletParams> design;
  int replications = 2000;
  Method method = Method::LL;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct Proposition1Report {
  double mean_estimate = 0.0;
  double measured_bias = 0.0;
  double bias_standard_error = 0.0;
  double predicted_bias = 0.0;
  double measured_variance = 0.0;
  double variance_standard_error = 0.0;
  /// n^{-1} b^{-d/2} psi(s) sigma^2 / f(s)
  double predicted_variance = 0.0;
  /// n^{-1} A_b(s) sigma^2 / f(s) with the closed-form A_b.
  double predicted_variance_exact_ab = 0.0;
  double variance_ratio = 0.0;
  double design_density = 0.0;
  int replications = 0;
};

/// Monte Carlo bias and variance of the estimator at s against the leading
/// asymptotic terms.
Proposition1Report verify_proposition1(const Proposition1Config& cfg, const TargetFunction& m);

enum class ReportFormat { Csv, Markdown };
ReportFormat parse_format(const std::string& name);

std::string emit_report(const SimulationReport& report, ReportFormat format);
/// Parses emit_report CSV output (header comments included).
SimulationReport parse_report_csv(const std::string& text);

} // namespace simplexsmooth
