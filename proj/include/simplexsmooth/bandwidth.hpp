#pragma once

#include "simplexsmooth/estimators.hpp"
#include "simplexsmooth/simplex.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace simplexsmooth {

class Rng;

//! Coarse log-spaced scan followed by golden-section refinement.
struct BandwidthSearch {
  double b_min = 1e-3;
  double b_max = 2.0;
  int coarse_grid_size = 32;
  /// Relative width at which golden-section refinement stops.
  double refine_tolerance = 1e-3;

  void validate() const;
};

struct ScorePoint {
  double b = 0.0;
  double score = 0.0;
  bool ok = false;
};

struct SelectionResult {
  double b_hat = 0.0;
  double score = 0.0;
  /// Every evaluated bandwidth, sorted by b; failed evaluations have ok = false.
  std::vector<ScorePoint> score_curve;
  /// The coarse minimizer sat on the edge of [b_min, b_max].
  bool boundary_hit = false;
};

/// Score of a bandwidth; may throw simplexsmooth::Error to mark a failure.
using ScoreFunction = std::function<double(double)>;
using TargetFunctionRef = std::function<double(const SimplexPoint&)>;
using PointEstimator = std::function<double(const SimplexPoint&)>;

/// Minimizes `score` over [b_min, b_max]. Coarse-grid scores are evaluated
/// on up to `threads` workers. Throws when every coarse evaluation fails.
SelectionResult minimize_score(const ScoreFunction& score, const BandwidthSearch& search,
                               unsigned threads = 1);

/// (1/N) sum |estimator(U_i) - m(U_i)|^2 / d!
double lscv_score(const PointEstimator& estimator, const TargetFunctionRef& target,
                  std::span<const SimplexPoint> eval_points);
double lscv_score(Method method, const KernelSmoother& smoother, double b,
                  const TargetFunctionRef& target, std::span<const SimplexPoint> eval_points);

/// The same eval_points are reused for every candidate b.
SelectionResult lscv_select(Method method, const Dataset& data, const TargetFunctionRef& target,
                            std::span<const SimplexPoint> eval_points,
                            const BandwidthSearch& search = {}, unsigned threads = 1);

double loocv_score(const KernelSmoother& smoother, double b, Method method);
double loocv_score(const Dataset& data, double b, Method method);

SelectionResult loocv_select(const Dataset& data, Method method, const BandwidthSearch& search = {},
                             unsigned threads = 1);

//! Dense row-major square matrix.
struct Matrix {
  std::size_t n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}
  static Matrix identity(std::size_t n);

  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  bool operator==(const Matrix&) const = default;

  Matrix symmetrized() const;
};

/// Maps interior points of S_d to the Hessian of a regression function.
using HessianField = std::function<Matrix(const SimplexPoint&)>;

/// Leading bias coefficient h_J(s). For J = [d], `lambda` holds one entry
/// per coordinate; otherwise it is ignored.
double h_term(const Matrix& hessian, const SimplexPoint& s, const IndexSet& J,
              std::span<const double> lambda = {});
double h_term(const HessianField& hessian, const SimplexPoint& s, const IndexSet& J,
              std::span<const double> lambda = {});

/// Default finite-difference step: eps^{1/4} * max(|s|_inf, 0.1).
double default_hessian_step(const SimplexPoint& s);

/// Central second differences, symmetrized. step <= 0 selects the default.
Matrix hessian_fd(const TargetFunctionRef& m, const SimplexPoint& s, double step = 0.0);

/// MSE-optimal local bandwidth. `lambda` is indexed in parallel with J and
/// `h` is the value of h_J(s).
double b_opt_local(const SimplexPoint& s, const IndexSet& J, std::span<const double> lambda,
                   double sigma2, double f, double h, double n);

/// MISE-optimal global bandwidth from the variance integral int psi sigma^2/f
/// and the bias integral int h^2.
double b_opt_global(double n, double variance_integral, double bias_integral, std::size_t d);

/// Leading MISE terms: variance_integral / (n b^{d/2}) + b^2 bias_integral.
double mise_asymptotic(double b, double n, double variance_integral, double bias_integral,
                       std::size_t d);

/// Closed-form leading MISE at the optimal bandwidth.
double mise_at_optimum(double n, double variance_integral, double bias_integral, std::size_t d);

struct PluginBandwidth {
  double variance_integral = 0.0;
  double bias_integral = 0.0;
  double b_opt = 0.0;
};

/// Plug-in pipeline: Monte Carlo integrals over U(S_d) of psi sigma^2/f and
/// h^2, fed to b_opt_global.
PluginBandwidth plugin_bandwidth(const HessianField& hessian, const TargetFunctionRef& sigma2,
                                 const TargetFunctionRef& design_density, double n, std::size_t d,
                                 std::size_t samples, Rng& rng);

} // namespace simplexsmooth
