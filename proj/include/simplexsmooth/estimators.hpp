#pragma once

#include "simplexsmooth/simplex.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace simplexsmooth {

enum class Method { LL, NW };

std::string to_string(Method m);
Method parse_method(const std::string& name);

//! Paired design points on S_d and scalar responses.
class Dataset {
public:
  Dataset() = default;
  Dataset(std::vector<SimplexPoint> design, std::vector<double> responses);

  std::size_t size() const { return responses_.size(); }
  std::size_t dim() const { return design_.empty() ? 0 : design_.front().dim(); }
  const std::vector<SimplexPoint>& design() const { return design_; }
  const std::vector<double>& responses() const { return responses_; }

  /// Copy without row i.
  Dataset without(std::size_t i) const;

private:
  std::vector<SimplexPoint> design_;
  std::vector<double> responses_;
};

//! Output of the local linear solve at one evaluation point.
struct LocalFit {
  double estimate = 0.0;
  std::vector<double> slope;
  /// Local design was numerically rank deficient; estimate is the NW value.
  bool degenerate = false;
  double total_weight = 0.0;
  /// Ratio of largest to smallest pivot of the normal matrix.
  double condition_hint = 0.0;
};

/// Relative pivot tolerance of the normal-equation factorization.
inline constexpr double kPivotTolerance = 1e-10;
/// Kernel weights below this are treated as exactly zero.
inline constexpr double kWeightFloor = 1e-300;

//! Weighted least-squares plane fit at s with explicit weights.
/*! Minimizes sum_i w_i {y_i - alpha - beta^T (x_i - s)}^2 through the
    (d+1)x(d+1) normal equations, accumulated and factored (LDL^T) in long
    double. Falls back to the weighted mean when some pivot drops below
    kPivotTolerance times the largest diagonal entry.
 */
LocalFit weighted_local_linear(std::span<const SimplexPoint> design, std::span<const double> weights,
                               std::span<const double> responses, const SimplexPoint& s);

//! Dirichlet-kernel smoother over a fixed dataset.
/*! Caches log-coordinates of the design so each kernel weight costs one
    dot product and one exponential.
 */
class KernelSmoother {
public:
  explicit KernelSmoother(Dataset data);

  const Dataset& data() const { return data_; }

  /// kappa_{s,b}(X_i) for every i; entry `exclude` (if any) is set to 0.
  std::vector<double> weights(double b, const SimplexPoint& s,
                              std::optional<std::size_t> exclude = std::nullopt) const;

  LocalFit local_linear(double b, const SimplexPoint& s,
                        std::optional<std::size_t> exclude = std::nullopt) const;
  double nadaraya_watson(double b, const SimplexPoint& s,
                         std::optional<std::size_t> exclude = std::nullopt) const;
  double estimate(Method method, double b, const SimplexPoint& s,
                  std::optional<std::size_t> exclude = std::nullopt) const;

private:
  template <class Sink>
  void for_each_weight(double b, const SimplexPoint& s, std::optional<std::size_t> exclude,
                       Sink&& sink) const;

  Dataset data_;
  // n rows of d+1 entries: log x_1 .. log x_d, log(1 - |x|_1).
  std::vector<double> log_coords_;
};

LocalFit ll_fit(const Dataset& data, double b, const SimplexPoint& s);
double nw_estimate(const Dataset& data, double b, const SimplexPoint& s);

struct GridPrediction {
  double estimate = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
  bool degenerate = false;
  std::string error;
};

/// Pointwise predictions; failures are reported per point. `threads` = 0
/// uses the hardware concurrency. Output is independent of `threads`.
std::vector<GridPrediction> predict_grid(const Dataset& data, double b,
                                         std::span<const SimplexPoint> grid, Method method,
                                         unsigned threads = 1);

} // namespace simplexsmooth
