#include "simplexsmooth/estimators.hpp"

#include "simplexsmooth/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace simplexsmooth {

std::string to_string(Method m) { return m == Method::LL ? "LL" : "NW"; }

Method parse_method(const std::string& name) {
  std::string lower;
  for (char c : name)
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "ll")
    return Method::LL;
  if (lower == "nw")
    return Method::NW;
  throw Error("unknown method '" + name + "' (expected ll or nw)");
}

Dataset::Dataset(std::vector<SimplexPoint> design, std::vector<double> responses)
    : design_(std::move(design)), responses_(std::move(responses)) {
  if (design_.empty())
    throw Error("dataset must contain at least one row");
  if (design_.size() != responses_.size())
    throw Error("dataset design and responses differ in length");
  const std::size_t d = design_.front().dim();
  for (std::size_t i = 0; i < design_.size(); ++i) {
    if (design_[i].dim() != d)
      throw Error("dataset row " + std::to_string(i) + " has inconsistent dimension");
    if (!std::isfinite(responses_[i]))
      throw Error("dataset response " + std::to_string(i) + " is not finite");
  }
}

Dataset Dataset::without(std::size_t i) const {
  if (i >= size())
    throw Error("row index out of range");
  if (size() == 1)
    throw Error("cannot remove the only row of a dataset");
  std::vector<SimplexPoint> design;
  std::vector<double> responses;
  design.reserve(size() - 1);
  responses.reserve(size() - 1);
  for (std::size_t j = 0; j < size(); ++j) {
    if (j == i)
      continue;
    design.push_back(design_[j]);
    responses.push_back(responses_[j]);
  }
  return Dataset(std::move(design), std::move(responses));
}

namespace {

std::string describe(const SimplexPoint& s) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (std::size_t i = 0; i < s.dim(); ++i)
    os << (i ? ", " : "") << s[i];
  os << ')';
  return os.str();
}

[[noreturn]] void throw_no_support(const SimplexPoint& s, double b) {
  std::ostringstream os;
  os << "no effective support: all kernel weights vanish at s=" << describe(s) << ", b=" << b;
  throw NoSupportError(os.str());
}

// Running sums shared by the LL and NW paths so that a degenerate LL fit
// reproduces the NW value bit for bit.
struct ConstantSums {
  long double weight = 0.0L;
  long double weighted_response = 0.0L;

  void add(double w, double y) {
    weight += w;
    weighted_response += static_cast<long double>(w) * y;
  }
  double mean() const { return static_cast<double>(weighted_response / weight); }
};

class NormalEquations {
public:
  explicit NormalEquations(const SimplexPoint& s)
      : s_(s), p_(s.dim() + 1), gram_(p_ * p_, 0.0L), rhs_(p_, 0.0L), z_(p_, 0.0L) {}

  void add(const SimplexPoint& x, double w, double y) {
    if (!(w >= kWeightFloor))
      return;
    sums_.add(w, y);
    z_[0] = 1.0L;
    for (std::size_t k = 0; k < s_.dim(); ++k)
      z_[k + 1] = static_cast<long double>(x[k]) - s_[k];
    for (std::size_t i = 1; i < p_; ++i) {
      const long double wz = w * z_[i];
      rhs_[i] += wz * y;
      for (std::size_t j = 0; j <= i; ++j)
        gram_[i * p_ + j] += wz * z_[j];
    }
  }

  LocalFit solve() const {
    LocalFit fit;
    fit.total_weight = static_cast<double>(sums_.weight);
    fit.slope.assign(s_.dim(), 0.0);
    if (!(sums_.weight > 0.0L))
      return fit;

    std::vector<long double> a = gram_;
    a[0] = sums_.weight;
    std::vector<long double> r = rhs_;
    r[0] = sums_.weighted_response;

    long double largest = 0.0L;
    for (std::size_t i = 0; i < p_; ++i)
      largest = std::max(largest, a[i * p_ + i]);

    // In-place LDL^T of the lower triangle.
    std::vector<long double> diag(p_);
    long double min_pivot = largest;
    long double max_pivot = 0.0L;
    for (std::size_t j = 0; j < p_; ++j) {
      long double dj = a[j * p_ + j];
      for (std::size_t k = 0; k < j; ++k)
        dj -= a[j * p_ + k] * a[j * p_ + k] * diag[k];
      if (!(dj > kPivotTolerance * largest)) {
        fit.degenerate = true;
        fit.estimate = sums_.mean();
        fit.condition_hint = std::numeric_limits<double>::infinity();
        return fit;
      }
      diag[j] = dj;
      min_pivot = std::min(min_pivot, dj);
      max_pivot = std::max(max_pivot, dj);
      for (std::size_t i = j + 1; i < p_; ++i) {
        long double lij = a[i * p_ + j];
        for (std::size_t k = 0; k < j; ++k)
          lij -= a[i * p_ + k] * a[j * p_ + k] * diag[k];
        a[i * p_ + j] = lij / dj;
      }
    }
    // L y = r, then D L^T x = y.
    for (std::size_t i = 0; i < p_; ++i)
      for (std::size_t k = 0; k < i; ++k)
        r[i] -= a[i * p_ + k] * r[k];
    for (std::size_t i = p_; i-- > 0;) {
      r[i] /= diag[i];
      for (std::size_t k = i + 1; k < p_; ++k)
        r[i] -= a[k * p_ + i] * r[k];
    }
    fit.estimate = static_cast<double>(r[0]);
    for (std::size_t k = 0; k < s_.dim(); ++k)
      fit.slope[k] = static_cast<double>(r[k + 1]);
    fit.condition_hint = static_cast<double>(max_pivot / min_pivot);
    return fit;
  }

private:
  const SimplexPoint& s_;
  std::size_t p_;
  ConstantSums sums_;
  std::vector<long double> gram_;
  std::vector<long double> rhs_;
  std::vector<long double> z_;
};

} // namespace

LocalFit weighted_local_linear(std::span<const SimplexPoint> design, std::span<const double> weights,
                               std::span<const double> responses, const SimplexPoint& s) {
  if (design.size() != weights.size() || design.size() != responses.size())
    throw Error("design, weights and responses differ in length");
  NormalEquations eq(s);
  for (std::size_t i = 0; i < design.size(); ++i) {
    if (design[i].dim() != s.dim())
      throw Error("dimension mismatch between design and evaluation point");
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
      throw Error("weights must be finite and nonnegative");
    eq.add(design[i], weights[i], responses[i]);
  }
  return eq.solve();
}

KernelSmoother::KernelSmoother(Dataset data) : data_(std::move(data)) {
  const std::size_t d = data_.dim();
  log_coords_.resize(data_.size() * (d + 1));
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const SimplexPoint& x = data_.design()[i];
    for (std::size_t k = 0; k < d; ++k)
      log_coords_[i * (d + 1) + k] = std::log(x[k]);
    log_coords_[i * (d + 1) + d] = std::log(x.remainder());
  }
}

template <class Sink>
void KernelSmoother::for_each_weight(double b, const SimplexPoint& s,
                                     std::optional<std::size_t> exclude, Sink&& sink) const {
  const KernelSpec spec(s, b);
  const std::size_t d = data_.dim();
  if (s.dim() != d)
    throw Error("dimension mismatch between dataset and evaluation point");
  const DirichletParams params = kernel_params(spec);
  const double log_c = log_normalizing_constant(params);
  // Exponents u_i - 1 and v - 1; exact zeros mean the factor is identically 1.
  std::vector<double> exponents(d + 1);
  for (std::size_t k = 0; k < d; ++k)
    exponents[k] = params.u[k] - 1.0;
  exponents[d] = params.v - 1.0;

  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (exclude && *exclude == i) {
      sink(i, 0.0);
      continue;
    }
    double log_w = log_c;
    const double* logs = &log_coords_[i * (d + 1)];
    for (std::size_t k = 0; k <= d; ++k)
      if (exponents[k] != 0.0)
        log_w += exponents[k] * logs[k];
    double w = std::exp(log_w);
    if (std::isnan(w) || std::isinf(w))
      throw Error("kernel weight overflow at s=" + describe(s));
    if (w < kWeightFloor)
      w = 0.0;
    sink(i, w);
  }
}

std::vector<double> KernelSmoother::weights(double b, const SimplexPoint& s,
                                            std::optional<std::size_t> exclude) const {
  std::vector<double> w(data_.size());
  for_each_weight(b, s, exclude, [&](std::size_t i, double wi) { w[i] = wi; });
  return w;
}

LocalFit KernelSmoother::local_linear(double b, const SimplexPoint& s,
                                      std::optional<std::size_t> exclude) const {
  NormalEquations eq(s);
  const auto& design = data_.design();
  const auto& y = data_.responses();
  for_each_weight(b, s, exclude, [&](std::size_t i, double w) { eq.add(design[i], w, y[i]); });
  LocalFit fit = eq.solve();
  if (!(fit.total_weight > 0.0))
    throw_no_support(s, b);
  return fit;
}

double KernelSmoother::nadaraya_watson(double b, const SimplexPoint& s,
                                       std::optional<std::size_t> exclude) const {
  ConstantSums sums;
  const auto& y = data_.responses();
  for_each_weight(b, s, exclude, [&](std::size_t i, double w) {
    if (w >= kWeightFloor)
      sums.add(w, y[i]);
  });
  if (!(sums.weight > 0.0L))
    throw_no_support(s, b);
  return sums.mean();
}

double KernelSmoother::estimate(Method method, double b, const SimplexPoint& s,
                                std::optional<std::size_t> exclude) const {
  return method == Method::LL ? local_linear(b, s, exclude).estimate
                              : nadaraya_watson(b, s, exclude);
}

LocalFit ll_fit(const Dataset& data, double b, const SimplexPoint& s) {
  return KernelSmoother(data).local_linear(b, s);
}

double nw_estimate(const Dataset& data, double b, const SimplexPoint& s) {
  return KernelSmoother(data).nadaraya_watson(b, s);
}

std::vector<GridPrediction> predict_grid(const Dataset& data, double b,
                                         std::span<const SimplexPoint> grid, Method method,
                                         unsigned threads) {
  const KernelSmoother smoother(data);
  std::vector<GridPrediction> out(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    GridPrediction& p = out[i];
    try {
      if (method == Method::LL) {
        const LocalFit fit = smoother.local_linear(b, grid[i]);
        p.estimate = fit.estimate;
        p.degenerate = fit.degenerate;
      } else {
        p.estimate = smoother.nadaraya_watson(b, grid[i]);
      }
      p.ok = true;
    } catch (const Error& e) {
      p.error = e.what();
    }
  });
  return out;
}

} // namespace simplexsmooth
