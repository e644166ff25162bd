#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace simplexsmooth {

class Rng;

//! Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Raised when all kernel weights at an evaluation point vanish.
class NoSupportError : public Error {
public:
  using Error::Error;
};

/// Tolerance on coordinate sign and on the unit-sum constraint.
inline constexpr double kSimplexTolerance = 1e-12;

//! A point of the unit simplex S_d = {s in [0,1]^d : |s|_1 <= 1}.
/*! The (d+1)-th part 1 - |s|_1 is implicit. Coordinates within
    kSimplexTolerance of the constraints are clamped onto S_d.
 */
class SimplexPoint {
public:
  SimplexPoint() = default;
  explicit SimplexPoint(std::vector<double> coords);
  SimplexPoint(std::initializer_list<double> coords)
      : SimplexPoint(std::vector<double>(coords)) {}

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }
  const std::vector<double>& vec() const { return coords_; }

  /// |s|_1
  double l1() const { return l1_; }
  /// 1 - |s|_1, never negative.
  double remainder() const { return 1.0 - l1_ > 0.0 ? 1.0 - l1_ : 0.0; }

  bool operator==(const SimplexPoint& other) const = default;

private:
  std::vector<double> coords_;
  double l1_ = 0.0;
};

//! Parameters (u, v) of the Dirichlet(u, v) law on S_d.
struct DirichletParams {
  std::vector<double> u;
  double v = 1.0;

  DirichletParams() = default;
  DirichletParams(std::vector<double> u_, double v_);

  std::size_t dim() const { return u.size(); }
};

//! Evaluation point and bandwidth of the Dirichlet kernel kappa_{s,b}.
struct KernelSpec {
  SimplexPoint s;
  double b;

  KernelSpec(SimplexPoint s_, double b_);
  std::size_t dim() const { return s.dim(); }
};

/// Sorted, duplicate-free subset of {0, ..., d-1} (0-based).
using IndexSet = std::vector<std::size_t>;

/// log Gamma(|u|_1 + v) - log Gamma(v) - sum log Gamma(u_i).
double log_normalizing_constant(const DirichletParams& p);

/// log K_{u,v}(x) with the convention 0 * log 0 = 0; -inf outside the support.
double log_dirichlet_density(const DirichletParams& p, const SimplexPoint& x);

/// u = s/b + 1, v = (1 - |s|_1)/b + 1.
DirichletParams kernel_params(const KernelSpec& spec);

double kernel_weight(const KernelSpec& spec, const SimplexPoint& x);

/// Gamma-ratio draw from Dirichlet(u, v), first d coordinates.
SimplexPoint sample_dirichlet(const DirichletParams& p, Rng& rng);

SimplexPoint sample_uniform_simplex(std::size_t d, Rng& rng);

/// E(xi) for xi ~ kappa_{s,b}: (s_k/b + 1)/(1/b + d + 1).
std::vector<double> exact_mean(const KernelSpec& spec);

/// E{(xi_k - s_k)(xi_l - s_l)} for xi ~ kappa_{s,b}, 0-based k and l.
double exact_central_second_moment(const KernelSpec& spec, std::size_t k,
                                   std::size_t l);

/// Squared L2 norm of the kernel, int_{S_d} kappa_{s,b}(x)^2 dx.
double a_b_closed_form(const KernelSpec& spec);

/// Uniform upper bound on a_b_closed_form, without its 1 + O(b) factor.
double a_b_uniform_bound(const KernelSpec& spec);

/// {(4 pi)^{d-|J|} (1 - |s|_1) prod_{i not in J} s_i}^{-1/2}
double psi(const SimplexPoint& s, const IndexSet& J);

/// Gamma(2l + 1) / {2^{2l+1} Gamma(l + 1)^2}
double boundary_gamma_factor(double lambda);

/// b^{-(d+|J|)/2} psi_J(s) prod_{i in J} boundary_gamma_factor(lambda_i).
/// `lambda` is indexed in parallel with J.
double a_b_asymptotic(const KernelSpec& spec, const IndexSet& J,
                      std::span<const double> lambda);

/// d!
double factorial(std::size_t d);

/// Shortest decimal text that parses back to exactly v.
std::string format_round_trip(double v);

/// Validates J against dimension d: sorted, unique, in range.
void check_index_set(const IndexSet& J, std::size_t d);

} // namespace simplexsmooth
