#include <doctest.h>

#include "unit/oracles.hpp"

#include "simplexsmooth/estimators.hpp"
#include "simplexsmooth/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

using namespace simplexsmooth;

namespace {

Dataset random_dataset(std::size_t n, std::size_t d, std::mt19937_64& eng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<SimplexPoint> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < n; ++i) {
    x.push_back(oracle::uniform_by_spacings(d, eng));
    y.push_back(3.0 + noise(eng));
  }
  return Dataset(std::move(x), std::move(y));
}

} // namespace

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(Dataset({}, {}), Error);
  CHECK_THROWS_AS(Dataset({SimplexPoint({0.1})}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(Dataset({SimplexPoint({0.1}), SimplexPoint({0.1, 0.2})}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(Dataset({SimplexPoint({0.1})}, {NAN}), Error);
  const Dataset d({SimplexPoint({0.1}), SimplexPoint({0.4})}, {1.0, 2.0});
  CHECK(d.without(0).size() == 1);
  CHECK(d.without(0).responses()[0] == 2.0);
  CHECK_THROWS_AS(d.without(0).without(0), Error);
}

TEST_CASE("method names") {
  CHECK(parse_method("LL") == Method::LL);
  CHECK(parse_method("nw") == Method::NW);
  CHECK(to_string(Method::NW) == "NW");
  CHECK_THROWS_AS(parse_method("lc"), Error);
}

TEST_CASE("kernel weights of the smoother match the direct formula") {
  std::mt19937_64 eng(5);
  const KernelSmoother sm(random_dataset(30, 3, eng));
  const SimplexPoint s({0.2, 0.1, 0.3});
  for (double b : {0.05, 0.3, 2.0}) {
    const std::vector<double> w = sm.weights(b, s);
    for (std::size_t i = 0; i < w.size(); ++i)
      CHECK(w[i] == doctest::Approx(oracle::direct_kernel(s, b, sm.data().design()[i])).epsilon(1e-12));
    CHECK(sm.weights(b, s, 4)[4] == 0.0);
  }
}

TEST_CASE("LL matches the quadruple-precision normal equations") {
  std::mt19937_64 eng(17);
  std::uniform_int_distribution<int> dim(1, 3), size(5, 50);
  std::uniform_real_distribution<double> logb(std::log(0.02), std::log(1.0));
  int compared = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t d = static_cast<std::size_t>(dim(eng));
    const KernelSmoother sm(random_dataset(static_cast<std::size_t>(size(eng)), d, eng));
    const SimplexPoint s = oracle::uniform_by_spacings(d, eng);
    const double b = std::exp(logb(eng));
    const LocalFit fit = sm.local_linear(b, s);
    const std::vector<double> w = sm.weights(b, s);
    const oracle::PlaneFit ref = oracle::brute_force_plane(sm.data().design(), w, sm.data().responses(), s);
    if (fit.degenerate || ref.singular)
      continue;
    ++compared;
    CHECK(fit.estimate == doctest::Approx(ref.alpha).epsilon(1e-10));
    for (std::size_t k = 0; k < d; ++k)
      CHECK(fit.slope[k] == doctest::Approx(ref.beta[k]).epsilon(1e-8).scale(1.0));
  }
  CHECK(compared >= 100);
}

TEST_CASE("LL reproduces affine responses") {
  std::mt19937_64 eng(23);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  for (std::size_t d = 1; d <= 3; ++d) {
    std::vector<SimplexPoint> x;
    std::vector<double> y;
    std::vector<double> c(d);
    for (double& ci : c)
      ci = coef(eng);
    const double a = coef(eng);
    for (int i = 0; i < 40; ++i) {
      x.push_back(oracle::uniform_by_spacings(d, eng));
      double v = a;
      for (std::size_t k = 0; k < d; ++k)
        v += c[k] * x.back()[k];
      y.push_back(v);
    }
    const Dataset data(x, y);
    for (double b : {0.01, 0.1, 1.0}) {
      const SimplexPoint s = oracle::uniform_by_spacings(d, eng);
      double truth = a;
      for (std::size_t k = 0; k < d; ++k)
        truth += c[k] * s[k];
      const LocalFit fit = ll_fit(data, b, s);
      if (fit.degenerate)
        continue;
      CHECK(std::abs(fit.estimate - truth) <= 1e-8 * (1.0 + std::abs(truth)));
    }
  }
}

TEST_CASE("degenerate fits fall back to NW exactly") {
  const Dataset one({SimplexPoint({0.2, 0.3})}, {7.5});
  const LocalFit f = ll_fit(one, 0.1, SimplexPoint({0.25, 0.25}));
  CHECK(f.degenerate);
  CHECK(f.estimate == 7.5);
  CHECK(f.slope == std::vector<double>{0.0, 0.0});

  // Tiny bandwidth: one dominant weight.
  std::mt19937_64 eng(3);
  const Dataset data = random_dataset(20, 2, eng);
  int degenerate = 0;
  for (const SimplexPoint& s : data.design()) {
    const LocalFit g = ll_fit(data, 1e-4, s);
    if (g.degenerate && g.total_weight > 0.0) {
      ++degenerate;
      CHECK(g.estimate == nw_estimate(data, 1e-4, s));
    }
  }
  CHECK(degenerate > 0);
}

TEST_CASE("NW properties") {
  const Dataset constant({SimplexPoint({0.1, 0.2}), SimplexPoint({0.5, 0.1}), SimplexPoint({0.3, 0.6})},
                         {2.25, 2.25, 2.25});
  CHECK(nw_estimate(constant, 0.2, SimplexPoint({0.3, 0.3})) == doctest::Approx(2.25).epsilon(1e-15));

  std::mt19937_64 eng(8);
  const Dataset data = random_dataset(25, 2, eng);
  const auto [lo, hi] = std::minmax_element(data.responses().begin(), data.responses().end());
  for (double b : {0.01, 0.2, 3.0})
    for (int i = 0; i < 20; ++i) {
      const double e = nw_estimate(data, b, oracle::uniform_by_spacings(2, eng));
      CHECK(e >= *lo);
      CHECK(e <= *hi);
    }

  // Two-point Beta-kernel fixture.
  const Dataset two({SimplexPoint({0.2}), SimplexPoint({0.8})}, {0.0, 1.0});
  const SimplexPoint s({0.2});
  const double w1 = std::exp(log_dirichlet_density({{0.2 / 0.1 + 1.0}, 0.8 / 0.1 + 1.0}, SimplexPoint({0.2})));
  const double w2 = std::exp(log_dirichlet_density({{0.2 / 0.1 + 1.0}, 0.8 / 0.1 + 1.0}, SimplexPoint({0.8})));
  CHECK(nw_estimate(two, 0.1, s) == doctest::Approx(w2 / (w1 + w2)).epsilon(1e-14));
}

TEST_CASE("no effective support is an error") {
  // Kernel at a corner with a tiny bandwidth puts no mass near the opposite corner.
  const Dataset far({SimplexPoint({0.999, 0.0005})}, {1.0});
  CHECK_THROWS_WITH_AS(nw_estimate(far, 1e-4, SimplexPoint({0.0, 0.0})),
                       doctest::Contains("no effective support"), NoSupportError);
  CHECK_THROWS_AS(ll_fit(far, 1e-4, SimplexPoint({0.0, 0.0})), NoSupportError);
}

TEST_CASE("weight scaling leaves the plane unchanged") {
  std::mt19937_64 eng(31);
  const Dataset data = random_dataset(30, 2, eng);
  const SimplexPoint s({0.3, 0.4});
  const KernelSmoother sm(data);
  std::vector<double> w = sm.weights(0.2, s);
  const LocalFit base = weighted_local_linear(data.design(), w, data.responses(), s);
  for (double& wi : w)
    wi *= 1e5;
  const LocalFit scaled = weighted_local_linear(data.design(), w, data.responses(), s);
  CHECK(scaled.estimate == doctest::Approx(base.estimate).epsilon(1e-12));
  CHECK(scaled.slope[0] == doctest::Approx(base.slope[0]).epsilon(1e-10));
  CHECK(scaled.slope[1] == doctest::Approx(base.slope[1]).epsilon(1e-10));
}

TEST_CASE("grid prediction") {
  std::mt19937_64 eng(41);
  const Dataset data = random_dataset(40, 2, eng);
  CHECK(predict_grid(data, 0.1, {}, Method::LL).empty());

  const SimplexPoint p({0.2, 0.2});
  const auto single = predict_grid(data, 0.1, std::vector<SimplexPoint>{p}, Method::LL);
  REQUIRE(single.size() == 1);
  CHECK(single[0].estimate == ll_fit(data, 0.1, p).estimate);

  std::vector<SimplexPoint> grid;
  for (int i = 0; i < 300; ++i)
    grid.push_back(oracle::uniform_by_spacings(2, eng));
  grid.push_back(SimplexPoint({0.0, 0.0}));
  for (Method m : {Method::LL, Method::NW}) {
    const auto seq = predict_grid(data, 0.05, grid, m, 1);
    const auto par = predict_grid(data, 0.05, grid, m, 4);
    REQUIRE(seq.size() == par.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
      CHECK(seq[i].ok == par[i].ok);
      if (seq[i].ok)
        CHECK(std::memcmp(&seq[i].estimate, &par[i].estimate, sizeof(double)) == 0);
    }
  }

  // Failures are per point.
  const Dataset far({SimplexPoint({0.999, 0.0005})}, {1.0});
  const auto mixed = predict_grid(far, 1e-4, std::vector<SimplexPoint>{SimplexPoint({0.0, 0.0}),
                                                                       SimplexPoint({0.999, 0.0005})},
                                  Method::NW);
  CHECK_FALSE(mixed[0].ok);
  CHECK(std::isnan(mixed[0].estimate));
  CHECK(mixed[0].error.find("no effective support") != std::string::npos);
  CHECK(mixed[1].ok);
}
