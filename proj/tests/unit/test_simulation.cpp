#include <doctest.h>

#include "unit/oracles.hpp"

#include "simplexsmooth/rng.hpp"
#include "simplexsmooth/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

using namespace simplexsmooth;

TEST_CASE("benchmark targets") {
  CHECK(target_value(1, SimplexPoint({0.5, 0.5})) == doctest::Approx(0.25));
  CHECK(target_value(2, SimplexPoint({0.0, 0.0})) == 0.0);
  CHECK(target_value(5, SimplexPoint({0.25, 0.25})) == doctest::Approx(1.25));
  CHECK(target_value(0, SimplexPoint({0.1, 0.2})) == doctest::Approx(1.0 + 0.2 - 0.6));
  CHECK_THROWS_AS(target(7), Error);
  CHECK_THROWS_AS(target_value(1, SimplexPoint({0.5})), Error);

  // Analytic Hessians match finite differences at interior points.
  for (int id = 0; id <= 6; ++id) {
    const TargetFunction m = target(id);
    CHECK(m.id == id);
    for (const SimplexPoint& s : {SimplexPoint({0.3, 0.3}), SimplexPoint({0.1, 0.7}), SimplexPoint({0.6, 0.25})}) {
      const Matrix a = m.hessian(s);
      const Matrix fd = hessian_fd(m.value, s);
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
          CHECK(std::abs(a(i, j) - fd(i, j)) < 1e-4);
    }
  }

  const TargetFunction aff = affine_target(0.5, {1.0, -2.0, 3.0});
  CHECK(aff(SimplexPoint({0.1, 0.2, 0.3})) == doctest::Approx(0.5 + 0.1 - 0.4 + 0.9));
  CHECK(aff.hessian(SimplexPoint({0.1, 0.2, 0.3})) == Matrix(3));
}

TEST_CASE("mesh construction") {
  for (int k = 2; k <= 50; ++k) {
    const std::vector<SimplexPoint> pts = mesh(k);
    CHECK(pts.size() == static_cast<std::size_t>(k * (k + 1) / 2));
    for (const SimplexPoint& p : pts) {
      CHECK(p[0] > 0.0);
      CHECK(p[1] > 0.0);
      CHECK(p[0] + p[1] < 1.0);
    }
  }
  // First and last points from the display directly.
  const int k = 7;
  const double w = (k - 1.0 / std::sqrt(2.0)) / (k - 1.0);
  const std::vector<SimplexPoint> m7 = mesh(k);
  bool found_first = false, found_corner = false;
  for (const SimplexPoint& p : m7) {
    found_first |= std::abs(p[0] - 0.5 / 8.0) < 1e-15 && std::abs(p[1] - (w * 6 + 0.5) / 8.0) < 1e-15;
    found_corner |= std::abs(p[0] - (w * 6 + 0.5) / 8.0) < 1e-15 && std::abs(p[1] - 0.5 / 8.0) < 1e-15;
  }
  CHECK(found_first);
  CHECK(found_corner);
  CHECK_THROWS_AS(mesh(1), Error);
}

TEST_CASE("responses") {
  const TargetFunction m = target(3);
  const std::vector<SimplexPoint> design = mesh(10);
  Rng r0(1);
  const Dataset exact = gen_responses(m, design, 0.0, r0);
  for (std::size_t i = 0; i < design.size(); ++i)
    CHECK(exact.responses()[i] == m(design[i]));

  Rng a(5), b(5);
  CHECK(gen_responses(m, design, 0.2, a).responses() == gen_responses(m, design, 0.2, b).responses());

  Rng big(8);
  std::vector<SimplexPoint> many(100000, SimplexPoint({0.2, 0.2}));
  const Dataset noisy = gen_responses(m, many, 0.3, big);
  double ss = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < many.size(); ++i)
    mean += noisy.responses()[i] - m(many[i]);
  mean /= static_cast<double>(many.size());
  for (std::size_t i = 0; i < many.size(); ++i)
    ss += std::pow(noisy.responses()[i] - m(many[i]) - mean, 2);
  CHECK(std::sqrt(ss / (many.size() - 1.0)) == doctest::Approx(0.3).epsilon(0.01));
}

TEST_CASE("boundary shell sampling") {
  Rng rng(12);
  const double delta = 0.05;
  const int draws = 20000;
  std::size_t attempts = 0;
  for (int i = 0; i < draws; ++i) {
    const BoundaryDraw d = sample_boundary_region(2, delta, rng);
    CHECK_FALSE(d.covers_simplex);
    const SimplexPoint& p = d.point;
    CHECK((p[0] < delta || p[1] < delta || p.remainder() < delta));
    attempts += d.attempts;
  }
  // Acceptance probability 1 - (1 - 3 delta)^2 = 0.2775.
  CHECK(static_cast<double>(draws) / static_cast<double>(attempts) == doctest::Approx(0.2775).epsilon(0.02));

  CHECK(sample_boundary_region(2, 0.4, rng).covers_simplex);
  CHECK(boundary_buffer(28) == doctest::Approx(std::cbrt(1.0 / 28.0) / 5.0));
  CHECK(boundary_buffer(28) == doctest::Approx(0.0659).epsilon(1e-3));
}

TEST_CASE("ISE variants") {
  Rng rng(3);
  const std::vector<SimplexPoint> pts = sample_uniform_points(2, 5, rng);
  const auto m = [](const SimplexPoint& s) { return std::exp(s[0]) - s[1]; };
  const auto shifted = [&](const SimplexPoint& s) { return m(s) + 0.3; };

  CHECK(ise_plain(m, m, pts) == 0.0);
  CHECK(ise_boundary(m, m, pts) == 0.0);
  CHECK(ise_weighted(m, m, pts) == 0.0);
  CHECK(ise_plain(shifted, m, pts) == doctest::Approx(0.09 / 2.0));
  CHECK(ise_boundary(shifted, m, pts) == doctest::Approx(0.09 / 2.0));

  double hand = 0.0;
  for (const SimplexPoint& p : pts)
    hand += 0.09 * 120.0 * p[0] * p[1] * p.remainder() / 2.0;
  CHECK(ise_weighted(shifted, m, pts) == doctest::Approx(hand / 5.0).epsilon(1e-14));

  // Residual scaling is quadratic.
  const auto scaled = [&](const SimplexPoint& s) { return m(s) + 0.9 * (s[0] - 0.2); };
  const auto scaled3 = [&](const SimplexPoint& s) { return m(s) + 2.7 * (s[0] - 0.2); };
  CHECK(ise_plain(scaled3, m, pts) == doctest::Approx(9.0 * ise_plain(scaled, m, pts)));

  // E f(U) = int f(u) 2 du = 2.
  const std::vector<SimplexPoint> big = sample_uniform_points(2, 200000, rng);
  const double ef = 2.0 * ise_weighted([](const SimplexPoint&) { return 1.0; },
                                       [](const SimplexPoint&) { return 0.0; }, big);
  CHECK(ef == doctest::Approx(2.0).epsilon(0.01));

  CHECK(random_design_density(SimplexPoint({1.0 / 3.0, 1.0 / 3.0})) ==
        doctest::Approx(std::exp(log_dirichlet_density({{2.0, 2.0}, 2.0}, SimplexPoint({1.0 / 3.0, 1.0 / 3.0})))));
}

TEST_CASE("quantiles and summaries") {
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == doctest::Approx(1.75));
  const std::vector<double> v{3, 1, 4, 1, 5, 9, 2, 6};
  CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile(v, 0.5) == doctest::Approx(3.5));
  CHECK(quantile(v, 0.75) == doctest::Approx(5.25));
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 9.0);

  std::mt19937_64 eng(1);
  std::lognormal_distribution<double> dist(-7.0, 1.0);
  std::vector<double> x(1000);
  for (double& xi : x)
    xi = dist(eng);
  // Welford streaming oracle.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double delta = x[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x[i] - mean);
  }
  const CellSummary s = summarize(x);
  CHECK(s.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(s.sd == doctest::Approx(std::sqrt(m2 / 999.0)).epsilon(1e-12));
  CHECK(s.iqr >= 0.0);
  CHECK(s.median >= *std::min_element(x.begin(), x.end()));
  CHECK(s.median <= *std::max_element(x.begin(), x.end()));
  CHECK(s.completed == 1000);
}

TEST_CASE("experiment configuration") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.replications = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.noise_sd = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.k_values = {1};
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(parse_variant("boundary") == IseVariant::Boundary);
  CHECK_THROWS_AS(parse_variant("edge"), Error);
}

TEST_CASE("affine target is reproduced exactly") {
  ExperimentConfig cfg;
  cfg.methods = {Method::LL};
  cfg.targets = {0};
  cfg.replications = 1;
  cfg.noise_sd = 0.0;
  for (IseVariant v : {IseVariant::Plain, IseVariant::Boundary, IseVariant::Weighted}) {
    cfg.variant = v;
    const SimulationReport r = run_experiment(cfg);
    REQUIRE(r.cells.size() == 1);
    CHECK(r.cells.begin()->second.mean <= 1e-12);
    CHECK(r.complete());
  }
}

TEST_CASE("experiment determinism and golden miniature") {
  ExperimentConfig cfg;
  cfg.targets = {1, 4};
  cfg.replications = 3;
  cfg.eval_sample_size = 200;
  cfg.base_seed = 7;
  const std::string one = emit_report(run_experiment(cfg), ReportFormat::Csv);
  cfg.threads = 3;
  const std::string three = emit_report(run_experiment(cfg), ReportFormat::Csv);
  CHECK(one == three);

  std::ifstream golden(std::string(SIMPLEXSMOOTH_GOLDEN_DIR) + "/mini_report.csv");
  REQUIRE(golden);
  std::stringstream buf;
  buf << golden.rdbuf();
  CHECK(one == buf.str());
  if (one != buf.str())
    std::ofstream("mini_report.actual.csv") << one;

  cfg.random_design = true;
  cfg.variant = IseVariant::Weighted;
  const SimulationReport r = run_experiment(cfg);
  CHECK(r.cells.size() == 4);
  for (const auto& [key, cell] : r.cells) {
    CHECK(key.n == 28);
    CHECK(cell.completed == 3);
  }
}

TEST_CASE("Monte Carlo bias and variance at an interior point") {
  Proposition1Config cfg;
  cfg.n = 500;
  cfg.replications = 400;
  cfg.b = 0.05;
  const Proposition1Report affine = verify_proposition1(cfg, target(0));
  CHECK(affine.predicted_bias == 0.0);
  CHECK(std::abs(affine.measured_bias) < 4.0 * affine.bias_standard_error);
  CHECK(affine.design_density == doctest::Approx(2.0));

  const Proposition1Report m1 = verify_proposition1(cfg, target(1));
  cfg.b = 0.025;
  const Proposition1Report half = verify_proposition1(cfg, target(1));
  CHECK(half.predicted_bias == doctest::Approx(m1.predicted_bias / 2.0));
  CHECK(m1.predicted_bias == doctest::Approx(-0.05 / 9.0));
  CHECK(m1.predicted_variance ==
        doctest::Approx(psi(cfg.s, {}) * 0.01 / (500.0 * 0.05 * 2.0)));
}
