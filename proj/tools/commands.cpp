#include "commands.hpp"

#include "simplexsmooth/bandwidth.hpp"
#include "simplexsmooth/estimators.hpp"
#include "simplexsmooth/io.hpp"
#include "simplexsmooth/rng.hpp"
#include "simplexsmooth/simplex.hpp"
#include "simplexsmooth/simulation.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

namespace simplexsmooth::cli {

namespace {

//! Bad arguments or unusable input; maps to kUsageError.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Some work units failed but output was still produced.
struct Outcome {
  std::string text;
  int code = kSuccess;
};

std::string fmt(double v, ReportFormat format = ReportFormat::Csv) {
  if (format == ReportFormat::Csv)
    return format_round_trip(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string join(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i)
    out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

// Converts library validation errors raised while resolving options.
template <class Fn>
auto as_usage(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

using Header = std::vector<std::pair<std::string, std::string>>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

void write_header(std::ostream& os, const Header& header, ReportFormat format) {
  for (const auto& [k, v] : header) {
    if (format == ReportFormat::Csv)
      os << "# " << k << '=' << v << '\n';
    else
      os << "<!-- " << k << '=' << v << " -->\n";
  }
}

void write_table(std::ostream& os, const Table& t, ReportFormat format) {
  if (!t.name.empty())
    write_header(os, {{"table", t.name}}, format);
  auto row = [&](const std::vector<std::string>& fields) {
    if (format == ReportFormat::Csv) {
      for (std::size_t i = 0; i < fields.size(); ++i)
        os << (i ? "," : "") << fields[i];
    } else {
      os << '|';
      for (const auto& f : fields)
        os << ' ' << f << " |";
    }
    os << '\n';
  };
  row(t.columns);
  if (format == ReportFormat::Markdown) {
    os << '|';
    for (std::size_t i = 0; i < t.columns.size(); ++i)
      os << " --- |";
    os << '\n';
  }
  for (const auto& r : t.rows)
    row(r);
}

struct SearchOptions {
  double b_min = BandwidthSearch{}.b_min;
  double b_max = BandwidthSearch{}.b_max;
  int grid_size = BandwidthSearch{}.coarse_grid_size;
  double refine_tolerance = BandwidthSearch{}.refine_tolerance;

  void add(CLI::App* app) {
    app->add_option("--b-min", b_min, "Lower end of the bandwidth search window")->capture_default_str();
    app->add_option("--b-max", b_max, "Upper end of the bandwidth search window")->capture_default_str();
    app->add_option("--search-grid", grid_size, "Coarse log-spaced grid size")->capture_default_str();
    app->add_option("--refine-tol", refine_tolerance, "Relative tolerance of the refinement")
        ->capture_default_str();
  }

  BandwidthSearch resolve() const {
    BandwidthSearch s{b_min, b_max, grid_size, refine_tolerance};
    as_usage([&] { s.validate(); });
    return s;
  }

  std::string describe() const {
    return fmt(b_min) + ":" + fmt(b_max) + ":" + std::to_string(grid_size) + ":" + fmt(refine_tolerance);
  }
};

Method resolve_method(const std::string& name) {
  return as_usage([&] { return parse_method(name); });
}

ReportFormat resolve_format(const std::string& name) {
  return as_usage([&] { return parse_format(name); });
}

Dataset load_data(const std::string& path, const std::string& schema_name, LoadReport* report) {
  if (path.empty())
    throw UsageError("--data is required");
  const Schema schema = as_usage([&] { return parse_schema(schema_name); });
  std::ifstream probe(path);
  if (!probe)
    throw UsageError("cannot open dataset '" + path + "'");
  try {
    return load_dataset(path, schema, report);
  } catch (const EmptyDatasetError& e) {
    throw UsageError(e.what());
  }
}

void add_data_header(Header& h, const std::string& path, const std::string& schema,
                     const Dataset& data, const LoadReport& load) {
  h.emplace_back("data", path);
  h.emplace_back("schema", schema);
  h.emplace_back("rows", std::to_string(data.size()));
  h.emplace_back("dimension", std::to_string(data.dim()));
  std::string renorm;
  for (std::size_t i = 0; i < load.renormalized_rows.size(); ++i)
    renorm += (i ? "," : "") + std::to_string(load.renormalized_rows[i]);
  h.emplace_back("renormalized_rows", renorm.empty() ? "none" : renorm);
}

// ---------------------------------------------------------------------------

struct FitOptions {
  std::string data;
  std::string schema = "generic";
  std::string method = "ll";
  std::optional<double> bandwidth;
  std::string cv;
  double grid_spacing = 1.0 / 199.0;
  std::string points;
  SearchOptions search;
  unsigned threads = 1;
};

Outcome cmd_fit(const FitOptions& o) {
  const Method method = resolve_method(o.method);
  if (o.bandwidth && !o.cv.empty())
    throw UsageError("give either --bandwidth or --cv, not both");
  if (!o.bandwidth && o.cv.empty())
    throw UsageError("fit needs --bandwidth or --cv loocv");
  if (!o.cv.empty() && o.cv != "loocv")
    throw UsageError("fit supports --cv loocv only; lscv needs a known target (see the cv command)");
  if (o.bandwidth && !(*o.bandwidth > 0.0 && std::isfinite(*o.bandwidth)))
    throw UsageError("--bandwidth must be positive");
  const BandwidthSearch search = o.search.resolve();

  LoadReport load;
  const Dataset data = load_data(o.data, o.schema, &load);

  std::vector<SimplexPoint> grid;
  std::size_t skipped = 0;
  if (!o.points.empty()) {
    std::ifstream probe(o.points);
    if (!probe)
      throw UsageError("cannot open points file '" + o.points + "'");
    grid = load_points(o.points, &skipped);
  } else {
    const Lattice lattice = as_usage([&] { return simplex_lattice(data.dim(), o.grid_spacing); });
    grid = lattice.points;
    skipped = lattice.skipped;
  }
  for (const auto& p : grid)
    if (p.dim() != data.dim())
      throw UsageError("grid dimension " + std::to_string(p.dim()) + " does not match data dimension " +
                       std::to_string(data.dim()));

  double b = 0.0;
  Header h{{"command", "fit"}};
  add_data_header(h, o.data, o.schema, data, load);
  h.emplace_back("method", to_string(method));
  if (o.bandwidth) {
    b = *o.bandwidth;
    h.emplace_back("bandwidth_source", "fixed");
  } else {
    const SelectionResult sel = loocv_select(data, method, search, o.threads);
    b = sel.b_hat;
    h.emplace_back("bandwidth_source", "loocv");
    h.emplace_back("bandwidth_search", o.search.describe());
    h.emplace_back("loocv_score", fmt(sel.score));
    h.emplace_back("boundary_hit", sel.boundary_hit ? "true" : "false");
  }
  h.emplace_back("bandwidth", fmt(b));
  if (o.points.empty())
    h.emplace_back("grid_spacing", fmt(o.grid_spacing));
  else
    h.emplace_back("points", o.points);

  const std::vector<GridPrediction> pred = predict_grid(data, b, grid, method, o.threads);
  std::size_t failed = 0, degenerate = 0;
  for (const auto& p : pred) {
    failed += !p.ok;
    degenerate += p.degenerate;
  }
  h.emplace_back("grid_points", std::to_string(grid.size()));
  h.emplace_back("grid_skipped", std::to_string(skipped));
  h.emplace_back("degenerate_points", std::to_string(degenerate));
  h.emplace_back("failed_points", std::to_string(failed));

  Table t;
  for (std::size_t k = 0; k < data.dim(); ++k)
    t.columns.push_back("x" + std::to_string(k + 1));
  t.columns.push_back("estimate");
  t.columns.push_back("degenerate");
  t.rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<std::string> row;
    for (std::size_t k = 0; k < data.dim(); ++k)
      row.push_back(fmt(grid[i][k]));
    row.push_back(pred[i].ok ? fmt(pred[i].estimate) : "nan");
    row.push_back(pred[i].degenerate ? "1" : "0");
    t.rows.push_back(std::move(row));
  }

  std::ostringstream os;
  write_header(os, h, ReportFormat::Csv);
  write_table(os, t, ReportFormat::Csv);
  if (failed == grid.size() && !grid.empty())
    return {os.str(), kRuntimeFailure};
  return {os.str(), failed ? kPartialCompletion : kSuccess};
}

// ---------------------------------------------------------------------------

struct CvOptions {
  std::string data;
  std::string schema = "generic";
  std::string method = "ll";
  std::string cv = "loocv";
  int target = 1;
  int k = 7;
  bool random_design = false;
  double noise_sd = 0.1;
  std::size_t eval_size = 1000;
  std::uint64_t seed = 1;
  SearchOptions search;
  std::string format = "csv";
  unsigned threads = 1;
};

Outcome cmd_cv(const CvOptions& o) {
  const Method method = resolve_method(o.method);
  const ReportFormat format = resolve_format(o.format);
  const BandwidthSearch search = o.search.resolve();
  Header h{{"command", "cv"}, {"cv", o.cv}, {"method", to_string(method)}};

  SelectionResult sel;
  if (o.cv == "loocv") {
    LoadReport load;
    const Dataset data = load_data(o.data, o.schema, &load);
    add_data_header(h, o.data, o.schema, data, load);
    h.emplace_back("bandwidth_search", o.search.describe());
    sel = loocv_select(data, method, search, o.threads);
  } else if (o.cv == "lscv") {
    const TargetFunction m = as_usage([&] { return target(o.target); });
    if (o.eval_size == 0)
      throw UsageError("--eval-size must be positive");
    if (!(o.noise_sd >= 0.0))
      throw UsageError("--noise-sd must be nonnegative");
    Dataset data;
    if (!o.data.empty()) {
      LoadReport load;
      data = load_data(o.data, o.schema, &load);
      if (data.dim() != 2)
        throw UsageError("lscv targets are defined on S_2; data has dimension " +
                         std::to_string(data.dim()));
      add_data_header(h, o.data, o.schema, data, load);
    } else {
      const std::vector<SimplexPoint> base = as_usage([&] { return mesh(o.k); });
      std::vector<SimplexPoint> design = base;
      if (o.random_design) {
        Rng rng(derive_seed(o.seed, 1));
        for (auto& p : design)
          p = sample_dirichlet(random_design_params(), rng);
      }
      Rng noise(derive_seed(o.seed, 2));
      data = gen_responses(m, design, o.noise_sd, noise);
      h.emplace_back("k", std::to_string(o.k));
      h.emplace_back("n", std::to_string(data.size()));
      h.emplace_back("design", o.random_design ? "dirichlet(2,2,2)" : "mesh");
      h.emplace_back("noise_sd", fmt(o.noise_sd));
    }
    h.emplace_back("target", "m" + std::to_string(o.target));
    h.emplace_back("eval_sample_size", std::to_string(o.eval_size));
    h.emplace_back("seed", std::to_string(o.seed));
    h.emplace_back("bandwidth_search", o.search.describe());
    Rng eval_rng(derive_seed(o.seed, 3));
    const std::vector<SimplexPoint> eval = sample_uniform_points(2, o.eval_size, eval_rng);
    sel = lscv_select(method, data, m.value, eval, search, o.threads);
  } else {
    throw UsageError("--cv must be loocv or lscv");
  }

  h.emplace_back("b_hat", fmt(sel.b_hat));
  h.emplace_back("score", fmt(sel.score));
  h.emplace_back("boundary_hit", sel.boundary_hit ? "true" : "false");
  Table t{"", {"b", "score", "ok"}, {}};
  std::size_t failed = 0;
  for (const auto& p : sel.score_curve) {
    failed += !p.ok;
    t.rows.push_back({fmt(p.b, format), p.ok ? fmt(p.score, format) : "nan", p.ok ? "1" : "0"});
  }
  h.emplace_back("failed_evaluations", std::to_string(failed));
  std::ostringstream os;
  write_header(os, h, format);
  write_table(os, t, format);
  return {os.str(), kSuccess};
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string methods = "ll,nw";
  std::string targets = "1..6";
  std::string k = "7";
  int reps = 100;
  double noise_sd = 0.1;
  std::string variant = "plain";
  bool random_design = false;
  std::uint64_t seed = 1;
  std::size_t eval_size = 1000;
  SearchOptions search;
  std::string format = "csv";
  unsigned threads = 1;
};

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(resolve_method(item));
  if (out.empty())
    throw UsageError("--method needs at least one of ll, nw");
  return out;
}

Outcome cmd_simulate(const SimulateOptions& o) {
  ExperimentConfig cfg;
  cfg.methods = parse_methods(o.methods);
  cfg.targets = as_usage([&] { return parse_int_list(o.targets); });
  cfg.k_values = as_usage([&] { return parse_int_list(o.k); });
  cfg.replications = o.reps;
  cfg.noise_sd = o.noise_sd;
  cfg.variant = as_usage([&] { return parse_variant(o.variant); });
  cfg.random_design = o.random_design;
  cfg.base_seed = o.seed;
  cfg.eval_sample_size = o.eval_size;
  cfg.search = o.search.resolve();
  cfg.threads = o.threads;
  as_usage([&] {
    cfg.validate();
    for (int t : cfg.targets)
      target(t);
  });
  const ReportFormat format = resolve_format(o.format);

  SimulationReport report = run_experiment(cfg);
  report.header.insert(report.header.begin(), {"command", "simulate"});
  int failed_cells = 0, empty_cells = 0;
  for (const auto& [key, cell] : report.cells) {
    failed_cells += !cell.complete();
    empty_cells += cell.completed == 0;
  }
  report.header.emplace_back("incomplete_cells", std::to_string(failed_cells));
  Outcome out{emit_report(report, format), kSuccess};
  if (empty_cells == static_cast<int>(report.cells.size()))
    out.code = kRuntimeFailure;
  else if (failed_cells)
    out.code = kPartialCompletion;
  return out;
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
  std::string targets = "0,1";
  std::string b_values = "0.1,0.05";
  std::size_t n = 2000;
  int reps = 2000;
  double noise_sd = 0.1;
  std::string method = "ll";
  std::uint64_t seed = 1;
  std::string format = "csv";
  unsigned threads = 1;
};

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty())
      throw UsageError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty())
    throw UsageError("empty number list");
  return out;
}

Outcome cmd_verify(const VerifyOptions& o) {
  const Method method = resolve_method(o.method);
  const ReportFormat format = resolve_format(o.format);
  const std::vector<int> ids = as_usage([&] { return parse_int_list(o.targets); });
  const std::vector<double> bs = parse_double_list(o.b_values);
  for (double b : bs)
    if (!(b > 0.0))
      throw UsageError("bandwidths must be positive");
  if (o.reps < 2)
    throw UsageError("--reps must be at least 2");
  if (o.n < 1)
    throw UsageError("--n must be positive");
  std::vector<TargetFunction> targets;
  for (int id : ids)
    targets.push_back(as_usage([&] { return target(id); }));

  Header h{{"command", "verify"},
           {"method", to_string(method)},
           {"targets", join(ids)},
           {"b_values", o.b_values},
           {"n", std::to_string(o.n)},
           {"replications", std::to_string(o.reps)},
           {"noise_sd", fmt(o.noise_sd)},
           {"design", "uniform"},
           {"s", "0.33333333333333331,0.33333333333333331"},
           {"seed", std::to_string(o.seed)}};

  const auto f = [&](double v) { return fmt(v, format); };

  Table prop{"proposition1",
             {"target", "b", "truth", "mean_estimate", "measured_bias", "bias_se", "bias_z",
              "predicted_bias", "measured_variance", "variance_se", "predicted_variance",
              "predicted_variance_exact_ab", "variance_ratio"},
             {}};
  for (const TargetFunction& m : targets) {
    for (std::size_t bi = 0; bi < bs.size(); ++bi) {
      Proposition1Config cfg;
      cfg.n = o.n;
      cfg.b = bs[bi];
      cfg.sigma = o.noise_sd;
      cfg.replications = o.reps;
      cfg.method = method;
      cfg.seed = derive_seed(o.seed, static_cast<std::uint64_t>(m.id), bi);
      cfg.threads = o.threads;
      const Proposition1Report r = verify_proposition1(cfg, m);
      const double z = r.bias_standard_error > 0.0 ? r.measured_bias / r.bias_standard_error : 0.0;
      prop.rows.push_back({"m" + std::to_string(m.id), f(cfg.b), f(m(cfg.s)), f(r.mean_estimate),
                           f(r.measured_bias), f(r.bias_standard_error), f(z), f(r.predicted_bias),
                           f(r.measured_variance), f(r.variance_standard_error),
                           f(r.predicted_variance), f(r.predicted_variance_exact_ab),
                           f(r.variance_ratio)});
    }
  }

  const std::vector<double> ab_grid{0.1, 0.03, 0.01, 0.003, 0.001};
  Table ab{"a_b",
           {"case", "s1", "s2", "b", "closed_form", "asymptotic", "ratio", "uniform_bound",
            "within_bound"},
           {}};
  for (int boundary = 0; boundary < 2; ++boundary) {
    for (double b : ab_grid) {
      const SimplexPoint s = boundary ? SimplexPoint{b, 0.3} : SimplexPoint{0.3, 0.3};
      const KernelSpec spec(s, b);
      const IndexSet J = boundary ? IndexSet{0} : IndexSet{};
      const std::vector<double> lambda = boundary ? std::vector<double>{1.0} : std::vector<double>{};
      const double exact = a_b_closed_form(spec);
      const double asym = a_b_asymptotic(spec, J, lambda);
      const double bound = a_b_uniform_bound(spec);
      ab.rows.push_back({boundary ? "boundary_J1_lambda1" : "interior", f(s[0]), f(s[1]), f(b),
                         f(exact), f(asym), f(exact / asym), f(bound), exact <= bound ? "1" : "0"});
    }
  }

  const SimplexPoint ms{0.3, 0.3};
  Table mom{"second_moment", {"s1", "s2", "b", "max_abs_error", "observed_order"}, {}};
  double prev = 0.0;
  for (double b : {0.1, 0.05, 0.025}) {
    const KernelSpec spec(ms, b);
    double err = 0.0;
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t l = 0; l < 2; ++l) {
        const double limit = (k == l ? ms[k] : 0.0) - ms[k] * ms[l];
        err = std::max(err, std::abs(exact_central_second_moment(spec, k, l) / b - limit));
      }
    mom.rows.push_back({f(ms[0]), f(ms[1]), f(b), f(err), prev > 0.0 ? f(std::log2(prev / err)) : ""});
    prev = err;
  }

  std::ostringstream os;
  write_header(os, h, format);
  write_table(os, prop, format);
  write_table(os, ab, format);
  write_table(os, mom, format);
  return {os.str(), kSuccess};
}

} // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size())
      throw Error("bad integer '" + s + "' in list '" + text + "'");
    return v;
  };
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(item));
      continue;
    }
    const int lo = to_int(item.substr(0, dots));
    const int hi = to_int(item.substr(dots + 2));
    if (hi < lo)
      throw Error("empty range '" + item + "'");
    for (int v = lo; v <= hi; ++v)
      out.push_back(v);
  }
  if (out.empty())
    throw Error("empty integer list");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local linear and Nadaraya-Watson smoothing on the simplex with Dirichlet kernels",
               "simplexsmooth"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");
  // Subcommand options live in [fit], [cv], ... sections; command-line flags win.
  app.set_config("--config", "", "INI/TOML config file with one section per command");
  app.fallthrough();

  std::string out_path;
  auto add_common = [&](CLI::App* sub, unsigned& threads) {
    sub->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)")
        ->capture_default_str();
    sub->add_option("--out", out_path, "Write output to this file instead of stdout");
  };

  FitOptions fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Predict on a lattice or points file");
  fit_cmd->add_option("--data", fit.data, "Dataset CSV")->required();
  fit_cmd->add_option("--schema", fit.schema, "generic or sediment")->capture_default_str();
  fit_cmd->add_option("--method", fit.method, "ll or nw")->capture_default_str();
  fit_cmd->add_option("--bandwidth", fit.bandwidth, "Fixed bandwidth");
  fit_cmd->add_option("--cv", fit.cv, "Select the bandwidth by cross-validation (loocv)");
  fit_cmd->add_option("--grid-spacing", fit.grid_spacing, "Lattice spacing over S_d")
      ->capture_default_str();
  fit_cmd->add_option("--points", fit.points, "CSV of evaluation points x1..xd");
  fit.search.add(fit_cmd);
  add_common(fit_cmd, fit.threads);

  CvOptions cv;
  CLI::App* cv_cmd = app.add_subcommand("cv", "Cross-validation score curve and selected bandwidth");
  cv_cmd->add_option("--data", cv.data, "Dataset CSV");
  cv_cmd->add_option("--schema", cv.schema, "generic or sediment")->capture_default_str();
  cv_cmd->add_option("--method", cv.method, "ll or nw")->capture_default_str();
  cv_cmd->add_option("--cv", cv.cv, "loocv or lscv")->capture_default_str();
  cv_cmd->add_option("--target", cv.target, "Known target id for lscv")->capture_default_str();
  cv_cmd->add_option("--k", cv.k, "Mesh size for generated lscv data")->capture_default_str();
  cv_cmd->add_flag("--random-design", cv.random_design, "Dirichlet(2,2,2) design for generated data");
  cv_cmd->add_option("--noise-sd", cv.noise_sd, "Noise standard deviation")->capture_default_str();
  cv_cmd->add_option("--eval-size", cv.eval_size, "Uniform points in the lscv score")
      ->capture_default_str();
  cv_cmd->add_option("--seed", cv.seed, "Random seed")->capture_default_str();
  cv_cmd->add_option("--format", cv.format, "csv or markdown")->capture_default_str();
  cv.search.add(cv_cmd);
  add_common(cv_cmd, cv.threads);

  SimulateOptions sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo comparison of LL and NW");
  sim_cmd->add_option("--method", sim.methods, "Comma-separated methods")->capture_default_str();
  sim_cmd->add_option("--targets", sim.targets, "Target ids, e.g. 1..6 or 1,3")->capture_default_str();
  sim_cmd->add_option("--k", sim.k, "Mesh sizes, e.g. 7,10,14,20")->capture_default_str();
  sim_cmd->add_option("--reps", sim.reps, "Replications per cell")->capture_default_str();
  sim_cmd->add_option("--noise-sd", sim.noise_sd, "Noise standard deviation")->capture_default_str();
  sim_cmd->add_option("--variant", sim.variant, "plain, boundary or weighted")->capture_default_str();
  sim_cmd->add_flag("--random-design", sim.random_design, "Dirichlet(2,2,2) random design");
  sim_cmd->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
  sim_cmd->add_option("--eval-size", sim.eval_size, "Uniform points per score and error sample")
      ->capture_default_str();
  sim_cmd->add_option("--format", sim.format, "csv or markdown")->capture_default_str();
  sim.search.add(sim_cmd);
  add_common(sim_cmd, sim.threads);

  VerifyOptions ver;
  CLI::App* ver_cmd = app.add_subcommand("verify", "Measured against predicted asymptotics");
  ver_cmd->add_option("--targets", ver.targets, "Target ids for the bias/variance sweep")
      ->capture_default_str();
  ver_cmd->add_option("--b-values", ver.b_values, "Comma-separated bandwidths")->capture_default_str();
  ver_cmd->add_option("--n", ver.n, "Sample size per replication")->capture_default_str();
  ver_cmd->add_option("--reps", ver.reps, "Replications")->capture_default_str();
  ver_cmd->add_option("--noise-sd", ver.noise_sd, "Noise standard deviation")->capture_default_str();
  ver_cmd->add_option("--method", ver.method, "ll or nw")->capture_default_str();
  ver_cmd->add_option("--seed", ver.seed, "Random seed")->capture_default_str();
  ver_cmd->add_option("--format", ver.format, "csv or markdown")->capture_default_str();
  add_common(ver_cmd, ver.threads);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    Outcome result;
    if (*fit_cmd)
      result = cmd_fit(fit);
    else if (*cv_cmd)
      result = cmd_cv(cv);
    else if (*sim_cmd)
      result = cmd_simulate(sim);
    else
      result = cmd_verify(ver);

    if (out_path.empty()) {
      out << result.text;
    } else {
      std::ofstream file(out_path, std::ios::binary);
      if (!file)
        throw UsageError("cannot write '" + out_path + "'");
      file << result.text;
      if (!file)
        throw Error("write to '" + out_path + "' failed");
    }
    if (result.code == kPartialCompletion)
      err << "simplexsmooth: partial completion, see the failure counts in the output header\n";
    else if (result.code == kRuntimeFailure)
      err << "simplexsmooth: every evaluation failed\n";
    return result.code;
  } catch (const UsageError& e) {
    err << "simplexsmooth: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "simplexsmooth: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

} // namespace simplexsmooth::cli
