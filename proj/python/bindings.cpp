#include "simplexsmooth/bandwidth.hpp"
#include "simplexsmooth/estimators.hpp"
#include "simplexsmooth/io.hpp"
#include "simplexsmooth/rng.hpp"
#include "simplexsmooth/simplex.hpp"
#include "simplexsmooth/simulation.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace simplexsmooth;

namespace {

using Points = std::vector<std::vector<double>>;

std::vector<SimplexPoint> to_points(const Points& rows) {
  std::vector<SimplexPoint> out;
  out.reserve(rows.size());
  for (const auto& r : rows)
    out.emplace_back(r);
  return out;
}

Points from_points(const std::vector<SimplexPoint>& pts) {
  Points out;
  out.reserve(pts.size());
  for (const auto& p : pts)
    out.push_back(p.vec());
  return out;
}

Dataset to_dataset(const Points& design, const std::vector<double>& y) {
  return Dataset(to_points(design), y);
}

py::dict selection_dict(const SelectionResult& r) {
  py::list curve;
  for (const auto& p : r.score_curve)
    curve.append(py::make_tuple(p.b, p.score, p.ok));
  py::dict d;
  d["b_hat"] = r.b_hat;
  d["score"] = r.score;
  d["boundary_hit"] = r.boundary_hit;
  d["score_curve"] = curve;
  return d;
}

BandwidthSearch make_search(double b_min, double b_max, int grid, double tol) {
  BandwidthSearch s{b_min, b_max, grid, tol};
  s.validate();
  return s;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dirichlet-kernel local linear and Nadaraya-Watson smoothing on the simplex";

  py::register_exception<Error>(m, "SimplexSmoothError", PyExc_ValueError);

  m.def(
      "kernel_weight",
      [](const std::vector<double>& s, double b, const std::vector<double>& x) {
        return kernel_weight(KernelSpec(SimplexPoint(s), b), SimplexPoint(x));
      },
      py::arg("s"), py::arg("b"), py::arg("x"));

  m.def(
      "ll_fit",
      [](const Points& design, const std::vector<double>& y, double b, const std::vector<double>& s) {
        const LocalFit f = ll_fit(to_dataset(design, y), b, SimplexPoint(s));
        py::dict d;
        d["estimate"] = f.estimate;
        d["slope"] = f.slope;
        d["degenerate"] = f.degenerate;
        d["total_weight"] = f.total_weight;
        return d;
      },
      py::arg("design"), py::arg("y"), py::arg("b"), py::arg("s"));

  m.def(
      "nw_estimate",
      [](const Points& design, const std::vector<double>& y, double b, const std::vector<double>& s) {
        return nw_estimate(to_dataset(design, y), b, SimplexPoint(s));
      },
      py::arg("design"), py::arg("y"), py::arg("b"), py::arg("s"));

  m.def(
      "predict",
      [](const Points& design, const std::vector<double>& y, double b, const Points& grid,
         const std::string& method, unsigned threads) {
        const std::vector<SimplexPoint> g = to_points(grid);
        const auto pred = predict_grid(to_dataset(design, y), b, g, parse_method(method), threads);
        std::vector<double> out;
        out.reserve(pred.size());
        for (const auto& p : pred)
          out.push_back(p.estimate);
        return out;
      },
      py::arg("design"), py::arg("y"), py::arg("b"), py::arg("grid"), py::arg("method") = "ll",
      py::arg("threads") = 1, "Estimates at each grid point; NaN where the kernel has no support.");

  m.def(
      "loocv_select",
      [](const Points& design, const std::vector<double>& y, const std::string& method, double b_min,
         double b_max, int grid, double tol, unsigned threads) {
        const Dataset data = to_dataset(design, y);
        const BandwidthSearch search = make_search(b_min, b_max, grid, tol);
        SelectionResult r;
        {
          py::gil_scoped_release release;
          r = loocv_select(data, parse_method(method), search, threads);
        }
        return selection_dict(r);
      },
      py::arg("design"), py::arg("y"), py::arg("method") = "ll", py::arg("b_min") = 1e-3,
      py::arg("b_max") = 2.0, py::arg("grid") = 32, py::arg("tol") = 1e-3, py::arg("threads") = 1);

  m.def(
      "lscv_select",
      [](const Points& design, const std::vector<double>& y, int target_id, const Points& eval,
         const std::string& method, unsigned threads) {
        const TargetFunction t = target(target_id);
        const std::vector<SimplexPoint> e = to_points(eval);
        return selection_dict(
            lscv_select(parse_method(method), to_dataset(design, y), t.value, e, {}, threads));
      },
      py::arg("design"), py::arg("y"), py::arg("target"), py::arg("eval_points"),
      py::arg("method") = "ll", py::arg("threads") = 1);

  m.def("mesh", [](int k) { return from_points(mesh(k)); }, py::arg("k"));
  m.def(
      "target_value", [](int id, const std::vector<double>& s) { return target_value(id, SimplexPoint(s)); },
      py::arg("id"), py::arg("s"));
  m.def(
      "simplex_lattice",
      [](std::size_t d, double spacing) {
        const Lattice l = simplex_lattice(d, spacing);
        return py::make_tuple(from_points(l.points), l.skipped);
      },
      py::arg("d"), py::arg("spacing"));
  m.def(
      "uniform_points",
      [](std::size_t d, std::size_t count, std::uint64_t seed) {
        Rng rng(seed);
        return from_points(sample_uniform_points(d, count, rng));
      },
      py::arg("d"), py::arg("count"), py::arg("seed") = 1);

  m.def(
      "load_dataset",
      [](const std::string& path, const std::string& schema) {
        const Dataset d = load_dataset(path, parse_schema(schema));
        return py::make_tuple(from_points(d.design()), d.responses());
      },
      py::arg("path"), py::arg("schema") = "generic");

  m.def(
      "a_b_closed_form",
      [](const std::vector<double>& s, double b) { return a_b_closed_form(KernelSpec(SimplexPoint(s), b)); },
      py::arg("s"), py::arg("b"));
  m.def(
      "psi",
      [](const std::vector<double>& s, const IndexSet& J) { return psi(SimplexPoint(s), J); },
      py::arg("s"), py::arg("J") = IndexSet{});
  m.def("b_opt_global", &b_opt_global, py::arg("n"), py::arg("variance_integral"),
        py::arg("bias_integral"), py::arg("d"));
  m.def("mise_asymptotic", &mise_asymptotic, py::arg("b"), py::arg("n"),
        py::arg("variance_integral"), py::arg("bias_integral"), py::arg("d"));

  m.def(
      "simulate",
      [](const std::vector<int>& targets, const std::vector<int>& k, int reps, double noise_sd,
         const std::string& variant, bool random_design, std::uint64_t seed,
         const std::vector<std::string>& methods, std::size_t eval_size, unsigned threads,
         const std::string& format) {
        ExperimentConfig cfg;
        cfg.targets = targets;
        cfg.k_values = k;
        cfg.replications = reps;
        cfg.noise_sd = noise_sd;
        cfg.variant = parse_variant(variant);
        cfg.random_design = random_design;
        cfg.base_seed = seed;
        cfg.methods.clear();
        for (const auto& name : methods)
          cfg.methods.push_back(parse_method(name));
        cfg.eval_sample_size = eval_size;
        cfg.threads = threads;
        const ReportFormat fmt = parse_format(format);
        py::gil_scoped_release release;
        return emit_report(run_experiment(cfg), fmt);
      },
      py::arg("targets") = std::vector<int>{1, 2, 3, 4, 5, 6}, py::arg("k") = std::vector<int>{7},
      py::arg("reps") = 100, py::arg("noise_sd") = 0.1, py::arg("variant") = "plain",
      py::arg("random_design") = false, py::arg("seed") = 1,
      py::arg("methods") = std::vector<std::string>{"ll", "nw"}, py::arg("eval_size") = 1000,
      py::arg("threads") = 1, py::arg("format") = "csv",
      "Runs the Monte Carlo comparison and returns the report text.");
}
