#include <doctest.h>

#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using simplexsmooth::cli::run;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Parsed {
  std::map<std::string, std::string> header;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

Parsed parse(const std::string& text) {
  Parsed p;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      p.header[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ','))
      fields.push_back(f);
    if (p.columns.empty())
      p.columns = fields;
    else
      p.rows.push_back(fields);
  }
  return p;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "simplexsmooth_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path p = scratch(name);
  std::ofstream(p) << content;
  return p;
}

const std::string kSediment = std::string(SIMPLEXSMOOTH_DATA_DIR) + "/sediment.csv";

} // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(call({}).code == 2);
  CHECK(call({"fit"}).code == 2);
  CHECK(call({"fit", "--data", kSediment, "--schema", "sediment"}).code == 2);
  CHECK(call({"fit", "--data", kSediment, "--schema", "sediment", "--bandwidth", "0.2", "--method", "lc"}).code == 2);
  CHECK(call({"fit", "--data", "/nonexistent.csv", "--bandwidth", "0.2"}).code == 2);
  CHECK(call({"fit", "--data", kSediment, "--schema", "sediment", "--cv", "lscv"}).code == 2);
  CHECK(call({"simulate", "--targets", "9"}).code == 2);
  CHECK(call({"simulate", "--variant", "edge"}).code == 2);

  const fs::path empty = write_file("empty.csv", "x1,x2,y\n");
  const Result r = call({"fit", "--data", empty.string(), "--bandwidth", "0.1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("no data rows") != std::string::npos);

  const fs::path bad = write_file("bad.csv", "x1,x2,y\n0.1,0.2,1\n0.1,zz,2\n");
  const Result rb = call({"fit", "--data", bad.string(), "--bandwidth", "0.1"});
  CHECK(rb.code == 3);
  CHECK(rb.err.find("row 2") != std::string::npos);

  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("fit on constant data") {
  const fs::path data = write_file("const.csv", "x1,x2,y\n0.1,0.1,4.5\n0.6,0.2,4.5\n0.2,0.7,4.5\n0.3,0.3,4.5\n"
                                                "0.05,0.5,4.5\n0.45,0.45,4.5\n");
  const Result r = call({"fit", "--data", data.string(), "--bandwidth", "0.2", "--grid-spacing", "0.1"});
  REQUIRE(r.code == 0);
  const Parsed p = parse(r.out);
  CHECK(p.header.at("grid_points") == "66");
  CHECK(p.header.at("grid_skipped") == "55");
  CHECK(p.header.at("bandwidth_source") == "fixed");
  CHECK(p.columns == std::vector<std::string>{"x1", "x2", "estimate", "degenerate"});
  REQUIRE(p.rows.size() == 66);
  for (const auto& row : p.rows)
    CHECK(std::abs(std::stod(row[2]) - 4.5) < 1e-10);
}

TEST_CASE("sediment surfaces") {
  const fs::path pts = write_file("pts.csv", "x1,x2\n0.05,0.05\n0.9,0.05\n0.3,0.4\n");
  const Result fixed = call({"fit", "--data", kSediment, "--schema", "sediment", "--bandwidth", "0.2195",
                             "--points", pts.string()});
  REQUIRE(fixed.code == 0);
  const Result loo = call({"fit", "--data", kSediment, "--schema", "sediment", "--cv", "loocv",
                           "--points", pts.string()});
  REQUIRE(loo.code == 0);
  const Parsed a = parse(fixed.out), b = parse(loo.out);
  CHECK(b.header.at("bandwidth_source") == "loocv");
  CHECK(b.header.at("boundary_hit") == "false");
  CHECK(std::stod(b.header.at("bandwidth")) == doctest::Approx(0.2195).epsilon(0.1));
  CHECK(a.header.at("renormalized_rows") == b.header.at("renormalized_rows"));
  REQUIRE(a.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::stod(a.rows[i][2]) == doctest::Approx(std::stod(b.rows[i][2])).epsilon(0.02));
  // Clay-rich corner lies deeper than the sandy corner.
  CHECK(std::stod(a.rows[0][2]) > std::stod(a.rows[1][2]));
}

TEST_CASE("config file and output file") {
  const fs::path cfg = write_file("fit.ini", "[fit]\nbandwidth=0.3\nmethod=nw\ngrid-spacing=0.25\n");
  const Result from_cfg = call({"fit", "--data", kSediment, "--schema", "sediment", "--config", cfg.string()});
  REQUIRE(from_cfg.code == 0);
  const Parsed p = parse(from_cfg.out);
  CHECK(p.header.at("method") == "NW");
  CHECK(std::stod(p.header.at("bandwidth")) == 0.3);
  CHECK(p.header.at("grid_points") == "15");

  const Result override = call({"fit", "--data", kSediment, "--schema", "sediment", "--config", cfg.string(),
                                "--method", "ll"});
  REQUIRE(override.code == 0);
  CHECK(parse(override.out).header.at("method") == "LL");
  CHECK(std::stod(parse(override.out).header.at("bandwidth")) == 0.3);

  const fs::path out = scratch("fit_out.csv");
  fs::remove(out);
  const Result to_file = call({"fit", "--data", kSediment, "--schema", "sediment", "--config", cfg.string(),
                               "--out", out.string()});
  REQUIRE(to_file.code == 0);
  CHECK(to_file.out.empty());
  std::ifstream in(out);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == from_cfg.out);
}

TEST_CASE("cv command") {
  const Result r = call({"cv", "--data", kSediment, "--schema", "sediment"});
  REQUIRE(r.code == 0);
  const Parsed p = parse(r.out);
  CHECK(p.header.at("cv") == "loocv");
  CHECK(std::stod(p.header.at("b_hat")) == doctest::Approx(0.2195).epsilon(0.1));
  CHECK(p.columns == std::vector<std::string>{"b", "score", "ok"});
  CHECK(p.rows.size() >= 32);

  const Result l = call({"cv", "--cv", "lscv", "--target", "3", "--eval-size", "300"});
  REQUIRE(l.code == 0);
  const Parsed lp = parse(l.out);
  CHECK(lp.header.at("target") == "m3");
  CHECK(lp.header.at("n") == "28");
  const double bh = std::stod(lp.header.at("b_hat"));
  CHECK(bh > 1e-3);
  CHECK(bh < 2.0);
  CHECK(call({"cv", "--cv", "lscv", "--target", "3", "--eval-size", "300"}).out == l.out);
  CHECK(call({"cv", "--cv", "gcv"}).code == 2);
}

TEST_CASE("simulate command") {
  const Result r = call({"simulate", "--targets", "0", "--reps", "1", "--noise-sd", "0", "--method", "ll"});
  REQUIRE(r.code == 0);
  const Parsed p = parse(r.out);
  CHECK(p.header.at("command") == "simulate");
  CHECK(p.header.at("incomplete_cells") == "0");
  REQUIRE(p.rows.size() == 1);
  CHECK(p.rows[0][0] == "m0");
  CHECK(std::stod(p.rows[0][2]) <= 1e-12);

  const Result md = call({"simulate", "--targets", "1", "--reps", "2", "--eval-size", "100", "--format", "markdown"});
  REQUIRE(md.code == 0);
  CHECK(md.out.find("<!-- command=simulate -->") != std::string::npos);
}

TEST_CASE("verify command") {
  const Result r = call({"verify", "--targets", "0", "--b-values", "0.1", "--n", "300", "--reps", "50"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# table=proposition1") != std::string::npos);
  CHECK(r.out.find("# table=a_b") != std::string::npos);
  CHECK(r.out.find("# table=second_moment") != std::string::npos);
}

TEST_CASE("integer lists") {
  using simplexsmooth::cli::parse_int_list;
  CHECK(parse_int_list("1..6") == std::vector<int>{1, 2, 3, 4, 5, 6});
  CHECK(parse_int_list("1,3") == std::vector<int>{1, 3});
  CHECK(parse_int_list("0,2..4,7") == std::vector<int>{0, 2, 3, 4, 7});
  CHECK_THROWS(parse_int_list(""));
  CHECK_THROWS(parse_int_list("4..2"));
  CHECK_THROWS(parse_int_list("a"));
}
