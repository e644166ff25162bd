#include "simplexsmooth/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace simplexsmooth {

Schema parse_schema(const std::string& name) {
  if (name == "generic")
    return Schema::Generic;
  if (name == "sediment")
    return Schema::Sediment;
  throw Error("unknown dataset schema '" + name + "' (expected generic or sediment)");
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos)
    return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(trim(field));
  return out;
}

class CsvTable {
public:
  CsvTable(std::istream& in, std::string source) : source_(std::move(source)) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string t = trim(line);
      if (t.empty() || t.front() == '#')
        continue;
      if (header_.empty()) {
        header_ = split_csv(t);
        continue;
      }
      rows_.push_back(split_csv(t));
      line_numbers_.push_back(line_no);
      if (rows_.back().size() != header_.size())
        fail(rows_.size() - 1, "", "expected " + std::to_string(header_.size()) + " fields, found " +
                                       std::to_string(rows_.back().size()));
    }
    if (header_.empty())
      throw Error(source_ + ": missing CSV header");
  }

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end())
      throw Error(source_ + ": bad header, missing column '" + name + "'");
    return static_cast<std::size_t>(it - header_.begin());
  }
  bool has_column(const std::string& name) const {
    return std::find(header_.begin(), header_.end(), name) != header_.end();
  }

  std::size_t size() const { return rows_.size(); }

  double number(std::size_t row, std::size_t col) const {
    const std::string& cell = rows_[row][col];
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(value))
      fail(row, header_[col], "non-numeric cell '" + cell + "'");
    return value;
  }

  [[noreturn]] void fail(std::size_t row, const std::string& col, const std::string& what) const {
    std::ostringstream os;
    os << source_ << ": row " << row + 1 << " (line " << line_numbers_[row] << ")";
    if (!col.empty())
      os << ", column " << col;
    os << ": " << what;
    throw Error(os.str());
  }

private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> line_numbers_;
};

std::size_t count_coordinate_columns(const CsvTable& table) {
  std::size_t d = 0;
  while (table.has_column("x" + std::to_string(d + 1)))
    ++d;
  return d;
}

} // namespace

std::pair<SimplexPoint, double> sediment_observation(const SedimentRecord& r) {
  if (!(r.sand >= 0.0 && r.silt >= 0.0 && r.clay >= 0.0))
    throw Error("sediment percentages must be nonnegative");
  const double sum = r.sand + r.silt + r.clay;
  if (!(std::abs(sum - 100.0) <= kPercentTolerance + 1e-9))
    throw Error("sediment percentages sum to " + std::to_string(sum) + ", not 100 +/- 0.5");
  if (!(r.depth > 0.0))
    throw Error("sediment depth must be positive");
  return {SimplexPoint({r.sand / sum, r.silt / sum}), r.depth};
}

Dataset parse_dataset(std::istream& in, Schema schema, LoadReport* report,
                      const std::string& source) {
  const CsvTable table(in, source);
  std::vector<SimplexPoint> design;
  std::vector<double> responses;
  LoadReport local;

  if (schema == Schema::Generic) {
    const std::size_t d = count_coordinate_columns(table);
    if (d == 0)
      throw Error(source + ": bad header, expected coordinate columns x1..xd");
    std::vector<std::size_t> cols;
    for (std::size_t k = 0; k < d; ++k)
      cols.push_back(table.column("x" + std::to_string(k + 1)));
    const std::size_t ycol = table.column("y");
    for (std::size_t r = 0; r < table.size(); ++r) {
      std::vector<double> x(d);
      for (std::size_t k = 0; k < d; ++k)
        x[k] = table.number(r, cols[k]);
      const double y = table.number(r, ycol);
      try {
        design.emplace_back(std::move(x));
      } catch (const Error& e) {
        table.fail(r, "x1..x" + std::to_string(d), e.what());
      }
      responses.push_back(y);
    }
  } else {
    const std::size_t c_sand = table.column("sand");
    const std::size_t c_silt = table.column("silt");
    const std::size_t c_clay = table.column("clay");
    const std::size_t c_depth = table.column("depth");
    for (std::size_t r = 0; r < table.size(); ++r) {
      SedimentRecord rec{table.number(r, c_sand), table.number(r, c_silt),
                         table.number(r, c_clay), table.number(r, c_depth)};
      try {
        auto [x, y] = sediment_observation(rec);
        design.push_back(std::move(x));
        responses.push_back(y);
      } catch (const Error& e) {
        const bool depth_issue = !(rec.depth > 0.0);
        table.fail(r, depth_issue ? "depth" : "sand/silt/clay", e.what());
      }
      if (std::abs(rec.sand + rec.silt + rec.clay - 100.0) > 1e-9)
        local.renormalized_rows.push_back(r + 1);
    }
  }
  if (design.empty())
    throw EmptyDatasetError(source + ": dataset has no data rows");
  local.rows = design.size();
  if (report)
    *report = local;
  return Dataset(std::move(design), std::move(responses));
}

Dataset load_dataset(const std::string& path, Schema schema, LoadReport* report) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open dataset '" + path + "'");
  return parse_dataset(in, schema, report, path);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  const std::size_t d = data.dim();
  for (std::size_t k = 0; k < d; ++k)
    out << 'x' << k + 1 << ',';
  out << "y\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k)
      out << format_round_trip(data.design()[i][k]) << ',';
    out << format_round_trip(data.responses()[i]) << '\n';
  }
}

std::vector<SimplexPoint> parse_points(std::istream& in, const std::string& source,
                                       std::size_t* skipped) {
  const CsvTable table(in, source);
  const std::size_t d = count_coordinate_columns(table);
  if (d == 0)
    throw Error(source + ": bad header, expected coordinate columns x1..xd");
  std::vector<std::size_t> cols;
  for (std::size_t k = 0; k < d; ++k)
    cols.push_back(table.column("x" + std::to_string(k + 1)));
  std::vector<SimplexPoint> points;
  for (std::size_t r = 0; r < table.size(); ++r) {
    std::vector<double> x(d);
    for (std::size_t k = 0; k < d; ++k)
      x[k] = table.number(r, cols[k]);
    try {
      points.emplace_back(std::move(x));
    } catch (const Error& e) {
      if (!skipped)
        table.fail(r, "x1..x" + std::to_string(d), e.what());
      ++*skipped;
    }
  }
  return points;
}

std::vector<SimplexPoint> load_points(const std::string& path, std::size_t* skipped) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open points file '" + path + "'");
  return parse_points(in, path, skipped);
}

Lattice simplex_lattice(std::size_t d, double spacing) {
  if (d == 0)
    throw Error("lattice dimension must be >= 1");
  if (!(spacing > 0.0 && spacing <= 1.0))
    throw Error("lattice spacing must lie in (0, 1]");
  const std::size_t steps = static_cast<std::size_t>(std::floor(1.0 / spacing + 1e-9));
  const bool exact = std::abs(static_cast<double>(steps) * spacing - 1.0) < 1e-9;
  auto coord = [&](std::size_t i) {
    return exact ? static_cast<double>(i) / static_cast<double>(steps)
                 : static_cast<double>(i) * spacing;
  };
  Lattice out;
  std::vector<std::size_t> idx(d, 0);
  for (;;) {
    std::size_t total = 0;
    for (std::size_t i : idx)
      total += i;
    std::vector<double> c(d);
    for (std::size_t k = 0; k < d; ++k)
      c[k] = coord(idx[k]);
    double sum = 0.0;
    for (double v : c)
      sum += v;
    if ((exact && total <= steps) || (!exact && sum <= 1.0 + kSimplexTolerance))
      out.points.emplace_back(std::move(c));
    else
      ++out.skipped;
    // Odometer increment, first coordinate fastest.
    std::size_t k = 0;
    while (k < d && ++idx[k] > steps)
      idx[k++] = 0;
    if (k == d)
      break;
  }
  return out;
}

} // namespace simplexsmooth
