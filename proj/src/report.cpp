#include "simplexsmooth/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace simplexsmooth {

ReportFormat parse_format(const std::string& name) {
  if (name == "csv")
    return ReportFormat::Csv;
  if (name == "markdown" || name == "md")
    return ReportFormat::Markdown;
  throw Error("unknown report format '" + name + "' (expected csv or markdown)");
}

namespace {

const char* const kStatNames[] = {"Mean", "Median", "SD", "IQR", "MeanB", "Completed", "Failed"};
constexpr std::size_t kStatCount = std::size(kStatNames);

double stat_value(const CellSummary& c, std::size_t stat) {
  switch (stat) {
  case 0:
    return c.mean;
  case 1:
    return c.median;
  case 2:
    return c.sd;
  case 3:
    return c.iqr;
  case 4:
    return c.mean_bandwidth;
  case 5:
    return c.completed;
  default:
    return c.failed;
  }
}

void set_stat(CellSummary& c, std::size_t stat, double v) {
  switch (stat) {
  case 0:
    c.mean = v;
    break;
  case 1:
    c.median = v;
    break;
  case 2:
    c.sd = v;
    break;
  case 3:
    c.iqr = v;
    break;
  case 4:
    c.mean_bandwidth = v;
    break;
  case 5:
    c.completed = static_cast<int>(v);
    break;
  default:
    c.failed = static_cast<int>(v);
    break;
  }
}

std::vector<Method> report_methods(const SimulationReport& report) {
  std::set<Method> present;
  for (const auto& [key, cell] : report.cells)
    present.insert(key.method);
  if (present.empty())
    return {Method::LL, Method::NW};
  return {present.begin(), present.end()};
}

std::string format_stat(double v, std::size_t stat, ReportFormat format) {
  char buf[64];
  if (stat >= 5)
    std::snprintf(buf, sizeof buf, "%d", static_cast<int>(v));
  else if (format == ReportFormat::Csv)
    return format_round_trip(v);
  else
    std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep))
    out.push_back(field);
  if (!line.empty() && line.back() == sep)
    out.emplace_back();
  return out;
}

} // namespace

std::string emit_report(const SimulationReport& report, ReportFormat format) {
  const std::vector<Method> methods = report_methods(report);
  std::vector<std::string> columns{"Function", "n"};
  for (std::size_t s = 0; s < kStatCount; ++s)
    for (Method m : methods)
      columns.push_back(std::string(kStatNames[s]) + "-" + to_string(m));

  std::vector<std::vector<std::string>> rows;
  std::set<std::pair<int, std::size_t>> row_keys;
  for (const auto& [key, cell] : report.cells)
    row_keys.emplace(key.target, key.n);
  for (const auto& [t, n] : row_keys) {
    std::vector<std::string> row{"m" + std::to_string(t), std::to_string(n)};
    for (std::size_t s = 0; s < kStatCount; ++s) {
      for (Method m : methods) {
        const auto it = report.cells.find(ReportKey{t, n, m});
        row.push_back(it == report.cells.end() ? "" : format_stat(stat_value(it->second, s), s, format));
      }
    }
    rows.push_back(std::move(row));
  }

  std::ostringstream os;
  const char* comment = format == ReportFormat::Csv ? "# " : "<!-- ";
  const char* comment_end = format == ReportFormat::Csv ? "" : " -->";
  for (const auto& [k, v] : report.header)
    os << comment << k << '=' << v << comment_end << '\n';

  auto write_row = [&](const std::vector<std::string>& fields) {
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
  write_row(columns);
  if (format == ReportFormat::Markdown) {
    os << '|';
    for (std::size_t i = 0; i < columns.size(); ++i)
      os << (i < 2 ? " --- |" : " ---: |");
    os << '\n';
  }
  for (const auto& row : rows)
    write_row(row);
  return os.str();
}

SimulationReport parse_report_csv(const std::string& text) {
  SimulationReport report;
  std::istringstream is(text);
  std::string line;
  std::vector<std::string> columns;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    if (line.rfind("# ", 0) == 0) {
      const std::string body = line.substr(2);
      const auto eq = body.find('=');
      if (eq == std::string::npos)
        throw Error("report line " + std::to_string(line_no) + ": malformed header comment");
      report.header.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    const std::vector<std::string> fields = split(line, ',');
    if (columns.empty()) {
      columns = fields;
      if (columns.size() < 2 || columns[0] != "Function" || columns[1] != "n")
        throw Error("report line " + std::to_string(line_no) + ": unexpected column header");
      continue;
    }
    if (fields.size() != columns.size())
      throw Error("report line " + std::to_string(line_no) + ": wrong number of fields");
    if (fields[0].size() < 2 || fields[0][0] != 'm')
      throw Error("report line " + std::to_string(line_no) + ": bad function label");
    const int t = std::stoi(fields[0].substr(1));
    const std::size_t n = std::stoul(fields[1]);
    for (std::size_t c = 2; c < columns.size(); ++c) {
      if (fields[c].empty())
        continue;
      const auto dash = columns[c].rfind('-');
      if (dash == std::string::npos)
        throw Error("report column '" + columns[c] + "' has no method suffix");
      const std::string stat = columns[c].substr(0, dash);
      const Method m = parse_method(columns[c].substr(dash + 1));
      std::size_t s = 0;
      while (s < kStatCount && stat != kStatNames[s])
        ++s;
      if (s == kStatCount)
        throw Error("report column '" + columns[c] + "' is not a known statistic");
      set_stat(report.cells[ReportKey{t, n, m}], s, std::stod(fields[c]));
    }
  }
  if (columns.empty())
    throw Error("report has no column header");
  return report;
}

} // namespace simplexsmooth
