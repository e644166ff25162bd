#pragma once

#include "simplexsmooth/estimators.hpp"
#include "simplexsmooth/simplex.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace simplexsmooth {

//! A well-formed file that holds no data rows.
class EmptyDatasetError : public Error {
public:
  using Error::Error;
};

enum class Schema { Generic, Sediment };
Schema parse_schema(const std::string& name);

//! One sediment sample: sand/silt/clay percentages and water depth (m).
struct SedimentRecord {
  double sand = 0.0;
  double silt = 0.0;
  double clay = 0.0;
  double depth = 0.0;
};

/// Percentages may miss 100 by at most this much before renormalization.
inline constexpr double kPercentTolerance = 0.5;

struct LoadReport {
  std::size_t rows = 0;
  /// 1-based data rows whose percentages were rescaled to sum to 100.
  std::vector<std::size_t> renormalized_rows;
};

/// Validates the record; returns design (sand, silt)/sum and response depth.
std::pair<SimplexPoint, double> sediment_observation(const SedimentRecord& r);

/// CSV with a header row. Generic: x1..xd and y. Sediment: sand, silt, clay,
/// depth (extra columns are ignored). Lines starting with '#' are skipped.
Dataset parse_dataset(std::istream& in, Schema schema, LoadReport* report = nullptr,
                      const std::string& source = "<input>");
Dataset load_dataset(const std::string& path, Schema schema, LoadReport* report = nullptr);

/// Writes x1..xd,y with round-trip precision.
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// Points file with columns x1..xd. With `skipped` set, rows outside S_d are
/// dropped and counted instead of raising.
std::vector<SimplexPoint> parse_points(std::istream& in, const std::string& source = "<input>",
                                       std::size_t* skipped = nullptr);
std::vector<SimplexPoint> load_points(const std::string& path, std::size_t* skipped = nullptr);

struct Lattice {
  std::vector<SimplexPoint> points;
  /// Lattice nodes of [0,1]^d outside S_d.
  std::size_t skipped = 0;
};

/// Regular lattice of [0,1]^d with the given spacing, intersected with S_d.
Lattice simplex_lattice(std::size_t d, double spacing);

} // namespace simplexsmooth
