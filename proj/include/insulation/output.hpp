#pragma once

#include <string>
#include <utility>
#include <vector>

#include "insulation/mesh.hpp"

namespace insulation {

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double value);

/// Writes `content` to a temporary file next to `path` and renames it into place.
/// Throws Io on failure.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

using NamedField = std::pair<std::string, std::vector<double>>;

/// Legacy ASCII VTK 3.0 unstructured grid: triangles, region tag per cell, nodal fields.
std::string vtk_mesh(const TriMesh& mesh, const std::vector<NamedField>& point_fields);

/// Legacy ASCII VTK 3.0 polyline through `points` (one line cell per consecutive pair
/// listed in `segments`), with nodal fields.
std::string vtk_polyline(const std::vector<Vec2>& points, const std::vector<std::pair<int, int>>& segments,
                         const std::vector<NamedField>& point_fields);

/// Comma-separated table with a header line.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string str() const;
};

/// Numeric CSV with a header line; returns the columns by header name order.
struct NumericCsv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a column, throws SchemaError when missing.
  std::size_t column(const std::string& name) const;
};
NumericCsv parse_numeric_csv(const std::string& text, const std::string& origin);

}  // namespace insulation
