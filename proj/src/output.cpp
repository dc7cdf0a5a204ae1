#include "insulation/output.hpp"

#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "insulation/error.hpp"

namespace insulation {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value == 0.0 ? 0.0 : value);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create directory for " + path + ": " + ec.message());
  }
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp);
    out << content;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw Error(ErrorKind::Io, "cannot write " + tmp);
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw Error(ErrorKind::Io, "cannot rename onto " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

void write_point_data(std::ostringstream& os, std::size_t n, const std::vector<NamedField>& fields) {
  if (fields.empty()) return;
  os << "POINT_DATA " << n << "\n";
  for (const auto& [name, values] : fields) {
    if (values.size() != n) throw Error(ErrorKind::MeshMismatch, "field " + name + " has the wrong length");
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) os << format_double(v) << "\n";
  }
}

}  // namespace

std::string vtk_mesh(const TriMesh& mesh, const std::vector<NamedField>& point_fields) {
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\ninsulation mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.node_count() << " double\n";
  for (const auto& p : mesh.nodes) os << format_double(p.x) << " " << format_double(p.y) << " 0\n";
  const auto nt = mesh.triangles.size();
  os << "CELLS " << nt << " " << 4 * nt << "\n";
  for (const auto& t : mesh.triangles) os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "CELL_TYPES " << nt << "\n";
  for (std::size_t i = 0; i < nt; ++i) os << "5\n";
  os << "CELL_DATA " << nt << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (Region r : mesh.regions) os << (r == Region::Bulk ? 0 : 1) << "\n";
  write_point_data(os, mesh.nodes.size(), point_fields);
  return os.str();
}

std::string vtk_polyline(const std::vector<Vec2>& points, const std::vector<std::pair<int, int>>& segments,
                         const std::vector<NamedField>& point_fields) {
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\ninsulation boundary\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << points.size() << " double\n";
  for (const auto& p : points) os << format_double(p.x) << " " << format_double(p.y) << " 0\n";
  os << "CELLS " << segments.size() << " " << 3 * segments.size() << "\n";
  for (const auto& [a, b] : segments) os << "2 " << a << " " << b << "\n";
  os << "CELL_TYPES " << segments.size() << "\n";
  for (std::size_t i = 0; i < segments.size(); ++i) os << "3\n";
  write_point_data(os, points.size(), point_fields);
  return os.str();
}

std::string CsvTable::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

std::size_t NumericCsv::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorKind::SchemaError, "csv: missing column '" + name + "'");
}

NumericCsv parse_numeric_csv(const std::string& text, const std::string& origin) {
  NumericCsv csv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return cells;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    if (csv.header.empty()) {
      csv.header = std::move(cells);
      continue;
    }
    if (cells.size() != csv.header.size()) {
      throw Error(ErrorKind::SchemaError, origin + ":" + std::to_string(line_no) + ": expected " +
                                              std::to_string(csv.header.size()) + " columns");
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size()) {
        throw Error(ErrorKind::SchemaError, origin + ":" + std::to_string(line_no) + ": not a number '" + c + "'");
      }
      row.push_back(v);
    }
    csv.rows.push_back(std::move(row));
  }
  if (csv.header.empty()) throw Error(ErrorKind::SchemaError, origin + ": empty csv");
  return csv;
}

}  // namespace insulation
