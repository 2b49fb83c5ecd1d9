#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "smtj/errors.hpp"
#include "smtj/tsp.hpp"

namespace smtj {

/// Parsed TSPLIB file. Only the keywords this library consumes are
/// interpreted; everything else is recorded as a warning and skipped.
struct TsplibFile {
  struct NodeCoord {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
  };
  std::string name;
  std::string type;               // TSP, ...
  std::string edge_weight_type;   // EUC_2D, GEO, ...
  std::size_t dimension = 0;
  std::vector<NodeCoord> node_coords;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

/// Splits "KEYWORD : value" / "KEYWORD: value" / "KEYWORD value".
inline bool split_keyword(const std::string& line, std::string& key,
                          std::string& value) {
  const auto colon = line.find(':');
  if (colon != std::string::npos) {
    key = trim(line.substr(0, colon));
    value = trim(line.substr(colon + 1));
  } else {
    std::istringstream is(line);
    is >> key;
    std::getline(is, value);
    value = trim(value);
  }
  for (char ch : key)
    if (!(std::isupper(static_cast<unsigned char>(ch)) || ch == '_'))
      return false;
  return !key.empty();
}

}  // namespace detail

/// Parses TSPLIB keyword format (NAME, TYPE, DIMENSION, EDGE_WEIGHT_TYPE,
/// NODE_COORD_SECTION, EOF). Tolerant of colon/whitespace variations and
/// unknown keywords; strict about the fields it needs.
inline TsplibFile parse_tsplib(const std::string& text) {
  TsplibFile f;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool saw_eof = false;
  bool in_coords = false;
  std::size_t coords_started_line = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t == "EOF") {
      saw_eof = true;
      break;
    }
    if (in_coords) {
      std::istringstream is(t);
      TsplibFile::NodeCoord nc;
      if (!(is >> nc.id >> nc.x >> nc.y))
        throw parse_error("NODE_COORD_SECTION: malformed coordinate record",
                          line_no);
      f.node_coords.push_back(nc);
      if (f.dimension > 0 && f.node_coords.size() == f.dimension)
        in_coords = false;
      continue;
    }
    std::string key, value;
    if (!detail::split_keyword(t, key, value))
      throw parse_error("expected 'KEYWORD : value' line", line_no);
    if (key == "NAME") {
      f.name = value;
    } else if (key == "TYPE") {
      f.type = value;
    } else if (key == "DIMENSION") {
      try {
        f.dimension = std::stoul(value);
      } catch (const std::exception&) {
        throw parse_error("DIMENSION: not a number", line_no);
      }
    } else if (key == "EDGE_WEIGHT_TYPE") {
      f.edge_weight_type = value;
    } else if (key == "NODE_COORD_SECTION") {
      if (f.dimension == 0)
        throw parse_error("NODE_COORD_SECTION before DIMENSION", line_no);
      in_coords = true;
      coords_started_line = line_no;
    } else if (key == "COMMENT" || key == "EDGE_WEIGHT_FORMAT" ||
               key == "DISPLAY_DATA_TYPE" || key == "NODE_COORD_TYPE") {
      // standard fields this library does not need
    } else {
      f.warnings.push_back("ignored keyword " + key + " at line " +
                           std::to_string(line_no));
    }
  }

  if (f.dimension == 0) throw parse_error("missing DIMENSION");
  if (f.node_coords.empty())
    throw parse_error("missing NODE_COORD_SECTION");
  if (f.node_coords.size() != f.dimension)
    throw parse_error("NODE_COORD_SECTION: expected " +
                          std::to_string(f.dimension) + " records, got " +
                          std::to_string(f.node_coords.size()),
                      coords_started_line);
  if (!saw_eof)
    f.warnings.push_back("file ends without EOF marker");
  for (std::size_t k = 0; k < f.node_coords.size(); ++k)
    if (f.node_coords[k].id != static_cast<int>(k) + 1)
      throw parse_error("node ids must be 1..DIMENSION in order");
  return f;
}

inline TsplibFile load_tsplib(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_tsplib(ss.str());
}

/// TSPLIB EUC_2D distance: Euclidean rounded to the nearest integer. This is
/// the convention under which the published optima (st70 = 675, ...) hold.
inline double euc2d(double x1, double y1, double x2, double y2) {
  const double dx = x1 - x2, dy = y1 - y2;
  return std::floor(std::sqrt(dx * dx + dy * dy) + 0.5);
}

/// Converts a parsed file to a solver instance. Only EUC_2D edge weights are
/// supported; GEO files parse fine but cannot be converted.
inline TspInstance to_instance(const TsplibFile& f) {
  if (f.edge_weight_type != "EUC_2D")
    throw unsupported_format("edge weight type '" + f.edge_weight_type +
                             "' is not supported (only EUC_2D)");
  TspInstance ins;
  ins.name = f.name;
  const std::size_t n = f.node_coords.size();
  ins.cities.resize(n);
  ins.dist.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    ins.cities[i] = {f.node_coords[i].x, f.node_coords[i].y};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = euc2d(ins.cities[i][0], ins.cities[i][1],
                             ins.cities[j][0], ins.cities[j][1]);
      ins.dist[i * n + j] = d;
      ins.dist[j * n + i] = d;
    }
  return ins;
}

inline TspInstance load_instance(const std::string& path) {
  return to_instance(load_tsplib(path));
}

}  // namespace smtj
