#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "liftsim/capability/path.hpp"
#include "liftsim/kinematics/segmentation.hpp"
#include "liftsim/kinematics/smoothing_spline.hpp"
#include "liftsim/vision/robust_motion.hpp"

namespace liftsim::io {

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  const auto r = std::from_chars(first, last, v);
  if (r.ec != std::errc() || r.ptr != last) throw InputError(context + ": not a number: '" + s + "'");
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

namespace detail {

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Unit suffix of a column name ("elevation_m" -> "m").
inline std::string unit_of(const std::string& column) {
  const auto p = column.rfind('_');
  return p == std::string::npos ? std::string() : column.substr(p + 1);
}

}  // namespace detail

// Reads a numeric CSV whose header must start with `required` exactly and
// may continue with the `optional` columns in order. A column carrying the
// right quantity in another unit is reported as a unit mismatch.
inline CsvTable read_csv(std::istream& in, const std::vector<std::string>& required,
                         const std::vector<std::string>& optional = {}, const std::string& what = "csv") {
  std::string line;
  if (!std::getline(in, line)) throw InputError(what + ": empty file, header required");
  CsvTable t;
  t.header = detail::split(line);
  std::vector<std::string> expected = required;
  expected.insert(expected.end(), optional.begin(), optional.end());
  if (t.header.size() < required.size() || t.header.size() > expected.size()) {
    throw InputError(what + ": unexpected header '" + line + "'");
  }
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (t.header[c] == expected[c]) continue;
    const auto stem = [](const std::string& s) { return s.substr(0, s.rfind('_')); };
    if (stem(t.header[c]) == stem(expected[c])) {
      throw InputError(what + ": column '" + t.header[c] + "' uses unit '" + detail::unit_of(t.header[c]) +
                       "', expected '" + expected[c] + "' (mixed units are refused)");
    }
    throw InputError(what + ": expected column '" + expected[c] + "', found '" + t.header[c] + "'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split(line);
    if (cells.size() != t.header.size()) {
      throw InputError(what + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " fields, expected " + std::to_string(t.header.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c, what + " line " + std::to_string(line_no)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline void write_csv(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_double(r[c]);
    out << '\n';
  }
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path + "' for reading");
  return f;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot open '" + path + "' for writing");
  return f;
}

inline bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

// frame_index,dx_pixels,dy_pixels
inline void write_displacement_csv(std::ostream& out, const std::vector<vision::DisplacementSample>& d) {
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < d.size(); ++k) rows.push_back({static_cast<double>(k), d[k].dx, d[k].dy});
  write_csv(out, {"frame_index", "dx_pixels", "dy_pixels"}, rows);
}

inline std::vector<vision::DisplacementSample> read_displacement_csv(std::istream& in) {
  const auto t = read_csv(in, {"frame_index", "dx_pixels", "dy_pixels"}, {}, "displacement csv");
  std::vector<vision::DisplacementSample> d;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    if (t.rows[k][0] != static_cast<double>(k)) {
      throw InputError("displacement csv: frame_index must run 0, 1, 2, ... without gaps");
    }
    d.push_back({t.rows[k][1], t.rows[k][2], false});
  }
  return d;
}

// t_seconds,elevation_m[,velocity_mps,accel_mps2]
inline void write_elevation_csv(std::ostream& out, const kinematics::ElevationSeries& s,
                                const kinematics::Kinematics* k = nullptr) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (k) {
      rows.push_back({s.time(i), s[i], k->velocity[i], k->acceleration[i]});
    } else {
      rows.push_back({s.time(i), s[i]});
    }
  }
  if (k) {
    write_csv(out, {"t_seconds", "elevation_m", "velocity_mps", "accel_mps2"}, rows);
  } else {
    write_csv(out, {"t_seconds", "elevation_m"}, rows);
  }
}

inline kinematics::ElevationSeries read_elevation_csv(std::istream& in) {
  const auto t = read_csv(in, {"t_seconds", "elevation_m"}, {"velocity_mps", "accel_mps2"}, "elevation csv");
  if (t.rows.size() < 3) throw InputError("elevation csv: need at least 3 samples");
  const double dt = t.rows[1][0] - t.rows[0][0];
  std::vector<double> v;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const double expect = t.rows[0][0] + static_cast<double>(k) * dt;
    if (std::abs(t.rows[k][0] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
      throw InputError("elevation csv: samples are not equidistant in time");
    }
    v.push_back(t.rows[k][1]);
  }
  return kinematics::ElevationSeries(dt, std::move(v));
}

// start_index,end_index
inline void write_segments_csv(std::ostream& out, const std::vector<kinematics::RepetitionSegment>& segs) {
  std::vector<std::vector<double>> rows;
  for (const auto& s : segs) rows.push_back({static_cast<double>(s.start_index), static_cast<double>(s.end_index)});
  write_csv(out, {"start_index", "end_index"}, rows);
}

inline std::vector<kinematics::RepetitionSegment> read_segments_csv(std::istream& in) {
  const auto t = read_csv(in, {"start_index", "end_index"}, {}, "segments csv");
  std::vector<kinematics::RepetitionSegment> out;
  for (const auto& r : t.rows) {
    if (!is_integral(r[0]) || !is_integral(r[1]) || r[0] < 0 || r[1] <= r[0]) {
      throw InputError("segments csv: indices must be integers with 0 <= start < end");
    }
    out.push_back({static_cast<std::size_t>(r[0]), static_cast<std::size_t>(r[1])});
  }
  return out;
}

// t,delta_m,v_mps,F_N,g
inline void write_path_csv(std::ostream& out, const capability::CapabilityPath& p) {
  std::vector<std::vector<double>> rows;
  for (const auto& q : p) rows.push_back({q.t, q.delta, q.velocity, q.force, q.g});
  write_csv(out, {"t", "delta_m", "v_mps", "F_N", "g"}, rows);
}

inline capability::CapabilityPath read_path_csv(std::istream& in) {
  const auto t = read_csv(in, {"t", "delta_m", "v_mps", "F_N", "g"}, {}, "path csv");
  capability::CapabilityPath p;
  for (const auto& r : t.rows) p.push_back({r[0], r[1], r[2], r[3], r[4]});
  return p;
}

}  // namespace liftsim::io
