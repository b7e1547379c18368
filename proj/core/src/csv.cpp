#include "simec/csv.hpp"

#include "simec/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace simec {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw ConfigError("error while writing " + path.string());
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

void write_trace_csv(std::ostream& os, const Polygonal& poly) {
  const Eigen::Index d = poly.points.empty() ? 0 : poly.points.front().size();
  const Eigen::Index d_out = poly.outputs.empty() ? 0 : poly.outputs.front().size();
  os << "step";
  for (Eigen::Index i = 0; i < d; ++i) os << ",x_" << i;
  if (d_out <= 1) {
    os << ",output";
  } else {
    for (Eigen::Index i = 0; i < d_out; ++i) os << ",output_" << i;
  }
  os << ",seg_energy,cum_energy,plen_bound,projected_flag\n";

  double cum = 0.0;
  double plen = 0.0;
  for (std::size_t k = 0; k < poly.points.size(); ++k) {
    double seg = 0.0;
    if (k > 0 && k - 1 < poly.segment_energies.size()) {
      seg = poly.segment_energies[k - 1];
      cum += seg;
      plen += poly.segment_pseudolengths[k - 1];
    }
    os << k;
    for (Eigen::Index i = 0; i < d; ++i) os << ',' << format_real(poly.points[k][i]);
    if (d_out == 0) {
      os << ',';
    } else {
      for (Eigen::Index i = 0; i < d_out; ++i) os << ',' << format_real(poly.outputs[k][i]);
    }
    const bool projected = k < poly.projected.size() && poly.projected[k];
    os << ',' << format_real(seg) << ',' << format_real(cum) << ',' << format_real(plen) << ','
       << (projected ? 1 : 0) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const Polygonal& poly) {
  auto os = open_out(path);
  write_trace_csv(os, poly);
  finish(os, path);
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  auto os = open_out(path);
  const Eigen::Index d_in = data.inputs.rows();
  const Eigen::Index d_out = data.targets.rows();
  for (Eigen::Index i = 0; i < d_in; ++i) os << (i ? "," : "") << "in_" << i;
  for (Eigen::Index i = 0; i < d_out; ++i) os << ",target_" << i;
  os << '\n';
  for (Eigen::Index s = 0; s < data.size(); ++s) {
    for (Eigen::Index i = 0; i < d_in; ++i) os << (i ? "," : "") << format_real(data.inputs(i, s));
    for (Eigen::Index i = 0; i < d_out; ++i) os << ',' << format_real(data.targets(i, s));
    os << '\n';
  }
  finish(os, path);
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open dataset " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("dataset " + path.string() + " is empty");
  const auto header = split(line, ',');
  Eigen::Index d_in = 0;
  Eigen::Index d_out = 0;
  for (const auto& h : header) {
    if (h.rfind("in_", 0) == 0) {
      if (d_out > 0) throw ConfigError("dataset header: inputs must precede targets");
      ++d_in;
    } else if (h.rfind("target_", 0) == 0) {
      ++d_out;
    } else {
      throw ConfigError("dataset header: unexpected column '" + h + "'");
    }
  }
  if (d_in == 0 || d_out == 0) throw ConfigError("dataset needs in_* and target_* columns");

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected " +
                        std::to_string(header.size()) + " columns");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_real(c, lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("dataset " + path.string() + " has no samples");
  Dataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  data.inputs.resize(d_in, n);
  data.targets.resize(d_out, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto& r = rows[static_cast<std::size_t>(s)];
    for (Eigen::Index i = 0; i < d_in; ++i) data.inputs(i, s) = r[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i < d_out; ++i)
      data.targets(i, s) = r[static_cast<std::size_t>(d_in + i)];
  }
  return data;
}

void write_loss_csv(const std::filesystem::path& path, const std::vector<EpochLoss>& history) {
  auto os = open_out(path);
  os << "epoch,train_mse,val_mse\n";
  for (const auto& h : history) {
    os << h.epoch << ',' << format_real(h.train_mse) << ',' << format_real(h.val_mse) << '\n';
  }
  finish(os, path);
}

void write_contour_csv(const std::filesystem::path& path, const ContourSet& contour) {
  auto os = open_out(path);
  os << "step,x_0,x_1,output,polyline\n";
  std::size_t step = 0;
  for (std::size_t c = 0; c < contour.polylines.size(); ++c) {
    for (const auto& p : contour.polylines[c]) {
      os << step++ << ',' << format_real(p[0]) << ',' << format_real(p[1]) << ','
         << format_real(contour.level) << ',' << c << '\n';
    }
  }
  finish(os, path);
}

void write_points_csv(const std::filesystem::path& path, const std::vector<Vector>& points,
                      const ScalarField& f) {
  auto os = open_out(path);
  os << "step,x_0,x_1,output\n";
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    os << k << ',' << format_real(p[0]) << ',' << format_real(p[1]) << ','
       << format_real(f(p[0], p[1])) << '\n';
  }
  finish(os, path);
}

std::vector<std::filesystem::path> write_foliation(const std::filesystem::path& dir,
                                                   const FoliationResult& result) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  files.push_back(dir / "transversal.csv");
  write_trace_csv(files.back(), result.transversal);
  for (std::size_t k = 0; k < result.leaves.size(); ++k) {
    files.push_back(dir / ("leaf_" + std::to_string(k) + ".csv"));
    write_trace_csv(files.back(), result.leaves[k]);
  }
  return files;
}

void write_gnuplot_script(const std::filesystem::path& path, const std::string& title,
                          const std::vector<std::filesystem::path>& csv_files) {
  auto os = open_out(path);
  os << "set datafile separator ','\n"
     << "set key off\n"
     << "set size ratio -1\n"
     << "set title '" << title << "'\n"
     << "set xlabel 'x_0'\n"
     << "set ylabel 'x_1'\n";
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  os << "plot";
  for (std::size_t i = 0; i < csv_files.size(); ++i) {
    const auto rel = csv_files[i].lexically_proximate(base).generic_string();
    os << (i ? ", \\\n    " : " ") << "'" << rel << "' skip 1 using 2:3 with lines";
  }
  os << "\npause mouse close\n";
  finish(os, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace simec
