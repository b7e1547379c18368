#pragma once

// Plain-text artifacts: trace, dataset, loss and contour CSVs, foliation
// directories and gnuplot scripts. Reals are written with 17 significant
// digits so that every file round-trips exactly.

#include "simec/explorer.hpp"
#include "simec/oracle.hpp"
#include "simec/trainer.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace simec {

/// "%.17g"
std::string format_real(double v);

/// step, x_0..x_{d-1}, output[_i], seg_energy, cum_energy, plen_bound, projected_flag.
/// seg_energy on row k belongs to the segment ending at vertex k (0 on the first row);
/// cum_energy and plen_bound are running sums along the file order.
void write_trace_csv(std::ostream& os, const Polygonal& poly);
void write_trace_csv(const std::filesystem::path& path, const Polygonal& poly);

/// in_0.., target_0.., one row per sample.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);
/// Reads the dataset schema back; columns are split by their header prefix.
Dataset read_dataset_csv(const std::filesystem::path& path);

void write_loss_csv(const std::filesystem::path& path, const std::vector<EpochLoss>& history);

/// step, x_0, x_1, output, polyline: the trace schema without energy columns,
/// plus the polyline index so that separate components stay apart.
void write_contour_csv(const std::filesystem::path& path, const ContourSet& contour);
/// step, x_0, x_1, output for every node of a grid preimage.
void write_points_csv(const std::filesystem::path& path, const std::vector<Vector>& points,
                      const ScalarField& f);

/// transversal.csv plus leaf_<k>.csv, k in transversal order. Returns the written files.
std::vector<std::filesystem::path> write_foliation(const std::filesystem::path& dir,
                                                   const FoliationResult& result);

/// Writes a gnuplot script plotting columns x_0, x_1 of every listed CSV.
void write_gnuplot_script(const std::filesystem::path& path, const std::string& title,
                          const std::vector<std::filesystem::path>& csv_files);

/// Whole-file read, for byte comparisons.
std::string read_file(const std::filesystem::path& path);

}  // namespace simec
