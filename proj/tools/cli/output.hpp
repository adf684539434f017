#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsvdtd/experiments.hpp"

namespace tsvdtd::cli {

/// Scientific notation with 17 significant digits: enough for exact
/// parse round-trips and well past the 12-digit floor the CSV contract asks
/// for.
std::string format_double(double v);

/// Shorter human-oriented rendering (up to 15 significant digits).
std::string format_general(double v);

/// Writes content to path through a temp file + rename, so readers never
/// observe a half-written file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct AbortInfo {
  std::string algorithm;
  int trial = 0;
  int iteration = 0;
};

/// Schema: iteration,algorithm,mse,misalignment,noise_norm_sq,alpha with one
/// header row, records grouped by algorithm in run order. A divergence abort
/// appends one trailing comment line naming the abort point.
std::string convergence_csv(const std::vector<std::pair<Algorithm, std::vector<RunRecord>>>& runs,
                            const std::optional<AbortInfo>& abort = std::nullopt);

/// Schema: rank,gap_mse.
std::string sweep_csv(const std::vector<RankSweepRecord>& records,
                      const std::optional<AbortInfo>& abort = std::nullopt);

/// Flat key=value block; `pass` becomes the status line.
std::string bound_report_text(const BoundReport& report, bool pass);

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

/// Standalone SVG line plot. log_y plots log10 of y and skips nonpositive
/// values; the x axis is linear.
std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<PlotSeries>& series,
                          bool log_y);

}  // namespace tsvdtd::cli
