#include "cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tsvdtd::cli {

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

std::string format_general(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string convergence_csv(const std::vector<std::pair<Algorithm, std::vector<RunRecord>>>& runs,
                            const std::optional<AbortInfo>& abort) {
  std::ostringstream out;
  out << "iteration,algorithm,mse,misalignment,noise_norm_sq,alpha\n";
  for (const auto& [algorithm, records] : runs) {
    for (const RunRecord& r : records) {
      out << r.iteration << ',' << algorithm_name(algorithm) << ',' << format_double(r.mse) << ','
          << format_double(r.misalignment) << ',' << format_double(r.noise_norm_sq) << ','
          << format_double(r.step) << '\n';
    }
  }
  if (abort) {
    out << "# aborted: divergence at algorithm=" << abort->algorithm << " trial=" << abort->trial
        << " iteration=" << abort->iteration << '\n';
  }
  return out.str();
}

std::string sweep_csv(const std::vector<RankSweepRecord>& records,
                      const std::optional<AbortInfo>& abort) {
  std::ostringstream out;
  out << "rank,gap_mse\n";
  for (const RankSweepRecord& r : records) {
    out << r.rank << ',' << format_double(r.gap_mse) << '\n';
  }
  if (abort) {
    out << "# aborted: divergence at algorithm=" << abort->algorithm << " trial=" << abort->trial
        << " iteration=" << abort->iteration << '\n';
  }
  return out.str();
}

std::string bound_report_text(const BoundReport& report, bool pass) {
  std::ostringstream out;
  out << "c1 = " << format_general(report.c1) << '\n';
  out << "alpha0 = " << format_general(report.alpha0) << '\n';
  out << "trials = " << report.trials << '\n';
  out << "iters = " << report.iters << '\n';
  out << "theorem1_envelope_ratio = " << format_general(report.theorem1_envelope_ratio) << '\n';
  out << "theorem2_envelope_ratio = " << format_general(report.theorem2_envelope_ratio) << '\n';
  out << "lemma1_residual = " << format_general(report.lemma1_residual) << '\n';
  out << "lemma2_violations = " << report.lemma2_violations << '\n';
  out << "fitted_slope = " << format_general(report.fitted_slope) << '\n';
  out << "status = " << (pass ? "pass" : "fail") << '\n';
  return out.str();
}

namespace {

struct Extent {
  double lo = 0.0;
  double hi = 1.0;
};

Extent nice_extent(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = std::max(1.0, std::abs(lo)) * 0.5;
    return {lo - pad, hi + pad};
  }
  const double pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<PlotSeries>& series,
                          bool log_y) {
  const double width = 900, height = 540;
  const double left = 80, right = 880, top = 50, bottom = 480;

  // Transform data (log10 on y if requested) and find ranges.
  std::vector<std::vector<std::pair<double, double>>> transformed(series.size());
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool any = false;
  for (size_t i = 0; i < series.size(); ++i) {
    for (const auto& [x, y] : series[i].points) {
      if (log_y && !(y > 0.0)) {
        continue;
      }
      const double ty = log_y ? std::log10(y) : y;
      if (!std::isfinite(x) || !std::isfinite(ty)) {
        continue;
      }
      transformed[i].emplace_back(x, ty);
      if (!any) {
        x_min = x_max = x;
        y_min = y_max = ty;
        any = true;
      } else {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, ty);
        y_max = std::max(y_max, ty);
      }
    }
  }
  const Extent xe = nice_extent(x_min, x_max);
  const Extent ye = nice_extent(y_min, y_max);

  auto sx = [&](double x) { return left + (x - xe.lo) / (xe.hi - xe.lo) * (right - left); };
  auto sy = [&](double y) { return bottom - (y - ye.lo) / (ye.hi - ye.lo) * (bottom - top); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << (width / 2) << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"18\">"
      << title << "</text>\n";

  // Axes.
  svg << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\""
      << bottom << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
      << "\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double fx = xe.lo + (xe.hi - xe.lo) * i / 5.0;
    const double px = sx(fx);
    svg << "<line x1=\"" << num(px) << "\" y1=\"" << bottom << "\" x2=\"" << num(px) << "\" y2=\""
        << (bottom + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(px) << "\" y=\"" << (bottom + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << tick_label(fx) << "</text>\n";

    const double fy = ye.lo + (ye.hi - ye.lo) * i / 5.0;
    const double py = sy(fy);
    svg << "<line x1=\"" << (left - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << left << "\" y2=\""
        << num(py) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << (left - 9) << "\" y=\"" << num(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << (log_y ? ("1e" + tick_label(fy)) : tick_label(fy)) << "</text>\n";
  }

  svg << "<text x=\"" << ((left + right) / 2) << "\" y=\"" << (height - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << x_label
      << "</text>\n";
  svg << "<text x=\"20\" y=\"" << ((top + bottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 "
         "20 "
      << ((top + bottom) / 2) << ")\">" << y_label << (log_y ? " (log10)" : "") << "</text>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    if (!transformed[i].empty()) {
      svg << "<polyline fill=\"none\" stroke=\"" << series[i].color
          << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : transformed[i]) {
        svg << num(sx(x)) << ',' << num(sy(y)) << ' ';
      }
      svg << "\"/>\n";
    }
    const double ly = top + 18.0 * static_cast<double>(i);
    svg << "<line x1=\"" << (right - 150) << "\" y1=\"" << num(ly) << "\" x2=\"" << (right - 120)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << series[i].color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << (right - 112) << "\" y=\"" << num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"13\">" << series[i].label << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace tsvdtd::cli
