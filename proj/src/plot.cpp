#include "denest/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace denest {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

// Five-stop dark-blue to yellow ramp, linearly interpolated.
std::string ramp_color(double u) {
  static const double stops[5][3] = {{68, 1, 84},     {59, 82, 139},  {33, 145, 140},
                                     {94, 201, 98},   {253, 231, 37}};
  u = std::clamp(u, 0.0, 1.0) * 4.0;
  const int lo = std::min(3, static_cast<int>(u));
  const double f = u - lo;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(stops[lo][0] + f * (stops[lo + 1][0] - stops[lo][0]))),
                static_cast<int>(std::lround(stops[lo][1] + f * (stops[lo + 1][1] - stops[lo][1]))),
                static_cast<int>(std::lround(stops[lo][2] + f * (stops[lo + 1][2] - stops[lo][2]))));
  return buf;
}

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

std::string render_error_curves_svg(const std::vector<RunRecord>& records,
                                    const std::string& title) {
  if (records.empty()) throw std::invalid_argument("render_error_curves_svg: no records");
  const double width = 860, height = 460;
  const double mleft = 70, mright = 220, mtop = 50, mbottom = 50;
  const double pw = width - mleft - mright, ph = height - mtop - mbottom;

  double tmax = 0.0, emax = 0.0;
  for (const auto& rec : records) {
    for (const auto& row : rec.rows) {
      tmax = std::max(tmax, row.time);
      emax = std::max(emax, row.l2_kde);
      if (rec.mode != RunMode::kKdeOnly) emax = std::max(emax, row.l2_filter);
    }
  }
  if (tmax <= 0.0) tmax = 1.0;
  if (emax <= 0.0) emax = 1.0;
  emax *= 1.05;

  auto px = [&](double t) { return mleft + t / tmax * pw; };
  auto py = [&](double e) { return mtop + ph - e / emax * ph; };

  std::ostringstream svg;
  svg << fmt("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
             "viewBox=\"0 0 %g %g\">\n",
             width, height, width, height);
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << mleft << "\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";

  // Axes with a handful of ticks.
  svg << fmt("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", mleft,
             mtop + ph, mleft + pw, mtop + ph);
  svg << fmt("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", mleft,
             mtop, mleft, mtop + ph);
  for (int i = 0; i <= 5; ++i) {
    const double t = tmax * i / 5.0, e = emax * i / 5.0;
    svg << fmt("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#ccc\"/>\n", px(t),
               mtop, px(t), mtop + ph);
    svg << "<text x=\"" << px(t) << "\" y=\"" << mtop + ph + 18
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
        << fmt("%g", t) << "</text>\n";
    svg << "<text x=\"" << mleft - 8 << "\" y=\"" << py(e) + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
        << fmt("%.2g", e) << "</text>\n";
  }
  svg << "<text x=\"" << mleft + pw / 2 << "\" y=\"" << height - 10
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">time</text>\n";
  svg << "<text x=\"18\" y=\"" << mtop + ph / 2
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 "
      << mtop + ph / 2 << ")\">L2 error</text>\n";

  auto polyline = [&](const RunRecord& rec, bool kde, const char* color) {
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (kde ? " stroke-dasharray=\"5 3\"" : "") << " points=\"";
    for (const auto& row : rec.rows) {
      svg << fmt("%g,%g ", px(row.time), py(kde ? row.l2_kde : row.l2_filter));
    }
    svg << "\"/>\n";
  };

  double ly = mtop + 8;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    const char* color = kSeriesColors[i % (sizeof kSeriesColors / sizeof *kSeriesColors)];
    const std::string label =
        fmt("h=%g seed=%g", rec.bandwidth, static_cast<double>(rec.seed));
    if (rec.mode != RunMode::kKdeOnly) {
      polyline(rec, false, color);
      svg << fmt("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"", mleft + pw + 12,
                 ly, mleft + pw + 40, ly)
          << color << "\" stroke-width=\"1.5\"/>\n";
      svg << "<text x=\"" << mleft + pw + 46 << "\" y=\"" << ly + 4
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << to_string(rec.mode) << " "
          << label << "</text>\n";
      ly += 16;
    }
    polyline(rec, true, color);
    svg << fmt("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"", mleft + pw + 12, ly,
               mleft + pw + 40, ly)
        << color << "\" stroke-width=\"1.5\" stroke-dasharray=\"5 3\"/>\n";
    svg << "<text x=\"" << mleft + pw + 46 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">kde " << label << "</text>\n";
    ly += 20;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_heatmap_svg(const DensityField& field, const std::string& title) {
  const Grid& g = field.grid;
  const double cell = std::max(4.0, 560.0 / std::max(g.nx, g.ny));
  const double mleft = 50, mtop = 50;
  const double pw = cell * g.nx, ph = cell * g.ny;
  const double width = mleft + pw + 110, height = mtop + ph + 40;

  const double vmin = field.values.minCoeff();
  const double vmax = field.values.maxCoeff();
  const double span = (vmax > vmin) ? vmax - vmin : 1.0;

  std::ostringstream svg;
  svg << fmt("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
             "viewBox=\"0 0 %g %g\">\n",
             width, height, width, height);
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << mleft << "\" y=\"28\" font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double v = field.values[g.flat_index(i, j)];
      // Row 0 sits at the bottom of the picture.
      svg << fmt("<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"",
                 mleft + i * cell, mtop + (g.ny - 1 - j) * cell, cell + 0.5, cell + 0.5)
          << ramp_color((v - vmin) / span) << "\"/>\n";
    }
  }
  for (int s = 0; s <= 20; ++s) {
    svg << fmt("<rect x=\"%g\" y=\"%g\" width=\"18\" height=\"%g\" fill=\"", mleft + pw + 24,
               mtop + ph * (1.0 - (s + 1) / 21.0), ph / 21.0 + 0.5)
        << ramp_color(s / 20.0) << "\"/>\n";
  }
  svg << "<text x=\"" << mleft + pw + 48 << "\" y=\"" << mtop + 10
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt("%.3g", vmax) << "</text>\n";
  svg << "<text x=\"" << mleft + pw + 48 << "\" y=\"" << mtop + ph
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt("%.3g", vmin) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

RunRecord read_record_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open record: " + path);
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("empty record: " + path);
  const bool kde_only = header == "time,l2_error_kde,mass_kde";
  if (!kde_only && header != "time,l2_error_filter,l2_error_kde,mass_filter,mass_kde,trace_P") {
    throw std::runtime_error("unrecognized record header in " + path);
  }
  RunRecord rec;
  rec.mode = kde_only ? RunMode::kKdeOnly : RunMode::kFilter;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    RunRecordRow row;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    bool ok;
    if (kde_only) {
      ok = static_cast<bool>(ls >> row.time >> row.l2_kde >> row.mass_kde);
    } else {
      ok = static_cast<bool>(ls >> row.time >> row.l2_filter >> row.l2_kde >>
                             row.mass_filter >> row.mass_kde >> row.trace_cov);
    }
    if (!ok) throw std::runtime_error("malformed record row in " + path);
    rec.rows.push_back(row);
  }
  return rec;
}

}  // namespace denest
