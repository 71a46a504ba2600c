#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace dfo {

// Minimal SVG chart writer: line, step and scatter series with axes and a
// legend. Data CSVs are authoritative; these renderings are a courtesy.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

  void add_line(const std::string& name, std::vector<double> xs, std::vector<double> ys) {
    series_.push_back({name, std::move(xs), std::move(ys), Kind::Line});
  }
  void add_step(const std::string& name, std::vector<double> xs, std::vector<double> ys) {
    series_.push_back({name, std::move(xs), std::move(ys), Kind::Step});
  }
  void add_scatter(const std::string& name, std::vector<double> xs, std::vector<double> ys) {
    series_.push_back({name, std::move(xs), std::move(ys), Kind::Scatter});
  }

  bool write(const std::string& path) const {
    std::ofstream os(path);
    if (!os) return false;
    render(os);
    return bool(os);
  }

 private:
  enum class Kind { Line, Step, Scatter };
  struct Series {
    std::string name;
    std::vector<double> xs, ys;
    Kind kind;
  };

  static constexpr int kW = 640, kH = 440;
  static constexpr int kL = 70, kR = 20, kT = 40, kB = 50;

  std::string title_, xlabel_, ylabel_;
  std::vector<Series> series_;

  static const char* color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
    return palette[i % 6];
  }

  void render(std::ostream& os) const {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_)
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
        xmin = std::min(xmin, s.xs[i]);
        xmax = std::max(xmax, s.xs[i]);
        ymin = std::min(ymin, s.ys[i]);
        ymax = std::max(ymax, s.ys[i]);
      }
    if (!std::isfinite(xmin)) {
      xmin = 0;
      xmax = 1;
      ymin = 0;
      ymax = 1;
    }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return kL + (x - xmin) / (xmax - xmin) * (kW - kL - kR); };
    auto py = [&](double y) { return kH - kB - (y - ymin) / (ymax - ymin) * (kH - kT - kB); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << title_ << "</text>\n";

    // axes + ticks
    os << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR << "\" y2=\""
       << kH - kB << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\"" << kH - kB
       << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
      const double xv = xmin + (xmax - xmin) * i / 5.0;
      const double yv = ymin + (ymax - ymin) * i / 5.0;
      os << "<line x1=\"" << px(xv) << "\" y1=\"" << kH - kB << "\" x2=\"" << px(xv)
         << "\" y2=\"" << kH - kB + 4 << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << px(xv) << "\" y=\"" << kH - kB + 18
         << "\" text-anchor=\"middle\" font-size=\"11\">" << trim(xv) << "</text>\n";
      os << "<line x1=\"" << kL - 4 << "\" y1=\"" << py(yv) << "\" x2=\"" << kL << "\" y2=\""
         << py(yv) << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << kL - 8 << "\" y=\"" << py(yv) + 4
         << "\" text-anchor=\"end\" font-size=\"11\">" << trim(yv) << "</text>\n";
    }
    os << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 12
       << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel_ << "</text>\n";
    os << "<text x=\"16\" y=\"" << (kT + kH - kB) / 2
       << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
       << (kT + kH - kB) / 2 << ")\">" << ylabel_ << "</text>\n";

    for (std::size_t si = 0; si < series_.size(); ++si) {
      const auto& s = series_[si];
      if (s.kind == Kind::Scatter) {
        for (std::size_t i = 0; i < s.xs.size(); ++i)
          os << "<circle cx=\"" << px(s.xs[i]) << "\" cy=\"" << py(s.ys[i])
             << "\" r=\"3\" fill=\"" << color(si) << "\"/>\n";
      } else {
        std::ostringstream pts;
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
          if (s.kind == Kind::Step && i > 0)
            pts << px(s.xs[i]) << "," << py(s.ys[i - 1]) << " ";
          pts << px(s.xs[i]) << "," << py(s.ys[i]) << " ";
        }
        os << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color(si)
           << "\" stroke-width=\"1.5\"/>\n";
      }
      os << "<rect x=\"" << kW - kR - 150 << "\" y=\"" << kT + 14 * si << "\" width=\"10\" "
         << "height=\"10\" fill=\"" << color(si) << "\"/>\n";
      os << "<text x=\"" << kW - kR - 136 << "\" y=\"" << kT + 14 * si + 9
         << "\" font-size=\"11\">" << s.name << "</text>\n";
    }
    os << "</svg>\n";
  }

  static std::string trim(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
  }
};

}  // namespace dfo
