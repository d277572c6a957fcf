#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sepgap {

// 17 significant digits: doubles round-trip exactly
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// In-memory CSV assembly; rows land in the file in insertion order, so a
// caller that fills indexed slots first gets thread-count-independent bytes.
class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header) {
    for (size_t i = 0; i < header.size(); ++i) {
      if (i) body_ += ',';
      body_ += header[i];
    }
    body_ += '\n';
    columns_ = header.size();
  }

  void add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::invalid_argument("csv row width mismatch");
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ += ',';
      body_ += cells[i];
    }
    body_ += '\n';
    ++rows_;
  }

  size_t rows() const { return rows_; }
  const std::string& str() const { return body_; }

 private:
  std::string body_;
  size_t columns_ = 0;
  size_t rows_ = 0;
};

// ---------------------------------------------------------------------------
// Small self-contained SVG plots; a pure view of already-emitted data
// ---------------------------------------------------------------------------

class SvgPlot {
 public:
  SvgPlot(double xmin, double xmax, double ymin, double ymax, const std::string& title,
          const std::string& xlabel, const std::string& ylabel)
      : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax) {
    pad_axes();
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
          << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
    body_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    body_ << "<text x=\"" << width_ / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
          << title << "</text>\n";
    body_ << "<text x=\"" << width_ / 2 << "\" y=\"" << height_ - 6
          << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
    body_ << "<text x=\"14\" y=\"" << height_ / 2
          << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
          << height_ / 2 << ")\">" << ylabel << "</text>\n";
    draw_axes();
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
    body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) body_ << px(x) << ',' << py(y) << ' ';
    body_ << "\"/>\n";
  }

  void scatter(const std::vector<std::pair<double, double>>& pts, const std::string& color,
               double radius = 3.0) {
    for (const auto& [x, y] : pts)
      body_ << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"" << radius
            << "\" fill=\"" << color << "\" fill-opacity=\"0.7\"/>\n";
  }

  void hband(double y0, double y1, const std::string& color) {
    const double top = py(std::max(y0, y1)), bottom = py(std::min(y0, y1));
    body_ << "<rect x=\"" << left_ << "\" y=\"" << top << "\" width=\"" << plot_w()
          << "\" height=\"" << bottom - top << "\" fill=\"" << color
          << "\" fill-opacity=\"0.25\"/>\n";
  }

  void vline(double x, const std::string& color) {
    body_ << "<line x1=\"" << px(x) << "\" y1=\"" << top_ << "\" x2=\"" << px(x) << "\" y2=\""
          << height_ - bottom_ << "\" stroke=\"" << color
          << "\" stroke-dasharray=\"4 3\" stroke-width=\"1\"/>\n";
  }

  void hline(double y, const std::string& color) {
    body_ << "<line x1=\"" << left_ << "\" y1=\"" << py(y) << "\" x2=\"" << width_ - right_
          << "\" y2=\"" << py(y) << "\" stroke=\"" << color
          << "\" stroke-dasharray=\"4 3\" stroke-width=\"1\"/>\n";
  }

  std::string str() const { return body_.str() + "</svg>\n"; }

 private:
  void pad_axes() {
    if (xmax_ <= xmin_) xmax_ = xmin_ + 1;
    if (ymax_ <= ymin_) ymax_ = ymin_ + 1;
    const double dx = 0.05 * (xmax_ - xmin_), dy = 0.05 * (ymax_ - ymin_);
    xmin_ -= dx;
    xmax_ += dx;
    ymin_ -= dy;
    ymax_ += dy;
  }

  double plot_w() const { return width_ - left_ - right_; }
  double plot_h() const { return height_ - top_ - bottom_; }
  double px(double x) const { return left_ + (x - xmin_) / (xmax_ - xmin_) * plot_w(); }
  double py(double y) const { return top_ + (ymax_ - y) / (ymax_ - ymin_) * plot_h(); }

  void draw_axes() {
    body_ << "<rect x=\"" << left_ << "\" y=\"" << top_ << "\" width=\"" << plot_w()
          << "\" height=\"" << plot_h() << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
      const double x = xmin_ + t * (xmax_ - xmin_) / 5;
      const double y = ymin_ + t * (ymax_ - ymin_) / 5;
      body_ << "<text x=\"" << px(x) << "\" y=\"" << height_ - bottom_ + 14
            << "\" text-anchor=\"middle\" font-size=\"10\">" << short_num(x) << "</text>\n";
      body_ << "<text x=\"" << left_ - 4 << "\" y=\"" << py(y) + 3
            << "\" text-anchor=\"end\" font-size=\"10\">" << short_num(y) << "</text>\n";
    }
  }

  static std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
  }

  double xmin_, xmax_, ymin_, ymax_;
  double width_ = 640, height_ = 480;
  double left_ = 56, right_ = 16, top_ = 32, bottom_ = 40;
  std::ostringstream body_;
};

}  // namespace sepgap
