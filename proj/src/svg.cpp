#include "hybridqc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hybridqc/error.hpp"
#include "hybridqc/table.hpp"

namespace hqc {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 20, kBottom = 50;

std::string fmt(const char* f, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const Chart& chart) {
  if (chart.x.empty() || chart.lines.empty()) {
    throw Error(ErrorCode::invalid_argument, "render_svg: empty series");
  }
  double x0 = chart.x.front(), x1 = chart.x.front();
  double y0 = 0.0, y1 = 0.0;
  bool first = true;
  for (double v : chart.x) {
    x0 = std::min(x0, v);
    x1 = std::max(x1, v);
  }
  for (const auto& line : chart.lines) {
    if (line.y.size() != chart.x.size()) {
      throw Error(ErrorCode::invalid_argument, "render_svg: line '" + line.label + "' has a different length");
    }
    for (double v : line.y) {
      if (!std::isfinite(v)) throw Error(ErrorCode::numerical, "render_svg: non-finite value in '" + line.label + "'");
      y0 = first ? v : std::min(y0, v);
      y1 = first ? v : std::max(y1, v);
      first = false;
    }
  }
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - (v - y0) / (y1 - y0)) * ph; };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  s += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  s += "<g stroke=\"black\" stroke-width=\"1\">\n";
  s += "<line x1=\"" + fmt("%.2f", kLeft) + "\" y1=\"" + fmt("%.2f", kTop + ph) + "\" x2=\"" + fmt("%.2f", kLeft + pw) +
       "\" y2=\"" + fmt("%.2f", kTop + ph) + "\"/>\n";
  s += "<line x1=\"" + fmt("%.2f", kLeft) + "\" y1=\"" + fmt("%.2f", kTop) + "\" x2=\"" + fmt("%.2f", kLeft) +
       "\" y2=\"" + fmt("%.2f", kTop + ph) + "\"/>\n";
  s += "</g>\n";
  s += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    s += "<text x=\"" + fmt("%.2f", px(xv)) + "\" y=\"" + fmt("%.2f", kTop + ph + 16) + "\" text-anchor=\"middle\">" +
         fmt("%.4g", xv) + "</text>\n";
    s += "<text x=\"" + fmt("%.2f", kLeft - 6) + "\" y=\"" + fmt("%.2f", py(yv) + 4) + "\" text-anchor=\"end\">" +
         fmt("%.4g", yv) + "</text>\n";
  }
  s += "<text x=\"" + fmt("%.2f", kLeft + pw / 2) + "\" y=\"" + fmt("%.2f", kHeight - 10) +
       "\" text-anchor=\"middle\">" + escape(chart.x_label) + "</text>\n";
  s += "<text x=\"16\" y=\"" + fmt("%.2f", kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       fmt("%.2f", kTop + ph / 2) + ")\">" + escape(chart.y_label) + "</text>\n";
  for (std::size_t l = 0; l < chart.lines.size(); ++l) {
    s += "<text x=\"" + fmt("%.2f", kLeft + pw - 4) + "\" y=\"" + fmt("%.2f", kTop + 14 + 14.0 * l) +
         "\" text-anchor=\"end\">" + escape(chart.lines[l].label) + (chart.lines[l].dashed ? " (dashed)" : "") +
         "</text>\n";
  }
  s += "</g>\n";
  for (const auto& line : chart.lines) {
    s += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"";
    if (line.dashed) s += " stroke-dasharray=\"6 4\"";
    s += " points=\"";
    for (std::size_t i = 0; i < chart.x.size(); ++i) {
      if (i) s += ' ';
      s += fmt("%.2f", px(chart.x[i])) + "," + fmt("%.2f", py(line.y[i]));
    }
    s += "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

void emit_figures(const Chart& chart, const std::filesystem::path& path) { write_text(path, render_svg(chart)); }

}  // namespace hqc
