#include "sgl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace sgl {

namespace {

constexpr int kW = 800, kH = 600;
constexpr int kL = 70, kR = 20, kT = 40, kB = 50;

std::string fmt(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

} // namespace

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool logx, bool logy)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)),
      logx_(logx), logy_(logy) {}

void SvgPlot::add_series(const std::string& name, const std::vector<Real>& x,
                         const std::vector<Real>& y, const std::string& color, bool markers) {
  series_.push_back({name, x, y, color, markers});
}

void SvgPlot::add_hline(Real y, const std::string& label, const std::string& color) {
  hlines_.push_back({y, label, color});
}

std::string SvgPlot::render() const {
  Real xmin = std::numeric_limits<Real>::infinity(), xmax = -xmin;
  Real ymin = xmin, ymax = -xmin;
  auto tx = [&](Real v) { return logx_ ? std::log10(v) : v; };
  auto ty = [&](Real v) { return logy_ ? std::log10(v) : v; };
  for (const auto& s : series_)
    for (size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  for (const auto& h : hlines_) {
    ymin = std::min(ymin, ty(h.y));
    ymax = std::max(ymax, ty(h.y));
  }
  if (!(xmax > xmin)) {
    xmin -= 1;
    xmax += 1;
  }
  if (!(ymax > ymin)) {
    ymin -= 1;
    ymax += 1;
  }
  const Real xpad = (xmax - xmin) * 0.05, ypad = (ymax - ymin) * 0.08;
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](Real v) { return kL + (tx(v) - xmin) / (xmax - xmin) * (kW - kL - kR); };
  auto py = [&](Real v) { return kH - kB - (ty(v) - ymin) / (ymax - ymin) * (kH - kT - kB); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n";
  out += "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + title_ +
         "</text>\n";
  out += "<text x=\"400\" y=\"590\" text-anchor=\"middle\" font-size=\"12\">" + xlabel_ +
         "</text>\n";
  out += "<text x=\"16\" y=\"300\" text-anchor=\"middle\" font-size=\"12\" "
         "transform=\"rotate(-90 16 300)\">" +
         ylabel_ + "</text>\n";

  // Axes with 5 ticks each.
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                kL, kT, kW - kL - kR, kH - kT - kB);
  out += buf;
  for (int i = 0; i <= 4; ++i) {
    const Real xv = xmin + (xmax - xmin) * i / 4;
    const Real yv = ymin + (ymax - ymin) * i / 4;
    const Real xq = logx_ ? std::pow(10.0, xv) : xv;
    const Real yq = logy_ ? std::pow(10.0, yv) : yv;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\" font-size=\"10\">%s</text>\n",
                  kL + (kW - kL - kR) * i / 4.0, kH - kB + 16, fmt(xq).c_str());
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\" font-size=\"10\">%s</text>\n",
                  kL - 4, kH - kB - (kH - kT - kB) * i / 4.0 + 4, fmt(yq).c_str());
    out += buf;
  }

  for (const auto& h : hlines_) {
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%.2f\" x2=\"%d\" y2=\"%.2f\" stroke=\"%s\" "
                  "stroke-dasharray=\"6 3\"/>\n",
                  kL, py(h.y), kW - kR, py(h.y), h.color.c_str());
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%.2f\" font-size=\"10\" fill=\"%s\">%s</text>\n", kL + 6,
                  py(h.y) - 4, h.color.c_str(), h.label.c_str());
    out += buf;
  }

  int legend_y = kT + 14;
  for (const auto& s : series_) {
    if (s.x.size() > 1) {
      std::string pts;
      for (size_t i = 0; i < s.x.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
        pts += buf;
      }
      out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" points=\"" + pts + "\"/>\n";
    }
    if (s.markers)
      for (size_t i = 0; i < s.x.size(); ++i) {
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", px(s.x[i]),
                      py(s.y[i]), s.color.c_str());
        out += buf;
      }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%d\" font-size=\"11\" fill=\"%s\">%s</text>\n", kW - 220,
                  legend_y, s.color.c_str(), s.name.c_str());
    out += buf;
    legend_y += 14;
  }
  out += "</svg>\n";
  return out;
}

} // namespace sgl
