#pragma once

#include "sgl/types.hpp"

#include <string>
#include <vector>

namespace sgl {

/// Minimal deterministic SVG line/scatter plots: fixed 800x600 viewport, no
/// timestamps, 6-significant-digit labels.
class SvgPlot {
public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool logx = false,
          bool logy = false);

  void add_series(const std::string& name, const std::vector<Real>& x,
                  const std::vector<Real>& y, const std::string& color, bool markers = true);
  void add_hline(Real y, const std::string& label, const std::string& color);

  std::string render() const;

private:
  struct Series {
    std::string name;
    std::vector<Real> x, y;
    std::string color;
    bool markers;
  };
  struct HLine {
    Real y;
    std::string label;
    std::string color;
  };
  std::string title_, xlabel_, ylabel_;
  bool logx_, logy_;
  std::vector<Series> series_;
  std::vector<HLine> hlines_;
};

} // namespace sgl
