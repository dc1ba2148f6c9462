#include "casbridge/cas/plot.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

namespace casbridge::cas {

namespace {

constexpr double kWidth = 400, kHeight = 300, kMargin = 10;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string plot_svg(const std::function<std::optional<double>(const mpq_class&)>& f, const mpq_class& lo,
                     const mpq_class& hi, std::size_t samples) {
  if (samples < 2) samples = 2;
  std::vector<std::optional<double>> ys(samples);
  double ymin = INFINITY, ymax = -INFINITY;
  for (std::size_t i = 0; i < samples; ++i) {
    mpq_class x = lo + (hi - lo) * mpq_class(static_cast<long>(i), static_cast<long>(samples - 1));
    auto y = f(x);
    if (y && std::isfinite(*y)) {
      ys[i] = *y;
      ymin = std::min(ymin, *y);
      ymax = std::max(ymax, *y);
    }
  }
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"300\" viewBox=\"0 0 400 300\">";
  std::string pts;
  auto flush = [&] {
    if (!pts.empty()) out += "<polyline fill=\"none\" stroke=\"black\" points=\"" + pts + "\"/>";
    pts.clear();
  };
  double span = ymax - ymin;
  for (std::size_t i = 0; i < samples; ++i) {
    if (!ys[i]) {
      flush();
      continue;
    }
    double px = kMargin + (kWidth - 2 * kMargin) * static_cast<double>(i) / static_cast<double>(samples - 1);
    double t = span > 0 ? (*ys[i] - ymin) / span : 0.5;
    double py = kHeight - kMargin - (kHeight - 2 * kMargin) * t;
    if (!pts.empty()) pts += ' ';
    pts += fmt(px) + "," + fmt(py);
  }
  flush();
  return out + "</svg>";
}

}  // namespace casbridge::cas
