#pragma once

#include <functional>
#include <optional>
#include <string>

#include <gmpxx.h>

namespace casbridge::cas {

/// SVG polyline of `f` sampled at `samples` evenly spaced exact points of
/// [lo, hi]. Samples where `f` yields nothing or a non-finite value split the
/// curve.
std::string plot_svg(const std::function<std::optional<double>(const mpq_class&)>& f, const mpq_class& lo,
                     const mpq_class& hi, std::size_t samples = 256);

}  // namespace casbridge::cas
