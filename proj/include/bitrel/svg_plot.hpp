#pragma once

#include <ostream>

#include "bitrel/kde.hpp"

namespace bitrel {

struct SvgCanvas {
  int width = 640;
  int height = 400;
};

/// Line plot of a curve set: one polyline per defined curve, x ticks every
/// 0.25, and a legend of metric names.
void write_curves_svg(std::ostream& out, const CurveSet& curves, SvgCanvas canvas = {});

}  // namespace bitrel
