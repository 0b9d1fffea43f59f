#pragma once

#include <set>
#include <string>

#include "narr/cli/tables.hpp"

namespace narr::cli {

struct PlotStyle {
  int width = 800;
  int height = 360;
  int margin = 40;
};

/// Line plot of every series (each min-max scaled to the canvas), star
/// markers above the gold sentences and triangles on each series' peaks.
/// Output is a pure function of the inputs.
std::string render_svg(const StorySeries& story, const std::set<std::size_t>& gold, const PlotStyle& style = {});

}  // namespace narr::cli
