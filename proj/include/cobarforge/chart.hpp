#pragma once

#include "cobarforge/may.hpp"

#include <string>

namespace cobarforge::chart {

// Byte-stable JSON for a chart; key order is fixed.
std::string chart_json(const may::Chart& c);
// SVG rendered from the JSON content only.
std::string chart_svg(const std::string& json_text);

std::string ext_chart_json(const std::vector<cobar::ExtCell>& cells, long long max_s,
                           long long max_t, const std::string& conventions);

}  // namespace cobarforge::chart
