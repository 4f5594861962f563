#pragma once

#include <string>
#include <vector>

#include "medmarg_cli/csv.hpp"

namespace medmarg::cli {

struct Series {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

// Column 0 is the abscissa; every other column becomes a series labelled by its name.
Panel panel_from_tables(std::string title, std::string x_label, std::string y_label,
                        const std::vector<Table>& tables);

// 800x600 document, panels side by side, one polyline per series.
std::string render_svg(const std::vector<Panel>& panels, const std::vector<std::string>& metadata);

// Comment line carrying the tool version; the only line allowed to differ between builds.
std::string svg_version_line();

}  // namespace medmarg::cli
