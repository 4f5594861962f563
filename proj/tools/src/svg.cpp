#include "medmarg_cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#ifndef MEDMARG_CLI_VERSION
#define MEDMARG_CLI_VERSION "unknown"
#endif

namespace medmarg::cli {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 15.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 150.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// "--" may not appear inside an XML comment.
std::string comment_safe(std::string s) {
    for (std::size_t pos = s.find("--"); pos != std::string::npos; pos = s.find("--", pos)) s.replace(pos, 2, "- -");
    return s;
}

void render_panel(std::ostringstream& os, const Panel& panel, double x0, double width) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : panel.series) {
        for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
            if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
            xmin = std::min(xmin, s.xs[i]);
            xmax = std::max(xmax, s.xs[i]);
            ymin = std::min(ymin, s.ys[i]);
            ymax = std::max(ymax, s.ys[i]);
        }
    }
    if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    if (ymin >= 0.0 && ymax <= 1.0) {
        ymin = 0.0;
        ymax = 1.0;
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;

    const double left = x0 + kLeft;
    const double right = x0 + width - kRight;
    const double top = kTop;
    const double bottom = kHeight - kBottom;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
    auto py = [&](double y) { return bottom - (y - ymin) / (ymax - ymin) * (bottom - top); };

    os << "<g>\n";
    os << "<text x=\"" << fixed(0.5 * (left + right)) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(panel.title) << "</text>\n";
    os << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(right - left)
       << "\" height=\"" << fixed(bottom - top) << "\" fill=\"none\" stroke=\"#000\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        os << "<text x=\"" << fixed(px(xv)) << "\" y=\"" << fixed(bottom + 16) << "\" text-anchor=\"middle\" "
           << "font-size=\"11\">" << tick(xv) << "</text>\n";
        os << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(py(yv) + 4) << "\" text-anchor=\"end\" "
           << "font-size=\"11\">" << tick(yv) << "</text>\n";
    }
    os << "<text x=\"" << fixed(0.5 * (left + right)) << "\" y=\"" << fixed(bottom + 34)
       << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(panel.x_label) << "</text>\n";
    os << "<text x=\"" << fixed(x0 + 14) << "\" y=\"" << fixed(0.5 * (top + bottom))
       << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 " << fixed(x0 + 14) << ' '
       << fixed(0.5 * (top + bottom)) << ")\">" << escape(panel.y_label) << "</text>\n";

    for (std::size_t k = 0; k < panel.series.size(); ++k) {
        const auto& s = panel.series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" data-label=\""
           << escape(s.label) << "\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
            if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
            os << (first ? "" : " ") << fixed(px(s.xs[i])) << ',' << fixed(py(s.ys[i]));
            first = false;
        }
        os << "\"/>\n";
        const double ly = bottom + 54 + 16.0 * static_cast<double>(k);
        os << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\"" << fixed(left + 24)
           << "\" y2=\"" << fixed(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << fixed(left + 30) << "\" y=\"" << fixed(ly) << "\" font-size=\"11\">"
           << escape(s.label) << "</text>\n";
    }
    os << "</g>\n";
}

}  // namespace

std::string svg_version_line() { return std::string("<!-- medmarg ") + MEDMARG_CLI_VERSION + " -->"; }

Panel panel_from_tables(std::string title, std::string x_label, std::string y_label,
                        const std::vector<Table>& tables) {
    Panel panel{std::move(title), std::move(x_label), std::move(y_label), {}};
    for (const auto& t : tables) {
        const auto xs = t.numeric_column(0);
        for (std::size_t c = 1; c < t.columns.size(); ++c) panel.series.push_back({t.columns[c], xs, t.numeric_column(c)});
    }
    return panel;
}

std::string render_svg(const std::vector<Panel>& panels, const std::vector<std::string>& metadata) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
    os << svg_version_line() << '\n';
    for (const auto& line : metadata) os << "<!-- " << comment_safe(line) << " -->\n";
    os << "<rect width=\"800\" height=\"600\" fill=\"#fff\"/>\n";
    const double width = kWidth / static_cast<double>(std::max<std::size_t>(1, panels.size()));
    for (std::size_t i = 0; i < panels.size(); ++i) render_panel(os, panels[i], width * static_cast<double>(i), width);
    os << "</svg>\n";
    return os.str();
}

}  // namespace medmarg::cli
