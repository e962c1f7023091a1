#include "lavp/render.hpp"

#include <cstdio>
#include <string>

namespace lavp {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

std::string escape(std::string_view s) {
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

double centre_px(int index) { return (index + 0.5) * kSvgCellSize; }

} // namespace

std::string render_svg(const GridMap& map, const Scenario& scenario, std::span<const Cell> path,
                       std::string_view title) {
    const int cs = kSvgCellSize;
    const int width = map.width_y() * cs;
    const int height = map.width_x() * cs;
    const int header = title.empty() ? 0 : 20;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height + header) + "\" viewBox=\"0 " +
           std::to_string(-header) + " " + std::to_string(width) + " " +
           std::to_string(height + header) + "\">\n";
    if (!title.empty()) {
        svg += "<text x=\"4\" y=\"-6\" font-family=\"sans-serif\" font-size=\"12\">" +
               escape(title) + "</text>\n";
    }
    svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" fill=\"white\"/>\n";

    svg += "<g id=\"lattice\" stroke=\"#cccccc\" stroke-width=\"1\">\n";
    for (int col = 0; col <= map.width_y(); ++col) {
        svg += "<line x1=\"" + std::to_string(col * cs) + "\" y1=\"0\" x2=\"" +
               std::to_string(col * cs) + "\" y2=\"" + std::to_string(height) + "\"/>\n";
    }
    for (int row = 0; row <= map.width_x(); ++row) {
        svg += "<line x1=\"0\" y1=\"" + std::to_string(row * cs) + "\" x2=\"" +
               std::to_string(width) + "\" y2=\"" + std::to_string(row * cs) + "\"/>\n";
    }
    svg += "</g>\n";

    svg += "<g id=\"obstacles\" fill=\"black\">\n";
    for (Cell c : map.obstacles()) {
        svg += "<rect x=\"" + std::to_string(c.y * cs) + "\" y=\"" + std::to_string(c.x * cs) +
               "\" width=\"" + std::to_string(cs) + "\" height=\"" + std::to_string(cs) + "\"/>\n";
    }
    svg += "</g>\n";

    svg += "<g id=\"spots\" font-family=\"sans-serif\" font-size=\"8\" text-anchor=\"middle\">\n";
    for (std::size_t i = 0; i < scenario.spot_count(); ++i) {
        const Cell c = scenario.spot(i);
        svg += "<rect x=\"" + std::to_string(c.y * cs) + "\" y=\"" + std::to_string(c.x * cs) +
               "\" width=\"" + std::to_string(cs) + "\" height=\"" + std::to_string(cs) +
               "\" fill=\"#b0b0b0\"/>\n";
        svg += "<text x=\"" + num(centre_px(c.y)) + "\" y=\"" + num(centre_px(c.x) + 3.0) + "\">" +
               spot_label(i, scenario.n_users()) + "</text>\n";
    }
    svg += "</g>\n";

    if (!path.empty()) {
        svg += "<polyline id=\"route\" fill=\"none\" stroke=\"red\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (i > 0) svg += ' ';
            svg += num(centre_px(path[i].y)) + "," + num(centre_px(path[i].x));
        }
        svg += "\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace lavp
