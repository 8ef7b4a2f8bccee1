#pragma once

// SVG 1.1 rendering of a laid-out, colored network. One circle per node in
// node-id order, then labels for the label set, so output bytes are a pure
// function of the inputs.

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "wikimap/coocnet.hpp"
#include "wikimap/layout.hpp"
#include "wikimap/overlay.hpp"

namespace wikimap {

struct CanvasTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace svgdetail {

inline std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace svgdetail

// Points are expected in [0,1]^2 with node indices matching the network.
inline std::string render_svg(const CoocNetwork& net, const std::vector<LayoutPoint>& points,
                              const ColorAssignment& colors, const OverlaySpec& spec,
                              int width, int height) {
    if (width < 64 || height < 64)
        throw CanvasTooSmall("canvas must be at least 64x64, got " + std::to_string(width) + "x" +
                             std::to_string(height));
    if (colors.size() != net.nodes.size())
        throw std::invalid_argument("render_svg: one color per node required");

    std::vector<const LayoutPoint*> by_node(net.nodes.size(), nullptr);
    for (const LayoutPoint& p : points) {
        if (p.node < by_node.size()) by_node[p.node] = &p;
    }

    using svgdetail::fmt;
    using svgdetail::xml_escape;
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(width) + "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) + "\">\n";
    out += "<rect width=\"" + std::to_string(width) + "\" height=\"" + std::to_string(height) +
           "\" fill=\"#ffffff\"/>\n";

    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const LayoutPoint* p = by_node[i];
        if (p == nullptr) continue;
        const bool labeled = spec.label_set.count(net.nodes[i].title) > 0;
        out += "<circle cx=\"" + fmt(p->x * width) + "\" cy=\"" + fmt(p->y * height) +
               "\" r=\"" + (labeled ? std::string("4") : std::string("1")) + "\" fill=\"" +
               colors[i].hex() + "\"/>\n";
    }
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const LayoutPoint* p = by_node[i];
        if (p == nullptr || spec.label_set.count(net.nodes[i].title) == 0) continue;
        out += "<text x=\"" + fmt(p->x * width + 6) + "\" y=\"" + fmt(p->y * height + 4) +
               "\" font-size=\"14\" font-family=\"sans-serif\">" +
               xml_escape(net.nodes[i].title) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace wikimap
