#pragma once

// Pajek .net writer and reader. Vertices are numbered 1..N in node-id
// order; coordinates carry 9 decimals, edge weights 15 significant digits,
// embedded quotes in labels are doubled.

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "wikimap/coocnet.hpp"
#include "wikimap/layout.hpp"

namespace wikimap {

struct MissingCoordinate : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PajekParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace pajekdetail {

inline std::string quote_label(std::string_view label) {
    std::string out = "\"";
    for (char c : label) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace pajekdetail

inline std::string export_pajek(const CoocNetwork& net, const std::vector<LayoutPoint>& points) {
    std::vector<const LayoutPoint*> by_node(net.nodes.size(), nullptr);
    for (const LayoutPoint& p : points) {
        if (p.node < by_node.size()) by_node[p.node] = &p;
    }
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        if (!net.nodes[i].isolated && by_node[i] == nullptr)
            throw MissingCoordinate("no coordinate for node " + std::to_string(i) + " (\"" +
                                    net.nodes[i].title + "\")");
    }

    std::string out = "*Vertices " + std::to_string(net.nodes.size()) + "\n";
    if (net.nodes.empty()) return out;

    char buf[96];
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const LayoutPoint* p = by_node[i];
        const double x = p != nullptr ? p->x : 0.5;
        const double y = p != nullptr ? p->y : 0.5;
        std::snprintf(buf, sizeof(buf), " %.9f %.9f", x, y);
        out += std::to_string(i + 1) + " " + pajekdetail::quote_label(net.nodes[i].title) + buf +
               "\n";
    }
    out += "*Edges\n";
    for (const CoocEdge& e : net.edges) {
        std::snprintf(buf, sizeof(buf), "%.15g", e.cos);
        out += std::to_string(e.cat_i + 1) + " " + std::to_string(e.cat_j + 1) + " " + buf + "\n";
    }
    return out;
}

struct PajekFile {
    CoocNetwork network;  // titles, edges with cos weights; members left 0
    std::vector<LayoutPoint> points;
};

inline PajekFile import_pajek(const std::string& text) {
    PajekFile out;
    std::size_t pos = 0;
    auto next_line = [&](std::string& line) -> bool {
        if (pos >= text.size()) return false;
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        line = text.substr(pos, nl - pos);
        pos = nl + 1;
        return true;
    };

    std::string line;
    if (!next_line(line) || line.rfind("*Vertices", 0) != 0)
        throw PajekParseError("expected *Vertices header");
    const std::size_t n = static_cast<std::size_t>(std::strtoull(line.c_str() + 9, nullptr, 10));
    out.network.nodes.resize(n);
    out.points.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        if (!next_line(line)) throw PajekParseError("truncated vertex list");
        const char* s = line.c_str();
        char* end = nullptr;
        const unsigned long id = std::strtoul(s, &end, 10);
        if (id != i + 1) throw PajekParseError("vertex ids must be 1..N in order");
        std::size_t q = line.find('"', static_cast<std::size_t>(end - s));
        if (q == std::string::npos) throw PajekParseError("vertex label missing");
        std::string label;
        std::size_t j = q + 1;
        for (; j < line.size(); ++j) {
            if (line[j] == '"') {
                if (j + 1 < line.size() && line[j + 1] == '"') {
                    label.push_back('"');
                    ++j;
                } else {
                    break;
                }
            } else {
                label.push_back(line[j]);
            }
        }
        if (j >= line.size()) throw PajekParseError("unterminated vertex label");
        const char* rest = line.c_str() + j + 1;
        char* after_x = nullptr;
        const double x = std::strtod(rest, &after_x);
        char* after_y = nullptr;
        const double y = std::strtod(after_x, &after_y);
        if (after_x == rest || after_y == after_x)
            throw PajekParseError("vertex coordinates missing");
        out.network.nodes[i].title = std::move(label);
        out.network.nodes[i].isolated = true;
        out.points.push_back({static_cast<std::uint32_t>(i), x, y});
    }

    if (!next_line(line)) return out;  // vertices only
    if (line.rfind("*Edges", 0) != 0 && line.rfind("*Arcs", 0) != 0)
        throw PajekParseError("expected *Edges section");
    while (next_line(line)) {
        if (line.empty()) continue;
        const char* s = line.c_str();
        char* end = nullptr;
        const unsigned long a = std::strtoul(s, &end, 10);
        char* end2 = nullptr;
        const unsigned long b = std::strtoul(end, &end2, 10);
        char* end3 = nullptr;
        const double w = std::strtod(end2, &end3);
        if (end == s || end2 == end || end3 == end2 || a < 1 || b < 1 || a > n || b > n)
            throw PajekParseError("bad edge line: " + line);
        CoocEdge e;
        e.cat_i = static_cast<CatId>(a - 1);
        e.cat_j = static_cast<CatId>(b - 1);
        e.cos = w;
        out.network.edges.push_back(e);
        out.network.nodes[e.cat_i].isolated = false;
        out.network.nodes[e.cat_j].isolated = false;
    }
    return out;
}

}  // namespace wikimap
