#pragma once

// Node coloring schemes for the category map: keyword rules on titles,
// an age gradient on category-page last-edit times, and a top-authors
// palette. Every overlay assigns a color to every node.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wikimap/color.hpp"
#include "wikimap/coocnet.hpp"

namespace wikimap {

struct KeywordRule {
    std::string needle;  // case-insensitive substring, underscores match spaces
    RgbColor color;
};

struct OverlaySpec {
    std::vector<KeywordRule> keyword_rules;
    RgbColor age_old{0x00, 0x00, 0x00};
    RgbColor age_young{0x90, 0xee, 0x90};
    std::size_t top_authors_k = 10;
    std::vector<RgbColor> author_palette;
    RgbColor author_other{0xd9, 0xd9, 0xd9};
    std::set<std::string> label_set;  // drawn enlarged and labeled
    RgbColor default_color{0xb0, 0xb0, 0xb0};
};

// Ten well-separated defaults. The first five follow the conventional
// rank colors of the author map: purple, blue, light green, black, orange.
inline std::vector<RgbColor> default_palette() {
    static const char* kHex[10] = {"#9467bd", "#1f77b4", "#90ee90", "#000000", "#ff7f0e",
                                   "#d62728", "#8c564b", "#e377c2", "#17becf", "#bcbd22"};
    std::vector<RgbColor> out;
    out.reserve(10);
    for (const char* h : kHex) out.push_back(RgbColor::parse(h));
    return out;
}

using ColorAssignment = std::vector<RgbColor>;  // indexed by CatId

namespace overlaydetail {

inline std::string fold_title(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '_') c = ' ';
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace overlaydetail

// First matching rule wins; unmatched nodes keep the default color.
inline ColorAssignment keyword_overlay(const CoocNetwork& net,
                                       const std::vector<KeywordRule>& rules,
                                       RgbColor default_color) {
    if (rules.empty()) throw std::invalid_argument("keyword_overlay: empty rule list");
    std::vector<std::string> needles;
    needles.reserve(rules.size());
    for (const KeywordRule& r : rules) needles.push_back(overlaydetail::fold_title(r.needle));

    ColorAssignment colors(net.nodes.size(), default_color);
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const std::string folded = overlaydetail::fold_title(net.nodes[i].title);
        for (std::size_t r = 0; r < rules.size(); ++r) {
            if (folded.find(needles[r]) != std::string::npos) {
                colors[i] = rules[r].color;
                break;
            }
        }
    }
    return colors;
}

// Linear time gradient between the oldest and youngest category-page edit.
// Nodes without a category page keep the default color.
inline ColorAssignment age_overlay(const CoocNetwork& net, RgbColor old_color,
                                   RgbColor young_color, RgbColor default_color) {
    Timestamp lo = 0, hi = 0;
    bool any = false;
    for (const CoocNode& n : net.nodes) {
        if (!n.last_edit.has_value()) continue;
        if (!any) {
            lo = hi = *n.last_edit;
            any = true;
        } else {
            lo = std::min(lo, *n.last_edit);
            hi = std::max(hi, *n.last_edit);
        }
    }
    ColorAssignment colors(net.nodes.size(), default_color);
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const auto& ts = net.nodes[i].last_edit;
        if (!ts.has_value()) continue;
        if (hi == lo) {
            colors[i] = young_color;
        } else {
            const double t = static_cast<double>(*ts - lo) / static_cast<double>(hi - lo);
            colors[i] = RgbColor::lerp(old_color, young_color, t);
        }
    }
    return colors;
}

struct AuthorLegendEntry {
    AuthorRef author;
    RgbColor color;
    std::uint64_t nodes_edited = 0;
};

struct TopAuthorOverlay {
    ColorAssignment colors;
    std::vector<AuthorLegendEntry> legend;  // rank order
};

// Ranks authors by how many category nodes they last edited; the top k get
// palette colors in rank order, everything else the "other" color.
inline TopAuthorOverlay top_author_overlay(const CoocNetwork& net, std::size_t k,
                                           const std::vector<RgbColor>& palette,
                                           RgbColor other_color) {
    if (k < 1) throw std::invalid_argument("top_author_overlay: k must be >= 1");
    if (k > palette.size())
        throw std::invalid_argument("top_author_overlay: k exceeds palette size");

    std::map<AuthorRef, std::uint64_t> counts;
    for (const CoocNode& n : net.nodes) {
        if (n.last_editor.has_value()) ++counts[*n.last_editor];
    }
    std::vector<std::pair<AuthorRef, std::uint64_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first.key() < b.first.key();
    });
    if (ranked.size() > k) ranked.resize(k);

    TopAuthorOverlay out;
    std::map<AuthorRef, RgbColor> color_of;
    for (std::size_t rank = 0; rank < ranked.size(); ++rank) {
        color_of.emplace(ranked[rank].first, palette[rank]);
        out.legend.push_back({ranked[rank].first, palette[rank], ranked[rank].second});
    }
    out.colors.assign(net.nodes.size(), other_color);
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const auto& ed = net.nodes[i].last_editor;
        if (!ed.has_value()) continue;
        auto it = color_of.find(*ed);
        if (it != color_of.end()) out.colors[i] = it->second;
    }
    return out;
}

}  // namespace wikimap
