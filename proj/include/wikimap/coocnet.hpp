#pragma once

// From article-category incidence to the weighted category co-occurrence
// network: two categories are linked when at least one article carries
// both, the raw weight counts such articles, and the cosine weight
// normalizes by category sizes: cos = raw / sqrt(n_i * n_j).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "wikimap/corpus_store.hpp"
#include "wikimap/histogram.hpp"

namespace wikimap {

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyNetwork : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using CatId = std::uint32_t;

// Sparse binary article x category membership. Rows are Main-namespace
// pages with at least one deduplicated assignment; columns get dense ids
// in lexicographic title order, so ids are reproducible.
struct IncidenceMatrix {
    std::vector<std::string> category_titles;          // CatId -> title
    std::vector<std::uint32_t> category_members;       // CatId -> n_i
    std::vector<std::int64_t> article_ids;             // row -> page_id
    std::vector<std::vector<CatId>> article_categories; // row -> sorted CatIds

    std::size_t category_count() const { return category_titles.size(); }
    std::size_t article_count() const { return article_ids.size(); }
};

struct CoocEdge {
    CatId cat_i = 0;  // canonical order: cat_i < cat_j
    CatId cat_j = 0;
    std::uint64_t raw = 0;
    double cos = 0.0;

    friend bool operator==(const CoocEdge& a, const CoocEdge& b) {
        return a.cat_i == b.cat_i && a.cat_j == b.cat_j && a.raw == b.raw && a.cos == b.cos;
    }
};

struct CoocNode {
    std::string title;
    std::uint32_t members = 0;  // n_i
    std::optional<Timestamp> last_edit;    // of the category page, when present
    std::optional<AuthorRef> last_editor;
    bool isolated = false;
};

struct CoocNetwork {
    std::vector<CoocNode> nodes;  // indexed by CatId
    std::vector<CoocEdge> edges;  // sorted by (cat_i, cat_j)

    std::size_t nodes_with_edges() const {
        std::size_t n = 0;
        for (const CoocNode& node : nodes)
            if (!node.isolated) ++n;
        return n;
    }
};

inline double cosine_weight(std::uint64_t raw, std::uint64_t n_i, std::uint64_t n_j) {
    if (raw == 0 || n_i == 0 || n_j == 0)
        throw DomainError("cosine_weight: zero count");
    if (raw > n_i || raw > n_j)
        throw DomainError("cosine_weight: raw exceeds a member count");
    // The product is formed in integer arithmetic so the result is exactly
    // symmetric in (i, j).
    return static_cast<double>(raw) /
           std::sqrt(static_cast<double>(n_i * n_j));
}

inline IncidenceMatrix build_incidence(const CorpusSnapshot& s) {
    std::unordered_map<std::int64_t, const PageRecord*> by_id;
    by_id.reserve(s.pages.size());
    for (const PageRecord& p : s.pages) by_id.emplace(p.page_id, &p);

    // page_id -> distinct category titles, articles only
    std::map<std::int64_t, std::set<std::string>> rows;
    std::set<std::string> titles;
    for (const CategoryAssignment& a : s.assignments) {
        auto it = by_id.find(a.member_page_id);
        if (it == by_id.end() || !it->second->ns.is_main()) continue;
        if (rows[a.member_page_id].insert(a.category_title).second)
            titles.insert(a.category_title);
    }

    IncidenceMatrix m;
    m.category_titles.assign(titles.begin(), titles.end());
    std::unordered_map<std::string, CatId> id_of;
    id_of.reserve(m.category_titles.size());
    for (CatId i = 0; i < m.category_titles.size(); ++i) id_of.emplace(m.category_titles[i], i);
    m.category_members.assign(m.category_titles.size(), 0);

    m.article_ids.reserve(rows.size());
    m.article_categories.reserve(rows.size());
    for (const auto& [page_id, cats] : rows) {
        std::vector<CatId> ids;
        ids.reserve(cats.size());
        for (const std::string& t : cats) {
            CatId id = id_of.at(t);
            ids.push_back(id);
            ++m.category_members[id];
        }
        std::sort(ids.begin(), ids.end());
        m.article_ids.push_back(page_id);
        m.article_categories.push_back(std::move(ids));
    }
    return m;
}

enum class RawFormula {
    Intersection,  // articles carrying both categories
    Sum            // n_i + n_j, the degenerate literal variant, for comparison
};

inline CoocNetwork project_cooccurrence(const IncidenceMatrix& m,
                                        const CorpusSnapshot* page_metadata = nullptr,
                                        RawFormula formula = RawFormula::Intersection) {
    std::unordered_map<std::uint64_t, std::uint64_t> pair_counts;
    for (const std::vector<CatId>& cats : m.article_categories) {
        for (std::size_t a = 0; a < cats.size(); ++a) {
            for (std::size_t b = a + 1; b < cats.size(); ++b) {
                const std::uint64_t key =
                    (static_cast<std::uint64_t>(cats[a]) << 32) | cats[b];
                ++pair_counts[key];
            }
        }
    }

    CoocNetwork net;
    net.edges.reserve(pair_counts.size());
    for (const auto& [key, count] : pair_counts) {
        CoocEdge e;
        e.cat_i = static_cast<CatId>(key >> 32);
        e.cat_j = static_cast<CatId>(key & 0xffffffffu);
        const std::uint64_t n_i = m.category_members[e.cat_i];
        const std::uint64_t n_j = m.category_members[e.cat_j];
        if (formula == RawFormula::Intersection) {
            e.raw = count;
            e.cos = cosine_weight(e.raw, n_i, n_j);
        } else {
            e.raw = n_i + n_j;
            e.cos = static_cast<double>(e.raw) / std::sqrt(static_cast<double>(n_i * n_j));
        }
        net.edges.push_back(e);
    }
    std::sort(net.edges.begin(), net.edges.end(), [](const CoocEdge& a, const CoocEdge& b) {
        if (a.cat_i != b.cat_i) return a.cat_i < b.cat_i;
        return a.cat_j < b.cat_j;
    });

    net.nodes.resize(m.category_count());
    for (CatId i = 0; i < m.category_count(); ++i) {
        net.nodes[i].title = m.category_titles[i];
        net.nodes[i].members = m.category_members[i];
        net.nodes[i].isolated = true;
    }
    for (const CoocEdge& e : net.edges) {
        net.nodes[e.cat_i].isolated = false;
        net.nodes[e.cat_j].isolated = false;
    }

    if (page_metadata != nullptr) {
        std::unordered_map<std::string, const PageRecord*> category_pages;
        for (const PageRecord& p : page_metadata->pages) {
            if (p.ns.is_category()) category_pages.emplace(p.title, &p);
        }
        for (CoocNode& node : net.nodes) {
            auto it = category_pages.find(node.title);
            if (it != category_pages.end()) {
                node.last_edit = it->second->last_edit;
                node.last_editor = it->second->last_editor;
            }
        }
    }
    return net;
}

inline Histogram weight_histogram(const CoocNetwork& net) {
    if (net.edges.empty()) throw EmptyNetwork("weight_histogram: no edges");
    std::map<std::int64_t, std::uint64_t> counts;
    for (const CoocEdge& e : net.edges) ++counts[static_cast<std::int64_t>(e.raw)];
    return Histogram::from_counts(counts);
}

enum class CutKey { Cosine, Raw };

// Keeps the ceil((1-f)*E) heaviest edges. Boundary ties resolve by
// (raw desc, cat_i asc, cat_j asc) under the cosine key, which is a total
// order because (cat_i, cat_j) is unique per edge.
inline CoocNetwork edge_cut(const CoocNetwork& net, double cut_fraction,
                            CutKey key = CutKey::Cosine) {
    if (net.edges.empty()) throw EmptyNetwork("edge_cut: no edges");
    if (!(cut_fraction >= 0.0 && cut_fraction < 1.0))
        throw DomainError("edge_cut: cut_fraction outside [0,1)");

    const std::size_t total = net.edges.size();
    const long double retained_ld =
        (1.0L - static_cast<long double>(cut_fraction)) * static_cast<long double>(total);
    // 1e-9 absorbs representation error without disturbing genuine fractions.
    std::size_t keep = static_cast<std::size_t>(std::ceil(retained_ld - 1e-9L));
    if (keep < 1) keep = 1;
    if (keep > total) keep = total;

    CoocNetwork out;
    out.nodes = net.nodes;
    out.edges = net.edges;
    auto better = [key](const CoocEdge& a, const CoocEdge& b) {
        if (key == CutKey::Cosine) {
            if (a.cos != b.cos) return a.cos > b.cos;
            if (a.raw != b.raw) return a.raw > b.raw;
        } else {
            if (a.raw != b.raw) return a.raw > b.raw;
            if (a.cos != b.cos) return a.cos > b.cos;
        }
        if (a.cat_i != b.cat_i) return a.cat_i < b.cat_i;
        return a.cat_j < b.cat_j;
    };
    std::sort(out.edges.begin(), out.edges.end(), better);
    out.edges.resize(keep);
    std::sort(out.edges.begin(), out.edges.end(), [](const CoocEdge& a, const CoocEdge& b) {
        if (a.cat_i != b.cat_i) return a.cat_i < b.cat_i;
        return a.cat_j < b.cat_j;
    });

    for (CoocNode& node : out.nodes) node.isolated = true;
    for (const CoocEdge& e : out.edges) {
        out.nodes[e.cat_i].isolated = false;
        out.nodes[e.cat_j].isolated = false;
    }
    return out;
}

inline std::string nodes_to_tsv(const CoocNetwork& net) {
    std::string out = "id\ttitle\tmembers\tlast_edit\tlast_editor\n";
    for (CatId i = 0; i < net.nodes.size(); ++i) {
        const CoocNode& n = net.nodes[i];
        out += std::to_string(i) + "\t" + storedetail::escape_field(n.title) + "\t" +
               std::to_string(n.members) + "\t";
        if (n.last_edit.has_value()) out += format_iso8601(*n.last_edit);
        out += "\t";
        if (n.last_editor.has_value()) out += storedetail::escape_field(n.last_editor->key());
        out += "\n";
    }
    return out;
}

inline std::string edges_to_tsv(const CoocNetwork& net) {
    std::string out = "cat_i\tcat_j\traw\tcos\n";
    char buf[40];
    for (const CoocEdge& e : net.edges) {
        std::snprintf(buf, sizeof(buf), "%.15g", e.cos);
        out += std::to_string(e.cat_i) + "\t" + std::to_string(e.cat_j) + "\t" +
               std::to_string(e.raw) + "\t" + buf + "\n";
    }
    return out;
}

}  // namespace wikimap
