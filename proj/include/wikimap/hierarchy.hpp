#pragma once

// Category-to-supercategory structure: built from assignments whose member
// page lives in the Category namespace. Edges run child -> parent. The
// graph is not acyclic in practice, so every traversal here is guarded.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "wikimap/corpus_store.hpp"

namespace wikimap {

struct RootMissing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class CategoryGraph {
  public:
    // Node ids are indices into titles(), assigned in lexicographic order.
    using NodeId = std::uint32_t;

    static CategoryGraph build(const CorpusSnapshot& s) {
        std::unordered_map<std::int64_t, const PageRecord*> by_id;
        by_id.reserve(s.pages.size());
        for (const PageRecord& p : s.pages) by_id.emplace(p.page_id, &p);

        std::set<std::string> titles;
        std::set<std::pair<std::string, std::string>> edges;  // child -> parent
        for (const PageRecord& p : s.pages) {
            if (p.ns.is_category()) titles.insert(p.title);
        }
        for (const CategoryAssignment& a : s.assignments) {
            titles.insert(a.category_title);
            auto it = by_id.find(a.member_page_id);
            if (it == by_id.end() || !it->second->ns.is_category()) continue;
            titles.insert(it->second->title);
            edges.emplace(it->second->title, a.category_title);
        }

        CategoryGraph g;
        g.titles_.assign(titles.begin(), titles.end());
        std::unordered_map<std::string, NodeId> id_of;
        id_of.reserve(g.titles_.size());
        for (NodeId i = 0; i < g.titles_.size(); ++i) id_of.emplace(g.titles_[i], i);
        g.parents_.resize(g.titles_.size());
        g.children_.resize(g.titles_.size());
        for (const auto& [child, parent] : edges) {
            const NodeId c = id_of.at(child);
            const NodeId p = id_of.at(parent);
            if (c == p) g.self_loops_.push_back(c);
            g.parents_[c].push_back(p);
            g.children_[p].push_back(c);
        }
        for (auto& v : g.parents_) std::sort(v.begin(), v.end());
        for (auto& v : g.children_) std::sort(v.begin(), v.end());
        g.edge_count_ = edges.size();
        return g;
    }

    std::size_t node_count() const { return titles_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    const std::vector<std::string>& titles() const { return titles_; }
    const std::vector<NodeId>& self_loops() const { return self_loops_; }
    const std::vector<NodeId>& parents_of(NodeId n) const { return parents_[n]; }
    const std::vector<NodeId>& children_of(NodeId n) const { return children_[n]; }

    std::optional<NodeId> find(const std::string& title) const {
        auto it = std::lower_bound(titles_.begin(), titles_.end(), title);
        if (it == titles_.end() || *it != title) return std::nullopt;
        return static_cast<NodeId>(it - titles_.begin());
    }

  private:
    std::vector<std::string> titles_;
    std::vector<std::vector<NodeId>> parents_;
    std::vector<std::vector<NodeId>> children_;
    std::vector<NodeId> self_loops_;
    std::size_t edge_count_ = 0;
};

inline CategoryGraph build_category_graph(const CorpusSnapshot& s) {
    return CategoryGraph::build(s);
}

// Titles of categories from which the root cannot be reached along
// child -> parent edges. A missing root disconnects everything.
inline std::set<std::string> disconnected_from_root(const CategoryGraph& g,
                                                    const std::string& root) {
    std::vector<bool> reaches(g.node_count(), false);
    auto root_id = g.find(root);
    if (root_id.has_value()) {
        std::vector<CategoryGraph::NodeId> stack{*root_id};
        reaches[*root_id] = true;
        while (!stack.empty()) {
            const auto n = stack.back();
            stack.pop_back();
            for (const auto c : g.children_of(n)) {
                if (!reaches[c]) {
                    reaches[c] = true;
                    stack.push_back(c);
                }
            }
        }
    }
    std::set<std::string> out;
    for (CategoryGraph::NodeId i = 0; i < g.node_count(); ++i) {
        if (!reaches[i]) out.insert(g.titles()[i]);
    }
    return out;
}

// Same question ignoring edge direction.
inline std::set<std::string> disconnected_from_root_undirected(const CategoryGraph& g,
                                                               const std::string& root) {
    std::vector<bool> seen(g.node_count(), false);
    auto root_id = g.find(root);
    if (root_id.has_value()) {
        std::vector<CategoryGraph::NodeId> stack{*root_id};
        seen[*root_id] = true;
        while (!stack.empty()) {
            const auto n = stack.back();
            stack.pop_back();
            for (const auto& adj : {g.children_of(n), g.parents_of(n)}) {
                for (const auto m : adj) {
                    if (!seen[m]) {
                        seen[m] = true;
                        stack.push_back(m);
                    }
                }
            }
        }
    }
    std::set<std::string> out;
    for (CategoryGraph::NodeId i = 0; i < g.node_count(); ++i) {
        if (!seen[i]) out.insert(g.titles()[i]);
    }
    return out;
}

struct DepthTree {
    std::string title;
    std::vector<DepthTree> children;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["title"] = title;
        nlohmann::json kids = nlohmann::json::array();
        for (const DepthTree& c : children) kids.push_back(c.to_json());
        j["children"] = std::move(kids);
        return j;
    }

    void to_text(std::string& out, int indent = 0) const {
        out.append(static_cast<std::size_t>(indent) * 2, ' ');
        out += title;
        out.push_back('\n');
        for (const DepthTree& c : children) c.to_text(out, indent + 1);
    }
};

namespace hierdetail {

inline DepthTree expand(const CategoryGraph& g, CategoryGraph::NodeId node, int depth,
                        std::vector<bool>& on_path) {
    DepthTree t;
    t.title = g.titles()[node];
    if (depth == 0) return t;
    on_path[node] = true;
    for (const auto child : g.children_of(node)) {
        if (on_path[child]) continue;  // cycle guard: never revisit the root path
        if (child == node) continue;
        t.children.push_back(expand(g, child, depth - 1, on_path));
    }
    on_path[node] = false;
    return t;
}

}  // namespace hierdetail

// Parent -> child expansion to the given depth. A node reachable through
// several parents appears under each of them; only nodes already on the
// current root path are not expanded again.
inline DepthTree depth_listing(const CategoryGraph& g, const std::string& root, int depth) {
    auto root_id = g.find(root);
    if (!root_id.has_value()) throw RootMissing("no category titled \"" + root + "\"");
    if (depth < 0) depth = 0;
    std::vector<bool> on_path(g.node_count(), false);
    return hierdetail::expand(g, *root_id, depth, on_path);
}

struct CycleComponent {
    std::vector<std::string> members;  // sorted ascending
    bool self_loop = false;
};

// Strongly connected components of size >= 2, plus single nodes with a
// self-loop. Iterative Tarjan; the full-scale graph is deep enough to
// overflow a recursive version.
inline std::vector<CycleComponent> find_cycles(const CategoryGraph& g) {
    const std::size_t n = g.node_count();
    constexpr std::uint32_t kUnvisited = UINT32_MAX;
    std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<CategoryGraph::NodeId> stack;
    std::uint32_t next_index = 0;

    std::set<CategoryGraph::NodeId> self_loop_nodes(g.self_loops().begin(), g.self_loops().end());
    std::vector<CycleComponent> out;

    struct Frame {
        CategoryGraph::NodeId node;
        std::size_t child = 0;
    };
    std::vector<Frame> call;
    for (CategoryGraph::NodeId start = 0; start < n; ++start) {
        if (index[start] != kUnvisited) continue;
        call.push_back({start, 0});
        index[start] = low[start] = next_index++;
        stack.push_back(start);
        on_stack[start] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            const auto& parents = g.parents_of(f.node);
            if (f.child < parents.size()) {
                const auto next = parents[f.child++];
                if (index[next] == kUnvisited) {
                    index[next] = low[next] = next_index++;
                    stack.push_back(next);
                    on_stack[next] = true;
                    call.push_back({next, 0});
                } else if (on_stack[next]) {
                    low[f.node] = std::min(low[f.node], index[next]);
                }
            } else {
                if (low[f.node] == index[f.node]) {
                    std::vector<std::string> members;
                    CategoryGraph::NodeId popped;
                    bool self_loop = false;
                    do {
                        popped = stack.back();
                        stack.pop_back();
                        on_stack[popped] = false;
                        members.push_back(g.titles()[popped]);
                        if (self_loop_nodes.count(popped) > 0) self_loop = true;
                    } while (popped != f.node);
                    if (members.size() >= 2 || self_loop) {
                        std::sort(members.begin(), members.end());
                        out.push_back({std::move(members), self_loop});
                    }
                }
                const auto done = f.node;
                call.pop_back();
                if (!call.empty()) {
                    low[call.back().node] = std::min(low[call.back().node], low[done]);
                }
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const CycleComponent& a, const CycleComponent& b) {
        return a.members.front() < b.members.front();
    });
    return out;
}

inline nlohmann::json cycles_to_json(const std::vector<CycleComponent>& cycles) {
    nlohmann::json arr = nlohmann::json::array();
    for (const CycleComponent& c : cycles) {
        nlohmann::json j;
        j["members"] = c.members;
        j["self_loop"] = c.self_loop;
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace wikimap
