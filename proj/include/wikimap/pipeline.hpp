#pragma once

// Pipeline configuration and the map stage wiring: build incidence,
// project, cut, lay out, color, render, export. Every knob has a default
// so an empty config reproduces the reference settings, and a manifest
// records the exact parameters and counts of each run.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wikimap/coocnet.hpp"
#include "wikimap/corpus_store.hpp"
#include "wikimap/hierarchy.hpp"
#include "wikimap/layout.hpp"
#include "wikimap/overlay.hpp"
#include "wikimap/pajek.hpp"
#include "wikimap/powerlaw.hpp"
#include "wikimap/stats.hpp"
#include "wikimap/svg.hpp"

namespace wikimap {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    double cut_fraction = 0.686;
    std::int64_t xmin = 20;
    RawFormula raw_formula = RawFormula::Intersection;
    CutKey cut_key = CutKey::Cosine;
    LayoutParams layout;
    std::vector<KeywordRule> keyword_rules = {
        {"Companies", RgbColor::parse("#1f77b4")},
        {"Death", RgbColor::parse("#000000")},
        {"Film", RgbColor::parse("#d62728")},
    };
    RgbColor default_color = RgbColor::parse("#b0b0b0");
    RgbColor age_old = RgbColor::parse("#000000");
    RgbColor age_young = RgbColor::parse("#90ee90");
    std::size_t top_authors_k = 10;
    std::vector<RgbColor> author_palette = default_palette();
    RgbColor author_other = RgbColor::parse("#d9d9d9");
    std::vector<std::string> label_set = {
        "Culture",   "Fundamental", "Geography", "History",
        "Mathematics", "People",    "Portals",   "Science",
        "Society",   "Categories_By_Topic", "Topic_Lists", "Wikiportals",
    };
    int canvas_width = 1600;
    int canvas_height = 1600;
    std::string hierarchy_root = "Categories";
    int hierarchy_depth = 3;

    void validate() const {
        if (!(cut_fraction >= 0.0 && cut_fraction < 1.0))
            throw ConfigError("cut_fraction must be in [0,1)");
        if (xmin < 1) throw ConfigError("xmin must be >= 1");
        if (top_authors_k < 1 || top_authors_k > author_palette.size())
            throw ConfigError("top_authors k must be in [1, palette size]");
        if (keyword_rules.empty()) throw ConfigError("keyword rule list must not be empty");
        layout.validate();
    }
};

namespace pipedetail {

inline RgbColor color_field(const nlohmann::json& j, const char* key, RgbColor fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return RgbColor::parse(j.at(key).get<std::string>());
    } catch (const BadColor& e) {
        throw ConfigError(std::string(key) + ": " + e.what());
    }
}

}  // namespace pipedetail

inline PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    try {
        if (j.contains("cut_fraction")) c.cut_fraction = j.at("cut_fraction").get<double>();
        if (j.contains("xmin")) c.xmin = j.at("xmin").get<std::int64_t>();
        if (j.contains("raw_formula")) {
            const std::string f = j.at("raw_formula").get<std::string>();
            if (f == "intersection") c.raw_formula = RawFormula::Intersection;
            else if (f == "sum") c.raw_formula = RawFormula::Sum;
            else throw ConfigError("raw_formula must be \"intersection\" or \"sum\"");
        }
        if (j.contains("cut_key")) {
            const std::string f = j.at("cut_key").get<std::string>();
            if (f == "cos") c.cut_key = CutKey::Cosine;
            else if (f == "raw") c.cut_key = CutKey::Raw;
            else throw ConfigError("cut_key must be \"cos\" or \"raw\"");
        }
        if (j.contains("layout")) {
            const nlohmann::json& l = j.at("layout");
            if (l.contains("seed")) c.layout.seed = l.at("seed").get<std::uint64_t>();
            if (l.contains("iterations")) c.layout.iterations = l.at("iterations").get<int>();
            if (l.contains("temperature"))
                c.layout.initial_temperature = l.at("temperature").get<double>();
            if (l.contains("cooling")) c.layout.cooling = l.at("cooling").get<double>();
            if (l.contains("min_separation"))
                c.layout.min_separation = l.at("min_separation").get<double>();
        }
        if (j.contains("keyword_rules")) {
            c.keyword_rules.clear();
            for (const auto& rule : j.at("keyword_rules")) {
                if (!rule.is_array() || rule.size() != 2)
                    throw ConfigError("keyword_rules entries are [substring, color] pairs");
                c.keyword_rules.push_back(
                    {rule[0].get<std::string>(), RgbColor::parse(rule[1].get<std::string>())});
            }
        }
        c.default_color = pipedetail::color_field(j, "default_color", c.default_color);
        if (j.contains("age")) {
            c.age_old = pipedetail::color_field(j.at("age"), "old", c.age_old);
            c.age_young = pipedetail::color_field(j.at("age"), "young", c.age_young);
        }
        if (j.contains("top_authors")) {
            const nlohmann::json& t = j.at("top_authors");
            if (t.contains("k")) c.top_authors_k = t.at("k").get<std::size_t>();
            if (t.contains("palette")) {
                c.author_palette.clear();
                for (const auto& col : t.at("palette"))
                    c.author_palette.push_back(RgbColor::parse(col.get<std::string>()));
            }
            c.author_other = pipedetail::color_field(t, "other", c.author_other);
        }
        if (j.contains("labels")) {
            c.label_set.clear();
            for (const auto& l : j.at("labels")) c.label_set.push_back(l.get<std::string>());
        }
        if (j.contains("canvas")) {
            const nlohmann::json& cv = j.at("canvas");
            if (!cv.is_array() || cv.size() != 2)
                throw ConfigError("canvas must be [width, height]");
            c.canvas_width = cv[0].get<int>();
            c.canvas_height = cv[1].get<int>();
        }
        if (j.contains("hierarchy_root"))
            c.hierarchy_root = j.at("hierarchy_root").get<std::string>();
        if (j.contains("hierarchy_depth"))
            c.hierarchy_depth = j.at("hierarchy_depth").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return config_from_json(j);
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failure on " + path.string());
}

struct MapArtifacts {
    CoocNetwork full;
    CoocNetwork cut;
    std::vector<LayoutPoint> points;  // normalized
    std::optional<PowerLawFit> fit;
    nlohmann::json manifest;
};

// The whole map stage. Writes nodes/edges/layout TSVs, one SVG per
// overlay, the Pajek file, legend.json and manifest.json into out_dir.
inline MapArtifacts run_map_pipeline(const CorpusSnapshot& snapshot, const PipelineConfig& config,
                                     const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    config.validate();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    MapArtifacts art;
    const IncidenceMatrix incidence = build_incidence(snapshot);
    art.full = project_cooccurrence(incidence, &snapshot, config.raw_formula);
    if (art.full.edges.empty())
        throw EmptyNetwork("co-occurrence network has no edges");

    const Histogram weights = weight_histogram(art.full);
    try {
        art.fit = fit_power_law(weights, config.xmin);
    } catch (const InsufficientTail&) {
        art.fit = std::nullopt;
    } catch (const DegenerateSupport&) {
        art.fit = std::nullopt;
    }

    art.cut = edge_cut(art.full, config.cut_fraction, config.cut_key);

    const LayoutGraph graph = LayoutGraph::from_network(art.cut);
    art.points = normalize_coords(layout_force(graph, config.layout));

    OverlaySpec spec;
    spec.keyword_rules = config.keyword_rules;
    spec.age_old = config.age_old;
    spec.age_young = config.age_young;
    spec.top_authors_k = config.top_authors_k;
    spec.author_palette = config.author_palette;
    spec.author_other = config.author_other;
    spec.default_color = config.default_color;
    spec.label_set.insert(config.label_set.begin(), config.label_set.end());

    const ColorAssignment keyword_colors =
        keyword_overlay(art.cut, spec.keyword_rules, spec.default_color);
    const ColorAssignment age_colors =
        age_overlay(art.cut, spec.age_old, spec.age_young, spec.default_color);
    const TopAuthorOverlay author_overlay =
        top_author_overlay(art.cut, spec.top_authors_k, spec.author_palette, spec.author_other);

    write_text_file(out_dir / "nodes.tsv", nodes_to_tsv(art.full));
    write_text_file(out_dir / "edges.tsv", edges_to_tsv(art.full));
    write_text_file(out_dir / "edges_cut.tsv", edges_to_tsv(art.cut));
    write_text_file(out_dir / "layout.tsv", layout_to_tsv(art.points));
    write_text_file(out_dir / "weight_histogram.tsv", weights.to_tsv());
    write_text_file(out_dir / "map_keyword.svg",
                    render_svg(art.cut, art.points, keyword_colors, spec, config.canvas_width,
                               config.canvas_height));
    write_text_file(out_dir / "map_age.svg",
                    render_svg(art.cut, art.points, age_colors, spec, config.canvas_width,
                               config.canvas_height));
    write_text_file(out_dir / "map_authors.svg",
                    render_svg(art.cut, art.points, author_overlay.colors, spec,
                               config.canvas_width, config.canvas_height));
    write_text_file(out_dir / "map.net", export_pajek(art.cut, art.points));

    nlohmann::json legend;
    legend["keyword"] = nlohmann::json::object();
    for (const KeywordRule& r : config.keyword_rules)
        legend["keyword"][r.needle] = r.color.hex();
    legend["age"] = {{"old", config.age_old.hex()}, {"young", config.age_young.hex()}};
    legend["authors"] = nlohmann::json::object();
    for (const AuthorLegendEntry& e : author_overlay.legend)
        legend["authors"][e.author.display()] = e.color.hex();
    legend["default"] = config.default_color.hex();
    legend["author_other"] = config.author_other.hex();
    write_text_file(out_dir / "legend.json", legend.dump(2) + "\n");

    nlohmann::json manifest;
    manifest["parameters"] = {
        {"cut_fraction", config.cut_fraction},
        {"xmin", config.xmin},
        {"raw_formula", config.raw_formula == RawFormula::Intersection ? "intersection" : "sum"},
        {"cut_key", config.cut_key == CutKey::Cosine ? "cos" : "raw"},
        {"seed", config.layout.seed},
        {"iterations", config.layout.iterations},
        {"cooling", config.layout.cooling},
        {"min_separation", config.layout.min_separation},
        {"top_authors_k", config.top_authors_k},
        {"canvas", {config.canvas_width, config.canvas_height}},
    };
    std::uint64_t max_raw = 0;
    for (const CoocEdge& e : art.full.edges) max_raw = std::max(max_raw, e.raw);
    manifest["counts"] = {
        {"articles_with_categories", incidence.article_count()},
        {"category_columns", incidence.category_count()},
        {"nodes_total", art.full.nodes.size()},
        {"nodes_with_edges", art.full.nodes_with_edges()},
        {"edges_total", art.full.edges.size()},
        {"edges_retained", art.cut.edges.size()},
        {"nodes_isolated_after_cut", art.cut.nodes.size() - art.cut.nodes_with_edges()},
        {"max_raw_weight", max_raw},
    };
    if (art.fit.has_value()) {
        manifest["power_law"] = {
            {"gamma", art.fit->gamma},
            {"xmin", art.fit->xmin},
            {"n_tail", art.fit->n_tail},
            {"stderr", art.fit->stderr_est},
            {"stderr_approximate", art.fit->stderr_approximate},
        };
    } else {
        manifest["power_law"] = nullptr;
    }
    write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    art.manifest = std::move(manifest);
    return art;
}

// Stats stage outputs: stats.json, the two histograms, and the timeline.
inline nlohmann::json write_stats_outputs(const CorpusSnapshot& snapshot,
                                          const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    const StatsReport report = corpus_counts(snapshot);
    nlohmann::json j = report.to_json();

    nlohmann::json top = nlohmann::json::array();
    for (const auto& [title, members] : top_categories(snapshot, 20))
        top.push_back({{"category", title}, {"members", members}});
    j["top_categories"] = std::move(top);

    nlohmann::json active = nlohmann::json::array();
    for (const auto& [author, pages] : author_activity(snapshot, 10, NsFilter::All))
        active.push_back({{"author", author.key()}, {"pages", pages}});
    j["top_authors"] = std::move(active);

    write_text_file(out_dir / "stats.json", j.dump(2) + "\n");
    write_text_file(out_dir / "hist_categories_per_article.tsv",
                    categories_per_article_hist(snapshot).to_tsv());
    write_text_file(out_dir / "hist_articles_per_category.tsv",
                    articles_per_category_hist(snapshot).to_tsv());
    write_text_file(out_dir / "timeline.tsv", timeline_to_tsv(timeline(snapshot)));
    return j;
}

// Hierarchy stage outputs: depth listing (text + JSON), cycles, and both
// disconnection variants.
inline nlohmann::json write_hierarchy_outputs(const CorpusSnapshot& snapshot,
                                              const std::string& root, int depth,
                                              const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    const CategoryGraph graph = build_category_graph(snapshot);
    const std::set<std::string> disconnected = disconnected_from_root(graph, root);
    const std::set<std::string> disconnected_undirected =
        disconnected_from_root_undirected(graph, root);
    const std::vector<CycleComponent> cycles = find_cycles(graph);

    nlohmann::json summary;
    summary["root"] = root;
    summary["depth"] = depth;
    summary["nodes"] = graph.node_count();
    summary["edges"] = graph.edge_count();
    summary["disconnected_directed"] = disconnected.size();
    summary["disconnected_undirected"] = disconnected_undirected.size();
    summary["cycle_components"] = cycles.size();

    nlohmann::json disc;
    disc["directed"] = disconnected;
    disc["undirected"] = disconnected_undirected;
    write_text_file(out_dir / "disconnected.json", disc.dump(2) + "\n");
    write_text_file(out_dir / "cycles.json", cycles_to_json(cycles).dump(2) + "\n");

    if (graph.find(root).has_value()) {
        const DepthTree tree = depth_listing(graph, root, depth);
        std::string text;
        tree.to_text(text);
        write_text_file(out_dir / "listing.txt", text);
        write_text_file(out_dir / "listing.json", tree.to_json().dump(2) + "\n");
        summary["root_present"] = true;
    } else {
        summary["root_present"] = false;
    }
    return summary;
}

}  // namespace wikimap
