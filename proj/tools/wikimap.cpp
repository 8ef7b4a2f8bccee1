// wikimap: build category co-occurrence maps from MediaWiki database dumps.
//
//   wikimap ingest <pages.xml[.gz|.bz2]> <categorylinks.sql[.gz|.bz2]> <snapshot-dir>
//   wikimap stats <snapshot-dir> [--format json|table] [--out DIR]
//   wikimap map <snapshot-dir> [--config FILE] [--out DIR] [--seed N] ...
//   wikimap hierarchy <snapshot-dir> [--root TITLE] [--depth N] [--out DIR]
//
// Exit codes: 0 ok, 2 parse abort, 3 io failure, 4 missing/corrupt
// snapshot, 5 empty network after projection/cut.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <CLI11.hpp>

#include "wikimap/compress.hpp"
#include "wikimap/pipeline.hpp"
#include "wikimap/sql_dump.hpp"
#include "wikimap/xml_dump.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitIo = 3;
constexpr int kExitSnapshot = 4;
constexpr int kExitEmptyNetwork = 5;

bool g_quiet = false;

void log_stage(const std::string& line) {
    if (!g_quiet) std::cerr << line << "\n";
}

wikimap::WarningSink warning_sink() {
    if (g_quiet) return {};
    return [](std::string_view code, const std::string& detail) {
        std::cerr << "warn " << code << " " << detail << "\n";
    };
}

int cmd_ingest(const std::string& xml_path, const std::string& sql_path,
               const std::string& snapshot_dir) {
    using namespace wikimap;
    CorpusSnapshot snapshot;
    WarningSink warn = warning_sink();

    log_stage("ingest: parsing " + xml_path);
    {
        auto src = open_input(xml_path);
        XmlDumpOptions opts;
        opts.warn = warn;
        std::unordered_map<std::int64_t, std::size_t> index_of;
        std::uint64_t duplicates = 0;
        parse_xml_dump(*src, [&](PageRecord&& p) {
            auto [it, inserted] = index_of.emplace(p.page_id, snapshot.pages.size());
            if (inserted) {
                snapshot.pages.push_back(std::move(p));
            } else {
                // cur semantics: a later row for the same page supersedes
                snapshot.pages[it->second] = std::move(p);
                ++duplicates;
            }
        }, opts);
        if (duplicates > 0 && warn)
            warn("duplicate_page_id", std::to_string(duplicates) + " pages superseded");
    }

    log_stage("ingest: parsing " + sql_path);
    {
        auto src = open_input(sql_path);
        SqlDumpOptions opts;
        opts.warn = warn;
        std::unordered_set<std::string> seen;
        parse_categorylinks_sql(*src, [&](CategoryAssignment&& a) {
            std::string key = std::to_string(a.member_page_id) + "\t" + a.category_title;
            if (seen.insert(std::move(key)).second)
                snapshot.assignments.push_back(std::move(a));
        }, opts);
    }

    for (const PageRecord& p : snapshot.pages) {
        if (!snapshot.meta.dump_time.has_value() || p.last_edit > *snapshot.meta.dump_time)
            snapshot.meta.dump_time = p.last_edit;
    }

    log_stage("ingest: writing snapshot to " + snapshot_dir);
    WriteSummary summary = write_corpus(snapshot, snapshot_dir);
    std::cout << "pages=" << summary.pages << " assignments=" << summary.assignments << "\n";
    return 0;
}

wikimap::CorpusSnapshot load_snapshot_or_exit(const std::string& dir) {
    try {
        return wikimap::read_corpus(dir);
    } catch (const wikimap::SnapshotError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(kExitSnapshot);
    } catch (const wikimap::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(kExitSnapshot);
    }
}

void print_stats_table(const nlohmann::json& j) {
    auto row = [](const std::string& name, const std::string& value) {
        std::printf("%-42s %s\n", name.c_str(), value.c_str());
    };
    auto num = [&](const char* key) {
        const nlohmann::json& v = j.at(key);
        if (v.is_number_float()) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.4f", v.get<double>());
            return std::string(buf);
        }
        return v.dump();
    };
    row("articles", num("article_count"));
    row("categories (pages)", num("category_count"));
    row("unique authors", num("unique_author_count"));
    row("uncategorized articles", num("uncategorized_article_count"));
    row("mean categories per article", num("mean_categories_per_article"));
    row("mean categories per categorized article", num("mean_categories_per_categorized_article"));
    row("categories with no articles", num("categories_unassigned_count"));
    row("categories with exactly one article", num("categories_single_article_count"));
    row("registered single-article authors", num("registered_single_edit_authors"));
    row("mean articles per registered author", num("mean_pages_per_registered_author"));
    row("articles last edited anonymously", num("anon_last_edited_pages"));
    row("mean article bytes", num("mean_article_bytes"));
    row("total words", num("total_words"));
    std::printf("\ntop categories:\n");
    for (const auto& entry : j.at("top_categories"))
        std::printf("  %-38s %s\n", entry.at("category").get<std::string>().c_str(),
                    entry.at("members").dump().c_str());
    std::printf("\ntop authors (all namespaces):\n");
    for (const auto& entry : j.at("top_authors"))
        std::printf("  %-38s %s\n", entry.at("author").get<std::string>().c_str(),
                    entry.at("pages").dump().c_str());
}

int cmd_stats(const std::string& snapshot_dir, const std::string& format,
              const std::string& out_dir) {
    using namespace wikimap;
    const CorpusSnapshot snapshot = load_snapshot_or_exit(snapshot_dir);
    log_stage("stats: computing report");
    const nlohmann::json j = write_stats_outputs(snapshot, out_dir);
    if (format == "table") print_stats_table(j);
    else std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_map(const std::string& snapshot_dir, const wikimap::PipelineConfig& config,
            const std::string& out_dir) {
    using namespace wikimap;
    const CorpusSnapshot snapshot = load_snapshot_or_exit(snapshot_dir);
    log_stage("map: building network and layout");
    const MapArtifacts art = run_map_pipeline(snapshot, config, out_dir);
    std::cout << "nodes=" << art.full.nodes.size() << " edges=" << art.full.edges.size()
              << " retained=" << art.cut.edges.size() << "\n";
    return 0;
}

int cmd_hierarchy(const std::string& snapshot_dir, const std::string& root, int depth,
                  const std::string& out_dir) {
    using namespace wikimap;
    const CorpusSnapshot snapshot = load_snapshot_or_exit(snapshot_dir);
    log_stage("hierarchy: analyzing category graph");
    const nlohmann::json summary = write_hierarchy_outputs(snapshot, root, depth, out_dir);
    std::cout << summary.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"category co-occurrence maps from MediaWiki dumps"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed_value = 0;
    app.add_option("--config", config_path, "JSON config file")->expected(1);
    auto* seed_opt = app.add_option("--seed", seed_value, "layout seed override");
    app.add_flag("--quiet", g_quiet, "suppress stage logs and warnings");

    std::string xml_path, sql_path, snapshot_dir, out_dir;
    std::string format = "json";
    std::string root = "Categories";
    int depth = 3;
    double cut_fraction = -1.0;
    std::int64_t xmin = -1;
    std::string raw_formula, cut_key;

    auto* ingest = app.add_subcommand("ingest", "parse dumps into a snapshot");
    ingest->add_option("xml", xml_path, "pages XML dump")->required();
    ingest->add_option("sql", sql_path, "categorylinks SQL dump")->required();
    ingest->add_option("snapshot", snapshot_dir, "snapshot directory")->required();

    auto* stats = app.add_subcommand("stats", "corpus statistics");
    stats->add_option("snapshot", snapshot_dir, "snapshot directory")->required();
    stats->add_option("--format", format, "json|table")
        ->check(CLI::IsMember({"json", "table"}));
    stats->add_option("--out", out_dir, "output directory (default: snapshot dir)");

    auto* map = app.add_subcommand("map", "co-occurrence network, layout, overlays");
    map->add_option("snapshot", snapshot_dir, "snapshot directory")->required();
    map->add_option("--out", out_dir, "output directory (default: <snapshot>/map)");
    map->add_option("--cut", cut_fraction, "link cut fraction in [0,1)");
    map->add_option("--xmin", xmin, "power-law fit threshold");
    map->add_option("--raw-formula", raw_formula, "intersection|sum")
        ->check(CLI::IsMember({"intersection", "sum"}));
    map->add_option("--cut-key", cut_key, "cos|raw")->check(CLI::IsMember({"cos", "raw"}));

    auto* hierarchy = app.add_subcommand("hierarchy", "category hierarchy reports");
    hierarchy->add_option("snapshot", snapshot_dir, "snapshot directory")->required();
    hierarchy->add_option("--root", root, "root category title");
    hierarchy->add_option("--depth", depth, "listing depth");
    hierarchy->add_option("--out", out_dir, "output directory (default: <snapshot>/hierarchy)");

    // global flags are accepted on either side of the subcommand
    for (CLI::App* sub : {ingest, stats, map, hierarchy}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        wikimap::PipelineConfig config;
        if (!config_path.empty()) config = wikimap::load_config(config_path);
        if (seed_opt->count() > 0) config.layout.seed = seed_value;
        if (cut_fraction >= 0.0) config.cut_fraction = cut_fraction;
        if (xmin >= 1) config.xmin = xmin;
        if (raw_formula == "sum") config.raw_formula = wikimap::RawFormula::Sum;
        else if (raw_formula == "intersection") config.raw_formula = wikimap::RawFormula::Intersection;
        if (cut_key == "raw") config.cut_key = wikimap::CutKey::Raw;
        else if (cut_key == "cos") config.cut_key = wikimap::CutKey::Cosine;
        config.validate();

        if (ingest->parsed()) return cmd_ingest(xml_path, sql_path, snapshot_dir);
        if (stats->parsed())
            return cmd_stats(snapshot_dir, format, out_dir.empty() ? snapshot_dir : out_dir);
        if (map->parsed()) {
            std::string out = out_dir.empty()
                                  ? (std::filesystem::path(snapshot_dir) / "map").string()
                                  : out_dir;
            return cmd_map(snapshot_dir, config, out);
        }
        if (hierarchy->parsed()) {
            std::string out = out_dir.empty()
                                  ? (std::filesystem::path(snapshot_dir) / "hierarchy").string()
                                  : out_dir;
            return cmd_hierarchy(snapshot_dir, root, depth, out);
        }
    } catch (const wikimap::MalformedXml& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const wikimap::UnterminatedStringLiteral& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const wikimap::SqlParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const wikimap::EmptyNetwork& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEmptyNetwork;
    } catch (const wikimap::SnapshotError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSnapshot;
    } catch (const wikimap::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const wikimap::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
