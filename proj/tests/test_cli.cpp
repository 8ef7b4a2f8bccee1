#include <catch2/catch.hpp>

#include <fstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "wikimap/pipeline.hpp"

using namespace wikimap;

namespace {

nlohmann::json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    return j;
}

}  // namespace

TEST_CASE("config defaults reproduce the reference settings") {
    const PipelineConfig c;
    CHECK(c.cut_fraction == 0.686);
    CHECK(c.xmin == 20);
    CHECK(c.layout.iterations == 500);
    CHECK(c.layout.cooling == 0.995);
    CHECK(c.top_authors_k == 10);
    CHECK(c.author_palette.size() == 10);
    CHECK(c.keyword_rules.size() == 3);
    CHECK(c.hierarchy_root == "Categories");
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config json round trip and validation") {
    nlohmann::json j = {
        {"cut_fraction", 0.5},
        {"xmin", 10},
        {"raw_formula", "sum"},
        {"cut_key", "raw"},
        {"layout", {{"seed", 42}, {"iterations", 50}, {"cooling", 0.9}}},
        {"age", {{"old", "#101010"}, {"young", "#202020"}}},
        {"top_authors", {{"k", 2}, {"palette", {"#000001", "#000002"}}}},
        {"labels", {"Culture"}},
        {"canvas", {800, 600}},
    };
    j["keyword_rules"] = nlohmann::json::array({nlohmann::json::array({"music", "#112233"})});
    const PipelineConfig c = config_from_json(j);
    CHECK(c.cut_fraction == 0.5);
    CHECK(c.xmin == 10);
    CHECK(c.raw_formula == RawFormula::Sum);
    CHECK(c.cut_key == CutKey::Raw);
    CHECK(c.layout.seed == 42);
    CHECK(c.layout.iterations == 50);
    CHECK(c.keyword_rules.size() == 1);
    CHECK(c.keyword_rules[0].needle == "music");
    CHECK(c.top_authors_k == 2);
    CHECK(c.canvas_width == 800);

    CHECK_THROWS_AS(config_from_json({{"cut_fraction", 1.0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"cut_fraction", -0.1}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"raw_formula", "bogus"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"top_authors", {{"k", 99}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"keyword_rules", nlohmann::json::array()}}), ConfigError);
}

TEST_CASE("map pipeline writes every artifact with consistent counts") {
    const fixtures::EndToEndFixture fx = fixtures::make_e2e_fixture();
    fixtures::TempDir out("pipeline");
    PipelineConfig config;
    config.layout.iterations = 60;  // keep the unit test quick
    const MapArtifacts art = run_map_pipeline(fx.expected, config, out.path());

    for (const char* name :
         {"nodes.tsv", "edges.tsv", "edges_cut.tsv", "layout.tsv", "weight_histogram.tsv",
          "map_keyword.svg", "map_age.svg", "map_authors.svg", "map.net", "legend.json",
          "manifest.json"}) {
        INFO(name);
        CHECK(std::filesystem::exists(out.path() / name));
    }

    const nlohmann::json manifest = read_json(out.path() / "manifest.json");
    CHECK(manifest["counts"]["edges_total"].get<std::size_t>() == art.full.edges.size());
    CHECK(manifest["counts"]["edges_retained"].get<std::size_t>() == art.cut.edges.size());
    const std::size_t expected_keep =
        (1000 - 686) * art.full.edges.size() % 1000 == 0
            ? (1000 - 686) * art.full.edges.size() / 1000
            : (1000 - 686) * art.full.edges.size() / 1000 + 1;
    CHECK(art.cut.edges.size() == expected_keep);

    // layout covers every node of the cut network, normalized
    CHECK(art.points.size() == art.cut.nodes.size());
    for (const LayoutPoint& p : art.points) {
        CHECK(p.x >= 0.0);
        CHECK(p.x <= 1.0);
        CHECK(p.y >= 0.0);
        CHECK(p.y <= 1.0);
    }

    const nlohmann::json legend = read_json(out.path() / "legend.json");
    CHECK(legend["keyword"].size() == config.keyword_rules.size());
    CHECK(legend["authors"].size() <= config.top_authors_k);
}

TEST_CASE("empty incidence fails with EmptyNetwork") {
    CorpusSnapshot s;
    PageRecord p;
    p.page_id = 1;
    p.title = "A";
    p.ns = Namespace::main();
    p.last_edit = kWikiEpoch;
    p.last_editor = AuthorRef::registered("U");
    s.pages.push_back(p);
    fixtures::TempDir out("pipeline-empty");
    CHECK_THROWS_AS(run_map_pipeline(s, PipelineConfig{}, out.path()), EmptyNetwork);
}

TEST_CASE("cli ingest produces the expected snapshot and summary line") {
    const fixtures::EndToEndFixture fx = fixtures::make_e2e_fixture();
    fixtures::TempDir dir("cli-ingest");
    fixtures::write_file(dir.path() / "pages.xml", fx.xml);
    fixtures::write_file(dir.path() / "links.sql", fx.sql);
    const auto snapdir = dir.path() / "snap";

    const fixtures::CliResult r = fixtures::run_cli(
        {"ingest", (dir.path() / "pages.xml").string(), (dir.path() / "links.sql").string(),
         snapdir.string()});
    REQUIRE(r.exit_code == 0);
    CHECK(r.output == "pages=" + std::to_string(fx.expected.pages.size()) +
                          " assignments=" + std::to_string(fx.expected.assignments.size()) +
                          "\n");

    const CorpusSnapshot loaded = read_corpus(snapdir);
    CHECK(loaded.pages == fx.expected.pages);
    CHECK(loaded.assignments == fx.expected.assignments);
    CHECK(loaded.meta.dump_time == fx.expected.meta.dump_time);
}

TEST_CASE("cli ingest exit codes for missing and malformed inputs") {
    fixtures::TempDir dir("cli-err");
    fixtures::write_file(dir.path() / "ok.sql", "INSERT INTO t VALUES (1,'A','',NULL);");
    fixtures::write_file(dir.path() / "bad.xml", "<mediawiki><page></mediawiki>");
    fixtures::write_file(dir.path() / "bad.sql", "INSERT INTO t VALUES (1,'unclosed");
    fixtures::write_file(dir.path() / "ok.xml",
                         "<mediawiki><page><title>A</title><id>1</id><revision>"
                         "<timestamp>2005-01-01T00:00:00Z</timestamp>"
                         "<contributor><username>U</username></contributor>"
                         "<text>x</text></revision></page></mediawiki>");

    CHECK(fixtures::run_cli({"ingest", "/no/such/file.xml", (dir.path() / "ok.sql").string(),
                             (dir.path() / "s1").string()})
              .exit_code == 3);
    CHECK(fixtures::run_cli({"ingest", (dir.path() / "bad.xml").string(),
                             (dir.path() / "ok.sql").string(), (dir.path() / "s2").string()})
              .exit_code == 2);
    CHECK(fixtures::run_cli({"ingest", (dir.path() / "ok.xml").string(),
                             (dir.path() / "bad.sql").string(), (dir.path() / "s3").string()})
              .exit_code == 2);
}

TEST_CASE("cli stats writes reports and honors --format table") {
    const fixtures::EndToEndFixture fx = fixtures::make_e2e_fixture();
    fixtures::TempDir dir("cli-stats");
    CorpusSnapshot snapshot = fx.expected;
    write_corpus(snapshot, dir.path() / "snap");

    const auto outdir = dir.path() / "out";
    const fixtures::CliResult r = fixtures::run_cli(
        {"stats", (dir.path() / "snap").string(), "--out", outdir.string()});
    REQUIRE(r.exit_code == 0);

    const nlohmann::json stats = read_json(outdir / "stats.json");
    const StatsReport oracle = oracles::oracle_corpus_counts(fx.expected);
    CHECK(stats["article_count"].get<std::uint64_t>() == oracle.article_count);
    CHECK(stats["uncategorized_article_count"].get<std::uint64_t>() ==
          oracle.uncategorized_article_count);
    CHECK(stats["mean_categories_per_article"].get<double>() ==
          Approx(oracle.mean_categories_per_article).epsilon(1e-12));
    CHECK(std::filesystem::exists(outdir / "hist_categories_per_article.tsv"));
    CHECK(std::filesystem::exists(outdir / "hist_articles_per_category.tsv"));
    CHECK(std::filesystem::exists(outdir / "timeline.tsv"));

    const fixtures::CliResult table = fixtures::run_cli(
        {"stats", (dir.path() / "snap").string(), "--out", outdir.string(), "--format", "table"});
    REQUIRE(table.exit_code == 0);
    CHECK(table.output.find("articles") != std::string::npos);
    CHECK(table.output.find(std::to_string(oracle.article_count)) != std::string::npos);

    CHECK(fixtures::run_cli({"stats", "/no/such/snapshot"}).exit_code == 4);
}

TEST_CASE("cli stats rejects a corrupted snapshot with exit 4") {
    const fixtures::EndToEndFixture fx = fixtures::make_e2e_fixture();
    fixtures::TempDir dir("cli-corrupt");
    CorpusSnapshot snapshot = fx.expected;
    write_corpus(snapshot, dir.path() / "snap");
    std::string pages = fixtures::read_file(dir.path() / "snap" / "pages.tsv");
    pages[pages.size() / 3] = pages[pages.size() / 3] == 'q' ? 'r' : 'q';
    fixtures::write_file(dir.path() / "snap" / "pages.tsv", pages);
    CHECK(fixtures::run_cli({"stats", (dir.path() / "snap").string()}).exit_code == 4);
}

TEST_CASE("cli map exit 5 on a snapshot with zero assignments") {
    fixtures::TempDir dir("cli-empty");
    CorpusSnapshot s;
    PageRecord p;
    p.page_id = 1;
    p.title = "A";
    p.ns = Namespace::main();
    p.last_edit = kWikiEpoch;
    p.last_editor = AuthorRef::registered("U");
    s.pages.push_back(p);
    write_corpus(s, dir.path() / "snap");
    CHECK(fixtures::run_cli({"map", (dir.path() / "snap").string()}).exit_code == 5);
}

TEST_CASE("cli map reruns are byte-identical") {
    const fixtures::EndToEndFixture fx = fixtures::make_e2e_fixture();
    fixtures::TempDir dir("cli-repro");
    CorpusSnapshot snapshot = fx.expected;
    write_corpus(snapshot, dir.path() / "snap");

    const nlohmann::json config = {{"layout", {{"iterations", 40}}}};
    fixtures::write_file(dir.path() / "config.json", config.dump());

    const auto out1 = dir.path() / "out1";
    const auto out2 = dir.path() / "out2";
    REQUIRE(fixtures::run_cli({"--config", (dir.path() / "config.json").string(), "map",
                               (dir.path() / "snap").string(), "--out", out1.string()})
                .exit_code == 0);
    REQUIRE(fixtures::run_cli({"--config", (dir.path() / "config.json").string(), "map",
                               (dir.path() / "snap").string(), "--out", out2.string()})
                .exit_code == 0);
    for (const char* name : {"manifest.json", "map.net", "map_keyword.svg", "map_age.svg",
                             "map_authors.svg", "layout.tsv", "edges.tsv", "legend.json"}) {
        INFO(name);
        CHECK(fixtures::read_file(out1 / name) == fixtures::read_file(out2 / name));
    }

    // a different seed changes the layout
    const auto out3 = dir.path() / "out3";
    REQUIRE(fixtures::run_cli({"--config", (dir.path() / "config.json").string(), "--seed",
                               "777", "map", (dir.path() / "snap").string(), "--out",
                               out3.string()})
                .exit_code == 0);
    CHECK(fixtures::read_file(out1 / "layout.tsv") != fixtures::read_file(out3 / "layout.tsv"));
    const nlohmann::json m3 = read_json(out3 / "manifest.json");
    CHECK(m3["parameters"]["seed"].get<std::uint64_t>() == 777);

    // global flags also parse after the subcommand
    const auto out4 = dir.path() / "out4";
    REQUIRE(fixtures::run_cli({"map", (dir.path() / "snap").string(), "--config",
                               (dir.path() / "config.json").string(), "--out", out4.string(),
                               "--seed", "777"})
                .exit_code == 0);
    CHECK(fixtures::read_file(out3 / "layout.tsv") == fixtures::read_file(out4 / "layout.tsv"));
}

TEST_CASE("cli map honors --cut and the ceiling rule") {
    const fixtures::EndToEndFixture fx = fixtures::make_e2e_fixture();
    fixtures::TempDir dir("cli-cut");
    CorpusSnapshot snapshot = fx.expected;
    write_corpus(snapshot, dir.path() / "snap");
    const nlohmann::json config = {{"layout", {{"iterations", 20}}}};
    fixtures::write_file(dir.path() / "config.json", config.dump());
    const auto outdir = dir.path() / "map";
    REQUIRE(fixtures::run_cli({"--config", (dir.path() / "config.json").string(), "map",
                               (dir.path() / "snap").string(), "--out", outdir.string(),
                               "--cut", "0.999"})
                .exit_code == 0);
    const nlohmann::json manifest = read_json(outdir / "manifest.json");
    const std::size_t total = manifest["counts"]["edges_total"].get<std::size_t>();
    const std::size_t expected = (1 * total + 999) / 1000;  // ceil(0.001 * total)
    CHECK(manifest["counts"]["edges_retained"].get<std::size_t>() == expected);
    CHECK(manifest["parameters"]["cut_fraction"].get<double>() == 0.999);
}

TEST_CASE("cli hierarchy reports cycles and disconnection") {
    const fixtures::EndToEndFixture fx = fixtures::make_e2e_fixture();
    fixtures::TempDir dir("cli-hier");
    CorpusSnapshot snapshot = fx.expected;
    write_corpus(snapshot, dir.path() / "snap");

    const auto outdir = dir.path() / "hier";
    const fixtures::CliResult r = fixtures::run_cli(
        {"hierarchy", (dir.path() / "snap").string(), "--root", "Categories", "--depth", "3",
         "--out", outdir.string()});
    REQUIRE(r.exit_code == 0);
    const nlohmann::json summary = nlohmann::json::parse(r.output);
    CHECK(summary["root_present"].get<bool>());
    CHECK(summary["cycle_components"].get<std::size_t>() == 2);  // 3-cycle and self-loop
    CHECK(summary["disconnected_directed"].get<std::size_t>() >= 1);

    const nlohmann::json cycles = read_json(outdir / "cycles.json");
    REQUIRE(cycles.size() == 2);
    CHECK(cycles[0]["members"] == nlohmann::json({"Loop_a", "Loop_b", "Loop_c"}));
    CHECK(cycles[1]["members"] == nlohmann::json({"Selfie"}));
    CHECK(cycles[1]["self_loop"].get<bool>());

    const nlohmann::json disc = read_json(outdir / "disconnected.json");
    const auto directed = disc["directed"].get<std::set<std::string>>();
    CHECK(directed.count("Orphan_island") == 1);

    const nlohmann::json listing = read_json(outdir / "listing.json");
    CHECK(listing["title"] == "Categories");
    std::set<std::string> level1;
    for (const auto& child : listing["children"]) level1.insert(child["title"].get<std::string>());
    CHECK(level1 == std::set<std::string>{"Culture", "Geography", "History", "People", "Science"});
}

TEST_CASE("cli map manifest counts match the projection oracle") {
    const fixtures::EndToEndFixture fx = fixtures::make_e2e_fixture();
    fixtures::TempDir dir("cli-manifest");
    CorpusSnapshot snapshot = fx.expected;
    write_corpus(snapshot, dir.path() / "snap");
    const nlohmann::json config = {{"layout", {{"iterations", 30}}}};
    fixtures::write_file(dir.path() / "config.json", config.dump());
    const auto outdir = dir.path() / "map";
    REQUIRE(fixtures::run_cli({"--config", (dir.path() / "config.json").string(), "map",
                               (dir.path() / "snap").string(), "--out", outdir.string()})
                .exit_code == 0);

    // oracle projection over the deduplicated article sets
    const auto pairs = oracles::oracle_article_pairs(fx.expected);
    std::map<std::int64_t, std::set<std::string>> by_article;
    for (const auto& [page, cat] : pairs) by_article[page->page_id].insert(cat);
    std::vector<std::set<std::string>> article_sets;
    for (auto& [id, cats] : by_article) article_sets.push_back(cats);
    const auto oracle_edges = oracles::oracle_projection(article_sets);

    std::uint64_t oracle_max_raw = 0;
    std::set<std::string> with_edges;
    for (const auto& e : oracle_edges) {
        oracle_max_raw = std::max(oracle_max_raw, e.raw);
        with_edges.insert(e.cat_i);
        with_edges.insert(e.cat_j);
    }

    const nlohmann::json manifest = read_json(outdir / "manifest.json");
    CHECK(manifest["counts"]["edges_total"].get<std::size_t>() == oracle_edges.size());
    CHECK(manifest["counts"]["nodes_with_edges"].get<std::size_t>() == with_edges.size());
    CHECK(manifest["counts"]["max_raw_weight"].get<std::uint64_t>() == oracle_max_raw);
    CHECK(manifest["counts"]["articles_with_categories"].get<std::size_t>() ==
          by_article.size());
}
