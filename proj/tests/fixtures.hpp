#pragma once

// Shared test fixtures: deterministic corpus generators, dump writers that
// serialize records back into export XML / SQL INSERT form, and a small
// subprocess runner for CLI-level tests.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>
#include <zlib.h>

#include "wikimap/corpus.hpp"
#include "wikimap/corpus_store.hpp"
#include "wikimap/rng.hpp"

namespace fixtures {

using namespace wikimap;

// ---------------------------------------------------------------- dumps --

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string underscores_to_spaces(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c == '_') c = ' ';
    return out;
}

struct FixturePage {
    PageRecord record;
    std::string text;
};

// Builds a text body with exactly `words` whitespace-separated tokens and
// fills the record's byte/word counters from it.
inline void set_text(FixturePage& page, std::size_t words, std::string_view stem = "w") {
    page.text.clear();
    for (std::size_t i = 0; i < words; ++i) {
        if (i > 0) page.text.push_back(i % 7 == 0 ? '\n' : ' ');
        page.text += stem;
        page.text += std::to_string(i);
    }
    page.record.word_count = words;
    page.record.text_bytes = page.text.size();
}

inline void set_redirect_text(FixturePage& page, const std::string& target) {
    page.text = "#REDIRECT [[" + target + "]]";
    page.record.word_count = 2;
    page.record.text_bytes = page.text.size();
    page.record.is_redirect = true;
}

inline std::string full_title(const PageRecord& r) {
    std::string t = underscores_to_spaces(r.title);
    switch (r.ns.kind) {
        case NsKind::Main: return t;
        case NsKind::Category: return "Category:" + t;
        case NsKind::Other: return r.ns.name + ":" + t;
    }
    return t;
}

inline void write_siteinfo(std::string& out) {
    out += "  <siteinfo>\n    <sitename>Testwiki</sitename>\n"
           "    <case>first-letter</case>\n    <namespaces>\n";
    const NamespaceMap def = NamespaceMap::builtin_default();
    for (const auto& e : def.entries()) {
        if (e.name.empty()) {
            out += "      <namespace key=\"0\" />\n";
        } else {
            out += "      <namespace key=\"" + std::to_string(e.id) + "\">" +
                   xml_escape(e.name) + "</namespace>\n";
        }
    }
    out += "    </namespaces>\n  </siteinfo>\n";
}

inline std::string make_xml_dump(const std::vector<FixturePage>& pages,
                                 bool with_siteinfo = true) {
    std::string out =
        "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.3/\" "
        "version=\"0.3\" xml:lang=\"en\">\n";
    if (with_siteinfo) write_siteinfo(out);
    for (const FixturePage& p : pages) {
        const PageRecord& r = p.record;
        out += "  <page>\n";
        out += "    <title>" + xml_escape(full_title(r)) + "</title>\n";
        out += "    <id>" + std::to_string(r.page_id) + "</id>\n";
        out += "    <revision>\n";
        out += "      <id>" + std::to_string(r.page_id * 10) + "</id>\n";
        out += "      <timestamp>" + format_iso8601(r.last_edit) + "</timestamp>\n";
        out += "      <contributor>";
        if (r.last_editor.is_registered())
            out += "<username>" + xml_escape(r.last_editor.name) + "</username>";
        else
            out += "<ip>" + xml_escape(r.last_editor.name) + "</ip>";
        out += "</contributor>\n";
        out += "      <text xml:space=\"preserve\">" + xml_escape(p.text) + "</text>\n";
        out += "    </revision>\n";
        out += "  </page>\n";
    }
    out += "</mediawiki>\n";
    return out;
}

inline std::string sql_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '\'': out += "\\'"; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string make_sql_dump(const std::vector<CategoryAssignment>& assignments) {
    std::string out =
        "-- MySQL dump fixture\n"
        "/*!40101 SET NAMES utf8 */;\n"
        "DROP TABLE IF EXISTS `categorylinks`;\n"
        "CREATE TABLE `categorylinks` (\n"
        "  `cl_from` int(8) unsigned NOT NULL default '0',\n"
        "  `cl_to` varchar(255) binary NOT NULL default '',\n"
        "  `cl_sortkey` varchar(86) binary NOT NULL default '',\n"
        "  `cl_timestamp` timestamp(14) NOT NULL,\n"
        "  UNIQUE KEY `cl_from` (`cl_from`,`cl_to`)\n"
        ") TYPE=InnoDB;\n\n"
        "LOCK TABLES `categorylinks` WRITE;\n";
    if (!assignments.empty()) {
        out += "INSERT INTO `categorylinks` VALUES ";
        for (std::size_t i = 0; i < assignments.size(); ++i) {
            const CategoryAssignment& a = assignments[i];
            if (i > 0) out += ",";
            out += "(" + std::to_string(a.member_page_id) + ",'" +
                   sql_escape(a.category_title) + "','" + sql_escape(a.sort_key) + "',";
            if (a.link_timestamp.has_value()) {
                const CivilTime c = civil_from_timestamp(*a.link_timestamp);
                char buf[40];
                std::snprintf(buf, sizeof(buf), "'%04d%02d%02d%02d%02d%02d'", c.year, c.month,
                              c.day, c.hour, c.minute, c.second);
                out += buf;
            } else {
                out += "NULL";
            }
            out += ")";
        }
        out += ";\n";
    }
    out += "UNLOCK TABLES;\n";
    return out;
}

// ------------------------------------------------------ random corpora --

struct RandomCorpusOptions {
    std::size_t max_pages = 500;
    std::size_t max_categories = 60;
    bool odd_titles = false;  // quotes, tabs, unicode in titles (store tests)
};

inline CorpusSnapshot random_corpus(std::uint64_t seed, const RandomCorpusOptions& opt = {}) {
    SplitMix64 rng(seed);
    CorpusSnapshot s;
    const std::size_t n_pages = 1 + rng.next_below(opt.max_pages);
    const std::size_t n_cats = 1 + rng.next_below(opt.max_categories);

    std::vector<std::string> cat_pool;
    for (std::size_t i = 0; i < n_cats; ++i) cat_pool.push_back("Cat_" + std::to_string(i));

    std::vector<AuthorRef> authors;
    for (int i = 0; i < 9; ++i) authors.push_back(AuthorRef::registered("User" + std::to_string(i)));
    for (int i = 0; i < 6; ++i)
        authors.push_back(AuthorRef::anonymous("10.0." + std::to_string(i) + ".1"));

    const Timestamp t0 = *parse_iso8601("2001-02-01T00:00:00Z");
    const Timestamp t1 = *parse_iso8601("2005-11-05T00:00:00Z");

    std::size_t cat_pages = 0;
    for (std::size_t i = 0; i < n_pages; ++i) {
        PageRecord p;
        p.page_id = static_cast<std::int64_t>(i * 3 + 1 + rng.next_below(2));
        const std::uint64_t roll = rng.next_below(10);
        if (roll < 7) {
            p.ns = Namespace::main();
            p.title = "Article_" + std::to_string(i);
        } else if (roll < 9) {
            p.ns = Namespace::category();
            p.title = cat_pool[cat_pages % cat_pool.size()];
            ++cat_pages;
        } else {
            p.ns = Namespace::other("Talk");
            p.title = "Chatter_" + std::to_string(i);
        }
        if (opt.odd_titles && rng.next_below(4) == 0) {
            p.title += "_\"quoted\"_\t_\\back\\_é中";
        }
        p.last_edit = t0 + static_cast<Timestamp>(rng.next_below(
                               static_cast<std::uint64_t>(t1 - t0)));
        p.last_editor = authors[rng.next_below(authors.size())];
        p.text_bytes = rng.next_below(5000);
        p.word_count = rng.next_below(800);
        p.is_redirect = rng.next_below(12) == 0;
        s.pages.push_back(std::move(p));
    }
    // page ids must be unique; the generator above can collide, fix up
    {
        std::set<std::int64_t> seen;
        for (PageRecord& p : s.pages) {
            while (seen.count(p.page_id) > 0) p.page_id += 1;
            seen.insert(p.page_id);
        }
    }

    const std::size_t n_assign = rng.next_below(3 * n_pages + 1);
    for (std::size_t i = 0; i < n_assign; ++i) {
        CategoryAssignment a;
        if (rng.next_below(10) < 8 && !s.pages.empty()) {
            a.member_page_id = s.pages[rng.next_below(s.pages.size())].page_id;
        } else {
            a.member_page_id = static_cast<std::int64_t>(900000 + rng.next_below(1000));
        }
        a.category_title = cat_pool[rng.next_below(cat_pool.size())];
        a.sort_key = rng.next_below(3) == 0 ? "" : "k" + std::to_string(rng.next_below(50));
        if (rng.next_below(2) == 0)
            a.link_timestamp = t0 + static_cast<Timestamp>(rng.next_below(
                                        static_cast<std::uint64_t>(t1 - t0)));
        s.assignments.push_back(a);
        if (rng.next_below(8) == 0) s.assignments.push_back(a);  // exact duplicate
    }
    return s;
}

inline std::string gzip_compress(const std::string& in) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_BEST_SPEED, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK)
        throw std::runtime_error("deflateInit failed");
    std::string out(in.size() + 1024, '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    if (deflate(&zs, Z_FINISH) != Z_STREAM_END) {
        deflateEnd(&zs);
        throw std::runtime_error("deflate failed");
    }
    out.resize(out.size() - zs.avail_out);
    deflateEnd(&zs);
    return out;
}

// -------------------------------------------------------- graph corpora --

// Snapshot whose category pages carry the given child -> parent edges.
inline CorpusSnapshot graph_snapshot(const std::vector<std::pair<std::string, std::string>>& edges,
                                     const std::vector<std::string>& extra_categories = {}) {
    CorpusSnapshot s;
    std::map<std::string, std::int64_t> id_of;
    auto ensure_page = [&](const std::string& title) {
        if (id_of.count(title) > 0) return;
        PageRecord p;
        p.page_id = static_cast<std::int64_t>(id_of.size() + 1);
        p.title = title;
        p.ns = Namespace::category();
        p.last_edit = kWikiEpoch;
        p.last_editor = AuthorRef::registered("U");
        id_of[title] = p.page_id;
        s.pages.push_back(p);
    };
    for (const auto& [child, parent] : edges) ensure_page(child);
    for (const std::string& t : extra_categories) ensure_page(t);
    for (const auto& [child, parent] : edges)
        s.assignments.push_back({id_of.at(child), parent, "", std::nullopt});
    return s;
}

inline std::vector<std::pair<std::string, std::string>> random_digraph(
    std::uint64_t seed, std::size_t max_nodes, std::vector<std::string>* titles) {
    SplitMix64 rng(seed);
    const std::size_t n = 2 + rng.next_below(max_nodes - 1);
    titles->clear();
    for (std::size_t i = 0; i < n; ++i) titles->push_back("N" + std::to_string(i));
    std::vector<std::pair<std::string, std::string>> edges;
    const std::size_t m = rng.next_below(2 * n + 1);
    for (std::size_t e = 0; e < m; ++e) {
        const std::string& a = (*titles)[rng.next_below(n)];
        const std::string& b = (*titles)[rng.next_below(n)];
        edges.emplace_back(a, b);  // self-loops and duplicates allowed
    }
    // plant a cycle
    if (n >= 3 && rng.next_below(2) == 0) {
        edges.emplace_back((*titles)[0], (*titles)[1]);
        edges.emplace_back((*titles)[1], (*titles)[2]);
        edges.emplace_back((*titles)[2], (*titles)[0]);
    }
    return edges;
}

// ----------------------------------------------------- end-to-end corpus --

// A structured ~200-article corpus with 30 categories (25 of them with
// pages), 5 authors, a planted 3-cycle, a self-loop, and exactly one
// category disconnected from the root. `expected` is what ingest must
// produce; the dumps are serialized from the same records.
struct EndToEndFixture {
    std::string xml;
    std::string sql;
    CorpusSnapshot expected;           // post-ingest truth
    std::vector<std::string> category_pages;
    std::vector<std::string> pageless_categories;
};

inline EndToEndFixture make_e2e_fixture() {
    EndToEndFixture fx;
    SplitMix64 rng(20051105);

    const AuthorRef whobot = AuthorRef::registered("Whobot");
    const AuthorRef rambot = AuthorRef::registered("Rambot");
    const AuthorRef alice = AuthorRef::registered("Alice");
    const AuthorRef anon4 = AuthorRef::anonymous("10.0.0.7");
    const AuthorRef anon6 = AuthorRef::anonymous("2001:db8::1");
    const std::vector<AuthorRef> authors = {whobot, rambot, alice, anon4, anon6};

    // category page titles and their parent edges (child -> parent)
    const std::vector<std::pair<std::string, std::string>> hierarchy = {
        {"Culture", "Categories"},      {"Science", "Categories"},
        {"Geography", "Categories"},    {"History", "Categories"},
        {"People", "Categories"},       {"Archaeology", "Culture"},
        {"Physics", "Science"},         {"Chemistry", "Science"},
        {"Cities", "Geography"},        {"Wars", "History"},
        {"Actors", "People"},           {"Film_actors", "Actors"},
        {"American_actors", "Actors"},  {"Music", "Culture"},
        {"Albums", "Music"},            {"Animals", "Science"},
        {"Plants", "Science"},          {"Rivers", "Geography"},
        {"Mountains", "Geography"},     {"Loop_a", "Science"},
        {"Loop_a", "Loop_c"},           {"Loop_b", "Loop_a"},
        {"Loop_c", "Loop_b"},           {"Selfie", "Selfie"},
        {"Selfie", "Culture"},
    };
    fx.category_pages = {"Categories", "Culture",   "Science",        "Geography",
                         "History",    "People",    "Archaeology",    "Physics",
                         "Chemistry",  "Cities",    "Wars",           "Actors",
                         "Film_actors", "American_actors", "Music",   "Albums",
                         "Animals",    "Plants",    "Rivers",         "Mountains",
                         "Loop_a",     "Loop_b",    "Loop_c",         "Selfie",
                         "Orphan_island"};
    fx.pageless_categories = {"Disambiguation", "Film_stubs", "1911_Britannica",
                              "O'Brien_family", "Cleanup"};

    std::vector<FixturePage> pages;
    std::map<std::string, std::int64_t> category_page_id;

    const Timestamp cat_t0 = *parse_iso8601("2004-05-15T00:00:00Z");
    std::int64_t next_id = 1000;
    for (const std::string& title : fx.category_pages) {
        FixturePage p;
        p.record.page_id = next_id++;
        p.record.title = title;
        p.record.ns = Namespace::category();
        p.record.last_edit = cat_t0 + static_cast<Timestamp>(rng.next_below(46000000ull));
        // Whobot dominates category edits, Rambot second
        const std::uint64_t roll = rng.next_below(10);
        p.record.last_editor = roll < 5 ? whobot : (roll < 8 ? rambot : authors[rng.next_below(5)]);
        set_text(p, 3 + rng.next_below(20), "cat");
        category_page_id[title] = p.record.page_id;
        pages.push_back(std::move(p));
    }

    // articles
    std::vector<std::string> all_categories = fx.category_pages;
    all_categories.insert(all_categories.end(), fx.pageless_categories.begin(),
                          fx.pageless_categories.end());
    const Timestamp art_t0 = *parse_iso8601("2003-01-01T00:00:00Z");
    std::vector<CategoryAssignment> raw_rows;

    for (int i = 0; i < 200; ++i) {
        FixturePage p;
        char name[32];
        std::snprintf(name, sizeof(name), "Article_%03d", i);
        p.record.page_id = 1 + i;
        p.record.title = name;
        p.record.ns = Namespace::main();
        p.record.last_edit = art_t0 + static_cast<Timestamp>(rng.next_below(89000000ull));
        p.record.last_editor = authors[rng.next_below(5)];
        if (i % 41 == 3) {
            set_redirect_text(p, "Article_000");
        } else {
            set_text(p, 4 + rng.next_below(60));
        }
        pages.push_back(std::move(p));

        // 0..5 categories; roughly a fifth stay uncategorized
        if (i % 5 == 1) continue;
        const std::size_t n_cats = 1 + rng.next_below(5);
        std::set<std::string> chosen;
        if (i % 3 == 0) {
            // recurring pair so one edge dominates the raw weights
            chosen.insert("Film_actors");
            chosen.insert("American_actors");
        }
        while (chosen.size() < n_cats)
            chosen.insert(all_categories[rng.next_below(all_categories.size())]);
        for (const std::string& cat : chosen) {
            CategoryAssignment a;
            a.member_page_id = p.record.page_id;
            a.category_title = cat;
            a.sort_key = name;
            a.link_timestamp = p.record.last_edit;
            raw_rows.push_back(a);
        }
    }

    // hierarchy rows (subcategory -> supercategory)
    for (const auto& [child, parent] : hierarchy) {
        CategoryAssignment a;
        a.member_page_id = category_page_id.at(child);
        a.category_title = parent;
        a.sort_key = child;
        a.link_timestamp = cat_t0;
        raw_rows.push_back(a);
    }
    // a membership whose page does not exist (deleted page)
    raw_rows.push_back({77777, "Science", "ghost", std::nullopt});
    // exact duplicates exercising ingest dedup
    raw_rows.push_back(raw_rows[0]);
    raw_rows.push_back(raw_rows[5]);

    // one page row appears twice in the XML: the later revision wins
    {
        FixturePage dup;
        dup.record = pages[static_cast<std::size_t>(fx.category_pages.size()) + 7].record;
        dup.record.last_edit += 86400;
        dup.record.last_editor = alice;
        set_text(dup, 9);
        pages.push_back(dup);
    }

    // expected snapshot: document order, later duplicate page ids win
    {
        std::map<std::int64_t, std::size_t> index_of;
        for (const FixturePage& p : pages) {
            auto it = index_of.find(p.record.page_id);
            if (it == index_of.end()) {
                index_of[p.record.page_id] = fx.expected.pages.size();
                fx.expected.pages.push_back(p.record);
            } else {
                fx.expected.pages[it->second] = p.record;
            }
        }
        std::set<std::pair<std::int64_t, std::string>> seen;
        for (const CategoryAssignment& a : raw_rows) {
            if (seen.emplace(a.member_page_id, a.category_title).second)
                fx.expected.assignments.push_back(a);
        }
        for (const PageRecord& p : fx.expected.pages) {
            if (!fx.expected.meta.dump_time.has_value() ||
                p.last_edit > *fx.expected.meta.dump_time)
                fx.expected.meta.dump_time = p.last_edit;
        }
    }

    fx.xml = make_xml_dump(pages);
    fx.sql = make_sql_dump(raw_rows);
    // a tuple of the wrong arity that ingest must skip with a warning
    fx.sql += "INSERT INTO `categorylinks` VALUES (12,'Short_tuple');\n";
    return fx;
}

// -------------------------------------------------------- temp dirs, cli --

class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        namespace fs = std::filesystem;
        static std::uint64_t counter = 0;
        path_ = fs::temp_directory_path() /
                ("wikimap_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, std::string_view content) {
    std::ofstream out(p, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::string out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return out;
}

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out.push_back(c);
    }
    out += "'";
    return out;
}

// Runs the CLI binary with the given arguments, stderr discarded.
inline CliResult run_cli(const std::vector<std::string>& args) {
    std::string cmd = shell_quote(WIKIMAP_CLI_PATH);
    for (const std::string& a : args) cmd += " " + shell_quote(a);
    cmd += " 2>/dev/null";
    CliResult result;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) return result;
    char buf[4096];
    std::size_t got;
    while ((got = ::fread(buf, 1, sizeof(buf), pipe)) > 0) result.output.append(buf, got);
    const int status = ::pclose(pipe);
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    return result;
}

}  // namespace fixtures
