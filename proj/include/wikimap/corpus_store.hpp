#pragma once

// Snapshot persistence: two tab-separated tables plus a JSON meta file in
// one directory. Text format on purpose, so snapshots stay inspectable and
// reimplementable; \t, \n and \\ in fields are escaped, nothing else.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wikimap/corpus.hpp"
#include "wikimap/io.hpp"
#include "wikimap/sha256.hpp"

namespace wikimap {

inline constexpr int kSnapshotFormatVersion = 1;

struct SnapshotError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ChecksumMismatch : SnapshotError {
    using SnapshotError::SnapshotError;
};
struct VersionMismatch : SnapshotError {
    using SnapshotError::SnapshotError;
};
struct CorruptSnapshot : SnapshotError {
    using SnapshotError::SnapshotError;
};
struct SerializationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SnapshotMeta {
    std::optional<Timestamp> dump_time;
    std::uint64_t pages = 0;
    std::uint64_t assignments = 0;
    int version = kSnapshotFormatVersion;
    std::string sha256;

    friend bool operator==(const SnapshotMeta& a, const SnapshotMeta& b) {
        return a.dump_time == b.dump_time && a.pages == b.pages &&
               a.assignments == b.assignments && a.version == b.version && a.sha256 == b.sha256;
    }
};

struct CorpusSnapshot {
    std::vector<PageRecord> pages;
    std::vector<CategoryAssignment> assignments;
    SnapshotMeta meta;

    friend bool operator==(const CorpusSnapshot& a, const CorpusSnapshot& b) {
        return a.pages == b.pages && a.assignments == b.assignments && a.meta == b.meta;
    }
};

struct WriteSummary {
    std::uint64_t bytes = 0;
    std::uint64_t pages = 0;
    std::uint64_t assignments = 0;
};

namespace storedetail {

inline std::string escape_field(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\0': throw SerializationError("field contains NUL byte");
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string unescape_field(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out.push_back(s[i]);
            continue;
        }
        if (++i == s.size()) throw CorruptSnapshot("dangling escape in field");
        switch (s[i]) {
            case '\\': out.push_back('\\'); break;
            case 't': out.push_back('\t'); break;
            case 'n': out.push_back('\n'); break;
            default: throw CorruptSnapshot("unknown escape in field");
        }
    }
    return out;
}

inline std::vector<std::string> split_tabs(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == '\t') {
            out.emplace_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline std::string ns_to_field(const Namespace& ns) {
    switch (ns.kind) {
        case NsKind::Main: return "main";
        case NsKind::Category: return "category";
        case NsKind::Other: return "other:" + ns.name;
    }
    return "main";
}

inline Namespace ns_from_field(std::string_view f) {
    if (f == "main") return Namespace::main();
    if (f == "category") return Namespace::category();
    if (f.rfind("other:", 0) == 0) return Namespace::other(std::string(f.substr(6)));
    throw CorruptSnapshot("bad namespace field: " + std::string(f));
}

inline std::int64_t parse_i64(std::string_view f, const char* what) {
    std::int64_t v = 0;
    bool any = false;
    for (char c : f) {
        if (c < '0' || c > '9') throw CorruptSnapshot(std::string("bad ") + what);
        v = v * 10 + (c - '0');
        any = true;
    }
    if (!any) throw CorruptSnapshot(std::string("empty ") + what);
    return v;
}

// Writes lines to a file and a running hash at the same time.
class HashedWriter {
  public:
    HashedWriter(const std::filesystem::path& path, Sha256& hash)
        : out_(path, std::ios::binary), hash_(hash), path_(path.string()) {
        if (!out_) throw IoError("cannot write " + path_);
    }
    void line(const std::string& s) {
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
        out_.put('\n');
        hash_.update(s);
        hash_.update("\n", 1);
        bytes_ += s.size() + 1;
    }
    void close() {
        out_.close();
        if (!out_) throw IoError("write failure on " + path_);
    }
    std::uint64_t bytes() const { return bytes_; }

  private:
    std::ofstream out_;
    Sha256& hash_;
    std::string path_;
    std::uint64_t bytes_ = 0;
};

inline constexpr const char* kPagesHeader =
    "page_id\ttitle\tnamespace\tlast_edit\teditor_kind\teditor\ttext_bytes\tword_count\tis_redirect";
inline constexpr const char* kAssignmentsHeader =
    "member_page_id\tcategory_title\tsort_key\tlink_timestamp";

}  // namespace storedetail

// Fills in snapshot.meta (counts, version, checksum) as a side effect, so
// the in-memory snapshot and the on-disk one agree field for field.
inline WriteSummary write_corpus(CorpusSnapshot& snapshot, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    using namespace storedetail;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    Sha256 hash;
    WriteSummary summary;
    {
        HashedWriter w(dir / "pages.tsv", hash);
        w.line(kPagesHeader);
        for (const PageRecord& p : snapshot.pages) {
            std::string row;
            row += std::to_string(p.page_id);
            row += '\t';
            row += escape_field(p.title);
            row += '\t';
            row += escape_field(ns_to_field(p.ns));
            row += '\t';
            row += format_iso8601(p.last_edit);
            row += '\t';
            row += p.last_editor.is_registered() ? "user" : "ip";
            row += '\t';
            row += escape_field(p.last_editor.name);
            row += '\t';
            row += std::to_string(p.text_bytes);
            row += '\t';
            row += std::to_string(p.word_count);
            row += '\t';
            row += p.is_redirect ? '1' : '0';
            w.line(row);
        }
        w.close();
        summary.bytes += w.bytes();
    }
    {
        HashedWriter w(dir / "assignments.tsv", hash);
        w.line(kAssignmentsHeader);
        for (const CategoryAssignment& a : snapshot.assignments) {
            std::string row;
            row += std::to_string(a.member_page_id);
            row += '\t';
            row += escape_field(a.category_title);
            row += '\t';
            row += escape_field(a.sort_key);
            row += '\t';
            if (a.link_timestamp.has_value()) row += format_iso8601(*a.link_timestamp);
            w.line(row);
        }
        w.close();
        summary.bytes += w.bytes();
    }

    snapshot.meta.pages = snapshot.pages.size();
    snapshot.meta.assignments = snapshot.assignments.size();
    snapshot.meta.version = kSnapshotFormatVersion;
    snapshot.meta.sha256 = hash.hex_digest();

    nlohmann::json meta;
    meta["dump_time"] =
        snapshot.meta.dump_time.has_value() ? format_iso8601(*snapshot.meta.dump_time) : "";
    meta["pages"] = snapshot.meta.pages;
    meta["assignments"] = snapshot.meta.assignments;
    meta["version"] = snapshot.meta.version;
    meta["sha256"] = snapshot.meta.sha256;
    {
        std::ofstream out(dir / "meta.json", std::ios::binary);
        if (!out) throw IoError("cannot write " + (dir / "meta.json").string());
        std::string text = meta.dump(2);
        text.push_back('\n');
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw IoError("write failure on meta.json");
        summary.bytes += text.size();
    }
    summary.pages = snapshot.pages.size();
    summary.assignments = snapshot.assignments.size();
    return summary;
}

namespace storedetail {

inline std::vector<std::string> read_lines_hashed(const std::filesystem::path& path, Sha256& hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string content = buf.str();
    hash.update(content);
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < content.size()) {
        std::size_t nl = content.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(content.substr(start));
            break;
        }
        lines.push_back(content.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

}  // namespace storedetail

inline CorpusSnapshot read_corpus(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    using namespace storedetail;

    nlohmann::json meta;
    {
        std::ifstream in(dir / "meta.json", std::ios::binary);
        if (!in) throw IoError("cannot open " + (dir / "meta.json").string());
        try {
            in >> meta;
        } catch (const nlohmann::json::exception& e) {
            throw CorruptSnapshot(std::string("meta.json: ") + e.what());
        }
    }
    if (!meta.contains("version") || !meta["version"].is_number_integer())
        throw CorruptSnapshot("meta.json lacks a version");
    const int version = meta["version"].get<int>();
    if (version > kSnapshotFormatVersion)
        throw VersionMismatch("snapshot format version " + std::to_string(version) +
                              " is newer than supported " +
                              std::to_string(kSnapshotFormatVersion));

    Sha256 hash;
    std::vector<std::string> page_lines = read_lines_hashed(dir / "pages.tsv", hash);
    std::vector<std::string> assign_lines = read_lines_hashed(dir / "assignments.tsv", hash);
    const std::string digest = hash.hex_digest();
    const std::string expected = meta.value("sha256", std::string());
    if (digest != expected)
        throw ChecksumMismatch("snapshot checksum mismatch: computed " + digest + ", meta has " +
                               expected);

    if (page_lines.empty() || page_lines[0] != kPagesHeader)
        throw CorruptSnapshot("pages.tsv header missing or unrecognized");
    if (assign_lines.empty() || assign_lines[0] != kAssignmentsHeader)
        throw CorruptSnapshot("assignments.tsv header missing or unrecognized");

    CorpusSnapshot snapshot;
    snapshot.pages.reserve(page_lines.size() - 1);
    for (std::size_t i = 1; i < page_lines.size(); ++i) {
        std::vector<std::string> f = split_tabs(page_lines[i]);
        if (f.size() != 9) throw CorruptSnapshot("pages.tsv row with " + std::to_string(f.size()) +
                                                 " fields at line " + std::to_string(i + 1));
        PageRecord p;
        p.page_id = parse_i64(f[0], "page_id");
        p.title = unescape_field(f[1]);
        p.ns = ns_from_field(unescape_field(f[2]));
        auto ts = parse_iso8601(f[3]);
        if (!ts.has_value()) throw CorruptSnapshot("bad last_edit at line " + std::to_string(i + 1));
        p.last_edit = *ts;
        if (f[4] == "user") p.last_editor = AuthorRef::registered(unescape_field(f[5]));
        else if (f[4] == "ip") p.last_editor = AuthorRef::anonymous(unescape_field(f[5]));
        else throw CorruptSnapshot("bad editor_kind at line " + std::to_string(i + 1));
        p.text_bytes = static_cast<std::uint64_t>(parse_i64(f[6], "text_bytes"));
        p.word_count = static_cast<std::uint64_t>(parse_i64(f[7], "word_count"));
        if (f[8] != "0" && f[8] != "1") throw CorruptSnapshot("bad is_redirect flag");
        p.is_redirect = f[8] == "1";
        snapshot.pages.push_back(std::move(p));
    }
    snapshot.assignments.reserve(assign_lines.size() - 1);
    for (std::size_t i = 1; i < assign_lines.size(); ++i) {
        std::vector<std::string> f = split_tabs(assign_lines[i]);
        if (f.size() != 4)
            throw CorruptSnapshot("assignments.tsv row with " + std::to_string(f.size()) +
                                  " fields at line " + std::to_string(i + 1));
        CategoryAssignment a;
        a.member_page_id = parse_i64(f[0], "member_page_id");
        a.category_title = unescape_field(f[1]);
        a.sort_key = unescape_field(f[2]);
        if (!f[3].empty()) {
            auto ts = parse_iso8601(f[3]);
            if (!ts.has_value())
                throw CorruptSnapshot("bad link_timestamp at line " + std::to_string(i + 1));
            a.link_timestamp = *ts;
        }
        snapshot.assignments.push_back(std::move(a));
    }

    if (snapshot.pages.size() != meta.value("pages", std::uint64_t(0)) ||
        snapshot.assignments.size() != meta.value("assignments", std::uint64_t(0)))
        throw ChecksumMismatch("meta record counts disagree with table lengths");

    snapshot.meta.version = version;
    snapshot.meta.sha256 = digest;
    snapshot.meta.pages = snapshot.pages.size();
    snapshot.meta.assignments = snapshot.assignments.size();
    const std::string dump_time = meta.value("dump_time", std::string());
    if (!dump_time.empty()) {
        auto ts = parse_iso8601(dump_time);
        if (!ts.has_value()) throw CorruptSnapshot("bad dump_time in meta.json");
        snapshot.meta.dump_time = *ts;
    }
    return snapshot;
}

}  // namespace wikimap
