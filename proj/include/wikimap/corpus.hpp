#pragma once

// Core corpus records: pages, authors, category assignments, and the
// namespace machinery needed to split raw wiki titles into (namespace,
// title) pairs that join across the XML and SQL dumps.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wikimap/time.hpp"

namespace wikimap {

struct EmptyTitle : std::runtime_error {
    explicit EmptyTitle(const std::string& raw)
        : std::runtime_error("title is empty after normalization: \"" + raw + "\"") {}
};

// Canonical wiki title: underscores for spaces, single underscores only,
// first letter uppercased, no leading/trailing underscores.
inline std::string normalize_title(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_sep = false;
    for (char c : raw) {
        if (c == ' ' || c == '_') {
            if (!out.empty()) pending_sep = true;
            continue;
        }
        if (pending_sep) {
            out.push_back('_');
            pending_sep = false;
        }
        out.push_back(c);
    }
    if (out.empty()) throw EmptyTitle(std::string(raw));
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

enum class NsKind { Main, Category, Other };

struct Namespace {
    NsKind kind = NsKind::Main;
    std::string name;  // "" for Main, "Category", or the prefix for Other

    static Namespace main() { return {NsKind::Main, ""}; }
    static Namespace category() { return {NsKind::Category, "Category"}; }
    static Namespace other(std::string n) { return {NsKind::Other, std::move(n)}; }

    bool is_main() const { return kind == NsKind::Main; }
    bool is_category() const { return kind == NsKind::Category; }
    friend bool operator==(const Namespace& a, const Namespace& b) {
        return a.kind == b.kind && (a.kind != NsKind::Other || a.name == b.name);
    }
    friend bool operator!=(const Namespace& a, const Namespace& b) { return !(a == b); }
};

struct AuthorRef {
    enum class Kind { Registered, Anonymous };
    Kind kind = Kind::Anonymous;
    std::string name;  // username or IP literal

    static AuthorRef registered(std::string username) {
        return {Kind::Registered, std::move(username)};
    }
    static AuthorRef anonymous(std::string ip) { return {Kind::Anonymous, std::move(ip)}; }

    bool is_registered() const { return kind == Kind::Registered; }

    // Stable total order used for every deterministic tie-break on authors.
    std::string key() const {
        return (is_registered() ? std::string("user:") : std::string("ip:")) + name;
    }
    std::string display() const { return name; }

    friend bool operator==(const AuthorRef& a, const AuthorRef& b) {
        return a.kind == b.kind && a.name == b.name;
    }
    friend bool operator!=(const AuthorRef& a, const AuthorRef& b) { return !(a == b); }
    friend bool operator<(const AuthorRef& a, const AuthorRef& b) {
        if (a.kind != b.kind) return a.kind == Kind::Registered;
        return a.name < b.name;
    }
};

inline bool is_ipv4_literal(std::string_view s) {
    int parts = 0;
    std::size_t i = 0;
    while (i <= s.size()) {
        std::size_t j = i;
        int value = 0;
        while (j < s.size() && s[j] >= '0' && s[j] <= '9' && j - i < 4) {
            value = value * 10 + (s[j] - '0');
            ++j;
        }
        if (j == i || j - i > 3 || value > 255) return false;
        ++parts;
        if (j == s.size()) break;
        if (s[j] != '.') return false;
        i = j + 1;
        if (i == s.size()) return false;  // trailing dot
    }
    return parts == 4;
}

inline bool is_ipv6_literal(std::string_view s) {
    if (s.size() < 2) return false;
    int colons = 0, groups = 0, digits = 0;
    bool double_colon = false;
    std::size_t v4_tail = std::string_view::npos;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == ':') {
            ++colons;
            if (i + 1 < s.size() && s[i + 1] == ':') {
                if (double_colon) return false;
                double_colon = true;
            }
            if (digits > 0) ++groups;
            digits = 0;
        } else if (std::isxdigit(static_cast<unsigned char>(c))) {
            if (++digits > 4) return false;
        } else if (c == '.') {
            v4_tail = s.rfind(':');
            break;
        } else {
            return false;
        }
    }
    if (v4_tail != std::string_view::npos) {
        if (!is_ipv4_literal(s.substr(v4_tail + 1))) return false;
        ++groups;
    } else if (digits > 0) {
        ++groups;
    }
    if (colons < 2 && !double_colon) return false;
    if (groups > 8) return false;
    if (!double_colon && groups != 8) return false;
    return true;
}

inline bool is_ip_literal(std::string_view s) {
    return is_ipv4_literal(s) || is_ipv6_literal(s);
}

inline bool author_ref_valid(const AuthorRef& a) {
    if (a.is_registered()) return !a.name.empty();
    return is_ip_literal(a.name);
}

// One page of the cur dump, text body already reduced to size counters.
struct PageRecord {
    std::int64_t page_id = 0;
    std::string title;  // normalized, namespace prefix stripped
    Namespace ns;
    Timestamp last_edit = kWikiEpoch;
    AuthorRef last_editor;
    std::uint64_t text_bytes = 0;
    std::uint64_t word_count = 0;
    bool is_redirect = false;

    friend bool operator==(const PageRecord& a, const PageRecord& b) {
        return a.page_id == b.page_id && a.title == b.title && a.ns == b.ns &&
               a.last_edit == b.last_edit && a.last_editor == b.last_editor &&
               a.text_bytes == b.text_bytes && a.word_count == b.word_count &&
               a.is_redirect == b.is_redirect;
    }
    friend bool operator!=(const PageRecord& a, const PageRecord& b) { return !(a == b); }
};

// One categorylinks row: member page -> category title.
struct CategoryAssignment {
    std::int64_t member_page_id = 0;
    std::string category_title;  // normalized, no "Category:" prefix
    std::string sort_key;
    std::optional<Timestamp> link_timestamp;

    friend bool operator==(const CategoryAssignment& a, const CategoryAssignment& b) {
        return a.member_page_id == b.member_page_id && a.category_title == b.category_title &&
               a.sort_key == b.sort_key && a.link_timestamp == b.link_timestamp;
    }
    friend bool operator!=(const CategoryAssignment& a, const CategoryAssignment& b) {
        return !(a == b);
    }
};

// Prefix -> namespace id table. Lookups fold case and treat spaces and
// underscores alike, matching how MediaWiki resolves title prefixes.
class NamespaceMap {
  public:
    struct Entry {
        int id = 0;
        std::string name;  // canonical prefix, "" for Main
    };

    NamespaceMap() = default;

    static std::string fold(std::string_view prefix) {
        std::string key;
        key.reserve(prefix.size());
        bool pending = false;
        for (char c : prefix) {
            if (c == ' ' || c == '_') {
                if (!key.empty()) pending = true;
                continue;
            }
            if (pending) {
                key.push_back(' ');
                pending = false;
            }
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
        return key;
    }

    void add(int id, std::string_view name) {
        std::string key = fold(name);
        auto it = index_.find(key);
        if (it != index_.end()) {
            entries_[it->second] = Entry{id, std::string(name)};
            return;
        }
        index_.emplace(std::move(key), entries_.size());
        entries_.push_back(Entry{id, std::string(name)});
    }

    const Entry* find(std::string_view prefix) const {
        auto it = index_.find(fold(prefix));
        return it == index_.end() ? nullptr : &entries_[it->second];
    }

    bool has_main() const {
        const Entry* e = find("");
        return e != nullptr && e->id == 0;
    }
    bool has_category() const {
        const Entry* e = find("Category");
        return e != nullptr && e->id != 0;
    }
    bool empty() const { return entries_.empty(); }
    const std::vector<Entry>& entries() const { return entries_; }

    // The namespace table of a 2005-era English dump, used when the input
    // carries no siteinfo block.
    static NamespaceMap builtin_default() {
        NamespaceMap m;
        m.add(-2, "Media");
        m.add(-1, "Special");
        m.add(0, "");
        m.add(1, "Talk");
        m.add(2, "User");
        m.add(3, "User talk");
        m.add(4, "Wikipedia");
        m.add(5, "Wikipedia talk");
        m.add(6, "Image");
        m.add(7, "Image talk");
        m.add(8, "MediaWiki");
        m.add(9, "MediaWiki talk");
        m.add(10, "Template");
        m.add(11, "Template talk");
        m.add(12, "Help");
        m.add(13, "Help talk");
        m.add(14, "Category");
        m.add(15, "Category talk");
        m.add(100, "Portal");
        m.add(101, "Portal talk");
        return m;
    }

  private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Splits "Category:Information science" into its namespace and bare title.
// Unmatched prefixes stay part of a Main-namespace title.
inline std::pair<Namespace, std::string> classify_namespace(std::string_view raw_title,
                                                            const NamespaceMap& ns_map) {
    std::size_t colon = raw_title.find(':');
    if (colon != std::string_view::npos) {
        std::string_view prefix = raw_title.substr(0, colon);
        const NamespaceMap::Entry* e = ns_map.find(prefix);
        if (e != nullptr) {
            std::string rest(raw_title.substr(colon + 1));
            if (e->id == 0) return {Namespace::main(), std::move(rest)};
            if (e->id == 14 || NamespaceMap::fold(e->name) == "category")
                return {Namespace::category(), std::move(rest)};
            return {Namespace::other(e->name), std::move(rest)};
        }
    }
    return {Namespace::main(), std::string(raw_title)};
}

inline bool page_record_valid(const PageRecord& p) {
    if (p.page_id <= 0 || p.title.empty()) return false;
    if (p.title.find(':') == 0) return false;
    if (p.last_edit < kWikiEpoch) return false;
    return author_ref_valid(p.last_editor);
}

}  // namespace wikimap
