#pragma once

// Parser for the categorylinks SQL dump: scans `INSERT INTO ... VALUES`
// statements tuple by tuple, decoding MySQL backslash escapes. Everything
// else in the file (DDL, comments, session settings) is skipped.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wikimap/corpus.hpp"
#include "wikimap/io.hpp"
#include "wikimap/xml_dump.hpp"  // ParseReport, WarningSink

namespace wikimap {

struct UnterminatedStringLiteral : std::runtime_error {
    std::uint64_t byte_offset = 0;
    explicit UnterminatedStringLiteral(std::uint64_t off)
        : std::runtime_error("unterminated string literal at byte " + std::to_string(off)),
          byte_offset(off) {}
};

struct SqlParseError : std::runtime_error {
    std::uint64_t byte_offset = 0;
    SqlParseError(const std::string& what, std::uint64_t off)
        : std::runtime_error("sql parse error at byte " + std::to_string(off) + ": " + what),
          byte_offset(off) {}
};

using AssignmentSink = std::function<void(CategoryAssignment&&)>;

struct SqlDumpOptions {
    WarningSink warn;
};

namespace sqldetail {

class Scanner {
  public:
    explicit Scanner(ByteSource& src) : src_(src) {}

    static constexpr int kEof = -1;
    static constexpr int kNone = -2;

    int peek() {
        if (pushed_ != kNone) return pushed_;
        if (pos_ == len_ && !fill()) return kEof;
        return static_cast<unsigned char>(buf_[pos_]);
    }

    int get() {
        if (pushed_ != kNone) {
            int c = pushed_;
            pushed_ = kNone;
            ++offset_;
            return c;
        }
        int c = peek();
        if (c != kEof) {
            ++pos_;
            ++offset_;
        }
        return c;
    }

    // Push back the character just read.
    void unget(int c) {
        pushed_ = c;
        --offset_;
    }

    std::uint64_t offset() const { return offset_; }

  private:
    bool fill() {
        len_ = src_.read(buf_, sizeof(buf_));
        pos_ = 0;
        return len_ > 0;
    }

    ByteSource& src_;
    char buf_[1 << 16];
    std::size_t pos_ = 0;
    std::size_t len_ = 0;
    std::uint64_t offset_ = 0;
    int pushed_ = kNone;
};

struct SqlValue {
    std::string text;
    bool is_null = false;
    bool is_string = false;
};

class CategorylinksParser {
  public:
    CategorylinksParser(ByteSource& src, const AssignmentSink& sink, const SqlDumpOptions& opts)
        : in_(src), sink_(sink), opts_(opts) {}

    ParseReport run() {
        for (;;) {
            skip_filler();
            if (in_.peek() == Scanner::kEof) break;
            std::string word = read_word();
            if (word.empty()) {
                in_.get();  // stray punctuation, e.g. a lone ';'
                continue;
            }
            if (iequal(word, "INSERT")) parse_insert();
            else skip_statement();
        }
        return report_;
    }

  private:
    void warn(std::string_view code, const std::string& detail) {
        ++report_.warnings[std::string(code)];
        if (opts_.warn) opts_.warn(code, detail);
    }

    static bool iequal(std::string_view a, std::string_view b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(a[i])) !=
                std::tolower(static_cast<unsigned char>(b[i])))
                return false;
        }
        return true;
    }

    static bool is_word_char(int c) {
        return std::isalnum(c) != 0 || c == '_';
    }

    void skip_line() {
        for (int c = in_.get(); c != Scanner::kEof && c != '\n'; c = in_.get()) {
        }
    }

    // Whitespace and comments between tokens.
    void skip_filler() {
        for (;;) {
            int c = in_.peek();
            if (c == Scanner::kEof) return;
            if (std::isspace(c) != 0) {
                in_.get();
            } else if (c == '#') {
                skip_line();
            } else if (c == '-') {
                in_.get();
                if (in_.peek() == '-') {
                    skip_line();
                } else {
                    in_.unget('-');  // minus sign of a value
                    return;
                }
            } else if (c == '/') {
                in_.get();
                if (in_.peek() != '*') {
                    in_.unget('/');
                    return;
                }
                in_.get();
                int prev = 0;
                for (int d = in_.get(); d != Scanner::kEof; d = in_.get()) {
                    if (prev == '*' && d == '/') break;
                    prev = d;
                }
            } else {
                return;
            }
        }
    }

    std::string read_word() {
        std::string w;
        while (is_word_char(in_.peek())) w.push_back(static_cast<char>(in_.get()));
        return w;
    }

    // Consume a quoted run, decoding nothing. Used while skipping.
    void skip_quoted(int quote) {
        std::uint64_t start = in_.offset() - 1;
        for (;;) {
            int c = in_.get();
            if (c == Scanner::kEof) throw UnterminatedStringLiteral(start);
            if (c == '\\' && quote != '`') {
                if (in_.get() == Scanner::kEof) throw UnterminatedStringLiteral(start);
            } else if (c == quote) {
                if (quote != '`' && in_.peek() == quote) in_.get();  // doubled quote
                else return;
            }
        }
    }

    void skip_statement() {
        for (;;) {
            int c = in_.get();
            if (c == Scanner::kEof) return;
            if (c == ';') return;
            if (c == '\'' || c == '"' || c == '`') skip_quoted(c);
        }
    }

    std::string read_string_literal(int quote) {
        std::uint64_t start = in_.offset() - 1;
        std::string out;
        for (;;) {
            int c = in_.get();
            if (c == Scanner::kEof) throw UnterminatedStringLiteral(start);
            if (c == '\\') {
                int e = in_.get();
                if (e == Scanner::kEof) throw UnterminatedStringLiteral(start);
                switch (e) {
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case 'r': out.push_back('\r'); break;
                    case '0': out.push_back('\0'); break;
                    case 'b': out.push_back('\b'); break;
                    case 'Z': out.push_back('\x1a'); break;
                    default: out.push_back(static_cast<char>(e)); break;
                }
            } else if (c == quote) {
                if (in_.peek() == quote) {
                    in_.get();
                    out.push_back(static_cast<char>(quote));
                } else {
                    return out;
                }
            } else {
                out.push_back(static_cast<char>(c));
            }
        }
    }

    SqlValue read_value() {
        skip_filler();
        int c = in_.peek();
        SqlValue v;
        if (c == '\'' || c == '"') {
            in_.get();
            v.text = read_string_literal(c);
            v.is_string = true;
            return v;
        }
        while (c != Scanner::kEof && c != ',' && c != ')') {
            v.text.push_back(static_cast<char>(in_.get()));
            c = in_.peek();
        }
        while (!v.text.empty() && std::isspace(static_cast<unsigned char>(v.text.back())) != 0)
            v.text.pop_back();
        if (iequal(v.text, "NULL")) v.is_null = true;
        return v;
    }

    void parse_insert() {
        // Scan forward to the VALUES keyword; the table name may be backticked.
        for (;;) {
            skip_filler();
            int c = in_.peek();
            if (c == Scanner::kEof)
                throw SqlParseError("unexpected end of INSERT statement", in_.offset());
            if (c == '`' || c == '"' || c == '\'') {
                in_.get();
                skip_quoted(c);
                continue;
            }
            if (c == ';') {
                in_.get();
                return;  // INSERT without VALUES; nothing to do
            }
            if (is_word_char(c)) {
                std::string word = read_word();
                if (iequal(word, "VALUES")) break;
                continue;
            }
            in_.get();
        }
        // Tuple list: (v,...),(v,...),... ;
        for (;;) {
            skip_filler();
            int c = in_.get();
            if (c == ';' || c == Scanner::kEof) return;
            if (c == ',') continue;
            if (c != '(')
                throw SqlParseError("expected '(' in VALUES list", in_.offset() - 1);
            std::vector<SqlValue> tuple;
            for (;;) {
                tuple.push_back(read_value());
                skip_filler();
                int d = in_.get();
                if (d == ')') break;
                if (d != ',')
                    throw SqlParseError("expected ',' or ')' in tuple", in_.offset() - 1);
            }
            emit_tuple(tuple);
        }
    }

    void emit_tuple(const std::vector<SqlValue>& tuple) {
        // categorylinks rows: (cl_from, cl_to, cl_sortkey[, cl_timestamp])
        if (tuple.size() != 3 && tuple.size() != 4) {
            warn("arity", "tuple with " + std::to_string(tuple.size()) + " fields skipped");
            return;
        }
        std::int64_t from = 0;
        bool ok = !tuple[0].text.empty() && !tuple[0].is_null;
        for (char ch : tuple[0].text) {
            if (ch < '0' || ch > '9' || from > (INT64_MAX - 9) / 10) {
                ok = false;
                break;
            }
            from = from * 10 + (ch - '0');
        }
        if (!ok || from <= 0) {
            warn("bad_tuple", "cl_from not a positive integer: \"" + tuple[0].text + "\"");
            return;
        }
        if (tuple[1].is_null) {
            warn("bad_tuple", "NULL cl_to");
            return;
        }
        CategoryAssignment a;
        a.member_page_id = from;
        try {
            a.category_title = normalize_title(tuple[1].text);
        } catch (const EmptyTitle&) {
            warn("empty_title", "empty cl_to in tuple for page " + std::to_string(from));
            return;
        }
        a.sort_key = tuple[2].is_null ? std::string() : tuple[2].text;
        if (tuple.size() == 4 && !tuple[3].is_null)
            a.link_timestamp = parse_compact14(tuple[3].text);
        ++report_.records;
        sink_(std::move(a));
    }

    Scanner in_;
    const AssignmentSink& sink_;
    const SqlDumpOptions& opts_;
    ParseReport report_;
};

}  // namespace sqldetail

inline ParseReport parse_categorylinks_sql(ByteSource& in, const AssignmentSink& sink,
                                           const SqlDumpOptions& opts = {}) {
    sqldetail::CategorylinksParser parser(in, sink, opts);
    return parser.run();
}

}  // namespace wikimap
