#pragma once

// Streaming parser for MediaWiki export XML. Only page metadata survives:
// revision text is reduced to byte/word counters on the fly and never
// accumulated, so memory stays bounded by one page element plus buffers.

#include <cctype>
#include <cstdint>
#include <cstring>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include <expat.h>

#include "wikimap/corpus.hpp"
#include "wikimap/io.hpp"

namespace wikimap {

struct MalformedXml : std::runtime_error {
    std::uint64_t line = 0;
    std::uint64_t column = 0;
    std::uint64_t byte_offset = 0;

    MalformedXml(const std::string& what, std::uint64_t line_, std::uint64_t col_,
                 std::uint64_t byte_)
        : std::runtime_error("malformed xml at line " + std::to_string(line_) + " col " +
                             std::to_string(col_) + " (byte " + std::to_string(byte_) +
                             "): " + what),
          line(line_),
          column(col_),
          byte_offset(byte_) {}
};

using PageSink = std::function<void(PageRecord&&)>;
using WarningSink = std::function<void(std::string_view code, const std::string& detail)>;

struct ParseReport {
    std::uint64_t records = 0;
    std::map<std::string, std::uint64_t> warnings;

    std::uint64_t warning_total() const {
        std::uint64_t n = 0;
        for (const auto& [code, count] : warnings) n += count;
        return n;
    }
};

struct XmlDumpOptions {
    const NamespaceMap* ns_map = nullptr;  // overrides siteinfo and the builtin default
    WarningSink warn;
};

namespace xmldetail {

class DumpHandler {
  public:
    DumpHandler(const PageSink& sink, const XmlDumpOptions& opts)
        : sink_(sink), opts_(opts) {}

    ParseReport& report() { return report_; }
    void set_parser(XML_Parser p) { parser_ = p; }
    std::exception_ptr pending_exception() const { return pending_; }

    void warn(std::string_view code, const std::string& detail) {
        ++report_.warnings[std::string(code)];
        if (opts_.warn) opts_.warn(code, detail);
    }

    void start(const XML_Char* name, const XML_Char** attrs) {
        ++depth_;
        std::string_view tag = local_name(name);
        if (depth_ == 2) {
            if (tag == "page") {
                in_page_ = true;
                reset_page();
            } else if (tag == "siteinfo") {
                in_siteinfo_ = true;
            }
        } else if (in_siteinfo_ && tag == "namespace") {
            ns_key_ = 0;
            ns_key_seen_ = false;
            for (const XML_Char** a = attrs; *a != nullptr; a += 2) {
                if (local_name(a[0]) == "key") {
                    ns_key_ = std::atoi(a[1]);
                    ns_key_seen_ = true;
                }
            }
            capture_ = Field::NsName;
            text_.clear();
        } else if (in_page_) {
            if (depth_ == 3) {
                if (tag == "title") begin_capture(Field::Title);
                else if (tag == "id") begin_capture(Field::PageId);
                else if (tag == "redirect") page_.is_redirect = true;
                else if (tag == "revision") begin_revision();
            } else if (in_revision_ && depth_ == 4) {
                if (tag == "timestamp") begin_capture(Field::Timestamp);
                else if (tag == "contributor") in_contributor_ = true;
                else if (tag == "text") in_text_ = true;
            } else if (in_contributor_ && depth_ == 5) {
                if (tag == "username") begin_capture(Field::Username);
                else if (tag == "ip") begin_capture(Field::Ip);
            }
        }
    }

    void end(const XML_Char* name) {
        std::string_view tag = local_name(name);
        if (in_siteinfo_ && tag == "namespace") {
            if (ns_key_seen_) siteinfo_map_.add(ns_key_, trim(text_));
            capture_ = Field::None;
        } else if (tag == "siteinfo") {
            in_siteinfo_ = false;
            finalize_siteinfo();
        } else if (in_page_) {
            if (in_contributor_ && depth_ == 5) {
                if (tag == "username") rev_username_ = text_, rev_has_username_ = true;
                else if (tag == "ip") rev_ip_ = text_, rev_has_ip_ = true;
                capture_ = Field::None;
            } else if (in_revision_ && depth_ == 4) {
                if (tag == "timestamp") rev_timestamp_text_ = text_;
                else if (tag == "contributor") in_contributor_ = false;
                else if (tag == "text") in_text_ = false;
                capture_ = Field::None;
            } else if (depth_ == 3) {
                if (tag == "title") page_title_raw_ = text_;
                else if (tag == "id" && !page_id_seen_) {
                    page_id_text_ = text_;
                    page_id_seen_ = true;
                } else if (tag == "revision") end_revision();
                capture_ = Field::None;
            } else if (tag == "page") {
                in_page_ = false;
                emit_page();
            }
        }
        --depth_;
    }

    void characters(const XML_Char* data, int len) {
        if (in_text_) {
            rev_text_bytes_ += static_cast<std::uint64_t>(len);
            for (int i = 0; i < len; ++i) {
                unsigned char c = static_cast<unsigned char>(data[i]);
                bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
                if (ws) {
                    rev_in_word_ = false;
                } else if (!rev_in_word_) {
                    rev_in_word_ = true;
                    ++rev_word_count_;
                }
                if (rev_text_head_.size() < 32) rev_text_head_.push_back(data[i]);
            }
            return;
        }
        if (capture_ != Field::None && text_.size() < kFieldCap)
            text_.append(data, static_cast<std::size_t>(len));
    }

    const NamespaceMap& effective_map() {
        if (opts_.ns_map != nullptr) return *opts_.ns_map;
        if (siteinfo_done_ && siteinfo_map_.has_category()) return siteinfo_map_;
        return default_map_;
    }

  private:
    enum class Field { None, Title, PageId, Timestamp, Username, Ip, NsName };
    static constexpr std::size_t kFieldCap = 1 << 20;

    static std::string_view local_name(const XML_Char* name) {
        // Expat is run without namespace processing; names arrive bare.
        return std::string_view(name);
    }

    static std::string trim(const std::string& s) {
        std::size_t b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        std::size_t e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    void begin_capture(Field f) {
        capture_ = f;
        text_.clear();
    }

    void reset_page() {
        page_ = PageRecord{};
        page_title_raw_.clear();
        page_id_text_.clear();
        page_id_seen_ = false;
        best_ts_ = -1;
        best_author_ = AuthorRef::anonymous("0.0.0.0");
        best_text_bytes_ = 0;
        best_word_count_ = 0;
        best_redirect_text_ = false;
        in_revision_ = false;
        in_contributor_ = false;
        in_text_ = false;
    }

    void begin_revision() {
        in_revision_ = true;
        rev_timestamp_text_.clear();
        rev_username_.clear();
        rev_ip_.clear();
        rev_has_username_ = false;
        rev_has_ip_ = false;
        rev_text_bytes_ = 0;
        rev_word_count_ = 0;
        rev_in_word_ = false;
        rev_text_head_.clear();
    }

    void end_revision() {
        in_revision_ = false;
        Timestamp ts = kWikiEpoch;
        auto parsed = parse_iso8601(trim(rev_timestamp_text_));
        if (parsed.has_value()) {
            ts = *parsed;
            if (ts < kWikiEpoch) {
                warn("timestamp_before_epoch", page_title_raw_ + ": " + rev_timestamp_text_);
                ts = kWikiEpoch;
            }
        } else {
            warn("missing_timestamp", page_title_raw_);
        }
        AuthorRef author;
        if (rev_has_username_ && !rev_username_.empty()) {
            author = AuthorRef::registered(rev_username_);
        } else if (rev_has_ip_ && is_ip_literal(rev_ip_)) {
            author = AuthorRef::anonymous(rev_ip_);
        } else if (rev_has_ip_) {
            warn("bad_ip", page_title_raw_ + ": \"" + rev_ip_ + "\"");
            author = AuthorRef::anonymous("0.0.0.0");
        } else {
            warn("missing_contributor", page_title_raw_);
            author = AuthorRef::anonymous("0.0.0.0");
        }
        // A cur dump carries one revision per page; if more appear, the
        // greatest timestamp wins and document order breaks ties.
        if (ts >= best_ts_) {
            best_ts_ = ts;
            best_author_ = std::move(author);
            best_text_bytes_ = rev_text_bytes_;
            best_word_count_ = rev_word_count_;
            best_redirect_text_ = text_head_is_redirect();
        }
    }

    bool text_head_is_redirect() const {
        std::size_t i = 0;
        while (i < rev_text_head_.size() &&
               std::isspace(static_cast<unsigned char>(rev_text_head_[i])))
            ++i;
        static constexpr std::string_view kTag = "#redirect";
        if (rev_text_head_.size() - i < kTag.size()) return false;
        for (std::size_t k = 0; k < kTag.size(); ++k) {
            if (std::tolower(static_cast<unsigned char>(rev_text_head_[i + k])) != kTag[k])
                return false;
        }
        return true;
    }

    void emit_page() {
        std::int64_t id = 0;
        for (char c : trim(page_id_text_)) {
            if (c < '0' || c > '9' || id > (INT64_MAX - 9) / 10) {
                id = 0;
                break;
            }
            id = id * 10 + (c - '0');
        }
        if (id <= 0) {
            warn("missing_page_id", page_title_raw_);
            return;
        }
        auto [ns, bare] = classify_namespace(trim(page_title_raw_), effective_map());
        std::string title;
        try {
            title = normalize_title(bare);
        } catch (const EmptyTitle&) {
            warn("empty_title", page_title_raw_);
            return;
        }
        page_.page_id = id;
        page_.title = std::move(title);
        page_.ns = std::move(ns);
        page_.last_edit = best_ts_ >= 0 ? best_ts_ : kWikiEpoch;
        page_.last_editor = std::move(best_author_);
        page_.text_bytes = best_text_bytes_;
        page_.word_count = best_word_count_;
        page_.is_redirect = page_.is_redirect || best_redirect_text_;
        ++report_.records;
        // Exceptions must not unwind through expat's C frames.
        try {
            sink_(std::move(page_));
        } catch (...) {
            pending_ = std::current_exception();
            if (parser_ != nullptr) XML_StopParser(parser_, XML_FALSE);
        }
    }

    void finalize_siteinfo() {
        siteinfo_done_ = true;
        if (siteinfo_map_.empty()) return;
        if (!siteinfo_map_.has_category()) {
            warn("siteinfo_no_category", "siteinfo lacks a Category namespace; using default");
            siteinfo_map_ = NamespaceMap::builtin_default();
        }
    }

    const PageSink& sink_;
    const XmlDumpOptions& opts_;
    XML_Parser parser_ = nullptr;
    std::exception_ptr pending_;
    ParseReport report_;
    NamespaceMap siteinfo_map_;
    NamespaceMap default_map_ = NamespaceMap::builtin_default();
    bool siteinfo_done_ = false;

    int depth_ = 0;
    bool in_siteinfo_ = false;
    bool in_page_ = false;
    bool in_revision_ = false;
    bool in_contributor_ = false;
    bool in_text_ = false;
    Field capture_ = Field::None;
    std::string text_;
    int ns_key_ = 0;
    bool ns_key_seen_ = false;

    PageRecord page_;
    std::string page_title_raw_;
    std::string page_id_text_;
    bool page_id_seen_ = false;

    std::string rev_timestamp_text_;
    std::string rev_username_;
    std::string rev_ip_;
    bool rev_has_username_ = false;
    bool rev_has_ip_ = false;
    std::uint64_t rev_text_bytes_ = 0;
    std::uint64_t rev_word_count_ = 0;
    bool rev_in_word_ = false;
    std::string rev_text_head_;

    Timestamp best_ts_ = -1;
    AuthorRef best_author_;
    std::uint64_t best_text_bytes_ = 0;
    std::uint64_t best_word_count_ = 0;
    bool best_redirect_text_ = false;
};

extern "C" {
inline void dump_start_element(void* ud, const XML_Char* name, const XML_Char** attrs) {
    static_cast<DumpHandler*>(ud)->start(name, attrs);
}
inline void dump_end_element(void* ud, const XML_Char* name) {
    static_cast<DumpHandler*>(ud)->end(name);
}
inline void dump_characters(void* ud, const XML_Char* data, int len) {
    static_cast<DumpHandler*>(ud)->characters(data, len);
}
}

}  // namespace xmldetail

inline ParseReport parse_xml_dump(ByteSource& in, const PageSink& sink,
                                  const XmlDumpOptions& opts = {}) {
    XML_Parser parser = XML_ParserCreate(nullptr);
    if (parser == nullptr) throw std::runtime_error("expat: parser allocation failed");
    struct Guard {
        XML_Parser p;
        ~Guard() { XML_ParserFree(p); }
    } guard{parser};

    xmldetail::DumpHandler handler(sink, opts);
    handler.set_parser(parser);
    XML_SetUserData(parser, &handler);
    XML_SetElementHandler(parser, xmldetail::dump_start_element, xmldetail::dump_end_element);
    XML_SetCharacterDataHandler(parser, xmldetail::dump_characters);

    constexpr std::size_t kChunk = 256 * 1024;
    for (;;) {
        void* buf = XML_GetBuffer(parser, static_cast<int>(kChunk));
        if (buf == nullptr) throw std::runtime_error("expat: buffer allocation failed");
        std::size_t got = in.read(static_cast<char*>(buf), kChunk);
        if (XML_ParseBuffer(parser, static_cast<int>(got), got == 0) != XML_STATUS_OK) {
            if (handler.pending_exception()) std::rethrow_exception(handler.pending_exception());
            throw MalformedXml(XML_ErrorString(XML_GetErrorCode(parser)),
                               XML_GetCurrentLineNumber(parser),
                               XML_GetCurrentColumnNumber(parser),
                               static_cast<std::uint64_t>(XML_GetCurrentByteIndex(parser)));
        }
        if (got == 0) break;
    }
    return handler.report();
}

}  // namespace wikimap
