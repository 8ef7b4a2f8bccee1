#pragma once

// Corpus statistics over a snapshot. Conventions used throughout:
//   - "article" means any Main-namespace page, redirects included;
//   - authorship is last-editor only (the cur table has no edit history);
//   - assignments are deduplicated on (member_page_id, category_title) and
//     only count when the member page exists in the snapshot;
//   - the category universe for membership statistics is the union of
//     Category-namespace pages and categories referenced by at least one
//     article assignment (categories can exist as labels without a page).

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "wikimap/corpus.hpp"
#include "wikimap/corpus_store.hpp"
#include "wikimap/histogram.hpp"

namespace wikimap {

struct StatsReport {
    bool empty = false;
    std::uint64_t article_count = 0;
    std::uint64_t category_count = 0;  // pages in the Category namespace
    std::uint64_t unique_author_count = 0;
    std::uint64_t uncategorized_article_count = 0;
    double mean_categories_per_article = 0.0;
    double mean_categories_per_categorized_article = 0.0;
    std::uint64_t categories_unassigned_count = 0;
    std::uint64_t categories_single_article_count = 0;
    std::uint64_t registered_single_edit_authors = 0;
    double mean_pages_per_registered_author = 0.0;
    std::uint64_t anon_last_edited_pages = 0;
    double mean_article_bytes = 0.0;
    std::uint64_t total_words = 0;

    friend bool operator==(const StatsReport& a, const StatsReport& b) {
        return a.empty == b.empty && a.article_count == b.article_count &&
               a.category_count == b.category_count &&
               a.unique_author_count == b.unique_author_count &&
               a.uncategorized_article_count == b.uncategorized_article_count &&
               a.mean_categories_per_article == b.mean_categories_per_article &&
               a.mean_categories_per_categorized_article ==
                   b.mean_categories_per_categorized_article &&
               a.categories_unassigned_count == b.categories_unassigned_count &&
               a.categories_single_article_count == b.categories_single_article_count &&
               a.registered_single_edit_authors == b.registered_single_edit_authors &&
               a.mean_pages_per_registered_author == b.mean_pages_per_registered_author &&
               a.anon_last_edited_pages == b.anon_last_edited_pages &&
               a.mean_article_bytes == b.mean_article_bytes && a.total_words == b.total_words;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["empty"] = empty;
        j["article_count"] = article_count;
        j["category_count"] = category_count;
        j["unique_author_count"] = unique_author_count;
        j["uncategorized_article_count"] = uncategorized_article_count;
        j["mean_categories_per_article"] = mean_categories_per_article;
        j["mean_categories_per_categorized_article"] = mean_categories_per_categorized_article;
        j["categories_unassigned_count"] = categories_unassigned_count;
        j["categories_single_article_count"] = categories_single_article_count;
        j["registered_single_edit_authors"] = registered_single_edit_authors;
        j["mean_pages_per_registered_author"] = mean_pages_per_registered_author;
        j["anon_last_edited_pages"] = anon_last_edited_pages;
        j["mean_article_bytes"] = mean_article_bytes;
        j["total_words"] = total_words;
        return j;
    }
};

struct TimelineRow {
    int month_idx = 0;  // year*12 + month-1
    std::uint64_t articles = 0;
    std::uint64_t categories = 0;
    std::uint64_t contributors = 0;

    friend bool operator==(const TimelineRow& a, const TimelineRow& b) {
        return a.month_idx == b.month_idx && a.articles == b.articles &&
               a.categories == b.categories && a.contributors == b.contributors;
    }
};
using Timeline = std::vector<TimelineRow>;

enum class NsFilter { Main, Category, All };

namespace statsdetail {

// Deduplicated assignments joined against the page table.
struct JoinedAssignments {
    // page index -> sorted distinct category titles (Main-ns pages only)
    std::unordered_map<std::int64_t, std::set<std::string>> by_article;
    // category title -> count of distinct member articles
    std::map<std::string, std::uint64_t> members_per_category;
    std::uint64_t total_article_assignments = 0;
};

inline JoinedAssignments join_assignments(const CorpusSnapshot& s) {
    std::unordered_map<std::int64_t, const PageRecord*> by_id;
    by_id.reserve(s.pages.size());
    for (const PageRecord& p : s.pages) by_id.emplace(p.page_id, &p);

    JoinedAssignments out;
    for (const CategoryAssignment& a : s.assignments) {
        auto it = by_id.find(a.member_page_id);
        if (it == by_id.end() || !it->second->ns.is_main()) continue;
        auto [slot, inserted] = out.by_article[a.member_page_id].insert(a.category_title);
        if (!inserted) continue;
        ++out.total_article_assignments;
        ++out.members_per_category[a.category_title];
    }
    return out;
}

}  // namespace statsdetail

inline StatsReport corpus_counts(const CorpusSnapshot& s) {
    StatsReport r;
    if (s.pages.empty() && s.assignments.empty()) {
        r.empty = true;
        return r;
    }

    const statsdetail::JoinedAssignments joined = statsdetail::join_assignments(s);

    std::set<AuthorRef> all_authors;
    std::set<AuthorRef> registered_main_authors;
    std::map<AuthorRef, std::uint64_t> main_pages_per_author;
    std::uint64_t categorized_articles = 0;
    std::uint64_t article_bytes = 0;
    std::set<std::string> category_page_titles;

    for (const PageRecord& p : s.pages) {
        all_authors.insert(p.last_editor);
        if (p.ns.is_category()) {
            ++r.category_count;
            category_page_titles.insert(p.title);
        }
        if (!p.ns.is_main()) continue;
        ++r.article_count;
        article_bytes += p.text_bytes;
        r.total_words += p.word_count;
        if (p.last_editor.is_registered()) {
            registered_main_authors.insert(p.last_editor);
            ++main_pages_per_author[p.last_editor];
        } else {
            ++r.anon_last_edited_pages;
        }
        if (joined.by_article.count(p.page_id) > 0) ++categorized_articles;
    }
    r.unique_author_count = all_authors.size();
    r.uncategorized_article_count = r.article_count - categorized_articles;

    if (r.article_count > 0) {
        r.mean_categories_per_article =
            static_cast<double>(joined.total_article_assignments) /
            static_cast<double>(r.article_count);
        r.mean_article_bytes =
            static_cast<double>(article_bytes) / static_cast<double>(r.article_count);
    }
    if (categorized_articles > 0) {
        r.mean_categories_per_categorized_article =
            static_cast<double>(joined.total_article_assignments) /
            static_cast<double>(categorized_articles);
    }

    // Unassigned/single-article counts are over Category-namespace pages;
    // pageless labels show up only in articles_per_category_hist.
    for (const std::string& title : category_page_titles) {
        auto it = joined.members_per_category.find(title);
        const std::uint64_t members = it == joined.members_per_category.end() ? 0 : it->second;
        if (members == 0) ++r.categories_unassigned_count;
        if (members == 1) ++r.categories_single_article_count;
    }

    std::uint64_t registered_main_pages = 0;
    for (const auto& [author, count] : main_pages_per_author) {
        registered_main_pages += count;
        if (count == 1) ++r.registered_single_edit_authors;
    }
    if (!registered_main_authors.empty()) {
        r.mean_pages_per_registered_author = static_cast<double>(registered_main_pages) /
                                             static_cast<double>(registered_main_authors.size());
    }
    return r;
}

inline Histogram categories_per_article_hist(const CorpusSnapshot& s) {
    const statsdetail::JoinedAssignments joined = statsdetail::join_assignments(s);
    std::map<std::int64_t, std::uint64_t> counts;
    for (const PageRecord& p : s.pages) {
        if (!p.ns.is_main()) continue;
        auto it = joined.by_article.find(p.page_id);
        const std::int64_t v = it == joined.by_article.end()
                                   ? 0
                                   : static_cast<std::int64_t>(it->second.size());
        ++counts[v];
    }
    return Histogram::from_counts(counts);
}

inline Histogram articles_per_category_hist(const CorpusSnapshot& s) {
    const statsdetail::JoinedAssignments joined = statsdetail::join_assignments(s);
    std::map<std::int64_t, std::uint64_t> counts;
    std::set<std::string> seen;
    for (const PageRecord& p : s.pages) {
        if (!p.ns.is_category() || !seen.insert(p.title).second) continue;
        auto it = joined.members_per_category.find(p.title);
        const std::int64_t v =
            it == joined.members_per_category.end() ? 0 : static_cast<std::int64_t>(it->second);
        ++counts[v];
    }
    for (const auto& [title, members] : joined.members_per_category) {
        if (seen.count(title) == 0) ++counts[static_cast<std::int64_t>(members)];
    }
    return Histogram::from_counts(counts);
}

inline std::vector<std::pair<std::string, std::uint64_t>> top_categories(const CorpusSnapshot& s,
                                                                         std::size_t n) {
    const statsdetail::JoinedAssignments joined = statsdetail::join_assignments(s);
    std::vector<std::pair<std::string, std::uint64_t>> all(joined.members_per_category.begin(),
                                                           joined.members_per_category.end());
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (all.size() > n) all.resize(n);
    return all;
}

inline std::vector<std::pair<AuthorRef, std::uint64_t>> author_activity(const CorpusSnapshot& s,
                                                                        std::size_t k,
                                                                        NsFilter filter) {
    std::map<AuthorRef, std::uint64_t> counts;
    for (const PageRecord& p : s.pages) {
        if (filter == NsFilter::Main && !p.ns.is_main()) continue;
        if (filter == NsFilter::Category && !p.ns.is_category()) continue;
        ++counts[p.last_editor];
    }
    std::vector<std::pair<AuthorRef, std::uint64_t>> all(counts.begin(), counts.end());
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first.key() < b.first.key();
    });
    if (all.size() > k) all.resize(k);
    return all;
}

inline Timeline timeline(const CorpusSnapshot& s) {
    if (s.pages.empty()) return {};
    Timestamp lo = s.pages.front().last_edit;
    Timestamp hi = lo;
    for (const PageRecord& p : s.pages) {
        lo = std::min(lo, p.last_edit);
        hi = std::max(hi, p.last_edit);
    }
    const int first = month_index(lo);
    const int last = month_index(hi);

    struct MonthDelta {
        std::uint64_t articles = 0;
        std::uint64_t categories = 0;
        std::vector<const AuthorRef*> authors;
    };
    std::vector<MonthDelta> deltas(static_cast<std::size_t>(last - first + 1));
    for (const PageRecord& p : s.pages) {
        MonthDelta& d = deltas[static_cast<std::size_t>(month_index(p.last_edit) - first)];
        if (p.ns.is_main()) ++d.articles;
        if (p.ns.is_category()) ++d.categories;
        d.authors.push_back(&p.last_editor);
    }

    Timeline out;
    out.reserve(deltas.size());
    std::set<AuthorRef> seen_authors;
    std::uint64_t articles = 0, categories = 0;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        articles += deltas[i].articles;
        categories += deltas[i].categories;
        for (const AuthorRef* a : deltas[i].authors) seen_authors.insert(*a);
        out.push_back({first + static_cast<int>(i), articles, categories,
                       static_cast<std::uint64_t>(seen_authors.size())});
    }
    return out;
}

inline std::string timeline_to_tsv(const Timeline& t) {
    std::string out = "month\tarticles\tcategories\tcontributors\n";
    for (const TimelineRow& row : t) {
        out += format_month(row.month_idx) + "\t" + std::to_string(row.articles) + "\t" +
               std::to_string(row.categories) + "\t" + std::to_string(row.contributors) + "\n";
    }
    return out;
}

}  // namespace wikimap
