#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace wikimap {

// Sparse integer histogram: strictly increasing values, positive counts.
struct Histogram {
    struct Bin {
        std::int64_t value = 0;
        std::uint64_t count = 0;
        friend bool operator==(const Bin& a, const Bin& b) {
            return a.value == b.value && a.count == b.count;
        }
    };
    std::vector<Bin> bins;

    static Histogram from_counts(const std::map<std::int64_t, std::uint64_t>& counts) {
        Histogram h;
        h.bins.reserve(counts.size());
        for (const auto& [value, count] : counts) {
            if (count > 0) h.bins.push_back({value, count});
        }
        return h;
    }

    std::uint64_t total() const {
        std::uint64_t n = 0;
        for (const Bin& b : bins) n += b.count;
        return n;
    }

    bool empty() const { return bins.empty(); }

    std::string to_tsv() const {
        std::string out = "value\tcount\n";
        for (const Bin& b : bins)
            out += std::to_string(b.value) + "\t" + std::to_string(b.count) + "\n";
        return out;
    }

    friend bool operator==(const Histogram& a, const Histogram& b) { return a.bins == b.bins; }
};

}  // namespace wikimap
