#pragma once

#include <cctype>
#include <cstdio>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wikimap {

struct BadColor : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// RGB color, serialized as 7-char lowercase "#rrggbb" everywhere.
struct RgbColor {
    std::uint8_t r = 0, g = 0, b = 0;

    static RgbColor parse(std::string_view hex) {
        if (hex.size() != 7 || hex[0] != '#') throw BadColor("expected #rrggbb: " + std::string(hex));
        auto nibble = [&](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            throw BadColor("bad hex digit in " + std::string(hex));
        };
        auto byte = [&](int i) {
            return static_cast<std::uint8_t>(nibble(hex[i]) * 16 + nibble(hex[i + 1]));
        };
        return {byte(1), byte(3), byte(5)};
    }

    std::string hex() const {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
        return buf;
    }

    // Channel-wise linear interpolation, t in [0,1], rounded to nearest.
    static RgbColor lerp(const RgbColor& from, const RgbColor& to, double t) {
        auto mix = [t](std::uint8_t a, std::uint8_t b) {
            const double v = static_cast<double>(a) + (static_cast<double>(b) - a) * t;
            int r = static_cast<int>(v + 0.5);
            if (r < 0) r = 0;
            if (r > 255) r = 255;
            return static_cast<std::uint8_t>(r);
        };
        return {mix(from.r, to.r), mix(from.g, to.g), mix(from.b, to.b)};
    }

    friend bool operator==(const RgbColor& a, const RgbColor& b) {
        return a.r == b.r && a.g == b.g && a.b == b.b;
    }
    friend bool operator!=(const RgbColor& a, const RgbColor& b) { return !(a == b); }
};

}  // namespace wikimap
