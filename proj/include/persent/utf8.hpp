#ifndef PERSENT_UTF8_HPP
#define PERSENT_UTF8_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "persent/errors.hpp"

// Minimal UTF-8 helpers. Persian text handling needs codepoint-level
// operations (ZWNJ, Arabic presentation variants) which std::string does
// not give us; this is the small subset the pipeline needs.

namespace persent::utf8 {

inline constexpr char32_t ZWNJ = 0x200C;

// Decodes one codepoint starting at `pos`. Advances `pos` past it.
// Throws DataError on malformed sequences.
inline char32_t decode_one(std::string_view s, std::size_t& pos) {
    auto byte = [&](std::size_t i) -> std::uint8_t {
        return static_cast<std::uint8_t>(s[i]);
    };
    if (pos >= s.size()) throw DataError("utf-8: decode past end of string");
    std::uint8_t b0 = byte(pos);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        throw DataError("utf-8: invalid lead byte at offset " + std::to_string(pos));
    }
    if (pos + len > s.size())
        throw DataError("utf-8: truncated sequence at offset " + std::to_string(pos));
    for (int i = 1; i < len; ++i) {
        std::uint8_t b = byte(pos + i);
        if ((b & 0xC0) != 0x80)
            throw DataError("utf-8: invalid continuation byte at offset " +
                            std::to_string(pos + i));
        cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong encodings and surrogates.
    static constexpr char32_t min_for_len[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
        throw DataError("utf-8: invalid codepoint at offset " + std::to_string(pos));
    pos += len;
    return cp;
}

inline std::vector<char32_t> decode(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t pos = 0;
    while (pos < s.size()) out.push_back(decode_one(s, pos));
    return out;
}

inline void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append(out, cp);
    return out;
}

// Number of codepoints in a valid UTF-8 string.
inline std::size_t length(std::string_view s) {
    std::size_t n = 0, pos = 0;
    while (pos < s.size()) {
        decode_one(s, pos);
        ++n;
    }
    return n;
}

inline bool valid(std::string_view s) {
    try {
        std::size_t pos = 0;
        while (pos < s.size()) decode_one(s, pos);
        return true;
    } catch (const DataError&) {
        return false;
    }
}

}  // namespace persent::utf8

#endif  // PERSENT_UTF8_HPP
