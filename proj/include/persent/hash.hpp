#ifndef PERSENT_HASH_HPP
#define PERSENT_HASH_HPP

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "persent/errors.hpp"

// Content hashing for run provenance: every input file and vocabulary gets a
// stable content id recorded in run metadata and checkpoints. FNV-1a/64 keeps
// this dependency-free; ids are tagged with the algorithm name so the format
// can evolve.

namespace persent::hash {

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

inline std::string content_id(std::string_view bytes) {
    return "fnv1a64:" + hex64(fnv1a64(bytes));
}

inline std::string file_content_id(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file for hashing: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return content_id(ss.str());
}

}  // namespace persent::hash

#endif  // PERSENT_HASH_HPP
