#include <catch2/catch_amalgamated.hpp>

#include "persent/errors.hpp"
#include "persent/utf8.hpp"

using namespace persent;

TEST_CASE("decode ascii", "[utf8]") {
    auto cps = utf8::decode("abc");
    REQUIRE(cps == std::vector<char32_t>{U'a', U'b', U'c'});
}

TEST_CASE("decode multibyte Persian text", "[utf8]") {
    // "سلام" = U+0633 U+0644 U+0627 U+0645
    auto cps = utf8::decode("\xd8\xb3\xd9\x84\xd8\xa7\xd9\x85");
    REQUIRE(cps.size() == 4);
    CHECK(cps[0] == 0x0633);
    CHECK(cps[1] == 0x0644);
    CHECK(cps[2] == 0x0627);
    CHECK(cps[3] == 0x0645);
}

TEST_CASE("decode 3- and 4-byte sequences", "[utf8]") {
    // U+2014 em dash (3 bytes), U+1F600 emoji (4 bytes)
    auto cps = utf8::decode("\xe2\x80\x94\xf0\x9f\x98\x80");
    REQUIRE(cps.size() == 2);
    CHECK(cps[0] == 0x2014);
    CHECK(cps[1] == 0x1F600);
}

TEST_CASE("encode round-trips decode", "[utf8]") {
    std::string samples[] = {
        "plain", "\xd9\x85\xdb\x8c\xe2\x80\x8c\xd8\xb1\xd9\x88\xd9\x85",
        "mixed ascii \xd9\x88 persian", "\xf0\x9f\x98\x80",
    };
    for (const auto& s : samples) {
        CHECK(utf8::encode(utf8::decode(s)) == s);
    }
}

TEST_CASE("append encodes a single code point", "[utf8]") {
    std::string out;
    utf8::append(out, U'a');
    utf8::append(out, utf8::ZWNJ);
    utf8::append(out, 0x0645);
    CHECK(out == "a\xe2\x80\x8c\xd9\x85");
}

TEST_CASE("decode_one advances position", "[utf8]") {
    std::string s = "a\xd9\x85";
    std::size_t pos = 0;
    CHECK(utf8::decode_one(s, pos) == U'a');
    CHECK(pos == 1);
    CHECK(utf8::decode_one(s, pos) == 0x0645);
    CHECK(pos == 3);
}

TEST_CASE("length counts code points not bytes", "[utf8]") {
    CHECK(utf8::length("abc") == 3);
    CHECK(utf8::length("\xd8\xb3\xd9\x84\xd8\xa7\xd9\x85") == 4);
}

TEST_CASE("decode_one throws on malformed input", "[utf8]") {
    std::size_t pos = 0;
    CHECK_THROWS_AS(utf8::decode_one("\xff", pos), DataError);
}

TEST_CASE("valid rejects malformed sequences", "[utf8]") {
    CHECK(utf8::valid("ok"));
    CHECK(utf8::valid(""));
    CHECK_FALSE(utf8::valid("\xff"));
    CHECK_FALSE(utf8::valid("\xd9"));          // truncated 2-byte sequence
    CHECK_FALSE(utf8::valid("\xe2\x80"));      // truncated 3-byte sequence
    CHECK_FALSE(utf8::valid("\x80"));          // stray continuation byte
    CHECK_FALSE(utf8::valid("\xc0\xaf"));      // overlong encoding
    CHECK_FALSE(utf8::valid("\xed\xa0\x80"));  // surrogate half
}

TEST_CASE("zwnj constant is U+200C", "[utf8]") {
    CHECK(utf8::ZWNJ == char32_t{0x200C});
    CHECK(utf8::encode({utf8::ZWNJ}) == "\xe2\x80\x8c");
}
