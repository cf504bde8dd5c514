#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "persent/preprocess.hpp"

using namespace persent;

// UTF-8 byte fixtures (Persian script, spelled out so the contract is pinned):
//   ZWNJ        U+200C          "\xe2\x80\x8c"
//   Arabic YEH  U+064A          "\xd9\x8a"   -> Farsi YEH U+06CC "\xdb\x8c"
//   Arabic KAF  U+0643          "\xd9\x83"   -> KEHEH     U+06A9 "\xda\xa9"
//   mi  (prefix)  U+0645 U+06CC                "\xd9\x85\xdb\x8c"
//   ha  (suffix)  U+0647 U+0627                "\xd9\x87\xd8\xa7"
//   tar (suffix)  U+062A U+0631                "\xd8\xaa\xd8\xb1"
#define ZWNJ "\xe2\x80\x8c"
#define MI "\xd9\x85\xdb\x8c"
#define HA "\xd9\x87\xd8\xa7"
#define TAR "\xd8\xaa\xd8\xb1"
#define KETAB "\xda\xa9\xd8\xaa\xd8\xa7\xd8\xa8"  // ketab (book)
#define RAVAD "\xd8\xb1\xd9\x88\xd8\xaf"          // ravad (goes)

TEST_CASE("normalize maps Arabic variant letters to Persian forms", "[preprocess]") {
    CHECK(preprocess::normalize("\xd9\x8a") == "\xdb\x8c");      // YEH
    CHECK(preprocess::normalize("\xd9\x89") == "\xdb\x8c");      // ALEF MAKSURA
    CHECK(preprocess::normalize("\xd9\x83") == "\xda\xa9");      // KAF
    CHECK(preprocess::normalize("\xd8\xa9") == "\xd9\x87");      // TEH MARBUTA
    CHECK(preprocess::normalize("\xdb\x8c") == "\xdb\x8c");      // fixed point
}

TEST_CASE("normalize collapses separator runs", "[preprocess]") {
    CHECK(preprocess::normalize("a  \t b") == "a b");
    CHECK(preprocess::normalize("a\r\nb") == "a b");
    CHECK(preprocess::normalize("a\xc2\xa0" "b") == "a b");  // NBSP is whitespace
    // A run mixing ZWNJ with whitespace collapses to a space...
    CHECK(preprocess::normalize("a" ZWNJ " b") == "a b");
    // ...but a pure-ZWNJ run collapses to a single ZWNJ.
    CHECK(preprocess::normalize("a" ZWNJ ZWNJ "b") == "a" ZWNJ "b");
}

TEST_CASE("normalize trims leading and trailing separators", "[preprocess]") {
    CHECK(preprocess::normalize("  x  ") == "x");
    CHECK(preprocess::normalize(ZWNJ "x" ZWNJ) == "x");
    CHECK(preprocess::normalize("") == "");
    CHECK(preprocess::normalize("   ") == "");
}

TEST_CASE("normalize joins verb prefix mi- with ZWNJ", "[preprocess]") {
    CHECK(preprocess::normalize(MI " " RAVAD) == MI ZWNJ RAVAD);
    // Works even when the prefix was written with Arabic YEH.
    CHECK(preprocess::normalize("\xd9\x85\xd9\x8a " RAVAD) == MI ZWNJ RAVAD);
}

TEST_CASE("normalize joins plural/comparative suffixes with ZWNJ", "[preprocess]") {
    CHECK(preprocess::normalize(KETAB " " HA) == KETAB ZWNJ HA);
    CHECK(preprocess::normalize(KETAB " " TAR) == KETAB ZWNJ TAR);
    // An unrelated word pair keeps its space.
    CHECK(preprocess::normalize(KETAB " " RAVAD) == KETAB " " RAVAD);
}

TEST_CASE("normalize is idempotent", "[preprocess]") {
    std::string samples[] = {
        "  a \t b  ",
        MI " " RAVAD,
        KETAB " " HA,
        "a" ZWNJ ZWNJ "b",
        "\xd9\x83\xd9\x8a",
    };
    for (const auto& s : samples) {
        auto once = preprocess::normalize(s);
        CHECK(preprocess::normalize(once) == once);
    }
}

TEST_CASE("strip_punctuation removes ascii and Persian punctuation", "[preprocess]") {
    CHECK(preprocess::strip_punctuation("a,b.c!") == "abc");
    CHECK(preprocess::strip_punctuation("(x)[y]{z}") == "xyz");
    // Arabic question mark, Arabic comma, guillemets, ellipsis.
    CHECK(preprocess::strip_punctuation("a\xd8\x9f") == "a");
    CHECK(preprocess::strip_punctuation("a\xd8\x8c""b") == "ab");
    CHECK(preprocess::strip_punctuation("\xc2\xabq\xc2\xbb") == "q");
    CHECK(preprocess::strip_punctuation("w\xe2\x80\xa6") == "w");
    // Letters and digits pass through.
    CHECK(preprocess::strip_punctuation("a1" KETAB) == "a1" KETAB);
}

TEST_CASE("strip_digits removes ascii, Arabic-Indic and Persian digits", "[preprocess]") {
    CHECK(preprocess::strip_digits("a1b2c3") == "abc");
    CHECK(preprocess::strip_digits("\xd9\xa0\xd9\xa5x") == "x");  // U+0660, U+0665
    CHECK(preprocess::strip_digits("\xdb\xb0\xdb\xb9y") == "y");  // U+06F0, U+06F9
    CHECK(preprocess::strip_digits("nodigits") == "nodigits");
}

TEST_CASE("strip_single_chars keeps only multi-codepoint tokens", "[preprocess]") {
    std::vector<std::string> in = {"a", "ab", "\xdb\x8c", MI, ""};
    CHECK(preprocess::strip_single_chars(in) == std::vector<std::string>{"ab", MI});
}

TEST_CASE("tokenize splits on spaces only; ZWNJ never splits", "[preprocess]") {
    auto toks = preprocess::tokenize("ab cd" ZWNJ "ef  gh");
    CHECK(toks == std::vector<std::string>{"ab", "cd" ZWNJ "ef", "gh"});
    CHECK(preprocess::tokenize("").empty());
}

TEST_CASE("lemma dictionary normalizes entries on add", "[preprocess]") {
    preprocess::LemmaDictionary dict;
    dict.add("\xd9\x83\xd9\x8a", "base");  // Arabic forms
    // Lookup with the normalized Persian form hits.
    const std::string* hit = dict.lookup("\xda\xa9\xdb\x8c");
    REQUIRE(hit != nullptr);
    CHECK(*hit == "base");
    CHECK(dict.lookup("missing") == nullptr);
    CHECK(dict.size() == 1);
}

TEST_CASE("lemma dictionary loads tab-separated lines with comments", "[preprocess]") {
    std::stringstream in("# comment\nwalks\twalk\nbooks\tbook\n\n");
    auto dict = preprocess::LemmaDictionary::load(in, "dict");
    CHECK(dict.size() == 2);
    REQUIRE(dict.lookup("walks"));
    CHECK(*dict.lookup("walks") == "walk");

    std::stringstream bad("no-tab-here\n");
    CHECK_THROWS_AS(preprocess::LemmaDictionary::load(bad, "dict"), DataError);
}

TEST_CASE("lemmatize maps known surfaces and passes unknown through", "[preprocess]") {
    preprocess::LemmaDictionary dict;
    dict.add("books", "book");
    auto toks = preprocess::lemmatize({"books", "shelf"}, dict);
    REQUIRE(toks.size() == 2);
    CHECK(toks[0].surface == "books");
    CHECK(toks[0].lemma == "book");
    CHECK(toks[1].surface == "shelf");
    CHECK(toks[1].lemma == "shelf");
}

TEST_CASE("run_chain applies the five steps in order", "[preprocess]") {
    preprocess::LemmaDictionary dict;
    dict.add("walking", "walk");
    preprocess::StepTrace trace;
    auto toks = preprocess::run_chain("Walking, x  42 walking!", dict, &trace);

    CHECK(trace.normalized == "Walking, x 42 walking!");
    CHECK(trace.tokens == std::vector<std::string>{"Walking,", "x", "42", "walking!"});
    CHECK(trace.after_punctuation ==
          std::vector<std::string>{"Walking", "x", "42", "walking"});
    CHECK(trace.after_single_chars ==
          std::vector<std::string>{"Walking", "42", "walking"});
    CHECK(trace.after_digits == std::vector<std::string>{"Walking", "walking"});
    CHECK(trace.lemmas == std::vector<std::string>{"Walking", "walk"});

    REQUIRE(toks.size() == 2);
    CHECK(toks[0].surface == "Walking");  // case: no folding, dictionary is exact
    CHECK(toks[1].lemma == "walk");
}

TEST_CASE("digit stripping happens after single-char removal", "[preprocess]") {
    preprocess::LemmaDictionary dict;
    // "a1" survives single-char removal (2 cps) and then loses its digit.
    auto toks = preprocess::run_chain("a1", dict);
    REQUIRE(toks.size() == 1);
    CHECK(toks[0].surface == "a");
}

TEST_CASE("punctuation-only and digit-only tokens vanish", "[preprocess]") {
    preprocess::LemmaDictionary dict;
    CHECK(preprocess::run_chain("!!! 123 ,.", dict).empty());
    CHECK(preprocess::clean_text("!!! 123", dict) == std::nullopt);
}

TEST_CASE("clean_text joins lemmas with single spaces", "[preprocess]") {
    preprocess::LemmaDictionary dict;
    dict.add("cats", "cat");
    auto cleaned = preprocess::clean_text("  cats,  and dogs! ", dict);
    REQUIRE(cleaned.has_value());
    CHECK(*cleaned == "cat and dogs");
}

TEST_CASE("pipeline keeps label and id and flags empty results", "[preprocess]") {
    preprocess::LemmaDictionary dict;
    data::Row row{-1, "r9", "fine, thing"};
    auto p = preprocess::pipeline(row, dict);
    CHECK(p.label == -1);
    CHECK(p.source_id == "r9");
    CHECK_FALSE(p.empty_after_preprocess);
    REQUIRE(p.tokens.size() == 2);

    data::Row blank{1, "r10", "?!"};
    CHECK(preprocess::pipeline(blank, dict).empty_after_preprocess);
}

TEST_CASE("preprocess_dataset drops empty rows and tags metadata", "[preprocess]") {
    preprocess::LemmaDictionary dict;
    data::Dataset ds;
    ds.set_scheme(data::Scheme::five_class);
    ds.rows = {{2, "a", "good stuff!"}, {0, "b", "123"}, {-2, "c", "very bad."}};
    auto [out, report] = preprocess::preprocess_dataset(ds, dict);
    CHECK(report.input_count == 3);
    CHECK(report.output_count == 2);
    CHECK(report.dropped_empty == 1);
    REQUIRE(out.rows.size() == 2);
    CHECK(out.rows[0].text == "good stuff");
    CHECK(out.rows[1].text == "very bad");
    CHECK(out.preprocessed());
    CHECK(out.scheme() == data::Scheme::five_class);
}
