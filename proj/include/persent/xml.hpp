#ifndef PERSENT_XML_HPP
#define PERSENT_XML_HPP

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "persent/errors.hpp"

// A small strict XML reader: elements, attributes, text, comments, CDATA,
// processing instructions, the five predefined entities and numeric
// character references. No DTDs, no namespaces beyond treating the prefixed
// name as opaque. Errors carry the byte offset into the input.

namespace persent::xml {

struct Attribute {
    std::string name;
    std::string value;
};

struct Handlers {
    // offset is the byte position of the '<' that opened the construct.
    std::function<void(const std::string& name, const std::vector<Attribute>&,
                       std::size_t offset)>
        on_start;
    std::function<void(const std::string& name, std::size_t offset)> on_end;
    std::function<void(const std::string& text, std::size_t offset)> on_text;
};

namespace detail {

inline bool is_name_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
           c == ':' || static_cast<unsigned char>(c) >= 0x80;
}

inline bool is_name_char(char c) {
    return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

class Parser {
public:
    Parser(std::string_view input, const Handlers& handlers)
        : in_(input), h_(handlers) {}

    void run() {
        skip_prolog_and_misc();
        if (eof()) fail(pos_, "no root element");
        parse_element();
        skip_misc();
        if (!eof()) fail(pos_, "content after root element");
        if (!stack_.empty()) fail(pos_, "unclosed element <" + stack_.back() + ">");
    }

private:
    std::string_view in_;
    const Handlers& h_;
    std::size_t pos_ = 0;
    std::vector<std::string> stack_;

    [[noreturn]] static void fail(std::size_t offset, const std::string& msg) {
        throw XmlError(offset, msg);
    }

    bool eof() const { return pos_ >= in_.size(); }
    char peek() const { return in_[pos_]; }
    bool starts_with(std::string_view s) const {
        return in_.substr(pos_, s.size()) == s;
    }
    void skip_ws() {
        while (!eof() && is_space(peek())) ++pos_;
    }

    void expect(char c) {
        if (eof() || peek() != c)
            fail(pos_, std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string read_name() {
        if (eof() || !is_name_start(peek())) fail(pos_, "expected a name");
        std::size_t start = pos_;
        while (!eof() && is_name_char(peek())) ++pos_;
        return std::string(in_.substr(start, pos_ - start));
    }

    // Resolves &...; starting at pos_ (on '&'). Appends to out.
    void read_entity(std::string& out) {
        std::size_t start = pos_;
        ++pos_;  // '&'
        std::size_t semi = in_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 10)
            fail(start, "unterminated entity reference");
        std::string_view name = in_.substr(pos_, semi - pos_);
        if (name == "amp") out += '&';
        else if (name == "lt") out += '<';
        else if (name == "gt") out += '>';
        else if (name == "apos") out += '\'';
        else if (name == "quot") out += '"';
        else if (!name.empty() && name[0] == '#') {
            bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
            std::size_t i = hex ? 2 : 1;
            if (i >= name.size()) fail(start, "empty character reference");
            unsigned long cp = 0;
            for (; i < name.size(); ++i) {
                char c = name[i];
                int d;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
                else fail(start, "bad character reference");
                cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(d);
                if (cp > 0x10FFFF) fail(start, "character reference out of range");
            }
            append_utf8(out, static_cast<char32_t>(cp));
        } else {
            fail(start, "unknown entity &" + std::string(name) + ";");
        }
        pos_ = semi + 1;
    }

    static void append_utf8(std::string& out, char32_t cp) {
        if (cp < 0x80) out.push_back(static_cast<char>(cp));
        else if (cp < 0x800) {
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

    void skip_comment() {
        std::size_t start = pos_;
        pos_ += 4;  // "<!--"
        std::size_t end = in_.find("-->", pos_);
        if (end == std::string_view::npos) fail(start, "unterminated comment");
        pos_ = end + 3;
    }

    void skip_pi() {
        std::size_t start = pos_;
        pos_ += 2;  // "<?"
        std::size_t end = in_.find("?>", pos_);
        if (end == std::string_view::npos)
            fail(start, "unterminated processing instruction");
        pos_ = end + 2;
    }

    void skip_doctype() {
        std::size_t start = pos_;
        // Consume until the matching '>' (internal subsets use brackets).
        int depth = 0;
        while (!eof()) {
            char c = peek();
            ++pos_;
            if (c == '<') ++depth;
            else if (c == '[') ++depth;
            else if (c == ']') --depth;
            else if (c == '>') {
                if (depth == 0) return;
                --depth;
            }
        }
        fail(start, "unterminated DOCTYPE");
    }

    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) skip_comment();
            else if (starts_with("<?")) skip_pi();
            else return;
        }
    }

    void skip_prolog_and_misc() {
        skip_misc();
        if (starts_with("<!DOCTYPE")) {
            skip_doctype();
            skip_misc();
        }
    }

    std::vector<Attribute> parse_attributes() {
        std::vector<Attribute> attrs;
        for (;;) {
            skip_ws();
            if (eof()) fail(pos_, "unterminated start tag");
            char c = peek();
            if (c == '>' || c == '/') return attrs;
            std::size_t name_offset = pos_;
            Attribute a;
            a.name = read_name();
            for (const auto& prev : attrs)
                if (prev.name == a.name)
                    fail(name_offset, "duplicate attribute " + a.name);
            skip_ws();
            expect('=');
            skip_ws();
            if (eof() || (peek() != '"' && peek() != '\''))
                fail(pos_, "attribute value must be quoted");
            char quote = peek();
            ++pos_;
            while (!eof() && peek() != quote) {
                if (peek() == '<') fail(pos_, "'<' in attribute value");
                if (peek() == '&') read_entity(a.value);
                else {
                    a.value += peek();
                    ++pos_;
                }
            }
            expect(quote);
            attrs.push_back(std::move(a));
        }
    }

    void parse_element() {
        std::size_t open_offset = pos_;
        expect('<');
        std::string name = read_name();
        std::vector<Attribute> attrs = parse_attributes();
        skip_ws();
        if (starts_with("/>")) {
            pos_ += 2;
            if (h_.on_start) h_.on_start(name, attrs, open_offset);
            if (h_.on_end) h_.on_end(name, open_offset);
            return;
        }
        expect('>');
        if (h_.on_start) h_.on_start(name, attrs, open_offset);
        stack_.push_back(name);
        parse_content();
        // parse_content returns with pos_ on "</".
        std::size_t close_offset = pos_;
        pos_ += 2;
        std::string close_name = read_name();
        if (close_name != name)
            fail(close_offset, "mismatched close tag </" + close_name +
                                   "> for <" + name + ">");
        skip_ws();
        expect('>');
        stack_.pop_back();
        if (h_.on_end) h_.on_end(name, close_offset);
    }

    void parse_content() {
        std::string text;
        std::size_t text_offset = pos_;
        auto flush_text = [&] {
            if (!text.empty()) {
                if (h_.on_text) h_.on_text(text, text_offset);
                text.clear();
            }
        };
        while (!eof()) {
            char c = peek();
            if (c == '<') {
                if (starts_with("</")) {
                    flush_text();
                    return;
                }
                if (starts_with("<!--")) {
                    skip_comment();
                } else if (starts_with("<![CDATA[")) {
                    std::size_t start = pos_;
                    pos_ += 9;
                    std::size_t end = in_.find("]]>", pos_);
                    if (end == std::string_view::npos)
                        fail(start, "unterminated CDATA section");
                    text.append(in_.substr(pos_, end - pos_));
                    pos_ = end + 3;
                } else if (starts_with("<?")) {
                    skip_pi();
                } else {
                    flush_text();
                    parse_element();
                    text_offset = pos_;
                }
            } else if (c == '&') {
                read_entity(text);
            } else {
                text += c;
                ++pos_;
            }
        }
        fail(text_offset, "unexpected end of input inside element <" +
                              (stack_.empty() ? std::string("?") : stack_.back()) +
                              ">");
    }
};

}  // namespace detail

inline void parse(std::string_view input, const Handlers& handlers) {
    detail::Parser(input, handlers).run();
}

}  // namespace persent::xml

#endif  // PERSENT_XML_HPP
