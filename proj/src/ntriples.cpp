#include "linktrail/ntriples.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace linktrail {

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    std::size_t line = 1;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    void skip_ws() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
};

[[noreturn]] void fail(const Cursor& c, const std::string& msg) { throw ParseError(c.line, msg); }

std::string read_uri(Cursor& c) {
    // caller consumed '<'
    std::string out;
    while (!c.done() && c.peek() != '>') {
        char ch = c.peek();
        if (ch == '\n' || ch == ' ' || ch == '\t') fail(c, "whitespace inside URI");
        out += ch;
        ++c.pos;
    }
    if (c.done()) fail(c, "unterminated URI");
    ++c.pos;  // '>'
    if (out.empty()) fail(c, "empty URI");
    return out;
}

std::string read_quoted_value(Cursor& c) {
    // caller consumed the opening quote; returns the unescaped value
    std::string out;
    while (!c.done() && c.peek() != '"') {
        char ch = c.peek();
        if (ch == '\n') fail(c, "unterminated literal");
        if (ch == '\\') {
            if (c.pos + 1 >= c.text.size()) fail(c, "dangling escape");
            char esc = c.text[c.pos + 1];
            switch (esc) {
                case 't': out += '\t'; break;
                case 'n': out += '\n'; break;
                case 'r': out += '\r'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'u':
                case 'U':
                    // pass-through, kept verbatim
                    out += '\\';
                    out += esc;
                    break;
                default: fail(c, std::string("unknown escape \\") + esc);
            }
            c.pos += 2;
        } else {
            out += ch;
            ++c.pos;
        }
    }
    if (c.done()) fail(c, "unterminated literal");
    ++c.pos;  // closing quote
    return out;
}

bool is_label_char(char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
}

std::string read_blank_label(Cursor& c) {
    // caller consumed "_:"
    std::string out;
    while (!c.done() && is_label_char(c.peek())) {
        out += c.peek();
        ++c.pos;
    }
    if (out.empty()) fail(c, "empty blank node label");
    return out;
}

Term read_literal(Cursor& c) {
    std::string value = read_quoted_value(c);
    std::string suffix;
    if (!c.done() && c.peek() == '@') {
        suffix += '@';
        ++c.pos;
        while (!c.done() && (std::isalnum(static_cast<unsigned char>(c.peek())) || c.peek() == '-')) {
            suffix += c.peek();
            ++c.pos;
        }
        if (suffix.size() == 1) fail(c, "empty language tag");
    } else if (c.pos + 1 < c.text.size() && c.text[c.pos] == '^' && c.text[c.pos + 1] == '^') {
        c.pos += 2;
        if (c.done() || c.peek() != '<') fail(c, "datatype must be a URI");
        ++c.pos;
        suffix = "^^<" + read_uri(c) + ">";
    }
    return literal(value, suffix);
}

Term read_term(Cursor& c, const std::string& blank_scope) {
    if (c.done()) fail(c, "unexpected end of statement");
    char ch = c.peek();
    if (ch == '<') {
        ++c.pos;
        return uri(read_uri(c));
    }
    if (ch == '"') {
        ++c.pos;
        return read_literal(c);
    }
    if (ch == '_') {
        if (c.pos + 1 >= c.text.size() || c.text[c.pos + 1] != ':') fail(c, "malformed blank node");
        c.pos += 2;
        std::string label = read_blank_label(c);
        if (!blank_scope.empty()) label = blank_scope + "_" + label;
        return blank(label);
    }
    fail(c, std::string("unexpected character '") + ch + "'");
}

}  // namespace

std::set<Triple> parse_ntriples(const std::string& text, const std::string& blank_scope) {
    std::set<Triple> out;
    Cursor c{text};
    while (!c.done()) {
        c.skip_ws();
        if (!c.done() && c.peek() == '\n') {
            ++c.pos;
            ++c.line;
            continue;
        }
        if (c.done()) break;
        if (c.peek() == '#') {
            while (!c.done() && c.peek() != '\n') ++c.pos;
            continue;
        }
        if (c.peek() == '\r') {
            ++c.pos;
            continue;
        }

        Term s = read_term(c, blank_scope);
        if (s.is_literal()) fail(c, "literal subject");
        c.skip_ws();
        Term p = read_term(c, blank_scope);
        if (!p.is_uri()) fail(c, "predicate must be a URI");
        c.skip_ws();
        Term o = read_term(c, blank_scope);
        c.skip_ws();
        if (c.done() || c.peek() != '.') fail(c, "statement must end with '.'");
        ++c.pos;
        c.skip_ws();
        if (!c.done() && c.peek() == '\r') ++c.pos;
        if (!c.done() && c.peek() != '\n') fail(c, "trailing content after '.'");
        out.insert(Triple{std::move(s), std::move(p), std::move(o)});
    }
    return out;
}

std::string triple_to_ntriples(const Triple& t) {
    return term_to_ntriples(t.s) + " " + term_to_ntriples(t.p) + " " + term_to_ntriples(t.o) + " .";
}

std::string serialize_ntriples(const std::set<Triple>& triples) {
    // Lines sorted lexicographically; this is the canonical order used
    // wherever a deterministic triple sequence is needed.
    std::vector<std::string> lines;
    lines.reserve(triples.size());
    for (const Triple& t : triples) lines.push_back(triple_to_ntriples(t));
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const std::string& line : lines) {
        out += line;
        out += '\n';
    }
    return out;
}

}  // namespace linktrail
