#include "linktrail/query_parse.hpp"

#include <cctype>
#include <map>
#include <sstream>
#include <vector>

namespace linktrail {

namespace {

constexpr const char* kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";

bool is_name_char(char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
}

struct LineCursor {
    const std::string& line;
    std::size_t pos = 0;
    std::size_t lineno;

    bool done() const { return pos >= line.size(); }
    char peek() const { return line[pos]; }
    void skip_ws() {
        while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++pos;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(lineno, msg); }
};

PatternTerm read_position(LineCursor& c, const std::map<std::string, std::string>& prefixes) {
    c.skip_ws();
    if (c.done()) c.fail("incomplete triple pattern");
    char ch = c.peek();

    if (ch == '?') {
        ++c.pos;
        std::string name;
        while (!c.done() && is_name_char(c.peek())) {
            name += c.peek();
            ++c.pos;
        }
        if (name.empty()) c.fail("empty variable name");
        return Variable{name};
    }

    if (ch == '<') {
        ++c.pos;
        std::string u;
        while (!c.done() && c.peek() != '>') {
            if (std::isspace(static_cast<unsigned char>(c.peek()))) c.fail("whitespace inside URI");
            u += c.peek();
            ++c.pos;
        }
        if (c.done()) c.fail("unterminated URI");
        ++c.pos;
        if (u.empty()) c.fail("empty URI");
        return uri(u);
    }

    if (ch == '"') {
        ++c.pos;
        std::string value;
        while (!c.done() && c.peek() != '"') {
            if (c.peek() == '\\' && c.pos + 1 < c.line.size()) {
                char esc = c.line[c.pos + 1];
                switch (esc) {
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case 'r': value += '\r'; break;
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    default: value += '\\'; value += esc; break;
                }
                c.pos += 2;
            } else {
                value += c.peek();
                ++c.pos;
            }
        }
        if (c.done()) c.fail("unterminated literal");
        ++c.pos;
        std::string suffix;
        if (!c.done() && c.peek() == '@') {
            suffix += '@';
            ++c.pos;
            while (!c.done() && (std::isalnum(static_cast<unsigned char>(c.peek())) || c.peek() == '-')) {
                suffix += c.peek();
                ++c.pos;
            }
        } else if (c.pos + 1 < c.line.size() && c.line[c.pos] == '^' && c.line[c.pos + 1] == '^') {
            c.pos += 2;
            if (c.done() || c.peek() != '<') c.fail("datatype must be a URI");
            ++c.pos;
            std::string dt;
            while (!c.done() && c.peek() != '>') {
                dt += c.peek();
                ++c.pos;
            }
            if (c.done()) c.fail("unterminated datatype URI");
            ++c.pos;
            suffix = "^^<" + dt + ">";
        }
        return literal(value, suffix);
    }

    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '+') {
        std::string digits;
        if (ch == '-' || ch == '+') {
            digits += ch;
            ++c.pos;
        }
        while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek()))) {
            digits += c.peek();
            ++c.pos;
        }
        if (digits.empty() || !std::isdigit(static_cast<unsigned char>(digits.back()))) {
            c.fail("malformed number");
        }
        return literal(digits, std::string("^^<") + kXsdInteger + ">");
    }

    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        std::string prefix;
        while (!c.done() && c.peek() != ':') {
            if (std::isspace(static_cast<unsigned char>(c.peek()))) c.fail("malformed prefixed name");
            prefix += c.peek();
            ++c.pos;
        }
        if (c.done()) c.fail("malformed prefixed name (missing ':')");
        ++c.pos;
        std::string local;
        while (!c.done() && !std::isspace(static_cast<unsigned char>(c.peek()))) {
            local += c.peek();
            ++c.pos;
        }
        // a bare trailing '.' belongs to the statement, not the local name
        if (!local.empty() && local.back() == '.') {
            local.pop_back();
            --c.pos;
        }
        auto it = prefixes.find(prefix);
        if (it == prefixes.end()) c.fail("unknown prefix '" + prefix + ":'");
        return uri(it->second + local);
    }

    c.fail(std::string("unexpected character '") + ch + "'");
}

}  // namespace

BGPQuery parse_query(const std::string& text) {
    std::map<std::string, std::string> prefixes;
    std::vector<TriplePattern> patterns;

    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;

        if (line.compare(first, 6, "PREFIX") == 0 || line.compare(first, 6, "prefix") == 0) {
            std::istringstream ls(line.substr(first + 6));
            std::string name, iri;
            ls >> name >> iri;
            if (name.empty() || name.back() != ':' || iri.size() < 2 || iri.front() != '<' || iri.back() != '>') {
                throw ParseError(lineno, "malformed PREFIX declaration");
            }
            prefixes[name.substr(0, name.size() - 1)] = iri.substr(1, iri.size() - 2);
            continue;
        }

        LineCursor c{line, first, lineno};
        TriplePattern tp;
        tp.s = read_position(c, prefixes);
        tp.p = read_position(c, prefixes);
        tp.o = read_position(c, prefixes);
        c.skip_ws();
        if (!c.done() && c.peek() == '.') {
            ++c.pos;
            c.skip_ws();
        }
        if (!c.done()) c.fail("trailing content after pattern");
        if (is_variable(tp.p) == false && !as_term(tp.p).is_uri()) c.fail("predicate must be a URI");
        if (!is_variable(tp.s) && as_term(tp.s).is_literal()) c.fail("literal subject");
        patterns.push_back(std::move(tp));
    }

    if (patterns.empty()) throw ParseError(lineno == 0 ? 1 : lineno, "query has no triple patterns");
    return make_query(std::move(patterns));
}

}  // namespace linktrail
