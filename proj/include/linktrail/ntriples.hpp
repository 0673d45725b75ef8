#pragma once

#include <set>
#include <stdexcept>
#include <string>

#include "linktrail/rdf.hpp"

namespace linktrail {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Parses line-oriented N-Triples. Comment lines (#) and blank lines are
/// allowed; duplicate statements collapse (documents are triple sets).
/// When `blank_scope` is non-empty, blank node labels are rewritten to
/// "<scope>_<label>" so labels from different documents cannot collide.
std::set<Triple> parse_ntriples(const std::string& text, const std::string& blank_scope = "");

/// One statement per line, terms in canonical form, lines sorted; output
/// reparses to the identical set.
std::string serialize_ntriples(const std::set<Triple>& triples);

std::string triple_to_ntriples(const Triple& t);

}  // namespace linktrail
