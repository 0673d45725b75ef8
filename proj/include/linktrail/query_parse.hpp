#pragma once

#include <string>

#include "linktrail/ntriples.hpp"
#include "linktrail/rdf.hpp"

namespace linktrail {

/// Parses the query text format: optional PREFIX lines followed by one
/// triple pattern per line. Positions are `?var`, `<uri>`, `prefix:local`,
/// quoted literals (with optional @lang / ^^<uri>), or bare integers
/// (shorthand for xsd:integer literals). A trailing '.' per pattern is
/// optional. Throws ParseError with the offending line number.
BGPQuery parse_query(const std::string& text);

}  // namespace linktrail
