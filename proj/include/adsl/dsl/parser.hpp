#pragma once

#include <string_view>

#include "adsl/diagnostic.hpp"
#include "adsl/dsl/ast.hpp"

namespace adsl::dsl {

/// Parses one `.adsl` source. Never throws on malformed input: every
/// failure becomes at least one PARSE-* diagnostic with a span inside the
/// source.
Outcome<Program> parse_program(std::string_view source);

bool is_reserved_word(std::string_view word);

}  // namespace adsl::dsl
