#pragma once

#include <string>

#include "adsl/dsl/ast.hpp"

namespace adsl::dsl {

/// Canonical source text. Parsing the result yields a structurally equal
/// program; rendering twice is a fixpoint.
std::string render_program(const Program& p);

std::string render_expr(const Expr& e);

/// Shortest text that round-trips to the same double; always contains a
/// '.' or exponent so it re-lexes as a float.
std::string render_float(double v);

std::string quote_string(const std::string& s);

}  // namespace adsl::dsl
