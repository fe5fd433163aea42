#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "adsl/diagnostic.hpp"

namespace adsl::dsl::detail {

enum class Tok {
    Ident, Int, Float, String,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket, Lt, Gt,
    Comma, Semi, Colon, Assign, DotDot, Plus, Minus, Star, Slash, Percent, At,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;  // identifier / literal spelling; decoded content for strings
    Span span;
};

struct LexResult {
    std::vector<Token> tokens;
    Diagnostics diagnostics;
};

/// Tokenizes UTF-8 source. `//` comments run to end of line. Non-ASCII
/// bytes are only legal inside comments and string literals.
LexResult lex(std::string_view src);

std::string_view token_name(Tok t);

}  // namespace adsl::dsl::detail
