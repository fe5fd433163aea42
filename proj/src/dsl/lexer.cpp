#include "lexer.hpp"

#include <cctype>

#include "adsl/rules.hpp"

namespace adsl::dsl::detail {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Length of the UTF-8 sequence starting at s[i], or 0 if malformed.
std::size_t utf8_length(std::string_view s, std::size_t i) {
    auto b = static_cast<unsigned char>(s[i]);
    std::size_t n = 0;
    if (b < 0x80) return 1;
    if ((b & 0xE0) == 0xC0) n = 2;
    else if ((b & 0xF0) == 0xE0) n = 3;
    else if ((b & 0xF8) == 0xF0) n = 4;
    else return 0;
    if (i + n > s.size()) return 0;
    for (std::size_t k = 1; k < n; ++k) {
        if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return 0;
    }
    return n;
}

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    LexResult run() {
        LexResult out;
        while (true) {
            skip_trivia(out.diagnostics);
            if (!out.diagnostics.empty()) break;
            if (pos_ >= src_.size()) {
                out.tokens.push_back(Token{Tok::End, "", span_at(pos_, 0)});
                break;
            }
            if (!next(out)) break;
        }
        return out;
    }

  private:
    Span span_at(std::size_t start, std::size_t len) const {
        // Recompute line/col for `start`; tracked incrementally for speed.
        return Span{line_at_start_, col_at_start_, static_cast<int>(len), start};
    }

    void advance(std::size_t n = 1) {
        for (std::size_t k = 0; k < n && pos_ < src_.size(); ++k) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    void mark() {
        start_ = pos_;
        line_at_start_ = line_;
        col_at_start_ = col_;
    }

    void skip_trivia(Diagnostics& diags) {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    std::size_t n = utf8_length(src_, pos_);
                    if (n == 0) {
                        mark();
                        diags.push_back(make_error(std::string(rules::kParseLex), span_at(pos_, 1),
                                                   "invalid UTF-8 byte in comment"));
                        return;
                    }
                    advance(n);
                }
            } else {
                return;
            }
        }
    }

    bool fail(LexResult& out, std::string msg, std::size_t len = 1) {
        out.diagnostics.push_back(make_error(std::string(rules::kParseLex), span_at(start_, len), std::move(msg)));
        return false;
    }

    void push(LexResult& out, Tok kind, std::string text) {
        out.tokens.push_back(Token{kind, std::move(text), span_at(start_, pos_ - start_)});
    }

    bool next(LexResult& out) {
        mark();
        char c = src_[pos_];
        if (is_ident_start(c)) {
            while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
            push(out, Tok::Ident, std::string(src_.substr(start_, pos_ - start_)));
            return true;
        }
        if (is_digit(c)) return number(out);
        if (c == '"') return string(out);
        if (c == '.' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '.') {
            advance(2);
            push(out, Tok::DotDot, "..");
            return true;
        }
        Tok t;
        switch (c) {
            case '(': t = Tok::LParen; break;
            case ')': t = Tok::RParen; break;
            case '{': t = Tok::LBrace; break;
            case '}': t = Tok::RBrace; break;
            case '[': t = Tok::LBracket; break;
            case ']': t = Tok::RBracket; break;
            case '<': t = Tok::Lt; break;
            case '>': t = Tok::Gt; break;
            case ',': t = Tok::Comma; break;
            case ';': t = Tok::Semi; break;
            case ':': t = Tok::Colon; break;
            case '=': t = Tok::Assign; break;
            case '+': t = Tok::Plus; break;
            case '-': t = Tok::Minus; break;
            case '*': t = Tok::Star; break;
            case '/': t = Tok::Slash; break;
            case '%': t = Tok::Percent; break;
            case '@': t = Tok::At; break;
            default: {
                std::size_t n = utf8_length(src_, pos_);
                if (n == 0) return fail(out, "invalid UTF-8 byte");
                if (n > 1) return fail(out, "non-ASCII character outside a string or comment", n);
                return fail(out, std::string("unexpected character '") + c + "'");
            }
        }
        advance();
        push(out, t, std::string(1, c));
        return true;
    }

    bool number(LexResult& out) {
        while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
        bool is_float = false;
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' && is_digit(src_[pos_ + 1])) {
            is_float = true;
            advance();
            while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && is_digit(src_[look])) {
                is_float = true;
                advance(look - pos_);
                while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
            }
        }
        if (pos_ < src_.size() && is_ident_start(src_[pos_])) {
            return fail(out, "malformed number literal", pos_ - start_ + 1);
        }
        push(out, is_float ? Tok::Float : Tok::Int, std::string(src_.substr(start_, pos_ - start_)));
        return true;
    }

    bool string(LexResult& out) {
        advance();  // opening quote
        std::string value;
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n') return fail(out, "unterminated string literal", pos_ - start_);
            char c = src_[pos_];
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                if (pos_ + 1 >= src_.size()) return fail(out, "unterminated string literal", pos_ - start_);
                char e = src_[pos_ + 1];
                if (e == '"' || e == '\\') {
                    value += e;
                } else if (e == 'n') {
                    value += '\n';
                } else {
                    return fail(out, std::string("unknown escape '\\") + e + "'", pos_ - start_ + 2);
                }
                advance(2);
                continue;
            }
            std::size_t n = utf8_length(src_, pos_);
            if (n == 0) return fail(out, "invalid UTF-8 byte in string literal", pos_ - start_ + 1);
            value.append(src_.substr(pos_, n));
            advance(n);
        }
        push(out, Tok::String, std::move(value));
        return true;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t start_ = 0;
    int line_ = 1;
    int col_ = 1;
    int line_at_start_ = 1;
    int col_at_start_ = 1;
};

}  // namespace

LexResult lex(std::string_view src) { return Lexer(src).run(); }

std::string_view token_name(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::Int: return "integer";
        case Tok::Float: return "float";
        case Tok::String: return "string";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Lt: return "'<'";
        case Tok::Gt: return "'>'";
        case Tok::Comma: return "','";
        case Tok::Semi: return "';'";
        case Tok::Colon: return "':'";
        case Tok::Assign: return "'='";
        case Tok::DotDot: return "'..'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Percent: return "'%'";
        case Tok::At: return "'@'";
        case Tok::End: return "end of input";
    }
    return "?";
}

}  // namespace adsl::dsl::detail
