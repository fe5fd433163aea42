#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace adsl {

/// Source range of a token or node. 1-based line and column, byte length.
///
/// Spans are positional metadata: they never participate in structural
/// equality of the nodes that carry them, so two ASTs parsed from
/// differently formatted text compare equal.
struct Span {
    int line = 0;
    int col = 0;
    int len = 0;
    std::size_t offset = 0;

    friend bool operator==(const Span&, const Span&) { return true; }
};

enum class Severity { Error, Warning };

struct Diagnostic {
    std::string rule_id;
    Severity severity = Severity::Error;
    Span span;
    std::string message;
    std::optional<std::string> fix_hint;
};

using Diagnostics = std::vector<Diagnostic>;

Diagnostic make_error(std::string rule, Span span, std::string message,
                      std::optional<std::string> hint = std::nullopt);
Diagnostic make_warning(std::string rule, Span span, std::string message);

bool has_errors(const Diagnostics& diags);
std::size_t count_rule(const Diagnostics& diags, std::string_view rule);
bool has_rule(const Diagnostics& diags, std::string_view rule);

nlohmann::json to_json(const Diagnostic& d);
/// One JSON object, no trailing newline.
std::string to_json_line(const Diagnostic& d);
std::string to_json_lines(const Diagnostics& diags);

/// Either a value or the diagnostics explaining why there is none.
/// Warnings may accompany a value.
template <class T>
struct Outcome {
    std::optional<T> value;
    Diagnostics diagnostics;

    bool ok() const { return value.has_value(); }
    const T& operator*() const { return *value; }
    const T* operator->() const { return &*value; }
};

/// A fault that semantic checks should have made impossible.
class InternalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace adsl
