#include "adsl/diagnostic.hpp"

#include <algorithm>

namespace adsl {

Diagnostic make_error(std::string rule, Span span, std::string message,
                      std::optional<std::string> hint) {
    return Diagnostic{std::move(rule), Severity::Error, span, std::move(message), std::move(hint)};
}

Diagnostic make_warning(std::string rule, Span span, std::string message) {
    return Diagnostic{std::move(rule), Severity::Warning, span, std::move(message), std::nullopt};
}

bool has_errors(const Diagnostics& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::size_t count_rule(const Diagnostics& diags, std::string_view rule) {
    return static_cast<std::size_t>(std::count_if(
        diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.rule_id == rule; }));
}

bool has_rule(const Diagnostics& diags, std::string_view rule) { return count_rule(diags, rule) > 0; }

nlohmann::json to_json(const Diagnostic& d) {
    nlohmann::json j;
    j["rule_id"] = d.rule_id;
    j["severity"] = d.severity == Severity::Error ? "error" : "warning";
    j["span"] = {{"line", d.span.line}, {"col", d.span.col}, {"len", d.span.len}};
    j["message"] = d.message;
    if (d.fix_hint) j["fix_hint"] = *d.fix_hint;
    return j;
}

std::string to_json_line(const Diagnostic& d) { return to_json(d).dump(); }

std::string to_json_lines(const Diagnostics& diags) {
    std::string out;
    for (const auto& d : diags) {
        out += to_json_line(d);
        out += '\n';
    }
    return out;
}

}  // namespace adsl
