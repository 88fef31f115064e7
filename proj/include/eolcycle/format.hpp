#pragma once

#include <optional>
#include <string_view>

namespace eolcycle {

enum class OutputFormat { Tsv, Json, Pretty };

inline std::optional<OutputFormat> parse_output_format(std::string_view s) {
    if (s == "tsv") return OutputFormat::Tsv;
    if (s == "json") return OutputFormat::Json;
    if (s == "pretty") return OutputFormat::Pretty;
    return std::nullopt;
}

} // namespace eolcycle
