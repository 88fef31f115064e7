#pragma once

#include <array>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "eolcycle/eol.hpp"
#include "eolcycle/error.hpp"
#include "eolcycle/format.hpp"
#include "eolcycle/term.hpp"

namespace eolcycle {

/// Deployment settings. Precedence: flags > EOLCYCLE_* environment > file.
struct Config {
    HealthThresholds thresholds;
    RulesetOptions ruleset;
    std::optional<std::string> ruleset_path;
    std::optional<OutputFormat> format;
    bool strict = false;
};

inline constexpr std::string_view kEnvPrefix = "EOLCYCLE_";

inline constexpr std::array<std::string_view, 7> kConfigKeys{
    "green_min", "amber_min", "eol_window", "reconciliation", "ruleset", "format", "strict"};

namespace detail {

inline std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

inline bool parse_flag(std::string_view key, std::string_view v) {
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw Error(ErrorCode::ConfigError, std::string(key) + ": expected a boolean, got '" + std::string(v) + "'");
}

inline double parse_real(std::string_view key, std::string_view v) {
    auto d = parse_double(v);
    if (!d) throw Error(ErrorCode::ConfigError, std::string(key) + ": expected a number, got '" + std::string(v) + "'");
    return *d;
}

} // namespace detail

/// Sets one key; throws config-error on unknown keys or bad values.
inline void set_config_value(Config& c, std::string_view key, std::string_view value) {
    if (key == "green_min") {
        c.thresholds.green_min = detail::parse_real(key, value);
    } else if (key == "amber_min") {
        c.thresholds.amber_min = detail::parse_real(key, value);
    } else if (key == "eol_window") {
        auto v = detail::parse_int64(value);
        if (!v) throw Error(ErrorCode::ConfigError, "eol_window: expected an integer");
        c.ruleset.eol_window = *v;
    } else if (key == "reconciliation") {
        c.ruleset.reconciliation = detail::parse_flag(key, value);
    } else if (key == "ruleset") {
        c.ruleset_path = std::string(value);
    } else if (key == "format") {
        auto f = parse_output_format(value);
        if (!f) throw Error(ErrorCode::ConfigError, "format: expected tsv, json or pretty");
        c.format = *f;
    } else if (key == "strict") {
        c.strict = detail::parse_flag(key, value);
    } else {
        throw Error(ErrorCode::ConfigError, "unknown configuration key '" + std::string(key) + "'");
    }
}

/// `key = value` lines; `#` starts a comment.
inline void apply_config_text(Config& c, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto body = detail::trim(line);
        if (body.empty()) continue;
        auto eq = body.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ConfigError, "expected key = value", SourceLocation{n, 1});
        try {
            set_config_value(c, detail::trim(std::string_view(body).substr(0, eq)),
                             detail::trim(std::string_view(body).substr(eq + 1)));
        } catch (const Error& e) {
            throw Error(e.code(), e.message(), SourceLocation{n, 1});
        }
    }
}

inline void apply_config_file(Config& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    apply_config_text(c, buf.str());
}

/// EOLCYCLE_GREEN_MIN, EOLCYCLE_EOL_WINDOW, ... `lookup` defaults to getenv.
inline void apply_environment(Config& c,
                              const std::function<const char*(const char*)>& lookup = std::getenv) {
    for (auto key : kConfigKeys) {
        std::string var(kEnvPrefix);
        for (char ch : key) var += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (const char* v = lookup(var.c_str())) set_config_value(c, key, v);
    }
}

} // namespace eolcycle
