#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include "eolcycle/error.hpp"

namespace eolcycle::detail {

inline bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
           static_cast<unsigned char>(c) >= 0x80;
}

inline bool is_name_char(char c) {
    return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

/// Character cursor with line/column tracking, shared by the data, rule and
/// query parsers. `#` starts a comment that runs to the end of the line.
class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    bool eof() const noexcept { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const noexcept {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }
    std::size_t position() const noexcept { return pos_; }
    SourceLocation location() const noexcept { return {line_, column_}; }

    char get() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip_space() {
        while (!eof()) {
            char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') get();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else {
                break;
            }
        }
    }

    bool consume(char c) {
        skip_space();
        if (peek() != c) return false;
        get();
        return true;
    }

    bool consume(std::string_view s) {
        skip_space();
        if (text_.substr(pos_, s.size()) != s) return false;
        for (std::size_t i = 0; i < s.size(); ++i) get();
        return true;
    }

    /// Matches a whole word, optionally ignoring case.
    bool consume_keyword(std::string_view kw, bool ignore_case = false) {
        skip_space();
        if (pos_ + kw.size() > text_.size()) return false;
        for (std::size_t i = 0; i < kw.size(); ++i) {
            char a = text_[pos_ + i], b = kw[i];
            if (ignore_case ? std::toupper(static_cast<unsigned char>(a)) !=
                                  std::toupper(static_cast<unsigned char>(b))
                            : a != b)
                return false;
        }
        char next = pos_ + kw.size() < text_.size() ? text_[pos_ + kw.size()] : '\0';
        if (is_name_char(next) || next == ':') return false;
        for (std::size_t i = 0; i < kw.size(); ++i) get();
        return true;
    }

    void expect(char c, std::string_view what) {
        if (!consume(c)) fail("expected " + std::string(what));
    }

    [[noreturn]] void fail(const std::string& message,
                           ErrorCode code = ErrorCode::SyntaxError) const {
        throw Error(code, message, location());
    }

    [[noreturn]] void fail_at(SourceLocation where, const std::string& message,
                              ErrorCode code = ErrorCode::SyntaxError) const {
        throw Error(code, message, where);
    }

    /// `"..."` with the usual backslash escapes.
    std::string read_quoted() {
        skip_space();
        if (peek() != '"') fail("expected a string literal");
        get();
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string literal");
            char c = get();
            if (c == '"') break;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (eof()) fail("unterminated string literal");
            char e = get();
            switch (e) {
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            case '"': out += '"'; break;
            case '\'': out += '\''; break;
            case '\\': out += '\\'; break;
            case 'u': append_utf8(out, read_hex(4)); break;
            case 'U': append_utf8(out, read_hex(8)); break;
            default: fail(std::string("unknown escape \\") + e);
            }
        }
        return out;
    }

    /// `<...>`
    std::string read_iriref() {
        skip_space();
        if (peek() != '<') fail("expected '<'");
        get();
        std::string out;
        while (true) {
            if (eof() || peek() == '\n' || peek() == ' ') fail("unterminated IRI");
            char c = get();
            if (c == '>') break;
            out += c;
        }
        return out;
    }

    /// A bare or prefixed name: `name`, `pfx:local`, `:local`. A trailing
    /// '.' is left for the statement terminator.
    std::string read_name() {
        skip_space();
        std::size_t start = pos_;
        std::size_t end = pos_;
        bool seen_colon = false;
        while (end < text_.size()) {
            char c = text_[end];
            if (is_name_char(c)) {
                ++end;
            } else if (c == ':' && !seen_colon) {
                seen_colon = true;
                ++end;
            } else {
                break;
            }
        }
        while (end > start && text_[end - 1] == '.') --end;
        while (pos_ < end) get();
        return std::string(text_.substr(start, end - start));
    }

    /// Optional sign, digits, optional fraction (digit required after '.'),
    /// optional exponent. Empty when no number starts here.
    std::string read_number() {
        skip_space();
        std::size_t end = pos_;
        auto digit = [&](std::size_t i) {
            return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
        };
        if (end < text_.size() && (text_[end] == '+' || text_[end] == '-')) ++end;
        std::size_t digits_start = end;
        while (digit(end)) ++end;
        if (end < text_.size() && text_[end] == '.' && digit(end + 1)) {
            ++end;
            while (digit(end)) ++end;
        }
        if (end == digits_start) return {};
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
            if (digit(e)) {
                end = e;
                while (digit(end)) ++end;
            }
        }
        std::string out(text_.substr(pos_, end - pos_));
        while (pos_ < end) get();
        return out;
    }

    bool at_number_start() {
        skip_space();
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) return true;
        if ((c == '-' || c == '+') && std::isdigit(static_cast<unsigned char>(peek(1)))) return true;
        return false;
    }

private:
    std::uint32_t read_hex(int n) {
        std::uint32_t v = 0;
        for (int i = 0; i < n; ++i) {
            if (eof() || !std::isxdigit(static_cast<unsigned char>(peek())))
                fail("bad unicode escape");
            char c = get();
            v = v * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(c))
                                                        ? c - '0'
                                                        : std::tolower(c) - 'a' + 10);
        }
        return v;
    }

    static void append_utf8(std::string& o, std::uint32_t cp) {
        if (cp < 0x80) {
            o += static_cast<char>(cp);
        } else if (cp < 0x800) {
            o += static_cast<char>(0xC0 | (cp >> 6));
            o += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            o += static_cast<char>(0xE0 | (cp >> 12));
            o += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            o += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            o += static_cast<char>(0xF0 | (cp >> 18));
            o += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            o += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            o += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

} // namespace eolcycle::detail
