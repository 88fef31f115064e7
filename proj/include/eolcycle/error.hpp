#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace eolcycle {

enum class ErrorCode {
    SyntaxError,
    UnknownPrefix,
    MalformedLiteral,
    UnknownPredicate,
    UnknownClass,
    DatatypeMismatch,
    UnknownEntity,
    SchemaError,
    UnsafeRule,
    UnknownBuiltin,
    BuiltinArityMismatch,
    UnboundArgument,
    NonNumericArgument,
    LimitExceeded,
    ProjectionOfUnusedVariable,
    UnknownProduct,
    NotAProduct,
    DomainError,
    InvalidThresholds,
    ConfigError,
    IoError,
};

inline constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::SyntaxError: return "syntax-error";
    case ErrorCode::UnknownPrefix: return "unknown-prefix";
    case ErrorCode::MalformedLiteral: return "malformed-literal";
    case ErrorCode::UnknownPredicate: return "unknown-predicate";
    case ErrorCode::UnknownClass: return "unknown-class";
    case ErrorCode::DatatypeMismatch: return "datatype-mismatch";
    case ErrorCode::UnknownEntity: return "unknown-entity";
    case ErrorCode::SchemaError: return "schema-error";
    case ErrorCode::UnsafeRule: return "unsafe-rule";
    case ErrorCode::UnknownBuiltin: return "unknown-builtin";
    case ErrorCode::BuiltinArityMismatch: return "builtin-arity-mismatch";
    case ErrorCode::UnboundArgument: return "unbound-required-argument";
    case ErrorCode::NonNumericArgument: return "non-numeric-argument";
    case ErrorCode::LimitExceeded: return "limit-exceeded";
    case ErrorCode::ProjectionOfUnusedVariable: return "projection-of-unused-variable";
    case ErrorCode::UnknownProduct: return "unknown-product";
    case ErrorCode::NotAProduct: return "not-a-product";
    case ErrorCode::DomainError: return "domain-error";
    case ErrorCode::InvalidThresholds: return "invalid-thresholds";
    case ErrorCode::ConfigError: return "config-error";
    case ErrorCode::IoError: return "io-error";
    }
    return "unknown";
}

/// 1-based position in a text input.
struct SourceLocation {
    std::size_t line = 1;
    std::size_t column = 1;
};

/// Every failure raised by the library. The code is stable and machine
/// checkable; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message,
          std::optional<SourceLocation> where = std::nullopt)
        : std::runtime_error(format(code, message, where)), code_(code), where_(where),
          message_(message) {}

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code and location prefix.
    const std::string& message() const noexcept { return message_; }
    const std::optional<SourceLocation>& where() const noexcept { return where_; }

private:
    static std::string format(ErrorCode code, const std::string& message,
                              const std::optional<SourceLocation>& where) {
        std::string out(to_string(code));
        if (where) {
            out += " at line " + std::to_string(where->line) + ", column " +
                   std::to_string(where->column);
        }
        out += ": ";
        out += message;
        return out;
    }

    ErrorCode code_;
    std::optional<SourceLocation> where_;
    std::string message_;
};

} // namespace eolcycle
