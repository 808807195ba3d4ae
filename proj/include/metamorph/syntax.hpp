// Lexing, parsing, printing and structural comparison of MethodLang methods.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "metamorph/ast.hpp"

namespace metamorph {

/// Raised for malformed input and for constructs outside the subset.
/// Line and column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

/// Parses exactly one method declaration. Comments are discarded,
/// single-statement bodies become blocks and `!!e` folds to `e`.
MethodAst parse(std::string_view source);

/// Deterministic rendering: 4-space indentation, one statement per line,
/// parentheses only where precedence requires them.
std::string print(const MethodAst& method);
std::string print_expr(const Expr& expr);
std::string print_stmt(const Stmt& stmt, int indent = 0);

/// Canonical S-expression of a subtree. With `mask_identifiers` every
/// variable, call and field name is replaced by `_`.
std::string sexpr(const MethodAst& method, bool mask_identifiers = false);
std::string sexpr(const Stmt& stmt, bool mask_identifiers = false);
std::string sexpr(const Expr& expr, bool mask_identifiers = false);

bool structural_eq(const MethodAst& a, const MethodAst& b, bool ignore_identifiers = false);

/// Number of statement and expression nodes, Block wrappers included.
std::size_t node_count(const MethodAst& method);
std::size_t node_count(const Stmt& stmt);

/// Statement nodes in the body, excluding Block wrappers (declarations count).
std::size_t stmt_count(const MethodAst& method);

bool is_identifier(std::string_view text);

}  // namespace metamorph
