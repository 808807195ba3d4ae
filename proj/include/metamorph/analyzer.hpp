// Method-name predictors: label normalization, the builtin token-frequency
// baseline and the adapter for external analyzer processes.

#pragma once

#include <chrono>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "metamorph/ast.hpp"

namespace metamorph {

/// Non-empty sequence of lowercase subtokens, each `[a-z]+` or `[0-9]+`.
struct Label {
    std::vector<std::string> subtokens;

    /// Subtokens joined with `|`.
    std::string joined() const;

    friend bool operator==(const Label&, const Label&) = default;
};

class EmptyLabel : public std::invalid_argument {
public:
    EmptyLabel() : std::invalid_argument("label has no subtokens") {}
};

/// Splits on `_`, `|`, whitespace and any other non-alphanumeric character,
/// on camelCase and letter/digit boundaries, and before the last capital of
/// an acronym run followed by lowercase (`HTTPServer` -> http, server).
/// Throws EmptyLabel when nothing remains.
Label normalize_label(std::string_view raw);

struct PredictionRecord {
    std::string method_id;
    std::string analyzer_id;
    Label label;
    std::string raw;
    bool flagged = false;  // the analyzer failed on this item; label is [error]
    std::string error;
};

inline constexpr const char* kBuiltinAnalyzer = "builtin";

/// Top-2 body subtokens by frequency; call and constructor names weigh 3.
PredictionRecord builtin_predict(const MethodAst& method, std::string method_id = {});

class AnalyzerUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AnalyzerRequest {
    std::string id;
    std::string source;
    std::string hint;  // sent as "hint" when non-empty; only test analyzers read it
};

struct ExternalOptions {
    /// Longest wait for the next response line before the remaining items
    /// of a worker are flagged as timed out.
    std::chrono::milliseconds timeout{10000};
    std::size_t workers = 1;
};

/// argv of the analyzer process; `cmd` is split on whitespace.
std::vector<std::string> parse_command(std::string_view cmd);

/// One record per request, in request order. Items without a well-formed
/// response are flagged with label [error]. Throws AnalyzerUnavailable when
/// a process cannot be started.
std::vector<PredictionRecord> external_predict(const std::vector<AnalyzerRequest>& batch,
                                               const std::vector<std::string>& argv,
                                               const ExternalOptions& options = {});

}  // namespace metamorph
