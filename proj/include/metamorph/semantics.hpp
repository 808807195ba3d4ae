// Reference interpreter, differential equivalence checking and the seeded
// program generator.

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "metamorph/ast.hpp"
#include "metamorph/rng.hpp"

namespace metamorph {

/// Unit, 64-bit two's-complement integer (int and long), boolean or string.
struct Value {
    std::variant<std::monostate, std::int64_t, bool, std::string> v;

    static Value unit() { return {}; }
    static Value of(std::int64_t i) { return Value{i}; }
    static Value of(int i) { return Value{static_cast<std::int64_t>(i)}; }
    static Value of(const char* s) { return Value{std::string(s)}; }
    static Value of(bool b) { return Value{b}; }
    static Value of(std::string s) { return Value{std::move(s)}; }

    bool is_unit() const { return v.index() == 0; }
    bool is_int() const { return v.index() == 1; }
    bool is_bool() const { return v.index() == 2; }
    bool is_str() const { return v.index() == 3; }
    std::int64_t as_int() const { return std::get<1>(v); }
    bool as_bool() const { return std::get<2>(v); }
    const std::string& as_str() const { return std::get<3>(v); }

    /// Java-style text: 42, true, the raw string, or "unit".
    std::string to_string() const;

    friend bool operator==(const Value&, const Value&) = default;
};

nlohmann::json to_json(const Value& value);

enum class ExecStatus { Value, DivByZero, AssertionFailed, StepLimitExceeded };

std::string_view status_name(ExecStatus status);

struct ExecOutcome {
    ExecStatus status = ExecStatus::Value;
    Value result;                // meaningful for ExecStatus::Value only
    std::uint64_t trace_len = 0;  // steps taken
    std::uint64_t caught = 0;     // exceptions handled by a catch clause

    /// Ended by an exception a catch clause could handle.
    bool raised() const { return status == ExecStatus::DivByZero || status == ExecStatus::AssertionFailed; }
    /// Ran without raising anything, caught or not.
    bool normal() const { return !raised() && caught == 0; }
    /// Same observable behavior; step counts are not compared.
    bool same_behavior(const ExecOutcome& other) const {
        return status == other.status && (status != ExecStatus::Value || result == other.result);
    }
};

nlohmann::json to_json(const ExecOutcome& outcome);

class UnsupportedConstruct : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultStepBudget = 100000;

/// Throws UnsupportedConstruct when `method` leaves the interpretable subset.
void check_interpretable(const MethodAst& method);

/// One step per executed statement and one per loop-condition check.
/// Throws UnsupportedConstruct, or std::invalid_argument on an argument
/// arity or type mismatch.
ExecOutcome interpret(const MethodAst& method, const std::vector<Value>& args,
                      std::uint64_t step_budget = kDefaultStepBudget);

/// Seeded argument vector for the method's parameter types.
std::vector<Value> sample_args(const MethodAst& method, SplitMix64& rng);

struct Disagreement {
    std::size_t trial = 0;
    std::vector<Value> args;
    ExecOutcome left;
    ExecOutcome right;
};

struct EquivalenceReport {
    bool equivalent = true;
    std::size_t trials = 0;
    std::size_t compared = 0;
    std::size_t skipped = 0;           // trials where the left side raised, in normal-runs mode (caught or not)
    std::size_t one_sided_errors = 0;  // exactly one side raised
    std::vector<Disagreement> disagreements;
};

nlohmann::json to_json(const EquivalenceReport& report);

struct EquivalenceOptions {
    std::size_t trials = 16;
    std::uint64_t seed = 0;
    std::uint64_t step_budget = kDefaultStepBudget;
    /// Only compare runs where `p` raises no exception at all, not even one it
    /// catches. A `q` that raises on such a run still disagrees.
    bool normal_runs_only = false;
};

/// Differential execution of `p` and `q` on shared arguments. Both must have
/// the same parameter types (std::invalid_argument otherwise).
EquivalenceReport check_equivalence(const MethodAst& p, const MethodAst& q, const EquivalenceOptions& options);
EquivalenceReport check_equivalence(const MethodAst& p, const MethodAst& q, std::size_t trials, std::uint64_t seed);

struct CorpusOptions {
    std::size_t max_stmts = 30;  // statements per method, counting nested ones
};

/// Deterministic per seed. Every method is interpretable and has at least
/// two top-level statements.
std::vector<MethodAst> gen_corpus(std::size_t count, std::uint64_t seed, const CorpusOptions& options = {});

struct CoverageAudit {
    std::size_t methods = 0;
    std::size_t with_for = 0;
    std::size_t with_while = 0;
    std::size_t with_eligible_switch = 0;
    std::size_t with_eligible_boolean = 0;
    std::size_t with_two_statements = 0;

    bool quotas_met() const;
};

CoverageAudit audit_corpus(const std::vector<MethodAst>& corpus);

}  // namespace metamorph
