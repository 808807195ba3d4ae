#include <limits>

#include "metamorph/semantics.hpp"

namespace metamorph {

namespace {

const char* const kStrings[] = {"", "a", "ab", "abc", "metamorph", "x y"};

Value sample(const TypeName& type, SplitMix64& rng) {
    if (type == "boolean") return Value::of(rng.below(2) == 1);
    if (type == "String") return Value::of(std::string(kStrings[rng.below(std::size(kStrings))]));
    if (type == "int" || type == "long") {
        const bool wide = type == "long";
        // -3..3, then ±100, then the type's extremes.
        const std::uint64_t pick = rng.below(11);
        if (pick < 7) return Value::of(static_cast<std::int64_t>(pick) - 3);
        if (pick == 7) return Value::of(std::int64_t{100});
        if (pick == 8) return Value::of(std::int64_t{-100});
        if (pick == 9) {
            return Value::of(wide ? std::numeric_limits<std::int64_t>::min()
                                  : std::int64_t{std::numeric_limits<std::int32_t>::min()});
        }
        return Value::of(wide ? std::numeric_limits<std::int64_t>::max()
                              : std::int64_t{std::numeric_limits<std::int32_t>::max()});
    }
    throw UnsupportedConstruct("cannot sample arguments of type '" + type + "'");
}

nlohmann::json args_json(const std::vector<Value>& args) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& v : args) a.push_back(to_json(v));
    return a;
}

}  // namespace

std::vector<Value> sample_args(const MethodAst& method, SplitMix64& rng) {
    std::vector<Value> out;
    out.reserve(method.params.size());
    for (const auto& p : method.params) out.push_back(sample(p.type, rng));
    return out;
}

nlohmann::json to_json(const EquivalenceReport& report) {
    nlohmann::json d = nlohmann::json::array();
    for (const auto& x : report.disagreements) {
        d.push_back({{"trial", x.trial}, {"args", args_json(x.args)}, {"left", to_json(x.left)},
                     {"right", to_json(x.right)}});
    }
    return {{"equivalent", report.equivalent},
            {"trials", report.trials},
            {"compared", report.compared},
            {"skipped", report.skipped},
            {"one_sided_errors", report.one_sided_errors},
            {"disagreements", d}};
}

EquivalenceReport check_equivalence(const MethodAst& p, const MethodAst& q, const EquivalenceOptions& options) {
    if (p.params.size() != q.params.size()) throw std::invalid_argument("methods differ in parameter count");
    for (std::size_t i = 0; i < p.params.size(); ++i) {
        if (p.params[i].type != q.params[i].type) throw std::invalid_argument("methods differ in parameter types");
    }
    check_interpretable(p);
    check_interpretable(q);

    EquivalenceReport report;
    report.trials = options.trials;
    for (std::size_t t = 0; t < options.trials; ++t) {
        SplitMix64 rng(mix_seed(options.seed, t));
        std::vector<Value> args = sample_args(p, rng);
        ExecOutcome left = interpret(p, args, options.step_budget);
        if (options.normal_runs_only && !left.normal()) {
            ++report.skipped;
            continue;
        }
        ExecOutcome right = interpret(q, args, options.step_budget);
        ++report.compared;
        if (left.same_behavior(right)) continue;
        if (left.raised() != right.raised()) ++report.one_sided_errors;
        report.disagreements.push_back(Disagreement{t, std::move(args), left, right});
    }
    report.equivalent = report.disagreements.empty();
    return report;
}

EquivalenceReport check_equivalence(const MethodAst& p, const MethodAst& q, std::size_t trials, std::uint64_t seed) {
    EquivalenceOptions o;
    o.trials = trials;
    o.seed = seed;
    return check_equivalence(p, q, o);
}

}  // namespace metamorph
