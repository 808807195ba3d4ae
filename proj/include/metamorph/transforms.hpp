// The seven rewrites and their single-place / all-place application.

#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "metamorph/analysis.hpp"
#include "metamorph/ast.hpp"

namespace metamorph {

enum class ApplyMode { SinglePlace, AllPlace };

std::string_view mode_name(ApplyMode mode);  // "single" | "all"
ApplyMode parse_mode(std::string_view text);  // throws std::invalid_argument

struct TransformedVariant {
    std::string original_id;
    TransformKind kind = TransformKind::VN;
    std::vector<CandidateSite> sites;
    ApplyMode mode = ApplyMode::SinglePlace;
    MethodAst ast;
    std::string source;  // print(ast)
};

class ModeUnsupported : public std::runtime_error {
public:
    explicit ModeUnsupported(TransformKind kind)
        : std::runtime_error("all-place application is not defined for " + std::string(kind_name(kind))),
          kind_(kind) {}
    TransformKind kind() const { return kind_; }

private:
    TransformKind kind_;
};

/// `prefix` followed by the smallest N >= 0 with prefixN not in `taken`.
std::string fresh_name(const std::set<std::string>& taken, std::string_view prefix);

/// Rewrites `ast` in place at one site. Throws std::invalid_argument when the
/// site does not address a node of the right shape.
void apply_site(MethodAst& ast, const CandidateSite& site);

TransformedVariant variable_renaming(const MethodAst& ast, const CandidateSite& site);
TransformedVariant boolean_exchange(const MethodAst& ast, const CandidateSite& site);
TransformedVariant loop_exchange(const MethodAst& ast, const CandidateSite& site);
TransformedVariant switch_to_if(const MethodAst& ast, const CandidateSite& site);
TransformedVariant permute_statement(const MethodAst& ast, const CandidateSite& site);
TransformedVariant try_catch_insertion(const MethodAst& ast, const CandidateSite& site);
TransformedVariant unused_statement_insertion(const MethodAst& ast, const CandidateSite& site);

/// Single-place: one variant per enumerated site. All-place: one variant
/// carrying every site, or none when there is no site. Throws ModeUnsupported
/// for all-place PS, TC and UN.
std::vector<TransformedVariant> apply(const MethodAst& ast, TransformKind kind, ApplyMode mode, std::uint64_t seed,
                                      const CandidateOptions& options = {}, std::string_view original_id = {});

}  // namespace metamorph
