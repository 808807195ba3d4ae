// Scope resolution, read/write sets and transformation candidate sites.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "metamorph/ast.hpp"

namespace metamorph {

enum class TransformKind { VN, BX, LX, SF, PS, TC, UN };

inline constexpr TransformKind kAllKinds[] = {TransformKind::VN, TransformKind::BX, TransformKind::LX,
                                              TransformKind::SF, TransformKind::PS, TransformKind::TC,
                                              TransformKind::UN};

std::string_view kind_name(TransformKind kind);
/// Accepts the two-letter code, case-insensitively. Throws std::invalid_argument.
TransformKind parse_kind(std::string_view text);

enum class DeclKind { Param, Local, Catch };

struct Declaration {
    std::string name;
    TypeName type;
    DeclKind kind = DeclKind::Local;
    std::optional<bool> bool_literal_init;  // set when initialized with true/false
};

/// How an occurrence of a name is used.
///   Read         plain value use
///   NegatedRead  operand of `!`
///   AssignTarget target of a simple `=`
///   UpdateTarget target of a compound assignment or ++/--
///   MemberWrite  base of an assigned field or array element (`a.x = ..`, `a[i]++`)
enum class UseContext { Read, NegatedRead, AssignTarget, UpdateTarget, MemberWrite };

enum class Binding { Param, Local, External };

struct Resolution {
    std::string name;
    Binding binding = Binding::External;
    std::optional<std::size_t> decl;  // index into ScopeInfo::decls
    UseContext context = UseContext::Read;
    bool assigns_bool_literal = false;  // AssignTarget whose value is true/false
};

/// Occurrence-to-declaration map. `uses` is indexed by the document-order
/// ordinal of each name occurrence; declarations are in document order with
/// parameters first.
struct ScopeInfo {
    std::vector<Declaration> decls;
    std::vector<Resolution> uses;
    std::set<std::string> names;  // every identifier text in the method

    bool declares(std::string_view name) const;
    std::vector<std::size_t> uses_of(std::size_t decl) const;
};

class DuplicateDeclaration : public std::runtime_error {
public:
    explicit DuplicateDeclaration(const std::string& name)
        : std::runtime_error("duplicate declaration of '" + name + "' in one scope"), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

/// Resolves innermost-first. Throws DuplicateDeclaration.
ScopeInfo resolve_scopes(const MethodAst& method);

struct RwSet {
    std::set<std::string> reads;
    std::set<std::string> writes;
    std::size_t calls = 0;   // Call and New nodes
    bool control = false;    // contains return, break or continue
    bool may_raise = false;  // division, assert, member or element access
    bool has_loop = false;
    std::set<std::string> externals;  // names with no declaration in the method
    // Writes whose target is declared outside the statement. The statement's
    // own top-level declaration does not escape.
    std::set<std::string> escaping_writes;
};

RwSet rw_set(const Stmt& stmt, const ScopeInfo& scopes);

/// One applicable location for one transformation.
///   VN, BX  variable = the name; path = declaring statement (empty for parameters)
///   LX, SF  path = the loop or switch statement
///   PS      path = statement list; index = first statement of the adjacent pair
///   TC      path = the statement to wrap
///   UN      path = statement list; index = insertion position
struct CandidateSite {
    TransformKind kind = TransformKind::VN;
    NodePath path;
    std::string variable;
    std::size_t index = 0;

    friend bool operator==(const CandidateSite&, const CandidateSite&) = default;
};

struct CandidateOptions {
    /// Treat calls as pure when deciding statement independence.
    bool relaxed_calls = false;
};

/// Deterministic for a fixed (method, kind, seed). The seed only matters for
/// TC and UN, which pick one site at random.
std::vector<CandidateSite> enumerate_candidates(const MethodAst& method, TransformKind kind,
                                                std::uint64_t rng_seed, const CandidateOptions& options = {});

/// Seed for one (corpus, method, kind) triple.
std::uint64_t site_seed(std::uint64_t corpus_seed, std::string_view method_id, TransformKind kind);

/// True when `a` and `b` may be swapped under the independence rule.
bool independent(const RwSet& a, const RwSet& b, const CandidateOptions& options = {});

}  // namespace metamorph
