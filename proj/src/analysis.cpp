#include "metamorph/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "metamorph/rng.hpp"
#include "walk.hpp"

namespace metamorph {

std::string_view kind_name(TransformKind kind) {
    switch (kind) {
        case TransformKind::VN: return "VN";
        case TransformKind::BX: return "BX";
        case TransformKind::LX: return "LX";
        case TransformKind::SF: return "SF";
        case TransformKind::PS: return "PS";
        case TransformKind::TC: return "TC";
        case TransformKind::UN: return "UN";
    }
    return "??";
}

TransformKind parse_kind(std::string_view text) {
    std::string up;
    for (char c : text) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    for (TransformKind k : kAllKinds) {
        if (kind_name(k) == up) return k;
    }
    throw std::invalid_argument("unknown transformation kind '" + std::string(text) + "'");
}

bool ScopeInfo::declares(std::string_view name) const {
    return std::any_of(decls.begin(), decls.end(), [&](const Declaration& d) { return d.name == name; });
}

std::vector<std::size_t> ScopeInfo::uses_of(std::size_t decl) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < uses.size(); ++i) {
        if (uses[i].decl == decl) out.push_back(i);
    }
    return out;
}

namespace {

using detail::walk_method;
using detail::walk_stmt;

struct ResolveVisitor : detail::NullVisitor {
    ScopeInfo info;
    std::vector<std::map<std::string, std::size_t>> scopes;

    void enter_scope() { scopes.emplace_back(); }
    void exit_scope() { scopes.pop_back(); }

    void declare(const std::string& name, const TypeName& type, DeclKind kind, const Expr* init) {
        auto& top = scopes.back();
        if (top.count(name)) throw DuplicateDeclaration(name);
        Declaration d{name, type, kind, std::nullopt};
        if (init && init->is<BoolLit>()) d.bool_literal_init = init->as<BoolLit>().value;
        top[name] = info.decls.size();
        info.decls.push_back(std::move(d));
        info.names.insert(name);
        info.names.insert(type);
    }

    void use(const Expr& e, UseContext ctx, const Expr* parent) {
        const std::string& name = e.as<Ident>().name;
        Resolution r{name, Binding::External, std::nullopt, ctx, false};
        if (name != "this") {
            for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
                auto found = it->find(name);
                if (found != it->end()) {
                    r.decl = found->second;
                    r.binding = info.decls[found->second].kind == DeclKind::Param ? Binding::Param : Binding::Local;
                    break;
                }
            }
        }
        if (ctx == UseContext::AssignTarget && parent && parent->is<Assign>()) {
            r.assigns_bool_literal = parent->as<Assign>().value->is<BoolLit>();
        }
        info.names.insert(name);
        info.uses.push_back(std::move(r));
    }

    void on_expr(const Expr& e) {
        if (e.is<Call>()) info.names.insert(e.as<Call>().name);
        if (e.is<FieldAccess>()) info.names.insert(e.as<FieldAccess>().field);
        if (e.is<New>()) info.names.insert(e.as<New>().type);
        if (e.is<NewArray>()) info.names.insert(e.as<NewArray>().element);
        if (e.is<Cast>()) info.names.insert(e.as<Cast>().type);
    }
};

bool is_primitive(const TypeName& t) {
    static const char* const kPrim[] = {"int", "long", "double", "boolean", "char", "byte", "short", "float"};
    return std::any_of(std::begin(kPrim), std::end(kPrim), [&](const char* p) { return t == p; });
}

struct RwVisitor : detail::NullVisitor {
    const ScopeInfo& scopes;
    RwSet rw;
    std::vector<std::set<std::string>> local{{}};

    explicit RwVisitor(const ScopeInfo& s) : scopes(s) {}

    void enter_scope() { local.emplace_back(); }
    void exit_scope() { local.pop_back(); }

    bool is_local(const std::string& name) const {
        return std::any_of(local.begin(), local.end(), [&](const auto& s) { return s.count(name) > 0; });
    }

    void declare(const std::string& name, const TypeName&, DeclKind, const Expr*) {
        local.back().insert(name);
        rw.writes.insert(name);
    }

    void write(const std::string& name) {
        rw.writes.insert(name);
        if (!is_local(name)) rw.escaping_writes.insert(name);
    }

    void use(const Expr& e, UseContext ctx, const Expr*) {
        const std::string& name = e.as<Ident>().name;
        if (!scopes.declares(name)) rw.externals.insert(name);
        switch (ctx) {
            case UseContext::Read:
            case UseContext::NegatedRead:
                rw.reads.insert(name);
                break;
            case UseContext::AssignTarget:
                write(name);
                break;
            case UseContext::UpdateTarget:
            case UseContext::MemberWrite:
                rw.reads.insert(name);
                write(name);
                break;
        }
    }

    void on_expr(const Expr& e) {
        if (e.is<Call>() || e.is<New>()) ++rw.calls;
        if (e.is<FieldAccess>() || e.is<ArrayIndex>() || e.is<NewArray>()) rw.may_raise = true;
        if (e.is<Cast>() && !is_primitive(e.as<Cast>().type)) rw.may_raise = true;
        if (e.is<Binary>()) {
            auto op = e.as<Binary>().op;
            if (op == BinaryOp::Div || op == BinaryOp::Mod) rw.may_raise = true;
        }
        if (e.is<Assign>()) {
            auto op = e.as<Assign>().op;
            if (op == AssignOp::Div || op == AssignOp::Mod) rw.may_raise = true;
        }
    }

    void on_stmt(const Stmt& s) {
        if (s.is<Return>() || s.is<Break>() || s.is<Continue>()) rw.control = true;
        if (s.is<While>() || s.is<For>()) rw.has_loop = true;
        if (s.is<Assert>()) rw.may_raise = true;
    }
};

bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
    for (const auto& x : a) {
        if (b.count(x)) return false;
    }
    return true;
}

// Does any statement in `list` jump to the enclosing construct with `Jump`?
// Nested loops (and, for Break, nested switches) own their own jumps.
template <class Jump>
bool jumps_out(const std::vector<Stmt>& list);

template <class Jump>
bool jumps_out(const Stmt& s) {
    if (s.is<Jump>()) return true;
    if (s.is<While>() || s.is<For>()) return false;
    if (std::is_same_v<Jump, Break> && s.is<Switch>()) return false;
    for (const auto* l : stmt_lists(s)) {
        if (jumps_out<Jump>(*l)) return true;
    }
    return false;
}

template <class Jump>
bool jumps_out(const std::vector<Stmt>& list) {
    return std::any_of(list.begin(), list.end(), [](const Stmt& s) { return jumps_out<Jump>(s); });
}

bool ends_in_exit(const std::vector<Stmt>& body) {
    return !body.empty() && (body.back().is<Break>() || body.back().is<Return>());
}

// Names referenced anywhere in `list`, as identifier occurrences.
struct NameCollector : detail::NullVisitor {
    std::set<std::string> names;
    void use(const Expr& e, UseContext, const Expr*) { names.insert(e.as<Ident>().name); }
    void declare(const std::string& name, const TypeName&, DeclKind, const Expr*) { names.insert(name); }
};

bool switch_eligible(const Switch& sw) {
    const std::size_t n = sw.cases.size();
    if (n == 0) return false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto& body = sw.cases[i].body;
        if (!ends_in_exit(body)) return false;
    }
    int label_kind = -1;
    for (const auto& c : sw.cases) {
        // Any break other than the trailing one would target the switch.
        std::size_t limit = c.body.size();
        if (limit > 0 && c.body.back().is<Break>()) --limit;
        for (std::size_t i = 0; i < limit; ++i) {
            if (jumps_out<Break>(c.body[i])) return false;
        }
        for (const auto& l : c.labels) {
            int k = l.is<StringLit>() ? 0 : l.is<CharLit>() ? 1 : 2;
            if (label_kind >= 0 && label_kind != k) return false;
            label_kind = k;
        }
    }
    // Declarations at a case's top level live in the switch scope; the if
    // chain gives every case its own block, so they must stay case-local.
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& s : sw.cases[i].body) {
            if (!s.is<VarDecl>()) continue;
            const std::string& name = s.as<VarDecl>().name;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                NameCollector nc;
                for (const auto& t : sw.cases[j].body) walk_stmt(t, nc);
                if (nc.names.count(name)) return false;
            }
        }
    }
    return true;
}

std::vector<CandidateSite> vn_sites(const MethodAst& m, const ScopeInfo& info) {
    std::vector<CandidateSite> out;
    std::set<std::string> seen;
    // Declaring statement of each name, for the site path.
    std::map<std::string, NodePath> decl_path;
    for_each_stmt(m, [&](const Stmt& s, const NodePath& p) {
        const std::string* name = nullptr;
        if (s.is<VarDecl>()) name = &s.as<VarDecl>().name;
        if (s.is<For>() && s.as<For>().init && (*s.as<For>().init)->is<VarDecl>()) {
            name = &(*s.as<For>().init)->as<VarDecl>().name;
        }
        if (s.is<TryCatch>()) name = &s.as<TryCatch>().exc_name;
        if (name && !decl_path.count(*name)) decl_path[*name] = p;
    });
    for (const auto& d : info.decls) {
        if (!seen.insert(d.name).second) continue;
        CandidateSite site{TransformKind::VN, {}, d.name, 0};
        if (d.kind != DeclKind::Param) site.path = decl_path[d.name];
        out.push_back(std::move(site));
    }
    return out;
}

std::vector<CandidateSite> bx_sites(const MethodAst& m, const ScopeInfo& info) {
    std::vector<CandidateSite> out;
    std::map<std::string, int> count;
    for (const auto& d : info.decls) ++count[d.name];
    for (std::size_t i = 0; i < info.decls.size(); ++i) {
        const auto& d = info.decls[i];
        if (d.kind != DeclKind::Local || d.type != "boolean" || !d.bool_literal_init || count[d.name] != 1) continue;
        bool ok = true;
        for (std::size_t u : info.uses_of(i)) {
            const auto& r = info.uses[u];
            if (r.context == UseContext::Read || r.context == UseContext::NegatedRead) continue;
            if (r.context == UseContext::AssignTarget && r.assigns_bool_literal) continue;
            ok = false;
            break;
        }
        if (!ok) continue;
        NodePath path;
        bool found = false;
        for_each_stmt(m, [&](const Stmt& s, const NodePath& p) {
            if (!found && s.is<VarDecl>() && s.as<VarDecl>().name == d.name) {
                path = p;
                found = true;
            }
        });
        // A boolean declared in a for-init has no addressable statement.
        if (!found) continue;
        out.push_back(CandidateSite{TransformKind::BX, path, d.name, 0});
    }
    return out;
}

}  // namespace

ScopeInfo resolve_scopes(const MethodAst& method) {
    ResolveVisitor v;
    v.info.names.insert(method.name);
    walk_method(method, v);
    return std::move(v.info);
}

RwSet rw_set(const Stmt& stmt, const ScopeInfo& scopes) {
    RwVisitor v(scopes);
    walk_stmt(stmt, v);
    return std::move(v.rw);
}

bool independent(const RwSet& a, const RwSet& b, const CandidateOptions& options) {
    if (a.control || b.control) return false;
    std::set<std::string> touched_a = a.reads, touched_b = b.reads;
    touched_a.insert(a.writes.begin(), a.writes.end());
    touched_b.insert(b.writes.begin(), b.writes.end());
    if (!disjoint(a.writes, touched_b) || !disjoint(b.writes, touched_a)) return false;
    const bool strict = !options.relaxed_calls;
    if (strict && a.calls > 0 && b.calls > 0) return false;
    // Reordering around a statement that may raise or run out of steps is only
    // invisible if the other statement has no effect outliving it.
    auto hazard = [&](const RwSet& s) { return s.may_raise || s.has_loop || (strict && s.calls > 0); };
    if (hazard(a) && hazard(b)) return false;
    if (hazard(a) && !b.escaping_writes.empty()) return false;
    if (hazard(b) && !a.escaping_writes.empty()) return false;
    if (strict && a.calls > 0 && !b.externals.empty()) return false;
    if (strict && b.calls > 0 && !a.externals.empty()) return false;
    return true;
}

std::uint64_t site_seed(std::uint64_t corpus_seed, std::string_view method_id, TransformKind kind) {
    return mix_seed(mix_seed(corpus_seed, hash_text(method_id)), static_cast<std::uint64_t>(kind) + 1);
}

std::vector<CandidateSite> enumerate_candidates(const MethodAst& method, TransformKind kind, std::uint64_t rng_seed,
                                                const CandidateOptions& options) {
    const ScopeInfo info = resolve_scopes(method);
    std::vector<CandidateSite> out;
    switch (kind) {
        case TransformKind::VN:
            return vn_sites(method, info);
        case TransformKind::BX:
            return bx_sites(method, info);
        case TransformKind::LX:
            for_each_stmt(method, [&](const Stmt& s, const NodePath& p) {
                const Block* body = s.is<For>() ? &s.as<For>().body : s.is<While>() ? &s.as<While>().body : nullptr;
                if (body && !jumps_out<Continue>(body->stmts)) out.push_back(CandidateSite{kind, p, {}, 0});
            });
            return out;
        case TransformKind::SF:
            for_each_stmt(method, [&](const Stmt& s, const NodePath& p) {
                if (s.is<Switch>() && switch_eligible(s.as<Switch>())) out.push_back(CandidateSite{kind, p, {}, 0});
            });
            return out;
        case TransformKind::PS:
            for_each_list(method, [&](const std::vector<Stmt>& list, const NodePath& p) {
                for (std::size_t i = 0; i + 1 < list.size(); ++i) {
                    if (independent(rw_set(list[i], info), rw_set(list[i + 1], info), options)) {
                        out.push_back(CandidateSite{kind, p, {}, i});
                    }
                }
            });
            return out;
        case TransformKind::TC: {
            std::vector<NodePath> pool;
            for_each_stmt(method, [&](const Stmt& s, const NodePath& p) {
                if (!s.is<VarDecl>() && !rw_set(s, info).control) pool.push_back(p);
            });
            if (pool.empty()) return out;
            SplitMix64 rng(rng_seed);
            out.push_back(CandidateSite{kind, pool[rng.below(pool.size())], {}, 0});
            return out;
        }
        case TransformKind::UN: {
            std::vector<std::pair<NodePath, std::size_t>> pool;
            for_each_list(method, [&](const std::vector<Stmt>& list, const NodePath& p) {
                // Nothing goes after a jump that ends the list.
                std::size_t limit = list.size();
                for (std::size_t i = 0; i < list.size(); ++i) {
                    if (list[i].is<Return>() || list[i].is<Break>() || list[i].is<Continue>()) {
                        limit = i;
                        break;
                    }
                }
                for (std::size_t i = 0; i <= limit; ++i) pool.emplace_back(p, i);
            });
            SplitMix64 rng(rng_seed);
            auto& pick = pool[rng.below(pool.size())];
            out.push_back(CandidateSite{kind, pick.first, {}, pick.second});
            return out;
        }
    }
    return out;
}

}  // namespace metamorph
