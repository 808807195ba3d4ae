#include "metamorph/transforms.hpp"

#include <algorithm>

#include "metamorph/syntax.hpp"
#include "walk.hpp"

namespace metamorph {

std::string_view mode_name(ApplyMode mode) { return mode == ApplyMode::SinglePlace ? "single" : "all"; }

ApplyMode parse_mode(std::string_view text) {
    if (text == "single" || text == "single-place") return ApplyMode::SinglePlace;
    if (text == "all" || text == "all-place") return ApplyMode::AllPlace;
    throw std::invalid_argument("unknown mode '" + std::string(text) + "'");
}

std::string fresh_name(const std::set<std::string>& taken, std::string_view prefix) {
    for (std::size_t n = 0;; ++n) {
        std::string candidate = std::string(prefix) + std::to_string(n);
        if (!taken.count(candidate)) return candidate;
    }
}

namespace {

using detail::NullVisitor;

[[noreturn]] void bad_site(const CandidateSite& site, const std::string& why) {
    throw std::invalid_argument(std::string(kind_name(site.kind)) + " site " + path_to_string(site.path) + ": " + why);
}

Stmt& stmt_checked(MethodAst& ast, const CandidateSite& site) {
    try {
        return stmt_at(ast, site.path);
    } catch (const std::out_of_range&) {
        bad_site(site, "no statement at path");
    }
}

std::vector<Stmt>& list_checked(MethodAst& ast, const CandidateSite& site) {
    try {
        return list_at(ast, site.path);
    } catch (const std::out_of_range&) {
        bad_site(site, "no statement list at path");
    }
}

struct RenameVisitor : NullVisitor {
    const ScopeInfo& info;
    std::set<std::size_t> targets;
    std::string to;
    std::size_t decl_i = 0, use_i = 0;

    RenameVisitor(const ScopeInfo& i, std::set<std::size_t> t, std::string n)
        : info(i), targets(std::move(t)), to(std::move(n)) {}

    void declare(std::string& name, const TypeName&, DeclKind, Expr*) {
        if (targets.count(decl_i++)) name = to;
    }
    void use(Expr& e, UseContext, Expr*) {
        const auto& r = info.uses[use_i++];
        if (r.decl && targets.count(*r.decl)) e.as<Ident>().name = to;
    }
};

void rename(MethodAst& ast, const CandidateSite& site) {
    ScopeInfo info = resolve_scopes(ast);
    std::set<std::size_t> targets;
    for (std::size_t i = 0; i < info.decls.size(); ++i) {
        if (info.decls[i].name == site.variable) targets.insert(i);
    }
    if (targets.empty()) bad_site(site, "'" + site.variable + "' is not declared");
    RenameVisitor v(info, std::move(targets), fresh_name(info.names, "var"));
    detail::walk_method(ast, v);
}

struct ExchangeVisitor : NullVisitor {
    const ScopeInfo& info;
    std::size_t target;
    std::size_t decl_i = 0, use_i = 0;

    ExchangeVisitor(const ScopeInfo& i, std::size_t t) : info(i), target(t) {}

    void declare(std::string&, const TypeName&, DeclKind, Expr* init) {
        if (decl_i++ == target && init && init->is<BoolLit>()) init->as<BoolLit>().value ^= true;
    }
    void use(Expr& e, UseContext ctx, Expr* parent) {
        if (info.uses[use_i++].decl != target) return;
        switch (ctx) {
            case UseContext::Read: {
                Expr copy = e;
                e = make_not(std::move(copy));
                break;
            }
            case UseContext::NegatedRead: {
                Expr copy = e;
                *parent = std::move(copy);
                break;
            }
            case UseContext::AssignTarget: {
                auto& value = *parent->as<Assign>().value;
                if (value.is<BoolLit>()) value.as<BoolLit>().value ^= true;
                break;
            }
            default:
                break;
        }
    }
};

void exchange(MethodAst& ast, const CandidateSite& site) {
    ScopeInfo info = resolve_scopes(ast);
    std::optional<std::size_t> target;
    for (std::size_t i = 0; i < info.decls.size(); ++i) {
        if (info.decls[i].name == site.variable && info.decls[i].kind == DeclKind::Local) target = i;
    }
    if (!target) bad_site(site, "'" + site.variable + "' is not a local");
    ExchangeVisitor v(info, *target);
    detail::walk_method(ast, v);
}

struct NameCollector : NullVisitor {
    std::set<std::string> names;
    void use(const Expr& e, UseContext, const Expr*) { names.insert(e.as<Ident>().name); }
};

void loop_exchange_at(MethodAst& ast, const CandidateSite& site) {
    Stmt& s = stmt_checked(ast, site);
    if (s.is<While>()) {
        While w = std::move(s.as<While>());
        s = Stmt{For{std::nullopt, std::move(w.cond), std::nullopt, std::move(w.body)}};
        return;
    }
    if (!s.is<For>()) bad_site(site, "not a loop");
    For f = std::move(s.as<For>());
    Block out;
    if (f.init) out.stmts.push_back(std::move(**f.init));
    Block body;
    if (f.update) {
        NameCollector nc;
        Stmt update{ExprStmt{*f.update}};
        detail::walk_stmt(update, nc);
        bool clash = std::any_of(f.body.stmts.begin(), f.body.stmts.end(), [&](const Stmt& b) {
            return b.is<VarDecl>() && nc.names.count(b.as<VarDecl>().name);
        });
        // A body declaration would capture the update's reference if flattened.
        if (clash) {
            body.stmts.push_back(Stmt{std::move(f.body)});
        } else {
            body = std::move(f.body);
        }
        body.stmts.push_back(Stmt{ExprStmt{std::move(*f.update)}});
    } else {
        body = std::move(f.body);
    }
    Expr cond = f.cond ? std::move(*f.cond) : Expr{BoolLit{true}};
    out.stmts.push_back(Stmt{While{std::move(cond), std::move(body)}});
    s = Stmt{std::move(out)};
}

// Ordinal of `target` among name occurrences, in walk order.
struct OrdinalFinder : NullVisitor {
    const Expr* target;
    std::size_t count = 0;
    std::optional<std::size_t> found;
    explicit OrdinalFinder(const Expr* t) : target(t) {}
    void use(const Expr& e, UseContext, const Expr*) {
        if (&e == target) found = count;
        ++count;
    }
};

TypeName selector_type(const MethodAst& ast, const Switch& sw, const ScopeInfo& info) {
    if (sw.selector.is<Ident>()) {
        OrdinalFinder f(&sw.selector);
        detail::walk_method(ast, f);
        if (f.found && info.uses[*f.found].decl) return info.decls[*info.uses[*f.found].decl].type;
    }
    for (const auto& c : sw.cases) {
        for (const auto& l : c.labels) {
            if (l.is<StringLit>()) return "String";
            if (l.is<CharLit>()) return "char";
            return "int";
        }
    }
    return "int";
}

Expr label_test(const std::string& sel, const Expr& label) {
    if (label.is<StringLit>()) return make_call(make_ident(sel), "equals", {label});
    return make_binary(BinaryOp::Eq, make_ident(sel), label);
}

void switch_to_if_at(MethodAst& ast, const CandidateSite& site, const std::string* preset) {
    if (!stmt_checked(ast, site).is<Switch>()) bad_site(site, "not a switch");
    ScopeInfo info = resolve_scopes(ast);
    const std::string sel = preset ? *preset : fresh_name(info.names, "sel");
    TypeName type = selector_type(ast, stmt_at(ast, site.path).as<Switch>(), info);

    Stmt& s = stmt_at(ast, site.path);
    Switch sw = std::move(s.as<Switch>());
    auto body_of = [](SwitchCase& c) {
        Block b{std::move(c.body)};
        if (!b.stmts.empty() && b.stmts.back().is<Break>()) b.stmts.pop_back();
        return b;
    };

    std::optional<Block> tail;
    for (auto& c : sw.cases) {
        if (c.is_default) tail = body_of(c);
    }
    for (auto it = sw.cases.rbegin(); it != sw.cases.rend(); ++it) {
        if (it->is_default) continue;
        Expr cond = label_test(sel, it->labels.front());
        for (std::size_t i = 1; i < it->labels.size(); ++i) {
            cond = make_binary(BinaryOp::Or, std::move(cond), label_test(sel, it->labels[i]));
        }
        If branch{std::move(cond), body_of(*it), std::move(tail)};
        tail = Block{};
        tail->stmts.push_back(Stmt{std::move(branch)});
    }

    Block out;
    out.stmts.push_back(Stmt{VarDecl{type, sel, std::move(sw.selector), false}});
    if (tail) {
        // With cases the chain is a single If; a lone default stays a block.
        if (tail->stmts.size() == 1 && tail->stmts[0].is<If>()) {
            out.stmts.push_back(std::move(tail->stmts[0]));
        } else {
            out.stmts.push_back(Stmt{std::move(*tail)});
        }
    }
    s = Stmt{std::move(out)};
}

void permute_at(MethodAst& ast, const CandidateSite& site) {
    auto& list = list_checked(ast, site);
    if (site.index + 1 >= list.size()) bad_site(site, "no statement pair at index");
    std::swap(list[site.index], list[site.index + 1]);
}

void try_catch_at(MethodAst& ast, const CandidateSite& site) {
    const std::string ex = fresh_name(resolve_scopes(ast).names, "ex");
    Stmt& s = stmt_checked(ast, site);
    TryCatch tc;
    tc.body.stmts.push_back(std::move(s));
    tc.exc_type = "Exception";
    tc.exc_name = ex;
    tc.handler.stmts.push_back(Stmt{ExprStmt{make_call(make_ident(ex), "printStackTrace", {})}});
    s = Stmt{std::move(tc)};
}

void unused_at(MethodAst& ast, const CandidateSite& site) {
    const std::string name = fresh_name(resolve_scopes(ast).names, "unused");
    auto& list = list_checked(ast, site);
    if (site.index > list.size()) bad_site(site, "insertion index past end");
    list.insert(list.begin() + static_cast<std::ptrdiff_t>(site.index),
                Stmt{VarDecl{"String", name, Expr{StringLit{"metamorph"}}, false}});
}

TransformedVariant make_variant(const MethodAst& ast, std::vector<CandidateSite> sites, TransformKind kind,
                                ApplyMode mode, std::string_view id) {
    TransformedVariant v;
    v.original_id = id.empty() ? ast.name : std::string(id);
    v.kind = kind;
    v.sites = std::move(sites);
    v.mode = mode;
    v.ast = ast;
    return v;
}

TransformedVariant single(const MethodAst& ast, const CandidateSite& site, TransformKind expect) {
    if (site.kind != expect) bad_site(site, "expected a " + std::string(kind_name(expect)) + " site");
    TransformedVariant v = make_variant(ast, {site}, site.kind, ApplyMode::SinglePlace, {});
    apply_site(v.ast, site);
    v.source = print(v.ast);
    return v;
}

}  // namespace

void apply_site(MethodAst& ast, const CandidateSite& site) {
    switch (site.kind) {
        case TransformKind::VN: return rename(ast, site);
        case TransformKind::BX: return exchange(ast, site);
        case TransformKind::LX: return loop_exchange_at(ast, site);
        case TransformKind::SF: return switch_to_if_at(ast, site, nullptr);
        case TransformKind::PS: return permute_at(ast, site);
        case TransformKind::TC: return try_catch_at(ast, site);
        case TransformKind::UN: return unused_at(ast, site);
    }
}

TransformedVariant variable_renaming(const MethodAst& ast, const CandidateSite& site) {
    return single(ast, site, TransformKind::VN);
}
TransformedVariant boolean_exchange(const MethodAst& ast, const CandidateSite& site) {
    return single(ast, site, TransformKind::BX);
}
TransformedVariant loop_exchange(const MethodAst& ast, const CandidateSite& site) {
    return single(ast, site, TransformKind::LX);
}
TransformedVariant switch_to_if(const MethodAst& ast, const CandidateSite& site) {
    return single(ast, site, TransformKind::SF);
}
TransformedVariant permute_statement(const MethodAst& ast, const CandidateSite& site) {
    return single(ast, site, TransformKind::PS);
}
TransformedVariant try_catch_insertion(const MethodAst& ast, const CandidateSite& site) {
    return single(ast, site, TransformKind::TC);
}
TransformedVariant unused_statement_insertion(const MethodAst& ast, const CandidateSite& site) {
    return single(ast, site, TransformKind::UN);
}

std::vector<TransformedVariant> apply(const MethodAst& ast, TransformKind kind, ApplyMode mode, std::uint64_t seed,
                                      const CandidateOptions& options, std::string_view original_id) {
    if (mode == ApplyMode::AllPlace &&
        (kind == TransformKind::PS || kind == TransformKind::TC || kind == TransformKind::UN)) {
        throw ModeUnsupported(kind);
    }
    std::vector<CandidateSite> sites = enumerate_candidates(ast, kind, seed, options);
    std::vector<TransformedVariant> out;
    if (sites.empty()) return out;

    if (mode == ApplyMode::SinglePlace) {
        for (const auto& site : sites) {
            TransformedVariant v = make_variant(ast, {site}, kind, mode, original_id);
            apply_site(v.ast, site);
            v.source = print(v.ast);
            out.push_back(std::move(v));
        }
        return out;
    }

    TransformedVariant v = make_variant(ast, sites, kind, mode, original_id);
    if (kind == TransformKind::VN || kind == TransformKind::BX) {
        // Name-addressed: document order, each rewrite sees the previous ones.
        for (const auto& site : sites) apply_site(v.ast, site);
    } else {
        // Path-addressed. Rewriting in reverse document order never disturbs a
        // pending site's path, and fresh names are handed out front to back so
        // the result matches front-to-back application.
        std::vector<std::string> names;
        if (kind == TransformKind::SF) {
            std::set<std::string> taken = resolve_scopes(ast).names;
            for (std::size_t i = 0; i < sites.size(); ++i) {
                names.push_back(fresh_name(taken, "sel"));
                taken.insert(names.back());
            }
        }
        for (std::size_t i = sites.size(); i-- > 0;) {
            if (kind == TransformKind::SF) {
                switch_to_if_at(v.ast, sites[i], &names[i]);
            } else {
                apply_site(v.ast, sites[i]);
            }
        }
    }
    v.source = print(v.ast);
    out.push_back(std::move(v));
    return out;
}

}  // namespace metamorph
