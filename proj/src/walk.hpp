// Scope-aware document-order traversal shared by scope resolution and the
// rewriting transformations. Internal to the library.
//
// Visitors provide:
//   enter_scope(), exit_scope()
//   declare(name, type, DeclKind, init)   name is std::string& or const std::string&
//   use(ident_expr, UseContext, parent)   ident_expr holds an Ident
//   on_expr(expr), on_stmt(stmt)          pre-order hooks
//
// For Read and NegatedRead uses the visitor may overwrite `parent` (for
// NegatedRead, the `!` node) or `ident_expr` (for Read); the walker does not
// touch those nodes afterwards. Every occurrence of a name produces exactly
// one use() call, so call counts are stable occurrence ordinals.

#pragma once

#include <type_traits>

#include "metamorph/analysis.hpp"
#include "metamorph/ast.hpp"

namespace metamorph::detail {

struct NullVisitor {
    void enter_scope() {}
    void exit_scope() {}
    template <class S>
    void declare(S&, const TypeName&, DeclKind, const Expr*) {}
    template <class E>
    void use(E&, UseContext, E*) {}
    template <class E>
    void on_expr(E&) {}
    template <class S>
    void on_stmt(S&) {}
};

template <class V>
class Walker {
public:
    explicit Walker(V& v) : v_(v) {}

    template <class M>
    void method(M& m) {
        v_.enter_scope();
        for (auto& p : m.params) v_.declare(p.name, p.type, DeclKind::Param, nullptr);
        block(m.body);
        v_.exit_scope();
    }

    template <class B>
    void block(B& b) {
        v_.enter_scope();
        for (auto& s : b.stmts) stmt(s);
        v_.exit_scope();
    }

    template <class S>
    void stmt(S& s) {
        v_.on_stmt(s);
        std::visit([&](auto& n) { stmt_node(n); }, s.node);
    }

    template <class E>
    void expr(E& e) {
        v_.on_expr(e);
        if (e.template is<Ident>()) {
            v_.use(e, UseContext::Read, static_cast<E*>(nullptr));
            return;
        }
        if (e.template is<Unary>()) {
            auto& u = e.template as<Unary>();
            if (u.operand->template is<Ident>()) {
                if (u.op == UnaryOp::Not) {
                    v_.on_expr(*u.operand);
                    v_.use(*u.operand, UseContext::NegatedRead, &e);
                    return;
                }
                if (u.op == UnaryOp::PreInc || u.op == UnaryOp::PreDec || u.op == UnaryOp::PostInc ||
                    u.op == UnaryOp::PostDec) {
                    v_.on_expr(*u.operand);
                    v_.use(*u.operand, UseContext::UpdateTarget, &e);
                    return;
                }
            }
            if (is_update(u.op)) {
                lvalue(*u.operand);
                return;
            }
            expr(*u.operand);
            return;
        }
        if (e.template is<Assign>()) {
            auto& a = e.template as<Assign>();
            if (a.target->template is<Ident>()) {
                v_.on_expr(*a.target);
                v_.use(*a.target, a.op == AssignOp::Assign ? UseContext::AssignTarget : UseContext::UpdateTarget,
                       &e);
            } else {
                lvalue(*a.target);
            }
            expr(*a.value);
            return;
        }
        std::visit([&](auto& n) { expr_node(n); }, e.node);
    }

private:
    static bool is_update(UnaryOp op) {
        return op == UnaryOp::PreInc || op == UnaryOp::PreDec || op == UnaryOp::PostInc || op == UnaryOp::PostDec;
    }

    // Field or element lvalue: the base variable is written through.
    template <class E>
    void lvalue(E& target) {
        v_.on_expr(target);
        if (target.template is<FieldAccess>()) {
            lvalue_base(*target.template as<FieldAccess>().object);
        } else if (target.template is<ArrayIndex>()) {
            auto& ai = target.template as<ArrayIndex>();
            lvalue_base(*ai.array);
            expr(*ai.index);
        } else {
            expr(target);
        }
    }

    template <class E>
    void lvalue_base(E& base) {
        if (base.template is<Ident>()) {
            v_.on_expr(base);
            v_.use(base, UseContext::MemberWrite, static_cast<E*>(nullptr));
        } else if (base.template is<FieldAccess>() || base.template is<ArrayIndex>()) {
            lvalue(base);
        } else {
            expr(base);
        }
    }

    template <class N>
    void stmt_node(N& n) {
        using T = std::remove_const_t<N>;
        if constexpr (std::is_same_v<T, Block>) {
            block(n);
        } else if constexpr (std::is_same_v<T, VarDecl>) {
            if (n.init) expr(*n.init);
            v_.declare(n.name, n.type, DeclKind::Local, n.init ? &*n.init : nullptr);
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
            expr(n.expr);
        } else if constexpr (std::is_same_v<T, If>) {
            expr(n.cond);
            block(n.then_block);
            if (n.else_block) block(*n.else_block);
        } else if constexpr (std::is_same_v<T, While>) {
            expr(n.cond);
            block(n.body);
        } else if constexpr (std::is_same_v<T, For>) {
            v_.enter_scope();
            if (n.init) stmt(**n.init);
            if (n.cond) expr(*n.cond);
            if (n.update) expr(*n.update);
            block(n.body);
            v_.exit_scope();
        } else if constexpr (std::is_same_v<T, Switch>) {
            expr(n.selector);
            v_.enter_scope();
            for (auto& c : n.cases) {
                for (auto& l : c.labels) expr(l);
                for (auto& s : c.body) stmt(s);
            }
            v_.exit_scope();
        } else if constexpr (std::is_same_v<T, Return>) {
            if (n.value) expr(*n.value);
        } else if constexpr (std::is_same_v<T, TryCatch>) {
            block(n.body);
            v_.enter_scope();
            v_.declare(n.exc_name, n.exc_type, DeclKind::Catch, nullptr);
            block(n.handler);
            v_.exit_scope();
        } else if constexpr (std::is_same_v<T, Assert>) {
            expr(n.cond);
        }
    }

    template <class N>
    void expr_node(N& n) {
        using T = std::remove_const_t<N>;
        if constexpr (std::is_same_v<T, FieldAccess>) {
            expr(*n.object);
        } else if constexpr (std::is_same_v<T, Call>) {
            if (n.receiver) expr(**n.receiver);
            for (auto& a : n.args) expr(a);
        } else if constexpr (std::is_same_v<T, Unary>) {
            expr(*n.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
            expr(*n.lhs);
            expr(*n.rhs);
        } else if constexpr (std::is_same_v<T, Ternary>) {
            expr(*n.cond);
            expr(*n.then_expr);
            expr(*n.else_expr);
        } else if constexpr (std::is_same_v<T, New>) {
            for (auto& a : n.args) expr(a);
        } else if constexpr (std::is_same_v<T, NewArray>) {
            expr(*n.size);
        } else if constexpr (std::is_same_v<T, Cast>) {
            expr(*n.operand);
        } else if constexpr (std::is_same_v<T, ArrayIndex>) {
            expr(*n.array);
            expr(*n.index);
        }
    }

    V& v_;
};

template <class V, class M>
void walk_method(M& m, V& v) {
    Walker<V>(v).method(m);
}

template <class V, class S>
void walk_stmt(S& s, V& v) {
    Walker<V>(v).stmt(s);
}

}  // namespace metamorph::detail
