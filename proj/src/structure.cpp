#include "metamorph/syntax.hpp"

namespace metamorph {

namespace {

class SexprWriter {
public:
    explicit SexprWriter(bool mask) : mask_(mask) {}

    std::string out;

    void name(const std::string& n) {
        out += ' ';
        out += mask_ ? std::string("_") : n;
    }
    void atom(const std::string& a) {
        out += ' ';
        out += a;
    }

    void expr(const Expr& e) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, IntLit>) {
                    out += "(int " + std::to_string(n.value) + ")";
                } else if constexpr (std::is_same_v<T, LongLit>) {
                    out += "(long " + std::to_string(n.value) + ")";
                } else if constexpr (std::is_same_v<T, DoubleLit>) {
                    out += "(double " + n.text + ")";
                } else if constexpr (std::is_same_v<T, BoolLit>) {
                    out += n.value ? "(bool true)" : "(bool false)";
                } else if constexpr (std::is_same_v<T, CharLit>) {
                    out += "(char " + std::to_string(n.text.size()) + ":" + n.text + ")";
                } else if constexpr (std::is_same_v<T, StringLit>) {
                    out += "(str " + std::to_string(n.value.size()) + ":" + n.value + ")";
                } else if constexpr (std::is_same_v<T, NullLit>) {
                    out += "(null)";
                } else if constexpr (std::is_same_v<T, Ident>) {
                    out += "(id";
                    // `this` is a keyword, not a renameable identifier.
                    if (n.name == "this") atom("this"); else name(n.name);
                    out += ")";
                } else if constexpr (std::is_same_v<T, FieldAccess>) {
                    out += "(field ";
                    expr(*n.object);
                    name(n.field);
                    out += ")";
                } else if constexpr (std::is_same_v<T, Call>) {
                    out += "(call";
                    name(n.name);
                    out += n.receiver ? " (recv " : " (norecv";
                    if (n.receiver) expr(**n.receiver);
                    out += ")";
                    for (const auto& a : n.args) {
                        out += ' ';
                        expr(a);
                    }
                    out += ")";
                } else if constexpr (std::is_same_v<T, Unary>) {
                    out += "(unary " + std::to_string(static_cast<int>(n.op)) + " ";
                    expr(*n.operand);
                    out += ")";
                } else if constexpr (std::is_same_v<T, Binary>) {
                    out += "(binary " + std::to_string(static_cast<int>(n.op)) + " ";
                    expr(*n.lhs);
                    out += ' ';
                    expr(*n.rhs);
                    out += ")";
                } else if constexpr (std::is_same_v<T, Assign>) {
                    out += "(assign " + std::to_string(static_cast<int>(n.op)) + " ";
                    expr(*n.target);
                    out += ' ';
                    expr(*n.value);
                    out += ")";
                } else if constexpr (std::is_same_v<T, Ternary>) {
                    out += "(ternary ";
                    expr(*n.cond);
                    out += ' ';
                    expr(*n.then_expr);
                    out += ' ';
                    expr(*n.else_expr);
                    out += ")";
                } else if constexpr (std::is_same_v<T, New>) {
                    out += "(new " + n.type;
                    for (const auto& a : n.args) {
                        out += ' ';
                        expr(a);
                    }
                    out += ")";
                } else if constexpr (std::is_same_v<T, NewArray>) {
                    out += "(newarray " + n.element + " ";
                    expr(*n.size);
                    out += ")";
                } else if constexpr (std::is_same_v<T, Cast>) {
                    out += "(cast " + n.type + " ";
                    expr(*n.operand);
                    out += ")";
                } else if constexpr (std::is_same_v<T, ArrayIndex>) {
                    out += "(index ";
                    expr(*n.array);
                    out += ' ';
                    expr(*n.index);
                    out += ")";
                }
            },
            e.node);
    }

    void list(const std::vector<Stmt>& stmts) {
        out += "(";
        for (std::size_t i = 0; i < stmts.size(); ++i) {
            if (i) out += ' ';
            stmt(stmts[i]);
        }
        out += ")";
    }

    void decl(const VarDecl& d) {
        out += d.is_final ? "(decl final " : "(decl ";
        out += d.type;
        name(d.name);
        if (d.init) {
            out += ' ';
            expr(*d.init);
        }
        out += ")";
    }

    void stmt(const Stmt& s) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Block>) {
                    out += "(block ";
                    list(n.stmts);
                    out += ")";
                } else if constexpr (std::is_same_v<T, VarDecl>) {
                    decl(n);
                } else if constexpr (std::is_same_v<T, ExprStmt>) {
                    out += "(expr ";
                    expr(n.expr);
                    out += ")";
                } else if constexpr (std::is_same_v<T, If>) {
                    out += "(if ";
                    expr(n.cond);
                    out += ' ';
                    list(n.then_block.stmts);
                    if (n.else_block) {
                        out += ' ';
                        list(n.else_block->stmts);
                    }
                    out += ")";
                } else if constexpr (std::is_same_v<T, While>) {
                    out += "(while ";
                    expr(n.cond);
                    out += ' ';
                    list(n.body.stmts);
                    out += ")";
                } else if constexpr (std::is_same_v<T, For>) {
                    out += "(for ";
                    if (n.init) stmt(**n.init); else out += "_";
                    out += ' ';
                    if (n.cond) expr(*n.cond); else out += "_";
                    out += ' ';
                    if (n.update) expr(*n.update); else out += "_";
                    out += ' ';
                    list(n.body.stmts);
                    out += ")";
                } else if constexpr (std::is_same_v<T, Switch>) {
                    out += "(switch ";
                    expr(n.selector);
                    for (const auto& c : n.cases) {
                        out += c.is_default ? " (case default" : " (case";
                        for (const auto& l : c.labels) {
                            out += ' ';
                            expr(l);
                        }
                        out += ' ';
                        list(c.body);
                        out += ")";
                    }
                    out += ")";
                } else if constexpr (std::is_same_v<T, Return>) {
                    out += "(return";
                    if (n.value) {
                        out += ' ';
                        expr(*n.value);
                    }
                    out += ")";
                } else if constexpr (std::is_same_v<T, Break>) {
                    out += "(break)";
                } else if constexpr (std::is_same_v<T, Continue>) {
                    out += "(continue)";
                } else if constexpr (std::is_same_v<T, TryCatch>) {
                    out += "(try ";
                    list(n.body.stmts);
                    out += " (catch " + n.exc_type;
                    name(n.exc_name);
                    out += ' ';
                    list(n.handler.stmts);
                    out += "))";
                } else if constexpr (std::is_same_v<T, Assert>) {
                    out += "(assert ";
                    expr(n.cond);
                    out += ")";
                }
            },
            s.node);
    }

    void method(const MethodAst& m) {
        out += "(method (mods";
        for (const auto& mod : m.modifiers) atom(mod);
        out += ") " + m.return_type;
        name(m.name);
        out += " (params";
        for (const auto& p : m.params) {
            out += p.is_final ? " (param final " : " (param ";
            out += p.type;
            name(p.name);
            out += ")";
        }
        out += ") (throws";
        for (const auto& t : m.throws) atom(t);
        out += ") ";
        list(m.body.stmts);
        out += ")";
    }

private:
    bool mask_;
};

std::size_t count_expr(const Expr& e) {
    return 1 + std::visit(
                   [](const auto& n) -> std::size_t {
                       using T = std::decay_t<decltype(n)>;
                       std::size_t c = 0;
                       if constexpr (std::is_same_v<T, FieldAccess>) {
                           c += count_expr(*n.object);
                       } else if constexpr (std::is_same_v<T, Call>) {
                           if (n.receiver) c += count_expr(**n.receiver);
                           for (const auto& a : n.args) c += count_expr(a);
                       } else if constexpr (std::is_same_v<T, Unary>) {
                           c += count_expr(*n.operand);
                       } else if constexpr (std::is_same_v<T, Binary>) {
                           c += count_expr(*n.lhs) + count_expr(*n.rhs);
                       } else if constexpr (std::is_same_v<T, Assign>) {
                           c += count_expr(*n.target) + count_expr(*n.value);
                       } else if constexpr (std::is_same_v<T, Ternary>) {
                           c += count_expr(*n.cond) + count_expr(*n.then_expr) + count_expr(*n.else_expr);
                       } else if constexpr (std::is_same_v<T, New>) {
                           for (const auto& a : n.args) c += count_expr(a);
                       } else if constexpr (std::is_same_v<T, NewArray>) {
                           c += count_expr(*n.size);
                       } else if constexpr (std::is_same_v<T, Cast>) {
                           c += count_expr(*n.operand);
                       } else if constexpr (std::is_same_v<T, ArrayIndex>) {
                           c += count_expr(*n.array) + count_expr(*n.index);
                       }
                       return c;
                   },
                   e.node);
}

// `nodes` selects node_count (Block wrappers and expressions count)
// versus stmt_count (statements only, Blocks excluded).
std::size_t count_stmt(const Stmt& s, bool nodes);

std::size_t count_list(const std::vector<Stmt>& stmts, bool nodes) {
    std::size_t c = 0;
    for (const auto& s : stmts) c += count_stmt(s, nodes);
    return c;
}

std::size_t count_stmt(const Stmt& s, bool nodes) {
    return std::visit(
        [&](const auto& n) -> std::size_t {
            using T = std::decay_t<decltype(n)>;
            auto ex = [&](const Expr& e) { return nodes ? count_expr(e) : 0; };
            if constexpr (std::is_same_v<T, Block>) {
                return (nodes ? 1 : 0) + count_list(n.stmts, nodes);
            } else if constexpr (std::is_same_v<T, VarDecl>) {
                return 1 + (n.init ? ex(*n.init) : 0);
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                return 1 + ex(n.expr);
            } else if constexpr (std::is_same_v<T, If>) {
                return 1 + ex(n.cond) + count_list(n.then_block.stmts, nodes) +
                       (n.else_block ? count_list(n.else_block->stmts, nodes) : 0);
            } else if constexpr (std::is_same_v<T, While>) {
                return 1 + ex(n.cond) + count_list(n.body.stmts, nodes);
            } else if constexpr (std::is_same_v<T, For>) {
                return 1 + (n.init ? count_stmt(**n.init, nodes) : 0) + (n.cond ? ex(*n.cond) : 0) +
                       (n.update ? ex(*n.update) : 0) + count_list(n.body.stmts, nodes);
            } else if constexpr (std::is_same_v<T, Switch>) {
                std::size_t c = 1 + ex(n.selector);
                for (const auto& cs : n.cases) {
                    for (const auto& l : cs.labels) c += ex(l);
                    c += count_list(cs.body, nodes);
                }
                return c;
            } else if constexpr (std::is_same_v<T, Return>) {
                return 1 + (n.value ? ex(*n.value) : 0);
            } else if constexpr (std::is_same_v<T, TryCatch>) {
                return 1 + count_list(n.body.stmts, nodes) + count_list(n.handler.stmts, nodes);
            } else if constexpr (std::is_same_v<T, Assert>) {
                return 1 + ex(n.cond);
            } else {
                return 1;
            }
        },
        s.node);
}

}  // namespace

std::string sexpr(const MethodAst& method, bool mask_identifiers) {
    SexprWriter w(mask_identifiers);
    w.method(method);
    return std::move(w.out);
}

std::string sexpr(const Stmt& stmt, bool mask_identifiers) {
    SexprWriter w(mask_identifiers);
    w.stmt(stmt);
    return std::move(w.out);
}

std::string sexpr(const Expr& expr, bool mask_identifiers) {
    SexprWriter w(mask_identifiers);
    w.expr(expr);
    return std::move(w.out);
}

bool structural_eq(const MethodAst& a, const MethodAst& b, bool ignore_identifiers) {
    return sexpr(a, ignore_identifiers) == sexpr(b, ignore_identifiers);
}

std::size_t node_count(const MethodAst& method) { return 1 + count_list(method.body.stmts, true); }

std::size_t node_count(const Stmt& stmt) { return count_stmt(stmt, true); }

std::size_t stmt_count(const MethodAst& method) { return count_list(method.body.stmts, false); }

}  // namespace metamorph
