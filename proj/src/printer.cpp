#include <cstdio>

#include "metamorph/syntax.hpp"

namespace metamorph {

namespace {

// Printing precedence; higher binds tighter.
constexpr int kAssignPrec = 1;
constexpr int kTernaryPrec = 2;
constexpr int kPrefixPrec = 13;
constexpr int kPostfixPrec = 14;
constexpr int kPrimaryPrec = 15;

int binary_prec(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return 3;
        case BinaryOp::And: return 4;
        case BinaryOp::BitOr: return 5;
        case BinaryOp::BitXor: return 6;
        case BinaryOp::BitAnd: return 7;
        case BinaryOp::Eq:
        case BinaryOp::Ne: return 8;
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return 9;
        case BinaryOp::Shl:
        case BinaryOp::Shr:
        case BinaryOp::UShr: return 10;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 11;
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Mod: return 12;
    }
    return 0;
}

const char* binary_spelling(BinaryOp op) {
    switch (op) {
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Mod: return "%";
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Shl: return "<<";
        case BinaryOp::Shr: return ">>";
        case BinaryOp::UShr: return ">>>";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::BitAnd: return "&";
        case BinaryOp::BitXor: return "^";
        case BinaryOp::BitOr: return "|";
        case BinaryOp::And: return "&&";
        case BinaryOp::Or: return "||";
    }
    return "?";
}

const char* assign_spelling(AssignOp op) {
    switch (op) {
        case AssignOp::Assign: return "=";
        case AssignOp::Add: return "+=";
        case AssignOp::Sub: return "-=";
        case AssignOp::Mul: return "*=";
        case AssignOp::Div: return "/=";
        case AssignOp::Mod: return "%=";
        case AssignOp::BitAnd: return "&=";
        case AssignOp::BitOr: return "|=";
        case AssignOp::BitXor: return "^=";
        case AssignOp::Shl: return "<<=";
        case AssignOp::Shr: return ">>=";
        case AssignOp::UShr: return ">>>=";
    }
    return "?";
}

bool is_prefix(UnaryOp op) { return op != UnaryOp::PostInc && op != UnaryOp::PostDec; }

const char* unary_spelling(UnaryOp op) {
    switch (op) {
        case UnaryOp::Not: return "!";
        case UnaryOp::Neg: return "-";
        case UnaryOp::BitNot: return "~";
        case UnaryOp::PreInc:
        case UnaryOp::PostInc: return "++";
        case UnaryOp::PreDec:
        case UnaryOp::PostDec: return "--";
    }
    return "?";
}

int precedence(const Expr& e) {
    if (e.is<Assign>()) return kAssignPrec;
    if (e.is<Ternary>()) return kTernaryPrec;
    if (e.is<Binary>()) return binary_prec(e.as<Binary>().op);
    if (e.is<Unary>()) return is_prefix(e.as<Unary>().op) ? kPrefixPrec : kPostfixPrec;
    if (e.is<Cast>()) return kPrefixPrec;
    if (e.is<NewArray>()) return kPostfixPrec;
    return kPrimaryPrec;
}

bool is_prefix_unary(const Expr& e) { return e.is<Unary>() && is_prefix(e.as<Unary>().op); }

std::string quote_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
    return out;
}

std::string render(const Expr& e, int min_prec);

std::string render_args(const std::vector<Expr>& args) {
    std::string out = "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += render(args[i], kAssignPrec);
    }
    return out + ")";
}

std::string render_node(const Expr& e) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                return std::to_string(n.value);
            } else if constexpr (std::is_same_v<T, LongLit>) {
                return std::to_string(n.value) + "L";
            } else if constexpr (std::is_same_v<T, DoubleLit>) {
                return n.text;
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                return n.value ? "true" : "false";
            } else if constexpr (std::is_same_v<T, CharLit>) {
                return "'" + n.text + "'";
            } else if constexpr (std::is_same_v<T, StringLit>) {
                return quote_string(n.value);
            } else if constexpr (std::is_same_v<T, NullLit>) {
                return "null";
            } else if constexpr (std::is_same_v<T, Ident>) {
                return n.name;
            } else if constexpr (std::is_same_v<T, FieldAccess>) {
                return render(*n.object, kPrimaryPrec) + "." + n.field;
            } else if constexpr (std::is_same_v<T, Call>) {
                std::string out;
                if (n.receiver) out = render(**n.receiver, kPrimaryPrec) + ".";
                return out + n.name + render_args(n.args);
            } else if constexpr (std::is_same_v<T, Unary>) {
                if (!is_prefix(n.op)) return render(*n.operand, kPrimaryPrec) + unary_spelling(n.op);
                std::string operand = render(*n.operand, kPrefixPrec);
                if (is_prefix_unary(*n.operand)) operand = "(" + operand + ")";
                return unary_spelling(n.op) + operand;
            } else if constexpr (std::is_same_v<T, Binary>) {
                int p = binary_prec(n.op);
                return render(*n.lhs, p) + " " + binary_spelling(n.op) + " " + render(*n.rhs, p + 1);
            } else if constexpr (std::is_same_v<T, Assign>) {
                return render(*n.target, kPrimaryPrec) + " " + assign_spelling(n.op) + " " +
                       render(*n.value, kAssignPrec);
            } else if constexpr (std::is_same_v<T, Ternary>) {
                return render(*n.cond, kTernaryPrec + 1) + " ? " + render(*n.then_expr, kAssignPrec) + " : " +
                       render(*n.else_expr, kTernaryPrec);
            } else if constexpr (std::is_same_v<T, New>) {
                return "new " + n.type + render_args(n.args);
            } else if constexpr (std::is_same_v<T, NewArray>) {
                return "new " + n.element + "[" + render(*n.size, kAssignPrec) + "]";
            } else if constexpr (std::is_same_v<T, Cast>) {
                std::string operand = render(*n.operand, kPrefixPrec);
                if (is_prefix_unary(*n.operand)) operand = "(" + operand + ")";
                return "(" + n.type + ") " + operand;
            } else if constexpr (std::is_same_v<T, ArrayIndex>) {
                return render(*n.array, kPrimaryPrec) + "[" + render(*n.index, kAssignPrec) + "]";
            }
        },
        e.node);
}

std::string render(const Expr& e, int min_prec) {
    std::string s = render_node(e);
    if (precedence(e) < min_prec) return "(" + s + ")";
    return s;
}

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 4, ' '); }

void emit_stmt(std::string& out, const Stmt& stmt, int indent);

void emit_list(std::string& out, const std::vector<Stmt>& stmts, int indent) {
    for (const auto& s : stmts) emit_stmt(out, s, indent);
}

std::string decl_text(const VarDecl& d) {
    std::string out = d.is_final ? "final " : "";
    out += d.type + " " + d.name;
    if (d.init) out += " = " + render(*d.init, kAssignPrec);
    return out;
}

// Emits `if (...) {` ... `}` without a trailing newline so an else can follow.
void emit_if(std::string& out, const If& node, int indent) {
    out += "if (" + render(node.cond, kAssignPrec) + ") {\n";
    emit_list(out, node.then_block.stmts, indent + 1);
    out += pad(indent) + "}";
    if (!node.else_block) return;
    const auto& else_stmts = node.else_block->stmts;
    if (else_stmts.size() == 1 && else_stmts[0].is<If>()) {
        out += " else ";
        emit_if(out, else_stmts[0].as<If>(), indent);
        return;
    }
    out += " else {\n";
    emit_list(out, else_stmts, indent + 1);
    out += pad(indent) + "}";
}

void emit_stmt(std::string& out, const Stmt& stmt, int indent) {
    out += pad(indent);
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Block>) {
                out += "{\n";
                emit_list(out, n.stmts, indent + 1);
                out += pad(indent) + "}\n";
            } else if constexpr (std::is_same_v<T, VarDecl>) {
                out += decl_text(n) + ";\n";
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                out += render(n.expr, kAssignPrec) + ";\n";
            } else if constexpr (std::is_same_v<T, If>) {
                emit_if(out, n, indent);
                out += "\n";
            } else if constexpr (std::is_same_v<T, While>) {
                out += "while (" + render(n.cond, kAssignPrec) + ") {\n";
                emit_list(out, n.body.stmts, indent + 1);
                out += pad(indent) + "}\n";
            } else if constexpr (std::is_same_v<T, For>) {
                out += "for (";
                if (n.init) {
                    const Stmt& init = **n.init;
                    if (init.is<VarDecl>()) {
                        out += decl_text(init.as<VarDecl>());
                    } else {
                        out += render(init.as<ExprStmt>().expr, kAssignPrec);
                    }
                }
                out += ";";
                if (n.cond) out += " " + render(*n.cond, kAssignPrec);
                out += ";";
                if (n.update) out += " " + render(*n.update, kAssignPrec);
                out += ") {\n";
                emit_list(out, n.body.stmts, indent + 1);
                out += pad(indent) + "}\n";
            } else if constexpr (std::is_same_v<T, Switch>) {
                out += "switch (" + render(n.selector, kAssignPrec) + ") {\n";
                for (const auto& c : n.cases) {
                    for (const auto& label : c.labels)
                        out += pad(indent + 1) + "case " + render(label, kTernaryPrec) + ":\n";
                    if (c.is_default) out += pad(indent + 1) + "default:\n";
                    emit_list(out, c.body, indent + 2);
                }
                out += pad(indent) + "}\n";
            } else if constexpr (std::is_same_v<T, Return>) {
                out += n.value ? "return " + render(*n.value, kAssignPrec) + ";\n" : "return;\n";
            } else if constexpr (std::is_same_v<T, Break>) {
                out += "break;\n";
            } else if constexpr (std::is_same_v<T, Continue>) {
                out += "continue;\n";
            } else if constexpr (std::is_same_v<T, TryCatch>) {
                out += "try {\n";
                emit_list(out, n.body.stmts, indent + 1);
                out += pad(indent) + "} catch (" + n.exc_type + " " + n.exc_name + ") {\n";
                emit_list(out, n.handler.stmts, indent + 1);
                out += pad(indent) + "}\n";
            } else if constexpr (std::is_same_v<T, Assert>) {
                out += "assert " + render(n.cond, kAssignPrec) + ";\n";
            }
        },
        stmt.node);
}

}  // namespace

std::string print_expr(const Expr& expr) { return render(expr, kAssignPrec); }

std::string print_stmt(const Stmt& stmt, int indent) {
    std::string out;
    emit_stmt(out, stmt, indent);
    return out;
}

std::string print(const MethodAst& method) {
    std::string out;
    for (const auto& m : method.modifiers) out += m + " ";
    out += method.return_type + " " + method.name + "(";
    for (std::size_t i = 0; i < method.params.size(); ++i) {
        const auto& p = method.params[i];
        if (i) out += ", ";
        if (p.is_final) out += "final ";
        out += p.type + " " + p.name;
    }
    out += ")";
    if (!method.throws.empty()) {
        out += " throws ";
        for (std::size_t i = 0; i < method.throws.size(); ++i) {
            if (i) out += ", ";
            out += method.throws[i];
        }
    }
    out += " {\n";
    emit_list(out, method.body.stmts, 1);
    out += "}\n";
    return out;
}

}  // namespace metamorph
