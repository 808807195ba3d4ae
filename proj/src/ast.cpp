#include "metamorph/ast.hpp"

#include <stdexcept>

namespace metamorph {

Expr make_not(Expr operand) {
    if (operand.is<Unary>() && operand.as<Unary>().op == UnaryOp::Not) {
        Expr inner = std::move(*operand.as<Unary>().operand);
        return inner;
    }
    return Expr{Unary{UnaryOp::Not, std::move(operand)}};
}

Expr make_ident(std::string name) { return Expr{Ident{std::move(name)}}; }

Expr make_binary(BinaryOp op, Expr lhs, Expr rhs) {
    return Expr{Binary{op, std::move(lhs), std::move(rhs)}};
}

Expr make_unary(UnaryOp op, Expr operand) {
    if (op == UnaryOp::Not) return make_not(std::move(operand));
    return Expr{Unary{op, std::move(operand)}};
}

Expr make_assign(AssignOp op, Expr target, Expr value) {
    return Expr{Assign{op, std::move(target), std::move(value)}};
}

Expr make_call(std::optional<Expr> receiver, std::string name, std::vector<Expr> args) {
    Call call{std::nullopt, std::move(name), std::move(args)};
    if (receiver) call.receiver.emplace(std::move(*receiver));
    return Expr{std::move(call)};
}

namespace {

template <class StmtT, class ListPtr>
std::vector<ListPtr> lists_of(StmtT& stmt) {
    std::vector<ListPtr> out;
    std::visit(
        [&](auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Block>) {
                out.push_back(&node.stmts);
            } else if constexpr (std::is_same_v<T, If>) {
                out.push_back(&node.then_block.stmts);
                if (node.else_block) out.push_back(&node.else_block->stmts);
            } else if constexpr (std::is_same_v<T, While> || std::is_same_v<T, For>) {
                out.push_back(&node.body.stmts);
            } else if constexpr (std::is_same_v<T, Switch>) {
                for (auto& c : node.cases) out.push_back(&c.body);
            } else if constexpr (std::is_same_v<T, TryCatch>) {
                out.push_back(&node.body.stmts);
                out.push_back(&node.handler.stmts);
            }
        },
        stmt.node);
    return out;
}

template <class M, class List, class S>
List& list_at_impl(M& method, const NodePath& path) {
    if (path.size() % 2 != 0) throw std::out_of_range("path does not name a statement list");
    List* list = &method.body.stmts;
    for (std::size_t i = 0; i < path.size(); i += 2) {
        if (path[i] >= list->size()) throw std::out_of_range("statement index out of range");
        S& stmt = (*list)[path[i]];
        auto lists = stmt_lists(stmt);
        if (path[i + 1] >= lists.size()) throw std::out_of_range("list slot out of range");
        list = lists[path[i + 1]];
    }
    return *list;
}

}  // namespace

std::vector<std::vector<Stmt>*> stmt_lists(Stmt& stmt) {
    return lists_of<Stmt, std::vector<Stmt>*>(stmt);
}

std::vector<const std::vector<Stmt>*> stmt_lists(const Stmt& stmt) {
    return lists_of<const Stmt, const std::vector<Stmt>*>(stmt);
}

std::vector<Stmt>& list_at(MethodAst& method, const NodePath& path) {
    return list_at_impl<MethodAst, std::vector<Stmt>, Stmt>(method, path);
}

const std::vector<Stmt>& list_at(const MethodAst& method, const NodePath& path) {
    return list_at_impl<const MethodAst, const std::vector<Stmt>, const Stmt>(method, path);
}

Stmt& stmt_at(MethodAst& method, const NodePath& path) {
    if (path.size() % 2 != 1) throw std::out_of_range("path does not name a statement");
    NodePath parent(path.begin(), path.end() - 1);
    auto& list = list_at(method, parent);
    if (path.back() >= list.size()) throw std::out_of_range("statement index out of range");
    return list[path.back()];
}

const Stmt& stmt_at(const MethodAst& method, const NodePath& path) {
    if (path.size() % 2 != 1) throw std::out_of_range("path does not name a statement");
    NodePath parent(path.begin(), path.end() - 1);
    const auto& list = list_at(method, parent);
    if (path.back() >= list.size()) throw std::out_of_range("statement index out of range");
    return list[path.back()];
}

std::string path_to_string(const NodePath& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(path[i]);
    }
    return out;
}

}  // namespace metamorph
