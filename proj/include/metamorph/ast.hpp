// Syntax tree for MethodLang, the Java subset the transformation engine
// operates on. One tree describes exactly one method.
//
// Trees are plain values: every node owns its children, copies are deep,
// and two trees never share a node. Children that are optional or
// recursive are held in Box<T>, a copyable owning pointer.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace metamorph {

/// Owning, deep-copying pointer. Never null once constructed from a value.
template <class T>
class Box {
public:
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
    Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& other) {
        if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;
    ~Box() = default;

    T& operator*() { return *ptr_; }
    const T& operator*() const { return *ptr_; }
    T* operator->() { return ptr_.get(); }
    const T* operator->() const { return ptr_.get(); }

private:
    std::unique_ptr<T> ptr_;
};

/// Type names are kept as written, e.g. `int`, `String`, `int[]`, `Foo.Bar`.
using TypeName = std::string;

struct Expr;
struct Stmt;

enum class UnaryOp { Not, Neg, BitNot, PreInc, PreDec, PostInc, PostDec };

enum class BinaryOp {
    Mul, Div, Mod,
    Add, Sub,
    Shl, Shr, UShr,
    Lt, Le, Gt, Ge,
    Eq, Ne,
    BitAnd, BitXor, BitOr,
    And, Or,
};

enum class AssignOp { Assign, Add, Sub, Mul, Div, Mod, BitAnd, BitOr, BitXor, Shl, Shr, UShr };

// Literal values from the parser are non-negative; `-5` is Neg(IntLit 5).
struct IntLit { std::int64_t value = 0; };
struct LongLit { std::int64_t value = 0; };
struct DoubleLit { std::string text; };
struct BoolLit { bool value = false; };
struct CharLit { std::string text; };    // spelling between the quotes, escapes kept
struct StringLit { std::string value; }; // decoded contents
struct NullLit {};
struct Ident { std::string name; };      // `this` is an Ident that never resolves

struct FieldAccess {
    Box<Expr> object;
    std::string field;
};

struct Call {
    std::optional<Box<Expr>> receiver;
    std::string name;
    std::vector<Expr> args;
};

struct Unary {
    UnaryOp op;
    Box<Expr> operand;
};

struct Binary {
    BinaryOp op;
    Box<Expr> lhs;
    Box<Expr> rhs;
};

struct Assign {
    AssignOp op;
    Box<Expr> target;
    Box<Expr> value;
};

struct Ternary {
    Box<Expr> cond;
    Box<Expr> then_expr;
    Box<Expr> else_expr;
};

struct New {
    TypeName type;
    std::vector<Expr> args;
};

struct NewArray {
    TypeName element;
    Box<Expr> size;
};

struct Cast {
    TypeName type;
    Box<Expr> operand;
};

struct ArrayIndex {
    Box<Expr> array;
    Box<Expr> index;
};

struct Expr {
    using Node = std::variant<IntLit, LongLit, DoubleLit, BoolLit, CharLit, StringLit, NullLit, Ident,
                              FieldAccess, Call, Unary, Binary, Assign, Ternary, New, NewArray, Cast,
                              ArrayIndex>;
    Node node;

    template <class T>
    bool is() const { return std::holds_alternative<T>(node); }
    template <class T>
    T& as() { return std::get<T>(node); }
    template <class T>
    const T& as() const { return std::get<T>(node); }
};

// Normalizing constructors. make_not folds `!!e` to `e`, so a tree built
// through it never contains a double negation.
Expr make_not(Expr operand);
Expr make_ident(std::string name);
Expr make_binary(BinaryOp op, Expr lhs, Expr rhs);
Expr make_unary(UnaryOp op, Expr operand);
Expr make_assign(AssignOp op, Expr target, Expr value);
Expr make_call(std::optional<Expr> receiver, std::string name, std::vector<Expr> args);

struct Block {
    std::vector<Stmt> stmts;
};

struct VarDecl {
    TypeName type;
    std::string name;
    std::optional<Expr> init;
    bool is_final = false;
};

struct ExprStmt { Expr expr; };

/// An `else if` is an else block holding exactly one If.
struct If {
    Expr cond;
    Block then_block;
    std::optional<Block> else_block;
};

struct While {
    Expr cond;
    Block body;
};

struct For {
    std::optional<Box<Stmt>> init;  // VarDecl or ExprStmt
    std::optional<Expr> cond;
    std::optional<Expr> update;
    Block body;
};

/// Consecutive labels sharing one body are merged into a single case.
struct SwitchCase {
    std::vector<Expr> labels;
    bool is_default = false;
    std::vector<Stmt> body;
};

struct Switch {
    Expr selector;
    std::vector<SwitchCase> cases;
};

struct Return { std::optional<Expr> value; };
struct Break {};
struct Continue {};

struct TryCatch {
    Block body;
    TypeName exc_type;
    std::string exc_name;
    Block handler;
};

struct Assert { Expr cond; };

struct Stmt {
    using Node = std::variant<Block, VarDecl, ExprStmt, If, While, For, Switch, Return, Break, Continue,
                              TryCatch, Assert>;
    Node node;

    template <class T>
    bool is() const { return std::holds_alternative<T>(node); }
    template <class T>
    T& as() { return std::get<T>(node); }
    template <class T>
    const T& as() const { return std::get<T>(node); }
};

struct Param {
    TypeName type;
    std::string name;
    bool is_final = false;
};

struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct MethodAst {
    std::vector<std::string> modifiers;
    TypeName return_type;
    std::string name;
    std::vector<Param> params;
    std::vector<TypeName> throws;
    Block body;
    SourceSpan source_span;
};

// ---------------------------------------------------------------------------
// Statement addressing.
//
// A NodePath walks down from the method body. Even positions are statement
// indices within a statement list; odd positions pick one of the statement
// lists owned by that statement (see stmt_lists). An even-length path names
// a statement list (the empty path is the body), an odd-length path names a
// statement.

using NodePath = std::vector<std::size_t>;

/// Statement lists directly owned by `stmt`, in document order:
/// Block → its statements; If → then, else; While/For → body;
/// Switch → one list per case; TryCatch → body, handler.
std::vector<std::vector<Stmt>*> stmt_lists(Stmt& stmt);
std::vector<const std::vector<Stmt>*> stmt_lists(const Stmt& stmt);

std::vector<Stmt>& list_at(MethodAst& method, const NodePath& path);
const std::vector<Stmt>& list_at(const MethodAst& method, const NodePath& path);
Stmt& stmt_at(MethodAst& method, const NodePath& path);
const Stmt& stmt_at(const MethodAst& method, const NodePath& path);

std::string path_to_string(const NodePath& path);

/// Calls `fn(stmt, path)` for every statement reachable through statement
/// lists, in pre-order. For-loop init statements are not visited.
template <class Fn>
void for_each_stmt(const MethodAst& method, Fn&& fn);

namespace detail {
template <class Fn>
void for_each_stmt_in(const std::vector<Stmt>& list, NodePath& path, Fn& fn) {
    for (std::size_t i = 0; i < list.size(); ++i) {
        path.push_back(i);
        fn(list[i], static_cast<const NodePath&>(path));
        auto lists = stmt_lists(list[i]);
        for (std::size_t slot = 0; slot < lists.size(); ++slot) {
            path.push_back(slot);
            for_each_stmt_in(*lists[slot], path, fn);
            path.pop_back();
        }
        path.pop_back();
    }
}
}  // namespace detail

template <class Fn>
void for_each_stmt(const MethodAst& method, Fn&& fn) {
    NodePath path;
    detail::for_each_stmt_in(method.body.stmts, path, fn);
}

/// Calls `fn(list, path)` for the body and every nested statement list, pre-order.
template <class Fn>
void for_each_list(const MethodAst& method, Fn&& fn) {
    fn(method.body.stmts, NodePath{});
    for_each_stmt(method, [&](const Stmt& stmt, const NodePath& path) {
        auto lists = stmt_lists(stmt);
        for (std::size_t slot = 0; slot < lists.size(); ++slot) {
            NodePath sub = path;
            sub.push_back(slot);
            fn(*lists[slot], static_cast<const NodePath&>(sub));
        }
    });
}

}  // namespace metamorph
