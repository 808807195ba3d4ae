// Recursive-descent parser for MethodLang. Expressions use precedence
// climbing; anything outside the subset is rejected with a ParseError that
// names the construct.

#include <algorithm>
#include <set>

#include "lexer.hpp"
#include "metamorph/syntax.hpp"

namespace metamorph {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

bool is_identifier(std::string_view text) {
    if (text.empty()) return false;
    auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
    if (!alpha(text[0])) return false;
    return std::all_of(text.begin() + 1, text.end(), [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

namespace {

using detail::Token;
using detail::TokenKind;

bool is_primitive(std::string_view word) {
    return word == "int" || word == "long" || word == "double" || word == "boolean" || word == "char" ||
           word == "byte" || word == "short" || word == "float";
}

bool is_modifier(std::string_view word) {
    return word == "public" || word == "private" || word == "protected" || word == "static" || word == "final" ||
           word == "synchronized" || word == "abstract" || word == "native" || word == "strictfp";
}

int binary_precedence(const Token& tok) {
    if (tok.kind != TokenKind::Punct) return -1;
    const auto& t = tok.text;
    if (t == "||") return 1;
    if (t == "&&") return 2;
    if (t == "|") return 3;
    if (t == "^") return 4;
    if (t == "&") return 5;
    if (t == "==" || t == "!=") return 6;
    if (t == "<" || t == "<=" || t == ">" || t == ">=") return 7;
    if (t == "<<" || t == ">>" || t == ">>>") return 8;
    if (t == "+" || t == "-") return 9;
    if (t == "*" || t == "/" || t == "%") return 10;
    return -1;
}

BinaryOp binary_op(const std::string& t) {
    if (t == "||") return BinaryOp::Or;
    if (t == "&&") return BinaryOp::And;
    if (t == "|") return BinaryOp::BitOr;
    if (t == "^") return BinaryOp::BitXor;
    if (t == "&") return BinaryOp::BitAnd;
    if (t == "==") return BinaryOp::Eq;
    if (t == "!=") return BinaryOp::Ne;
    if (t == "<") return BinaryOp::Lt;
    if (t == "<=") return BinaryOp::Le;
    if (t == ">") return BinaryOp::Gt;
    if (t == ">=") return BinaryOp::Ge;
    if (t == "<<") return BinaryOp::Shl;
    if (t == ">>") return BinaryOp::Shr;
    if (t == ">>>") return BinaryOp::UShr;
    if (t == "+") return BinaryOp::Add;
    if (t == "-") return BinaryOp::Sub;
    if (t == "*") return BinaryOp::Mul;
    if (t == "/") return BinaryOp::Div;
    return BinaryOp::Mod;
}

std::optional<AssignOp> assign_op(const Token& tok) {
    if (tok.kind != TokenKind::Punct) return std::nullopt;
    const auto& t = tok.text;
    if (t == "=") return AssignOp::Assign;
    if (t == "+=") return AssignOp::Add;
    if (t == "-=") return AssignOp::Sub;
    if (t == "*=") return AssignOp::Mul;
    if (t == "/=") return AssignOp::Div;
    if (t == "%=") return AssignOp::Mod;
    if (t == "&=") return AssignOp::BitAnd;
    if (t == "|=") return AssignOp::BitOr;
    if (t == "^=") return AssignOp::BitXor;
    if (t == "<<=") return AssignOp::Shl;
    if (t == ">>=") return AssignOp::Shr;
    if (t == ">>>=") return AssignOp::UShr;
    return std::nullopt;
}

bool assignable(const Expr& e) { return e.is<Ident>() || e.is<FieldAccess>() || e.is<ArrayIndex>(); }

Block to_block(Stmt stmt) {
    if (stmt.is<Block>()) return std::move(stmt.as<Block>());
    Block block;
    block.stmts.push_back(std::move(stmt));
    return block;
}

class Parser {
public:
    explicit Parser(std::string_view source) : tokens_(detail::tokenize(source)) {}

    MethodAst parse_method() {
        MethodAst method;
        method.source_span.begin = peek().offset;
        skip_annotations();
        while (peek().kind == TokenKind::Keyword && is_modifier(peek().text)) {
            method.modifiers.push_back(next().text);
            skip_annotations();
        }
        if (peek().punct("<")) fail("generic methods are not supported");
        if (peek().keyword("class") || peek().keyword("interface") || peek().keyword("enum"))
            fail("type declarations are not supported; expected a single method");
        if (peek().keyword("void")) {
            method.return_type = next().text;
        } else {
            method.return_type = parse_type();
        }
        method.name = expect_identifier("method name");
        expect("(");
        if (!peek().punct(")")) {
            for (;;) {
                skip_annotations();
                Param p;
                if (peek().keyword("final")) {
                    next();
                    p.is_final = true;
                }
                p.type = parse_type();
                if (peek().punct("...")) fail("varargs parameters are not supported");
                p.name = expect_identifier("parameter name");
                if (peek().punct("[")) fail("C-style array parameters are not supported");
                method.params.push_back(std::move(p));
                if (!accept(",")) break;
            }
        }
        expect(")");
        if (accept_keyword("throws")) {
            do {
                method.throws.push_back(parse_qualified_name());
            } while (accept(","));
        }
        if (peek().punct(";")) fail("method has no body");
        if (!peek().punct("{")) fail("expected '{' to open the method body");
        method.body = parse_block();
        method.source_span.end = tokens_[pos_ - 1].end_offset;
        if (peek().kind != TokenKind::End) fail("expected end of input after the method");
        return method;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }
    const Token& next() {
        const Token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        if (t.kind == TokenKind::End) throw ParseError(t.line, t.column, msg + " (at end of input)");
        throw ParseError(t.line, t.column, msg);
    }
    bool accept(std::string_view punct) {
        if (peek().punct(punct)) {
            next();
            return true;
        }
        return false;
    }
    bool accept_keyword(std::string_view kw) {
        if (peek().keyword(kw)) {
            next();
            return true;
        }
        return false;
    }
    void expect(std::string_view punct) {
        if (!accept(punct)) fail("expected '" + std::string(punct) + "'");
    }
    std::string expect_identifier(const char* what) {
        if (peek().kind != TokenKind::Identifier) fail(std::string("expected ") + what);
        return next().text;
    }

    void skip_annotations() {
        while (peek().punct("@")) {
            next();
            if (peek().keyword("interface")) fail("annotation declarations are not supported");
            parse_qualified_name();
            if (peek().punct("(")) {
                int depth = 0;
                do {
                    if (peek().kind == TokenKind::End) fail("unterminated annotation");
                    if (peek().punct("(")) ++depth;
                    if (peek().punct(")")) --depth;
                    next();
                } while (depth > 0);
            }
        }
    }

    std::string parse_qualified_name() {
        std::string name = expect_identifier("type name");
        while (peek().punct(".") && peek(1).kind == TokenKind::Identifier) {
            next();
            name += "." + next().text;
        }
        return name;
    }

    TypeName parse_type() {
        TypeName type;
        if (peek().kind == TokenKind::Keyword && is_primitive(peek().text)) {
            type = next().text;
        } else if (peek().kind == TokenKind::Identifier) {
            type = parse_qualified_name();
        } else {
            fail("expected a type");
        }
        if (peek().punct("<")) fail("generic types are not supported");
        if (peek().punct("[") && peek(1).punct("]")) {
            next();
            next();
            type += "[]";
            if (peek().punct("[")) fail("multi-dimensional arrays are not supported");
        }
        return type;
    }

    // Token-level lookahead: does a local variable declaration start here?
    bool looks_like_decl() const {
        std::size_t i = 0;
        if (peek(i).keyword("final")) ++i;
        const Token& first = peek(i);
        if (first.kind == TokenKind::Keyword && is_primitive(first.text)) return true;
        if (first.kind != TokenKind::Identifier) return false;
        ++i;
        while (peek(i).punct(".") && peek(i + 1).kind == TokenKind::Identifier) i += 2;
        if (peek(i).punct("<")) {
            // `List<String> xs` vs `a < b`: only a declaration if an identifier follows `>`.
            std::size_t j = i + 1;
            int depth = 1;
            while (depth > 0 && peek(j).kind != TokenKind::End && j < i + 32) {
                if (peek(j).punct("<")) ++depth;
                if (peek(j).punct(">")) --depth;
                if (peek(j).punct(">>")) depth -= 2;
                if (peek(j).punct(";") || peek(j).punct("(") || peek(j).punct(")")) return false;
                ++j;
            }
            return depth <= 0 && peek(j).kind == TokenKind::Identifier;
        }
        if (peek(i).punct("[") && peek(i + 1).punct("]")) i += 2;
        return peek(i).kind == TokenKind::Identifier;
    }

    VarDecl parse_var_decl_head() {
        VarDecl decl;
        if (accept_keyword("final")) decl.is_final = true;
        decl.type = parse_type();
        decl.name = expect_identifier("variable name");
        if (peek().punct("[")) fail("C-style array declarators are not supported");
        if (accept("=")) {
            if (peek().punct("{")) fail("array initializers are not supported");
            decl.init = parse_expr();
        }
        if (peek().punct(",")) fail("multiple declarators in one declaration are not supported");
        return decl;
    }

    Block parse_block() {
        expect("{");
        Block block;
        while (!peek().punct("}")) {
            if (peek().kind == TokenKind::End) fail("expected '}'");
            block.stmts.push_back(parse_stmt());
        }
        expect("}");
        return block;
    }

    Stmt parse_stmt() {
        const Token& t = peek();
        if (t.punct("{")) return Stmt{parse_block()};
        if (t.punct(";")) {
            next();
            return Stmt{Block{}};
        }
        if (t.punct("@")) fail("annotations on statements are not supported");
        if (t.kind == TokenKind::Keyword) {
            const std::string& kw = t.text;
            if (kw == "if") return parse_if();
            if (kw == "while") return parse_while();
            if (kw == "for") return parse_for();
            if (kw == "switch") return parse_switch();
            if (kw == "try") return parse_try();
            if (kw == "return") {
                next();
                Return r;
                if (!peek().punct(";")) r.value = parse_expr();
                expect(";");
                return Stmt{std::move(r)};
            }
            if (kw == "break") {
                next();
                if (peek().kind == TokenKind::Identifier) fail("labeled break is not supported");
                expect(";");
                return Stmt{Break{}};
            }
            if (kw == "continue") {
                next();
                if (peek().kind == TokenKind::Identifier) fail("labeled continue is not supported");
                expect(";");
                return Stmt{Continue{}};
            }
            if (kw == "assert") {
                next();
                Assert a{parse_expr()};
                if (peek().punct(":")) fail("assert messages are not supported");
                expect(";");
                return Stmt{std::move(a)};
            }
            if (kw == "do") fail("do-while loops are not supported");
            if (kw == "throw") fail("throw statements are not supported");
            if (kw == "class" || kw == "interface" || kw == "enum") fail("local type declarations are not supported");
            if (kw == "synchronized") fail("synchronized blocks are not supported");
            if (kw == "else") fail("'else' without 'if'");
            if (kw == "case" || kw == "default") fail("case label outside a switch");
        }
        if (t.kind == TokenKind::Identifier && peek(1).punct(":")) fail("labeled statements are not supported");
        if (looks_like_decl()) {
            VarDecl decl = parse_var_decl_head();
            expect(";");
            return Stmt{std::move(decl)};
        }
        Expr e = parse_expr();
        expect(";");
        return Stmt{ExprStmt{std::move(e)}};
    }

    Stmt parse_if() {
        next();
        expect("(");
        Expr cond = parse_expr();
        expect(")");
        If node{std::move(cond), to_block(parse_stmt()), std::nullopt};
        if (accept_keyword("else")) node.else_block = to_block(parse_stmt());
        return Stmt{std::move(node)};
    }

    Stmt parse_while() {
        next();
        expect("(");
        Expr cond = parse_expr();
        expect(")");
        return Stmt{While{std::move(cond), to_block(parse_stmt())}};
    }

    Stmt parse_for() {
        next();
        expect("(");
        For node;
        if (!peek().punct(";")) {
            if (looks_like_decl()) {
                VarDecl decl = parse_var_decl_head();
                if (peek().punct(":")) fail("enhanced for loops are not supported");
                node.init.emplace(Stmt{std::move(decl)});
            } else {
                node.init.emplace(Stmt{ExprStmt{parse_expr()}});
            }
        }
        if (peek().punct(",")) fail("comma-separated for-init is not supported");
        if (peek().punct(":")) fail("enhanced for loops are not supported");
        expect(";");
        if (!peek().punct(";")) node.cond = parse_expr();
        expect(";");
        if (!peek().punct(")")) node.update = parse_expr();
        if (peek().punct(",")) fail("comma-separated for-update is not supported");
        expect(")");
        node.body = to_block(parse_stmt());
        return Stmt{std::move(node)};
    }

    static bool is_constant_label(const Expr& e) {
        if (e.is<IntLit>() || e.is<LongLit>() || e.is<CharLit>() || e.is<StringLit>()) return true;
        if (e.is<Unary>() && e.as<Unary>().op == UnaryOp::Neg) {
            const Expr& inner = *e.as<Unary>().operand;
            return inner.is<IntLit>() || inner.is<LongLit>();
        }
        return false;
    }

    Stmt parse_switch() {
        next();
        expect("(");
        Switch node{parse_expr(), {}};
        expect(")");
        expect("{");
        std::set<std::string> seen;
        bool seen_default = false;
        while (!peek().punct("}")) {
            if (peek().kind == TokenKind::End) fail("expected '}' to close switch");
            if (!peek().keyword("case") && !peek().keyword("default")) fail("expected 'case' or 'default'");
            SwitchCase c;
            while (peek().keyword("case") || peek().keyword("default")) {
                if (accept_keyword("default")) {
                    if (seen_default) fail("duplicate default label");
                    seen_default = true;
                    c.is_default = true;
                } else {
                    next();
                    Expr label = parse_ternary();
                    if (!is_constant_label(label)) fail("case labels must be literal constants");
                    if (!seen.insert(sexpr(label)).second) fail("duplicate case label");
                    c.labels.push_back(std::move(label));
                }
                if (peek().punct("->")) fail("arrow-form switch cases are not supported");
                expect(":");
            }
            while (!peek().punct("}") && !peek().keyword("case") && !peek().keyword("default")) {
                if (peek().kind == TokenKind::End) fail("expected '}' to close switch");
                c.body.push_back(parse_stmt());
            }
            node.cases.push_back(std::move(c));
        }
        expect("}");
        return Stmt{std::move(node)};
    }

    Stmt parse_try() {
        next();
        if (peek().punct("(")) fail("try-with-resources is not supported");
        TryCatch node;
        node.body = parse_block();
        if (peek().keyword("finally")) fail("finally blocks are not supported");
        if (!accept_keyword("catch")) fail("expected 'catch'");
        expect("(");
        accept_keyword("final");
        node.exc_type = parse_qualified_name();
        if (peek().punct("|")) fail("multi-catch is not supported");
        node.exc_name = expect_identifier("exception variable name");
        expect(")");
        node.handler = parse_block();
        if (peek().keyword("catch")) fail("multiple catch clauses are not supported");
        if (peek().keyword("finally")) fail("finally blocks are not supported");
        return Stmt{std::move(node)};
    }

    // ---- expressions ----------------------------------------------------

    Expr parse_expr() {
        Expr lhs = parse_ternary();
        if (auto op = assign_op(peek())) {
            if (!assignable(lhs)) fail("left-hand side of assignment is not assignable");
            next();
            Expr rhs = parse_expr();
            return make_assign(*op, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Expr parse_ternary() {
        Expr cond = parse_binary(1);
        if (accept("?")) {
            Expr then_e = parse_expr();
            expect(":");
            Expr else_e = parse_ternary();
            return Expr{Ternary{std::move(cond), std::move(then_e), std::move(else_e)}};
        }
        return cond;
    }

    Expr parse_binary(int min_prec) {
        Expr lhs = parse_unary();
        for (;;) {
            if (peek().keyword("instanceof")) fail("instanceof is not supported");
            int prec = binary_precedence(peek());
            if (prec < min_prec) return lhs;
            BinaryOp op = binary_op(next().text);
            Expr rhs = parse_binary(prec + 1);
            lhs = make_binary(op, std::move(lhs), std::move(rhs));
        }
    }

    bool cast_follows(std::size_t after) const {
        const Token& t = peek(after);
        switch (t.kind) {
            case TokenKind::Identifier:
            case TokenKind::Int:
            case TokenKind::Long:
            case TokenKind::Double:
            case TokenKind::Char:
            case TokenKind::String:
                return true;
            case TokenKind::Keyword:
                return t.text == "this" || t.text == "new" || t.text == "true" || t.text == "false" ||
                       t.text == "null" || t.text == "super";
            case TokenKind::Punct:
                return t.text == "(" || t.text == "!" || t.text == "~";
            default:
                return false;
        }
    }

    // Returns the index of the closing ')' when a cast starts at the current '('.
    std::optional<std::size_t> cast_extent() const {
        std::size_t i = 1;
        bool primitive = false;
        if (peek(i).kind == TokenKind::Keyword && is_primitive(peek(i).text)) {
            primitive = true;
            ++i;
        } else if (peek(i).kind == TokenKind::Identifier) {
            ++i;
            while (peek(i).punct(".") && peek(i + 1).kind == TokenKind::Identifier) i += 2;
        } else {
            return std::nullopt;
        }
        if (peek(i).punct("[") && peek(i + 1).punct("]")) i += 2;
        if (!peek(i).punct(")")) return std::nullopt;
        if (peek(i + 1).punct("->")) return std::nullopt;
        if (primitive) return i;
        return cast_follows(i + 1) ? std::optional<std::size_t>(i) : std::nullopt;
    }

    Expr parse_unary() {
        const Token& t = peek();
        if (t.kind == TokenKind::Punct) {
            if (t.text == "!") {
                next();
                return make_not(parse_unary());
            }
            if (t.text == "-") {
                next();
                return Expr{Unary{UnaryOp::Neg, parse_unary()}};
            }
            if (t.text == "+") {
                next();
                return parse_unary();
            }
            if (t.text == "~") {
                next();
                return Expr{Unary{UnaryOp::BitNot, parse_unary()}};
            }
            if (t.text == "++" || t.text == "--") {
                bool inc = t.text == "++";
                next();
                Expr operand = parse_unary();
                if (!assignable(operand)) fail("operand of prefix increment is not assignable");
                return Expr{Unary{inc ? UnaryOp::PreInc : UnaryOp::PreDec, std::move(operand)}};
            }
            if (t.text == "(") {
                if (auto close = cast_extent()) {
                    next();
                    TypeName type = parse_type();
                    expect(")");
                    return Expr{Cast{std::move(type), parse_unary()}};
                }
            }
        }
        return parse_postfix(parse_primary());
    }

    Expr parse_postfix(Expr e) {
        for (;;) {
            if (accept(".")) {
                if (peek().punct("<")) fail("explicit generic invocations are not supported");
                if (peek().keyword("new")) fail("inner class creation is not supported");
                std::string name = expect_identifier("member name");
                if (peek().punct("(")) {
                    e = make_call(std::move(e), std::move(name), parse_args());
                } else {
                    e = Expr{FieldAccess{std::move(e), std::move(name)}};
                }
            } else if (peek().punct("[")) {
                next();
                Expr index = parse_expr();
                expect("]");
                e = Expr{ArrayIndex{std::move(e), std::move(index)}};
            } else if (peek().punct("++") || peek().punct("--")) {
                if (!assignable(e)) fail("operand of postfix increment is not assignable");
                bool inc = next().text == "++";
                e = Expr{Unary{inc ? UnaryOp::PostInc : UnaryOp::PostDec, std::move(e)}};
            } else if (peek().punct("::")) {
                fail("method references are not supported");
            } else {
                return e;
            }
        }
    }

    std::vector<Expr> parse_args() {
        expect("(");
        std::vector<Expr> args;
        if (!peek().punct(")")) {
            do {
                args.push_back(parse_expr());
            } while (accept(","));
        }
        expect(")");
        return args;
    }

    Expr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::Int:
                next();
                return Expr{IntLit{static_cast<std::int64_t>(t.number)}};
            case TokenKind::Long:
                next();
                return Expr{LongLit{static_cast<std::int64_t>(t.number)}};
            case TokenKind::Double:
                next();
                return Expr{DoubleLit{t.text}};
            case TokenKind::Char:
                next();
                return Expr{CharLit{t.text}};
            case TokenKind::String:
                next();
                return Expr{StringLit{t.text}};
            case TokenKind::Identifier: {
                if (peek(1).punct("->")) fail("lambda expressions are not supported");
                std::string name = next().text;
                if (peek().punct("(")) return make_call(std::nullopt, std::move(name), parse_args());
                return make_ident(std::move(name));
            }
            case TokenKind::Keyword: {
                if (t.text == "true" || t.text == "false") {
                    bool v = t.text == "true";
                    next();
                    return Expr{BoolLit{v}};
                }
                if (t.text == "null") {
                    next();
                    return Expr{NullLit{}};
                }
                if (t.text == "this") {
                    next();
                    if (peek().punct("(")) fail("constructor calls are not supported");
                    return make_ident("this");
                }
                if (t.text == "new") return parse_new();
                if (t.text == "super") fail("'super' is not supported");
                if (is_primitive(t.text) && peek(1).punct(".")) fail("class literals are not supported");
                fail("unexpected keyword '" + t.text + "' in expression");
            }
            case TokenKind::Punct:
                if (t.text == "(") {
                    next();
                    Expr inner = parse_expr();
                    expect(")");
                    if (peek().punct("->")) fail("lambda expressions are not supported");
                    return inner;
                }
                fail("unexpected '" + t.text + "' in expression");
            case TokenKind::End:
                fail("unexpected end of input in expression");
        }
        fail("unexpected token");
    }

    Expr parse_new() {
        next();
        TypeName type;
        if (peek().kind == TokenKind::Keyword && is_primitive(peek().text)) {
            type = next().text;
        } else {
            type = parse_qualified_name();
        }
        if (peek().punct("<")) fail("generic types are not supported");
        if (peek().punct("[")) {
            next();
            if (peek().punct("]")) fail("array initializers are not supported");
            Expr size = parse_expr();
            expect("]");
            if (peek().punct("[")) fail("multi-dimensional arrays are not supported");
            return Expr{NewArray{std::move(type), std::move(size)}};
        }
        std::vector<Expr> args = parse_args();
        if (peek().punct("{")) fail("anonymous classes are not supported");
        return Expr{New{std::move(type), std::move(args)}};
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace

MethodAst parse(std::string_view source) { return Parser(source).parse_method(); }

}  // namespace metamorph
