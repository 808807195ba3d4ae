#include <algorithm>
#include <limits>

#include "metamorph/analysis.hpp"
#include "metamorph/semantics.hpp"
#include "walk.hpp"

namespace metamorph {

std::string Value::to_string() const {
    switch (v.index()) {
        case 1: return std::to_string(as_int());
        case 2: return as_bool() ? "true" : "false";
        case 3: return as_str();
        default: return "unit";
    }
}

nlohmann::json to_json(const Value& value) {
    switch (value.v.index()) {
        case 1: return value.as_int();
        case 2: return value.as_bool();
        case 3: return value.as_str();
        default: return nullptr;
    }
}

std::string_view status_name(ExecStatus status) {
    switch (status) {
        case ExecStatus::Value: return "value";
        case ExecStatus::DivByZero: return "div_by_zero";
        case ExecStatus::AssertionFailed: return "assertion_failed";
        case ExecStatus::StepLimitExceeded: return "step_limit_exceeded";
    }
    return "?";
}

nlohmann::json to_json(const ExecOutcome& outcome) {
    nlohmann::json j{{"status", status_name(outcome.status)}, {"steps", outcome.trace_len}, {"caught", outcome.caught}};
    if (outcome.status == ExecStatus::Value) j["result"] = to_json(outcome.result);
    return j;
}

namespace {

enum class VType { Int, Bool, Str };

VType type_of(const TypeName& t) {
    if (t == "int" || t == "long") return VType::Int;
    if (t == "boolean") return VType::Bool;
    if (t == "String") return VType::Str;
    throw UnsupportedConstruct("type '" + t + "' is not interpretable");
}

Value default_of(VType t) {
    switch (t) {
        case VType::Int: return Value::of(std::int64_t{0});
        case VType::Bool: return Value::of(false);
        case VType::Str: return Value::of(std::string());
    }
    return {};
}

bool matches(const Value& v, VType t) {
    return (t == VType::Int && v.is_int()) || (t == VType::Bool && v.is_bool()) || (t == VType::Str && v.is_str());
}

bool catches(const TypeName& t, ExecStatus s) {
    if (t == "Exception" || t == "RuntimeException" || t == "Throwable") return true;
    if (t == "ArithmeticException") return s == ExecStatus::DivByZero;
    if (t == "AssertionError" || t == "Error") return s == ExecStatus::AssertionFailed;
    throw UnsupportedConstruct("exception type '" + t + "' is not interpretable");
}

// Static pass: every construct and every name must be one the interpreter knows.
struct Checker : detail::NullVisitor {
    const ScopeInfo& info;
    std::size_t use_i = 0;
    explicit Checker(const ScopeInfo& i) : info(i) {}

    void declare(const std::string&, const TypeName& type, DeclKind kind, const Expr*) {
        if (kind == DeclKind::Catch) {
            catches(type, ExecStatus::DivByZero);
        } else {
            type_of(type);
        }
    }
    void use(const Expr& e, UseContext, const Expr*) {
        const auto& r = info.uses[use_i++];
        // `Math` is the one class name the interpreter knows.
        if (r.decl || r.name == "Math") return;
        throw UnsupportedConstruct("name '" + e.as<Ident>().name + "' has no declaration");
    }
    void on_expr(const Expr& e) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, DoubleLit> || std::is_same_v<T, CharLit> ||
                              std::is_same_v<T, NullLit> || std::is_same_v<T, FieldAccess> ||
                              std::is_same_v<T, New> || std::is_same_v<T, NewArray> || std::is_same_v<T, Cast> ||
                              std::is_same_v<T, ArrayIndex>) {
                    throw UnsupportedConstruct("expression is outside the interpretable subset");
                } else if constexpr (std::is_same_v<T, Call>) {
                    check_call(n);
                }
            },
            e.node);
    }
    void check_call(const Call& c) {
        if (c.receiver && (*c.receiver)->is<Ident>() && (*c.receiver)->as<Ident>().name == "Math") {
            if (((c.name == "max" || c.name == "min") && c.args.size() == 2) || (c.name == "abs" && c.args.size() == 1))
                return;
        } else if (c.receiver) {
            if ((c.name == "equals" && c.args.size() == 1) || (c.name == "length" && c.args.empty()) ||
                (c.name == "printStackTrace" && c.args.empty()))
                return;
        }
        throw UnsupportedConstruct("call to unknown method '" + c.name + "'");
    }
};

struct Raise {
    ExecStatus status;
};

enum class Flow { Normal, Break, Continue, Return };

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

class Machine {
public:
    Machine(std::uint64_t budget) : budget_(budget) {}

    ExecOutcome run(const MethodAst& m, const std::vector<Value>& args) {
        if (args.size() != m.params.size()) throw std::invalid_argument("argument count mismatch");
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (!matches(args[i], type_of(m.params[i].type))) {
                throw std::invalid_argument("argument " + std::to_string(i) + " does not match " + m.params[i].type);
            }
            vars_.emplace_back(m.params[i].name, args[i]);
        }
        ExecOutcome out;
        try {
            block(m.body);
            out.result = ret_;
        } catch (const Raise& r) {
            out.status = r.status;
        }
        out.trace_len = steps_;
        out.caught = caught_;
        return out;
    }

private:
    void tick() {
        if (steps_ >= budget_) throw Raise{ExecStatus::StepLimitExceeded};
        ++steps_;
    }

    Value& lookup(const std::string& name) {
        for (auto it = vars_.rbegin(); it != vars_.rend(); ++it) {
            if (it->first == name) return it->second;
        }
        throw UnsupportedConstruct("unbound name '" + name + "'");
    }

    Flow block(const Block& b) { return list(b.stmts); }

    Flow list(const std::vector<Stmt>& stmts) {
        const std::size_t mark = vars_.size();
        Flow f = Flow::Normal;
        try {
            for (const auto& s : stmts) {
                f = stmt(s);
                if (f != Flow::Normal) break;
            }
        } catch (...) {
            vars_.resize(mark);
            throw;
        }
        vars_.resize(mark);
        return f;
    }

    Flow stmt(const Stmt& s) {
        tick();
        return std::visit([&](const auto& n) { return exec(n); }, s.node);
    }

    Flow exec(const Block& b) { return block(b); }

    Flow exec(const VarDecl& d) {
        VType t = type_of(d.type);
        Value v = d.init ? eval(*d.init) : default_of(t);
        if (!matches(v, t)) throw UnsupportedConstruct("initializer type mismatch for '" + d.name + "'");
        vars_.emplace_back(d.name, std::move(v));
        return Flow::Normal;
    }

    Flow exec(const ExprStmt& e) {
        eval(e.expr);
        return Flow::Normal;
    }

    Flow exec(const If& i) {
        if (truth(eval(i.cond))) return block(i.then_block);
        if (i.else_block) return block(*i.else_block);
        return Flow::Normal;
    }

    Flow exec(const While& w) {
        for (;;) {
            tick();
            if (!truth(eval(w.cond))) return Flow::Normal;
            Flow f = block(w.body);
            if (f == Flow::Break) return Flow::Normal;
            if (f == Flow::Return) return f;
        }
    }

    Flow exec(const For& f) {
        const std::size_t mark = vars_.size();
        Flow result = Flow::Normal;
        try {
            if (f.init) stmt(**f.init);
            for (;;) {
                tick();
                if (f.cond && !truth(eval(*f.cond))) break;
                Flow b = block(f.body);
                if (b == Flow::Break) break;
                if (b == Flow::Return) {
                    result = b;
                    break;
                }
                if (f.update) eval(*f.update);
            }
        } catch (...) {
            vars_.resize(mark);
            throw;
        }
        vars_.resize(mark);
        return result;
    }

    Flow exec(const Switch& sw) {
        Value sel = eval(sw.selector);
        std::size_t start = sw.cases.size();
        for (std::size_t i = 0; i < sw.cases.size() && start == sw.cases.size(); ++i) {
            for (const auto& l : sw.cases[i].labels) {
                if (eval(l) == sel) {
                    start = i;
                    break;
                }
            }
        }
        if (start == sw.cases.size()) {
            for (std::size_t i = 0; i < sw.cases.size(); ++i) {
                if (sw.cases[i].is_default) start = i;
            }
        }
        const std::size_t mark = vars_.size();
        Flow result = Flow::Normal;
        try {
            for (std::size_t i = start; i < sw.cases.size(); ++i) {
                Flow f = Flow::Normal;
                for (const auto& s : sw.cases[i].body) {
                    f = stmt(s);
                    if (f != Flow::Normal) break;
                }
                if (f == Flow::Break) break;
                if (f != Flow::Normal) {
                    result = f;
                    break;
                }
            }
        } catch (...) {
            vars_.resize(mark);
            throw;
        }
        vars_.resize(mark);
        return result;
    }

    Flow exec(const Return& r) {
        ret_ = r.value ? eval(*r.value) : Value::unit();
        return Flow::Return;
    }
    Flow exec(const Break&) { return Flow::Break; }
    Flow exec(const Continue&) { return Flow::Continue; }

    Flow exec(const TryCatch& t) {
        const std::size_t mark = vars_.size();
        try {
            return block(t.body);
        } catch (const Raise& r) {
            if (r.status == ExecStatus::StepLimitExceeded || !catches(t.exc_type, r.status)) throw;
            vars_.resize(mark);
            ++caught_;
        }
        vars_.emplace_back(t.exc_name, Value::unit());
        Flow f;
        try {
            f = block(t.handler);
        } catch (...) {
            vars_.resize(mark);
            throw;
        }
        vars_.resize(mark);
        return f;
    }

    Flow exec(const Assert& a) {
        if (!truth(eval(a.cond))) throw Raise{ExecStatus::AssertionFailed};
        return Flow::Normal;
    }

    static bool truth(const Value& v) {
        if (!v.is_bool()) throw UnsupportedConstruct("condition is not boolean");
        return v.as_bool();
    }
    static std::int64_t integer(const Value& v) {
        if (!v.is_int()) throw UnsupportedConstruct("operand is not an integer");
        return v.as_int();
    }

    Value eval(const Expr& e) {
        return std::visit([&](const auto& n) { return ev(n); }, e.node);
    }

    Value ev(const IntLit& n) { return Value::of(n.value); }
    Value ev(const LongLit& n) { return Value::of(n.value); }
    Value ev(const BoolLit& n) { return Value::of(n.value); }
    Value ev(const StringLit& n) { return Value::of(n.value); }
    Value ev(const Ident& n) { return lookup(n.name); }

    template <class T>
    Value ev(const T&) {
        throw UnsupportedConstruct("expression is outside the interpretable subset");
    }

    Value ev(const Unary& u) {
        switch (u.op) {
            case UnaryOp::Not: return Value::of(!truth(eval(*u.operand)));
            case UnaryOp::Neg: return Value::of(wrap_sub(0, integer(eval(*u.operand))));
            case UnaryOp::BitNot: return Value::of(~integer(eval(*u.operand)));
            default: break;
        }
        Value& slot = target(*u.operand);
        std::int64_t old = integer(slot);
        const bool inc = u.op == UnaryOp::PreInc || u.op == UnaryOp::PostInc;
        std::int64_t now = inc ? wrap_add(old, 1) : wrap_sub(old, 1);
        slot = Value::of(now);
        return Value::of(u.op == UnaryOp::PreInc || u.op == UnaryOp::PreDec ? now : old);
    }

    Value& target(const Expr& e) {
        if (!e.is<Ident>()) throw UnsupportedConstruct("assignment target is not a variable");
        return lookup(e.as<Ident>().name);
    }

    static Value arith(BinaryOp op, const Value& a, const Value& b) {
        if (op == BinaryOp::Add && (a.is_str() || b.is_str())) {
            if (a.is_unit() || b.is_unit()) throw UnsupportedConstruct("unit in concatenation");
            return Value::of(a.to_string() + b.to_string());
        }
        if (op == BinaryOp::Eq || op == BinaryOp::Ne) {
            if (a.v.index() != b.v.index()) throw UnsupportedConstruct("comparison of mixed types");
            return Value::of((a == b) == (op == BinaryOp::Eq));
        }
        if (a.is_bool() && b.is_bool()) {
            switch (op) {
                case BinaryOp::BitAnd: return Value::of(a.as_bool() && b.as_bool());
                case BinaryOp::BitOr: return Value::of(a.as_bool() || b.as_bool());
                case BinaryOp::BitXor: return Value::of(a.as_bool() != b.as_bool());
                default: throw UnsupportedConstruct("boolean operand to arithmetic");
            }
        }
        const std::int64_t x = integer(a), y = integer(b);
        switch (op) {
            case BinaryOp::Mul: return Value::of(wrap_mul(x, y));
            case BinaryOp::Div:
                if (y == 0) throw Raise{ExecStatus::DivByZero};
                if (y == -1) return Value::of(wrap_sub(0, x));
                return Value::of(x / y);
            case BinaryOp::Mod:
                if (y == 0) throw Raise{ExecStatus::DivByZero};
                if (y == -1) return Value::of(std::int64_t{0});
                return Value::of(x % y);
            case BinaryOp::Add: return Value::of(wrap_add(x, y));
            case BinaryOp::Sub: return Value::of(wrap_sub(x, y));
            case BinaryOp::Shl:
                return Value::of(static_cast<std::int64_t>(static_cast<std::uint64_t>(x) << (y & 63)));
            case BinaryOp::Shr: return Value::of(x >> (y & 63));
            case BinaryOp::UShr:
                return Value::of(static_cast<std::int64_t>(static_cast<std::uint64_t>(x) >> (y & 63)));
            case BinaryOp::Lt: return Value::of(x < y);
            case BinaryOp::Le: return Value::of(x <= y);
            case BinaryOp::Gt: return Value::of(x > y);
            case BinaryOp::Ge: return Value::of(x >= y);
            case BinaryOp::BitAnd: return Value::of(x & y);
            case BinaryOp::BitXor: return Value::of(x ^ y);
            case BinaryOp::BitOr: return Value::of(x | y);
            default: break;
        }
        throw UnsupportedConstruct("unsupported binary operator");
    }

    Value ev(const Binary& b) {
        if (b.op == BinaryOp::And) return Value::of(truth(eval(*b.lhs)) && truth(eval(*b.rhs)));
        if (b.op == BinaryOp::Or) return Value::of(truth(eval(*b.lhs)) || truth(eval(*b.rhs)));
        Value l = eval(*b.lhs);
        Value r = eval(*b.rhs);
        return arith(b.op, l, r);
    }

    static BinaryOp compound(AssignOp op) {
        switch (op) {
            case AssignOp::Add: return BinaryOp::Add;
            case AssignOp::Sub: return BinaryOp::Sub;
            case AssignOp::Mul: return BinaryOp::Mul;
            case AssignOp::Div: return BinaryOp::Div;
            case AssignOp::Mod: return BinaryOp::Mod;
            case AssignOp::BitAnd: return BinaryOp::BitAnd;
            case AssignOp::BitOr: return BinaryOp::BitOr;
            case AssignOp::BitXor: return BinaryOp::BitXor;
            case AssignOp::Shl: return BinaryOp::Shl;
            case AssignOp::Shr: return BinaryOp::Shr;
            case AssignOp::UShr: return BinaryOp::UShr;
            case AssignOp::Assign: break;
        }
        return BinaryOp::Add;
    }

    Value ev(const Assign& a) {
        Value v = eval(*a.value);
        Value& dest = target(*a.target);
        if (a.op != AssignOp::Assign) v = arith(compound(a.op), dest, v);
        if (dest.v.index() != v.v.index()) throw UnsupportedConstruct("assignment type mismatch");
        dest = v;
        return v;
    }

    Value ev(const Ternary& t) { return truth(eval(*t.cond)) ? eval(*t.then_expr) : eval(*t.else_expr); }

    Value ev(const Call& c) {
        if (c.receiver && (*c.receiver)->is<Ident>() && (*c.receiver)->as<Ident>().name == "Math") {
            if (c.name == "abs" && c.args.size() == 1) {
                std::int64_t x = integer(eval(c.args[0]));
                return Value::of(x < 0 ? wrap_sub(0, x) : x);
            }
            if ((c.name == "max" || c.name == "min") && c.args.size() == 2) {
                std::int64_t x = integer(eval(c.args[0]));
                std::int64_t y = integer(eval(c.args[1]));
                return Value::of(c.name == "max" ? std::max(x, y) : std::min(x, y));
            }
        } else if (c.receiver) {
            Value recv = eval(**c.receiver);
            if (c.name == "printStackTrace" && c.args.empty() && recv.is_unit()) return Value::unit();
            if (c.name == "length" && c.args.empty() && recv.is_str()) {
                return Value::of(static_cast<std::int64_t>(recv.as_str().size()));
            }
            if (c.name == "equals" && c.args.size() == 1 && recv.is_str()) {
                Value arg = eval(c.args[0]);
                return Value::of(arg.is_str() && arg.as_str() == recv.as_str());
            }
        }
        throw UnsupportedConstruct("call to unknown method '" + c.name + "'");
    }

    std::uint64_t budget_;
    std::uint64_t steps_ = 0;
    std::uint64_t caught_ = 0;
    std::vector<std::pair<std::string, Value>> vars_;
    Value ret_;
};

}  // namespace

void check_interpretable(const MethodAst& method) {
    type_of(method.return_type == "void" ? std::string("int") : method.return_type);
    for (const auto& p : method.params) type_of(p.type);
    ScopeInfo info = resolve_scopes(method);
    Checker c(info);
    detail::walk_method(method, c);
}

ExecOutcome interpret(const MethodAst& method, const std::vector<Value>& args, std::uint64_t step_budget) {
    check_interpretable(method);
    return Machine(step_budget).run(method, args);
}

}  // namespace metamorph
