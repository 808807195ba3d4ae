// Seeded generator of interpretable methods. Output is source text run
// through the parser, so every method is a well-formed tree by construction.

#include <set>

#include "metamorph/analysis.hpp"
#include "metamorph/semantics.hpp"
#include "metamorph/syntax.hpp"

namespace metamorph {

namespace {

enum class T { Int, Bool, Str };

const char* const kVerbs[] = {"get", "compute", "count", "find", "sum", "check", "update", "build",
                              "scale", "merge", "select", "resolve", "collect", "measure", "apply", "parse"};
const char* const kNouns[] = {"total", "index", "value", "score", "limit", "size", "offset", "delta",
                              "level", "width", "height", "count", "range", "weight", "step", "rank"};
const char* const kIntNames[] = {"total", "count", "index", "value", "score", "limit", "size", "result",
                                 "sum", "acc", "offset", "delta", "level", "width", "height", "weight",
                                 "rank", "step", "low", "high", "mid", "pos", "len", "amount"};
const char* const kBoolNames[] = {"done", "found", "valid", "ready", "ok", "changed", "seen", "active"};
const char* const kStrNames[] = {"name", "text", "label", "key", "prefix", "suffix", "msg", "word"};
const char* const kLoopNames[] = {"i", "j", "k", "n", "idx", "pos"};
const char* const kLiterals[] = {"a", "ab", "x", "metamorph", "", "abc"};

std::string cap(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

struct Var {
    std::string name;
    T type;
    bool flag = false;      // boolean only ever assigned literals
    bool readonly = false;  // loop counters
};

enum Feature { kFor = 1, kWhile = 2, kSwitch = 4, kFlag = 8 };

class Gen {
public:
    Gen(SplitMix64 rng, const CorpusOptions& o) : rng_(rng), opt_(o) {}

    std::string method(std::size_t ordinal) {
        out_.clear();
        used_.clear();
        scopes_.assign(1, {});
        budget_ = static_cast<std::ptrdiff_t>(opt_.max_stmts) * 2 / 3;

        static const unsigned kForced[] = {kFor | kFlag, kWhile, kSwitch | kFor, kFlag | kWhile, kSwitch};
        unsigned features = kForced[ordinal % 5];
        if (rng_.chance(25)) features |= kFor;
        if (rng_.chance(20)) features |= kWhile;
        if (rng_.chance(15)) features |= kSwitch;
        if (rng_.chance(25)) features |= kFlag;

        const std::uint64_t rt = rng_.below(100);
        ret_ = rt < 70 ? T::Int : rt < 85 ? T::Bool : T::Str;

        // Name from two locals the body leans on, or verb + noun.
        std::string name;
        std::string a, b;
        if (ret_ == T::Int && rng_.chance(40)) {
            a = pick(kIntNames);
            do b = pick(kIntNames);
            while (b == a);
            name = a + cap(b);
            used_.insert(a);
            used_.insert(b);
        } else {
            name = std::string(pick(kVerbs)) + cap(pick(kNouns));
        }
        used_.insert(name);

        std::string params;
        const std::size_t np = 1 + rng_.below(3);
        for (std::size_t i = 0; i < np; ++i) {
            const std::uint64_t k = rng_.below(10);
            T t = k < 6 ? T::Int : k < 8 ? T::Bool : T::Str;
            Var v{fresh(t), t};
            if (!params.empty()) params += ", ";
            params += type_name(t) + " " + v.name;
            scopes_.back().push_back(v);
        }
        if (!has(T::Int)) {
            Var v{fresh(T::Int), T::Int};
            params += ", int " + v.name;
            scopes_.back().push_back(v);
        }

        line(type_name(ret_) + " " + name + "(" + params + ") {");
        ++indent_;
        if (!a.empty()) {
            declare(a, T::Int, int_expr(1));
            declare(b, T::Int, int_expr(1));
        }
        const std::string result = a.empty() ? fresh(ret_) : a;
        if (a.empty()) declare(result, ret_, expr(ret_, 1));
        if (features & kFlag) {
            Var f{fresh(T::Bool), T::Bool, true};
            line("boolean " + f.name + " = " + (rng_.chance(50) ? "true" : "false") + ";");
            scopes_.back().push_back(f);
            --budget_;
        }

        std::vector<unsigned> todo;
        for (unsigned f : {kFor, kWhile, kSwitch}) {
            if (features & f) todo.push_back(f);
        }
        // Shuffle forced constructs, then interleave plain statements.
        for (std::size_t i = todo.size(); i > 1; --i) std::swap(todo[i - 1], todo[rng_.below(i)]);
        for (unsigned f : todo) {
            if (rng_.chance(50)) simple(0);
            if (f == kFor) for_loop(0);
            if (f == kWhile) while_loop(0);
            if (f == kSwitch) switch_stmt(0, true);
        }
        if (features & kFlag) flag_use();
        while (budget_ > 1 && rng_.chance(40)) simple(0);
        line("return " + final_expr(result) + ";");
        --indent_;
        line("}");
        return out_;
    }

private:
    template <std::size_t N>
    const char* pick(const char* const (&arr)[N]) {
        return arr[rng_.below(N)];
    }

    static std::string type_name(T t) {
        switch (t) {
            case T::Int: return "int";
            case T::Bool: return "boolean";
            case T::Str: return "String";
        }
        return "int";
    }

    std::string fresh(T t) {
        for (int round = 0;; ++round) {
            std::string base = t == T::Bool ? pick(kBoolNames) : t == T::Str ? pick(kStrNames) : pick(kIntNames);
            if (round > 4) base += std::to_string(round);
            if (used_.insert(base).second) return base;
        }
    }

    std::string fresh_loop() {
        for (int round = 0;; ++round) {
            std::string base = kLoopNames[round % std::size(kLoopNames)];
            if (round >= static_cast<int>(std::size(kLoopNames))) base += std::to_string(round);
            if (used_.insert(base).second) return base;
        }
    }

    void line(const std::string& s) {
        out_.append(static_cast<std::size_t>(indent_) * 4, ' ');
        out_ += s;
        out_ += '\n';
    }

    void declare(const std::string& name, T t, const std::string& init) {
        line(type_name(t) + " " + name + " = " + init + ";");
        scopes_.back().push_back(Var{name, t});
        --budget_;
    }

    std::vector<const Var*> visible(T t, bool writable) const {
        std::vector<const Var*> out;
        for (const auto& s : scopes_) {
            for (const auto& v : s) {
                if (v.type == t && (!writable || (!v.flag && !v.readonly))) out.push_back(&v);
            }
        }
        return out;
    }

    bool has(T t) const { return !visible(t, false).empty(); }

    const Var* any(T t, bool writable = false) {
        auto vs = visible(t, writable);
        return vs.empty() ? nullptr : vs[rng_.below(vs.size())];
    }

    std::string lit_int() { return std::to_string(rng_.below(10)); }

    std::string int_atom() {
        const Var* v = any(T::Int);
        if (v && rng_.chance(70)) return v->name;
        return lit_int();
    }

    std::string int_expr(int depth) {
        if (depth <= 0) return int_atom();
        const std::uint64_t k = rng_.below(100);
        if (k < 30) return int_atom();
        if (k < 55) {
            static const char* const ops[] = {"+", "-", "*"};
            return "(" + int_expr(depth - 1) + " " + pick(ops) + " " + int_expr(depth - 1) + ")";
        }
        if (k < 63) return "(" + int_expr(depth - 1) + " % " + std::to_string(2 + rng_.below(6)) + ")";
        if (k < 67) return "(" + int_expr(depth - 1) + " / " + int_atom() + ")";  // may divide by zero
        if (k < 75) {
            return std::string("Math.") + (rng_.chance(50) ? "max" : "min") + "(" + int_expr(depth - 1) + ", " +
                   int_expr(depth - 1) + ")";
        }
        if (k < 80) return "Math.abs(" + int_expr(depth - 1) + ")";
        if (k < 87) {
            const Var* s = any(T::Str);
            if (s) return s->name + ".length()";
            return int_atom();
        }
        if (k < 94) return "(" + bool_expr(depth - 1) + " ? " + int_expr(depth - 1) + " : " + int_expr(depth - 1) + ")";
        return "-" + int_atom();
    }

    std::string bool_expr(int depth) {
        const std::uint64_t k = rng_.below(100);
        if (k < 35 || depth <= 0) {
            static const char* const cmp[] = {"<", "<=", ">", ">=", "==", "!="};
            return "(" + int_expr(depth > 0 ? 1 : 0) + " " + pick(cmp) + " " + int_expr(0) + ")";
        }
        if (k < 55) {
            const Var* b = any(T::Bool);
            if (b) return rng_.chance(40) ? "!" + b->name : b->name;
            return "(" + int_atom() + " > " + lit_int() + ")";
        }
        if (k < 75) return "(" + bool_expr(depth - 1) + (rng_.chance(50) ? " && " : " || ") + bool_expr(depth - 1) + ")";
        if (k < 85) {
            const Var* s = any(T::Str);
            if (s) return s->name + ".equals(\"" + pick(kLiterals) + "\")";
        }
        if (k < 92) return "!(" + bool_expr(depth - 1) + ")";
        return rng_.chance(50) ? "true" : "false";
    }

    std::string str_expr(int depth) {
        const Var* s = any(T::Str);
        const std::uint64_t k = rng_.below(100);
        if (k < 30 && s) return s->name;
        if (k < 55) return std::string("\"") + pick(kLiterals) + "\"";
        if (k < 80) return "(" + (s ? s->name : std::string("\"p\"")) + " + " + int_expr(depth > 0 ? 1 : 0) + ")";
        return "(" + (s ? s->name : std::string("\"q\"")) + " + \"" + pick(kLiterals) + "\")";
    }

    std::string expr(T t, int depth) {
        switch (t) {
            case T::Int: return int_expr(depth);
            case T::Bool: return bool_expr(depth);
            case T::Str: return str_expr(depth);
        }
        return "0";
    }

    std::string final_expr(const std::string& result) {
        const Var* flag = nullptr;
        for (const auto& v : scopes_.back()) {
            if (v.flag) flag = &v;
        }
        if (ret_ == T::Int) {
            if (flag && rng_.chance(40)) return flag->name + " ? " + result + " : " + int_expr(1);
            return rng_.chance(60) ? result : "(" + result + " + " + int_expr(1) + ")";
        }
        if (ret_ == T::Bool) return rng_.chance(50) ? result : "(" + result + " || " + bool_expr(1) + ")";
        return rng_.chance(50) ? result : "(" + result + " + " + int_expr(0) + ")";
    }

    void open_block(const std::string& head) {
        line(head + " {");
        ++indent_;
        scopes_.emplace_back();
    }
    void close_block(const std::string& tail = "}") {
        scopes_.pop_back();
        --indent_;
        line(tail);
    }

    // One plain statement: declaration, assignment, if, try or assert.
    void simple(int depth) {
        if (budget_ == 0) return;
        const std::uint64_t k = rng_.below(100);
        if (k < 22) {
            const std::uint64_t tk = rng_.below(10);
            T t = tk < 6 ? T::Int : tk < 8 ? T::Bool : T::Str;
            declare(fresh(t), t, expr(t, 2));
            return;
        }
        if (k < 60) {
            assign();
            return;
        }
        if (k < 82 && depth < 2) {
            --budget_;
            open_block("if (" + bool_expr(2) + ")");
            body(depth + 1, 1 + rng_.below(2));
            if (rng_.chance(40)) {
                close_block("} else {");
                scopes_.emplace_back();
                ++indent_;
                body(depth + 1, 1);
            }
            close_block();
            return;
        }
        if (k < 90) {
            const Var* v = any(T::Int, true);
            if (!v) return assign();
            --budget_;
            open_block("try");
            line(v->name + " = " + int_expr(1) + " / " + int_atom() + ";");
            --budget_;
            const std::string err = fresh_loop() + "Err";
            close_block("} catch (Exception " + err + ") {");
            ++indent_;
            line(v->name + " = " + std::string("-") + lit_int() + ";");
            --budget_;
            --indent_;
            line("}");
            return;
        }
        if (k < 93) {
            line("assert " + bool_expr(1) + ";");
            --budget_;
            return;
        }
        assign();
    }

    void assign() {
        const std::uint64_t tk = rng_.below(10);
        T t = tk < 7 ? T::Int : tk < 8 ? T::Bool : T::Str;
        const Var* v = any(t, true);
        if (!v) {
            t = T::Int;
            v = any(t, true);
        }
        if (!v) return;
        --budget_;
        if (t == T::Int) {
            const std::uint64_t k = rng_.below(6);
            if (k == 0) return line(v->name + "++;");
            if (k == 1) return line(v->name + " -= " + int_expr(1) + ";");
            if (k == 2) return line(v->name + " += " + int_expr(1) + ";");
            return line(v->name + " = " + int_expr(2) + ";");
        }
        if (t == T::Bool) return line(v->name + " = " + bool_expr(2) + ";");
        line(v->name + " = " + v->name + " + " + (rng_.chance(50) ? int_expr(0) : "\"" + std::string(pick(kLiterals)) + "\"") + ";");
    }

    // Returns true when the list ended in an unconditional return.
    bool body(int depth, std::size_t n) {
        for (std::size_t i = 0; i < n && budget_ > 0; ++i) {
            const std::uint64_t k = rng_.below(100);
            if (depth < 2 && k < 12) {
                for_loop(depth);
            } else if (depth < 2 && k < 18) {
                switch_stmt(depth, rng_.chance(85));
            } else if (loop_depth_ > 0 && !in_switch_ && k < 24) {
                jump();
            } else if (k < 28 && ret_ == T::Int && depth > 0) {
                line("return " + int_expr(1) + ";");
                --budget_;
                return true;
            } else {
                simple(depth);
            }
        }
        return false;
    }

    // break or continue guarded by a condition, inside a loop.
    void jump() {
        --budget_;
        open_block("if (" + bool_expr(1) + ")");
        line(continue_ok_ && rng_.chance(50) ? "continue;" : "break;");
        --budget_;
        close_block();
    }

    void for_loop(int depth) {
        --budget_;
        const std::string i = fresh_loop();
        const std::string bound = std::to_string(1 + rng_.below(5));
        std::string head;
        switch (rng_.below(4)) {
            case 0: head = "for (int " + i + " = " + bound + "; " + i + " > 0; " + i + "--)"; break;
            case 1: head = "for (int " + i + " = 0; " + i + " <= " + bound + "; " + i + " += 2)"; break;
            default: head = "for (int " + i + " = 0; " + i + " < " + bound + "; " + i + "++)"; break;
        }
        open_block(head);
        scopes_.back().push_back(Var{i, T::Int, false, true});
        ++loop_depth_;
        const bool saved = continue_ok_, saved_sw = in_switch_;
        continue_ok_ = true;
        in_switch_ = false;
        body(depth + 1, 1 + rng_.below(3));
        continue_ok_ = saved;
        in_switch_ = saved_sw;
        --loop_depth_;
        close_block();
    }

    void while_loop(int depth) {
        const std::string w = fresh_loop();
        declare(w, T::Int, "0");
        scopes_.back().back().readonly = true;
        --budget_;
        std::string cond = w + " < " + std::to_string(1 + rng_.below(5));
        if (rng_.chance(30)) cond += " && " + bool_expr(0);
        open_block("while (" + cond + ")");
        ++loop_depth_;
        // The counter step comes last, so a continue would skip it.
        const bool saved = continue_ok_, saved_sw = in_switch_;
        continue_ok_ = false;
        in_switch_ = false;
        const bool returned = body(depth + 1, 1 + rng_.below(2));
        continue_ok_ = saved;
        in_switch_ = saved_sw;
        --loop_depth_;
        if (!returned) {
            line(w + "++;");
            --budget_;
        }
        close_block();
    }

    void switch_stmt(int depth, bool eligible) {
        --budget_;
        const Var* s = any(T::Str);
        const bool on_string = s && rng_.chance(25);
        std::string sel;
        std::vector<std::string> labels;
        if (on_string) {
            sel = s->name;
            labels = {"\"a\"", "\"ab\"", "\"\"", "\"abc\""};
        } else {
            sel = rng_.chance(50) ? "(" + int_atom() + " % 3)" : int_atom();
            labels = {"0", "1", "2", "-1", "3"};
        }
        line("switch (" + sel + ") {");
        ++indent_;
        scopes_.emplace_back();
        const bool saved_sw = in_switch_;
        in_switch_ = true;
        const std::size_t cases = 1 + rng_.below(3);
        std::size_t next = 0;
        for (std::size_t c = 0; c < cases && next < labels.size(); ++c) {
            line("case " + labels[next++] + ":");
            if (next < labels.size() && rng_.chance(25)) line("case " + labels[next++] + ":");
            case_body(depth, eligible || c + 1 == cases);
        }
        if (rng_.chance(60)) {
            line("default:");
            case_body(depth, true);
        }
        in_switch_ = saved_sw;
        scopes_.pop_back();
        --indent_;
        line("}");
    }

    void case_body(int depth, bool terminate) {
        ++indent_;
        const std::size_t n = 1 + rng_.below(2);
        for (std::size_t i = 0; i < n && budget_ > 0; ++i) {
            if (depth < 1 && rng_.chance(15)) {
                for_loop(depth + 1);
            } else {
                assign();
            }
        }
        if (terminate) {
            if (ret_ == T::Int && rng_.chance(15)) {
                line("return " + int_expr(1) + ";");
            } else {
                line("break;");
            }
        }
        --indent_;
    }

    void flag_use() {
        const Var* flag = nullptr;
        for (const auto& v : scopes_.back()) {
            if (v.flag) flag = &v;
        }
        if (!flag) return;
        const std::string name = flag->name;
        const Var* target = any(T::Int, true);
        --budget_;
        open_block("if (" + bool_expr(1) + ")");
        line(name + " = " + (rng_.chance(50) ? "true" : "false") + ";");
        close_block();
        --budget_;
        open_block("if (" + std::string(rng_.chance(50) ? "!" : "") + name + ")");
        if (target) {
            line(target->name + " += " + int_expr(1) + ";");
        } else {
            line(name + " = false;");
        }
        close_block();
    }

    SplitMix64 rng_;
    CorpusOptions opt_;
    std::string out_;
    int indent_ = 0;
    std::set<std::string> used_;
    std::vector<std::vector<Var>> scopes_;
    std::ptrdiff_t budget_ = 0;
    T ret_ = T::Int;
    int loop_depth_ = 0;
    bool continue_ok_ = false;
    bool in_switch_ = false;
};

}  // namespace

std::vector<MethodAst> gen_corpus(std::size_t count, std::uint64_t seed, const CorpusOptions& options) {
    std::vector<MethodAst> out;
    out.reserve(count);
    SplitMix64 root(seed);
    for (std::size_t i = 0; i < count; ++i) {
        SplitMix64 stream = root.split();
        // Redraw until the method fits the statement limit.
        for (;;) {
            Gen g(stream.split(), options);
            MethodAst m = parse(g.method(i));
            if (stmt_count(m) <= options.max_stmts) {
                out.push_back(std::move(m));
                break;
            }
        }
    }
    return out;
}

bool CoverageAudit::quotas_met() const {
    if (methods == 0) return false;
    auto share = [&](std::size_t n, std::size_t pct) { return n * 100 >= pct * methods; };
    return share(with_for, 20) && share(with_while, 20) && share(with_eligible_switch, 15) &&
           share(with_eligible_boolean, 20) && with_two_statements == methods;
}

CoverageAudit audit_corpus(const std::vector<MethodAst>& corpus) {
    CoverageAudit a;
    a.methods = corpus.size();
    for (const auto& m : corpus) {
        bool has_for = false, has_while = false;
        for_each_stmt(m, [&](const Stmt& s, const NodePath&) {
            has_for |= s.is<For>();
            has_while |= s.is<While>();
        });
        a.with_for += has_for;
        a.with_while += has_while;
        a.with_eligible_switch += !enumerate_candidates(m, TransformKind::SF, 0).empty();
        a.with_eligible_boolean += !enumerate_candidates(m, TransformKind::BX, 0).empty();
        a.with_two_statements += m.body.stmts.size() >= 2;
    }
    return a;
}

}  // namespace metamorph
