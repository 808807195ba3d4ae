#include "metamorph/analyzer.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace metamorph {

std::string Label::joined() const {
    std::string out;
    for (const auto& t : subtokens) {
        if (!out.empty()) out += '|';
        out += t;
    }
    return out;
}

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return is_upper(c) || is_lower(c) || is_digit(c); }

// Split one alphanumeric run.
void split_run(std::string_view run, std::vector<std::string>& out) {
    std::string cur;
    for (std::size_t i = 0; i < run.size(); ++i) {
        const char c = run[i];
        if (!cur.empty()) {
            const char p = run[i - 1];
            bool cut = (is_lower(p) && is_upper(c)) || (is_digit(p) != is_digit(c));
            // ABCd: the last capital starts the next word.
            if (!cut && is_upper(p) && is_upper(c) && i + 1 < run.size() && is_lower(run[i + 1])) cut = true;
            if (cut) {
                out.push_back(std::move(cur));
                cur.clear();
            }
        }
        cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (!cur.empty()) out.push_back(std::move(cur));
}

}  // namespace

Label normalize_label(std::string_view raw) {
    Label label;
    std::size_t i = 0;
    while (i < raw.size()) {
        if (!is_alnum(raw[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < raw.size() && is_alnum(raw[j])) ++j;
        split_run(raw.substr(i, j - i), label.subtokens);
        i = j;
    }
    if (label.subtokens.empty()) throw EmptyLabel();
    return label;
}

namespace {

// Subtoken weights in source-text order of first occurrence.
class TokenCounter {
public:
    explicit TokenCounter(const std::string& own) : own_(own) {}

    void add(const std::string& identifier, int weight) {
        if (identifier == own_ || identifier == "this") return;
        std::vector<std::string> parts;
        std::size_t i = 0;
        while (i < identifier.size()) {
            if (!is_alnum(identifier[i])) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < identifier.size() && is_alnum(identifier[j])) ++j;
            split_run(std::string_view(identifier).substr(i, j - i), parts);
            i = j;
        }
        for (auto& p : parts) {
            auto [it, fresh] = index_.try_emplace(p, entries_.size());
            if (fresh) entries_.push_back({p, 0});
            entries_[it->second].second += weight;
        }
    }

    void expr(const Expr& e) {
        std::visit([&](const auto& n) { node(n); }, e.node);
    }

    void stmts(const std::vector<Stmt>& list) {
        for (const auto& s : list) stmt(s);
    }

    void stmt(const Stmt& s) {
        std::visit([&](const auto& n) { node(n); }, s.node);
    }

    Label top2() const {
        std::vector<std::size_t> order(entries_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        // Indices are first-occurrence ranks, so a stable sort by weight breaks ties.
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return entries_[a].second > entries_[b].second; });
        Label out;
        for (std::size_t k = 0; k < order.size() && k < 2; ++k) out.subtokens.push_back(entries_[order[k]].first);
        if (out.subtokens.empty()) out.subtokens.push_back("unknown");
        return out;
    }

private:
    template <class T>
    void node(const T&) {}

    void node(const Ident& n) { add(n.name, 1); }
    void node(const FieldAccess& n) {
        expr(*n.object);
        add(n.field, 1);
    }
    void node(const Call& n) {
        if (n.receiver) expr(**n.receiver);
        add(n.name, 3);
        for (const auto& a : n.args) expr(a);
    }
    void node(const Unary& n) { expr(*n.operand); }
    void node(const Binary& n) {
        expr(*n.lhs);
        expr(*n.rhs);
    }
    void node(const Assign& n) {
        expr(*n.target);
        expr(*n.value);
    }
    void node(const Ternary& n) {
        expr(*n.cond);
        expr(*n.then_expr);
        expr(*n.else_expr);
    }
    void node(const New& n) {
        add(n.type, 3);  // constructor call site
        for (const auto& a : n.args) expr(a);
    }
    void node(const NewArray& n) { expr(*n.size); }
    void node(const Cast& n) { expr(*n.operand); }
    void node(const ArrayIndex& n) {
        expr(*n.array);
        expr(*n.index);
    }

    void node(const Block& n) { stmts(n.stmts); }
    void node(const VarDecl& n) {
        add(n.name, 1);
        if (n.init) expr(*n.init);
    }
    void node(const ExprStmt& n) { expr(n.expr); }
    void node(const If& n) {
        expr(n.cond);
        stmts(n.then_block.stmts);
        if (n.else_block) stmts(n.else_block->stmts);
    }
    void node(const While& n) {
        expr(n.cond);
        stmts(n.body.stmts);
    }
    void node(const For& n) {
        if (n.init) stmt(**n.init);
        if (n.cond) expr(*n.cond);
        if (n.update) expr(*n.update);
        stmts(n.body.stmts);
    }
    void node(const Switch& n) {
        expr(n.selector);
        for (const auto& c : n.cases) {
            for (const auto& l : c.labels) expr(l);
            stmts(c.body);
        }
    }
    void node(const Return& n) {
        if (n.value) expr(*n.value);
    }
    void node(const TryCatch& n) {
        stmts(n.body.stmts);
        add(n.exc_name, 1);
        stmts(n.handler.stmts);
    }
    void node(const Assert& n) { expr(n.cond); }

    const std::string& own_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::pair<std::string, int>> entries_;
};

}  // namespace

PredictionRecord builtin_predict(const MethodAst& method, std::string method_id) {
    TokenCounter counter(method.name);
    counter.stmts(method.body.stmts);
    PredictionRecord r;
    r.method_id = method_id.empty() ? method.name : std::move(method_id);
    r.analyzer_id = kBuiltinAnalyzer;
    r.label = counter.top2();
    r.raw = r.label.joined();
    return r;
}

std::vector<std::string> parse_command(std::string_view cmd) {
    std::vector<std::string> argv;
    std::size_t i = 0;
    while (i < cmd.size()) {
        if (std::isspace(static_cast<unsigned char>(cmd[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < cmd.size() && !std::isspace(static_cast<unsigned char>(cmd[j]))) ++j;
        argv.emplace_back(cmd.substr(i, j - i));
        i = j;
    }
    return argv;
}

}  // namespace metamorph
