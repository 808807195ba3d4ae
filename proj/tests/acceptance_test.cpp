// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "metamorph/analyzer.hpp"
#include "metamorph/evaluation.hpp"
#include "metamorph/pipeline.hpp"
#include "metamorph/semantics.hpp"
#include "metamorph/syntax.hpp"
#include "metamorph/transforms.hpp"

namespace fs = std::filesystem;
using namespace metamorph;

namespace {

constexpr std::uint64_t kSeed = 42;

std::string method_id(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "m%06zu", i);
    return buf;
}

// Hand-written method with two sites of every kind, so the mode rules are
// exercised even if the random corpus happens to lack such a method.
const char* kTwoOfEach = R"(int mixed(int a, int b) {
    boolean up = true;
    boolean down = false;
    int s = 0;
    for (int i = 0; i < 3; i++) { s += i; }
    int k = 0;
    while (k < 2) { k++; }
    switch (a) { case 0: s += 1; break; default: s += 2; }
    switch (b) { case 1: s -= 1; break; default: s -= 2; }
    if (up && !down) { s++; }
    return s + k;
})";

struct Corpus {
    std::vector<MethodAst> methods;
    std::vector<std::string> ids;
    // Per method, per kind, per mode: the variants (empty when unsupported).
    struct Entry {
        std::size_t method;
        TransformKind kind;
        ApplyMode mode;
        std::vector<TransformedVariant> variants;
        bool unsupported = false;
    };
    std::vector<Entry> entries;
};

const Corpus& corpus() {
    static const Corpus c = [] {
        Corpus c;
        c.methods = gen_corpus(300, kSeed);
        for (std::size_t i = 0; i < c.methods.size(); ++i) c.ids.push_back(method_id(i));
        for (std::size_t i = 0; i < c.methods.size(); ++i) {
            for (TransformKind k : kAllKinds) {
                for (ApplyMode mode : {ApplyMode::SinglePlace, ApplyMode::AllPlace}) {
                    Corpus::Entry e{i, k, mode, {}, false};
                    try {
                        e.variants = apply(c.methods[i], k, mode, site_seed(kSeed, c.ids[i], k), {}, c.ids[i]);
                    } catch (const ModeUnsupported&) {
                        e.unsupported = true;
                    }
                    c.entries.push_back(std::move(e));
                }
            }
        }
        return c;
    }();
    return c;
}

struct Verdict {
    bool pass = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

Verdict semantic_preservation() {
    const auto start = std::chrono::steady_clock::now();
    const Corpus& c = corpus();
    std::size_t variants = 0, disagreements = 0, compared = 0;
    for (const auto& e : c.entries) {
        for (const auto& v : e.variants) {
            EquivalenceOptions o;
            o.trials = 16;
            o.seed = site_seed(kSeed, c.ids[e.method], e.kind) + variants;
            o.normal_runs_only = e.kind == TransformKind::TC;
            const EquivalenceReport r = check_equivalence(c.methods[e.method], v.ast, o);
            ++variants;
            compared += r.compared;
            disagreements += r.disagreements.size();
        }
    }
    const double secs = seconds_since(start);
    std::ostringstream d;
    d << variants << " variants, " << compared << " compared runs, " << disagreements << " disagreements, "
      << secs << " s";
    return {disagreements == 0 && variants > 0 && secs < 120.0, d.str()};
}

bool round_trips(const MethodAst& m) {
    const std::string text = print(m);
    MethodAst back = parse(text);
    return structural_eq(back, m) && print(back) == text;
}

Verdict round_trip() {
    const Corpus& c = corpus();
    std::size_t total = 0, ok = 0;
    for (const auto& m : c.methods) {
        ++total;
        ok += round_trips(m);
    }
    for (const auto& e : c.entries) {
        for (const auto& v : e.variants) {
            ++total;
            ok += round_trips(v.ast) && parse(v.source).name == v.ast.name;
        }
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " methods and variants"};
}

std::multiset<std::string> list_multiset(const std::vector<Stmt>& list) {
    std::multiset<std::string> out;
    for (const auto& s : list) out.insert(sexpr(s));
    return out;
}

Verdict structural_invariants() {
    const Corpus& c = corpus();
    std::map<TransformKind, std::pair<std::size_t, std::size_t>> tally;  // ok, total
    for (const auto& e : c.entries) {
        if (e.mode != ApplyMode::SinglePlace) continue;
        const MethodAst& m = c.methods[e.method];
        for (const auto& v : e.variants) {
            const CandidateSite& site = v.sites.at(0);
            bool ok = true;
            switch (e.kind) {
                case TransformKind::VN:
                    ok = structural_eq(m, v.ast, true) && !structural_eq(m, v.ast, false);
                    break;
                case TransformKind::PS: {
                    ok = list_multiset(list_at(v.ast, site.path)) == list_multiset(list_at(m, site.path)) &&
                         node_count(v.ast) == node_count(m) && !structural_eq(m, v.ast);
                    MethodAst twice = v.ast;
                    apply_site(twice, site);
                    ok = ok && structural_eq(twice, m);
                    break;
                }
                case TransformKind::UN: {
                    MethodAst stripped = v.ast;
                    auto& list = list_at(stripped, site.path);
                    ok = site.index < list.size() && list[site.index].is<VarDecl>() &&
                         node_count(v.ast) == node_count(m) + node_count(list[site.index]);
                    if (ok) list.erase(list.begin() + static_cast<std::ptrdiff_t>(site.index));
                    ok = ok && structural_eq(stripped, m);
                    break;
                }
                case TransformKind::BX: {
                    MethodAst twice = v.ast;
                    apply_site(twice, site);
                    ok = structural_eq(twice, m) && !structural_eq(v.ast, m);
                    break;
                }
                default:
                    continue;
            }
            tally[e.kind].first += ok;
            ++tally[e.kind].second;
        }
    }
    Verdict out;
    std::ostringstream d;
    for (const auto& [k, t] : tally) {
        d << kind_name(k) << " " << t.first << "/" << t.second << " ";
        out.pass = out.pass && t.first == t.second && t.second > 0;
    }
    out.pass = out.pass && tally.size() == 4;
    out.detail = d.str();
    return out;
}

Verdict metrics_arithmetic() {
    const Label truth{{"compare", "to"}}, wrong{{"get", "count"}}, other{{"get", "id"}};
    std::vector<EvaluationRecord> vn;
    for (std::size_t i = 0; i < 123123; ++i) {
        vn.push_back(make_record("m" + std::to_string(i), "v", TransformKind::VN, ApplyMode::SinglePlace, truth, truth,
                                 i < 67622 ? wrong : truth, 3));
    }
    const auto pct = compute_metrics(vn).row(TransformKind::VN, "all")->change_pct.value_or(-1);

    std::vector<EvaluationRecord> t8;
    auto add = [&](std::size_t n, const Label& b, const Label& a) {
        for (std::size_t i = 0; i < n; ++i) {
            t8.push_back(make_record("m" + std::to_string(i), "v", TransformKind::VN, ApplyMode::SinglePlace, truth, b,
                                     a, 3));
        }
    };
    add(1454, truth, truth);
    add(469, truth, wrong);
    add(3842, wrong, wrong);
    add(232, wrong, truth);
    add(4003, wrong, other);
    const auto row = *compute_metrics(t8).row(TransformKind::VN, "all");
    const double want[] = {14.54, 4.69, 38.42, 2.32, 40.03};
    bool ok = std::abs(pct - 54.92) <= 0.01;
    double sum = 0;
    std::ostringstream d;
    d << "VN change " << pct << "; categories";
    for (int i = 0; i < 5; ++i) {
        const double got = row.category_pct[i].value_or(-1);
        ok = ok && std::abs(got - want[i]) < 1e-9;
        sum += got;
        d << " " << got;
    }
    ok = ok && std::abs(sum - 100.0) <= 0.05;
    d << "; sum " << sum;
    return {ok, d.str()};
}

Verdict taxonomy_partition() {
    const Label pool[] = {Label{{"a"}}, Label{{"b"}}, Label{{"c", "d"}}, Label{{"e"}}};
    SplitMix64 rng(99);
    std::vector<EvaluationRecord> log;
    for (std::size_t i = 0; i < 20000; ++i) {
        log.push_back(make_record("m" + std::to_string(rng.below(5000)), "v" + std::to_string(i),
                                  kAllKinds[rng.below(7)], rng.below(2) ? ApplyMode::AllPlace : ApplyMode::SinglePlace,
                                  pool[rng.below(2)], pool[rng.below(4)], pool[rng.below(4)], 1 + rng.below(900)));
    }
    bool ok = true;
    std::size_t total = 0;
    GroupBy g;
    g.dims = {Dimension::Mode, Dimension::Length, Dimension::Correctness};
    const MetricsReport whole = compute_metrics(log, g);
    for (const auto& row : whole.rows()) {
        std::uint64_t sum = 0;
        for (auto n : row.counts) sum += n;
        ok = ok && sum == row.variants && row.changed == row.counts[1] + row.counts[3] + row.counts[4];
        total += row.variants;
    }
    ok = ok && total == log.size();
    for (const auto& r : log) {
        const bool in = r.category == OutcomeCategory::CIP || r.category == OutcomeCategory::WCP ||
                        r.category == OutcomeCategory::WWDP;
        ok = ok && r.changed == in;
    }
    MetricsReport merged = compute_metrics({}, g);
    for (std::size_t s = 0; s < 7; ++s) {
        std::vector<EvaluationRecord> shard;
        for (std::size_t i = s; i < log.size(); i += 7) shard.push_back(log[i]);
        merged.merge(compute_metrics(shard, g));
    }
    const bool merge_ok = merged.to_json() == whole.to_json();
    return {ok && merge_ok, std::to_string(log.size()) + " records, merge " + (merge_ok ? "equal" : "differs")};
}

Verdict count_identities() {
    const Corpus& c = corpus();
    std::ostringstream d;
    bool ok = true;
    for (TransformKind k : {TransformKind::TC, TransformKind::UN}) {
        std::size_t eligible = 0, variants = 0;
        for (const auto& e : c.entries) {
            if (e.kind != k || e.mode != ApplyMode::SinglePlace) continue;
            eligible += !enumerate_candidates(c.methods[e.method], k, site_seed(kSeed, c.ids[e.method], k)).empty();
            variants += e.variants.size();
        }
        ok = ok && eligible == variants && eligible > 0;
        d << kind_name(k) << " " << eligible << " eligible, " << variants << " variants; ";
    }
    return {ok, d.str()};
}

Verdict mode_rules() {
    const Corpus& c = corpus();
    std::map<TransformKind, std::size_t> multi;
    bool ok = true;
    auto check_method = [&](const MethodAst& m, const std::string& id) {
        for (TransformKind k : kAllKinds) {
            const auto seed = site_seed(kSeed, id, k);
            if (k == TransformKind::PS || k == TransformKind::TC || k == TransformKind::UN) {
                try {
                    apply(m, k, ApplyMode::AllPlace, seed);
                    ok = false;
                } catch (const ModeUnsupported&) {
                }
                continue;
            }
            const auto sites = enumerate_candidates(m, k, seed);
            if (sites.size() < 2) continue;
            ++multi[k];
            ok = ok && apply(m, k, ApplyMode::AllPlace, seed).size() == 1 &&
                 apply(m, k, ApplyMode::SinglePlace, seed).size() == sites.size();
        }
    };
    for (std::size_t i = 0; i < c.methods.size(); ++i) check_method(c.methods[i], c.ids[i]);
    check_method(parse(kTwoOfEach), "mixed");
    for (const auto& e : c.entries) {
        const bool rejects = e.kind == TransformKind::PS || e.kind == TransformKind::TC || e.kind == TransformKind::UN;
        if (e.mode == ApplyMode::AllPlace) ok = ok && e.unsupported == rejects;
    }
    std::ostringstream d;
    d << "methods with >=2 sites:";
    for (TransformKind k : {TransformKind::VN, TransformKind::BX, TransformKind::LX, TransformKind::SF}) {
        d << " " << kind_name(k) << "=" << multi[k];
        ok = ok && multi[k] > 0;
    }
    return {ok, d.str()};
}

fs::path scratch() {
    static const fs::path dir = fs::temp_directory_path() / ("mm_acceptance_" + std::to_string(::getpid()));
    return dir;
}

const fs::path& corpus_dir() {
    static const fs::path dir = [] {
        fs::path d = scratch() / "corpus";
        fs::remove_all(d);
        write_corpus(d, corpus().methods);
        return d;
    }();
    return dir;
}

RunConfig run_config(const std::string& out, std::size_t workers) {
    RunConfig c;
    c.input = corpus_dir();
    c.out = scratch() / out;
    c.seed = kSeed;
    c.workers = workers;
    return c;
}

Verdict determinism() {
    fs::remove_all(scratch() / "run_a");
    fs::remove_all(scratch() / "run_b");
    run_all(run_config("run_a", 1));
    run_all(run_config("run_b", 8));
    std::size_t same = 0, files = 0;
    std::string differ;
    for (const char* f : {"manifest.json", "predictions_before.jsonl", "predictions_after.jsonl", "records.jsonl",
                          "report.json", "report.csv", "report_length.json", "report_length.csv",
                          "report_correctness.json", "report_correctness.csv"}) {
        ++files;
        if (read_file(scratch() / "run_a" / f) == read_file(scratch() / "run_b" / f)) {
            ++same;
        } else {
            differ += std::string(" ") + f;
        }
    }
    return {same == files, std::to_string(same) + "/" + std::to_string(files) + " files identical" + differ};
}

Verdict phenomenon() {
    RunConfig c = run_config("run_vn", 0);
    c.kinds = {TransformKind::VN};
    fs::remove_all(c.out);
    const EvaluateResult r = run_all(c);
    const auto row = r.report.row(TransformKind::VN, "all");
    const double pct = row && row->change_pct ? *row->change_pct : 0.0;
    std::ostringstream d;
    d << "VN prediction change " << pct << "% over " << (row ? row->variants : 0) << " variants";
    return {pct > 0.0, d.str()};
}

Verdict analyzer_protocol() {
    const auto start = std::chrono::steady_clock::now();
    std::vector<AnalyzerRequest> batch;
    std::set<std::size_t> poisoned;
    for (std::size_t i = 0; i < 10000; ++i) {
        const bool bad = i % 331 == 7;
        if (bad) poisoned.insert(i);
        batch.push_back({"item" + std::to_string(i), "int item" + std::to_string(i) + "() { return 0; }",
                         bad ? "__malformed__" : "labelFor" + std::to_string(i)});
    }
    ExternalOptions o;
    o.workers = 4;
    const auto out = external_predict(batch, {ECHO_ANALYZER, "--shuffle", "50"}, o);
    bool ordered = out.size() == batch.size();
    std::size_t flagged_ok = 0, labels_ok = 0;
    for (std::size_t i = 0; ordered && i < out.size(); ++i) {
        ordered = out[i].method_id == batch[i].id;
        const bool bad = poisoned.count(i) > 0;
        if (out[i].flagged == bad) ++flagged_ok;
        if (!bad && out[i].raw == batch[i].hint) ++labels_ok;
    }
    const double secs = seconds_since(start);
    std::ostringstream d;
    d << out.size() << " records, order " << (ordered ? "kept" : "broken") << ", " << poisoned.size()
      << " injected faults isolated: " << (flagged_ok == out.size() ? "yes" : "no") << ", " << secs << " s";
    return {ordered && flagged_ok == out.size() && labels_ok == out.size() - poisoned.size() && secs < 30.0,
            d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"semantic preservation", semantic_preservation},
        {"round-trip", round_trip},
        {"structural invariants", structural_invariants},
        {"metrics arithmetic", metrics_arithmetic},
        {"taxonomy partition", taxonomy_partition},
        {"count identities", count_identities},
        {"mode rules", mode_rules},
        {"determinism", determinism},
        {"demonstrable prediction change", phenomenon},
        {"analyzer protocol", analyzer_protocol},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
        std::fflush(stdout);
        failed += !v.pass;
    }
    fs::remove_all(scratch());
    return failed ? 1 : 0;
}
