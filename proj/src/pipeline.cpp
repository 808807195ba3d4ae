#include "metamorph/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <ctime>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "metamorph/semantics.hpp"
#include "metamorph/syntax.hpp"

namespace fs = std::filesystem;

namespace metamorph {

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads. The exception of
// the lowest failing index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(run);
    run();
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::vector<MethodFile> collect_methods(const fs::path& dir, bool require) {
    if (!fs::is_directory(dir)) {
        if (!require) return {};
        throw UsageError("input directory '" + dir.string() + "' does not exist");
    }
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".mlang" || ext == ".java")) paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty() && require) throw UsageError("no method files in '" + dir.string() + "'");
    std::vector<MethodFile> out;
    for (const auto& p : paths) out.push_back({p.stem().string(), p, read_file(p)});
    return out;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json site_json(const CandidateSite& s) {
    nlohmann::json j{{"path", path_to_string(s.path)}};
    if (!s.variable.empty()) j["variable"] = s.variable;
    if (s.kind == TransformKind::PS || s.kind == TransformKind::UN) j["index"] = s.index;
    return j;
}

bool all_place_defined(TransformKind kind) {
    return kind != TransformKind::PS && kind != TransformKind::TC && kind != TransformKind::UN;
}

nlohmann::json kinds_json(const std::vector<TransformKind>& kinds) {
    nlohmann::json a = nlohmann::json::array();
    for (auto k : kinds) a.push_back(kind_name(k));
    return a;
}

}  // namespace

std::string read_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + file.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& file, const std::string& text) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
    out << text;
}

std::vector<TransformKind> parse_kinds(const std::string& csv) {
    std::vector<TransformKind> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
                   item.end());
        if (item.empty()) continue;
        try {
            const TransformKind k = parse_kind(item);
            if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (out.empty()) throw UsageError("no transformation kinds given");
    // Canonical order keeps outputs independent of how the list was written.
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> parse_edges(const std::string& csv) {
    std::vector<std::size_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (v <= 0 || item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw UsageError("bad bucket edge '" + item + "'");
        }
    }
    try {
        check_edges(out);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return out;
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig c) {
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "input") {
                c.input = v.get<std::string>();
            } else if (key == "out") {
                c.out = v.get<std::string>();
            } else if (key == "kinds") {
                if (v.is_string()) {
                    c.kinds = parse_kinds(v.get<std::string>());
                } else {
                    std::string csv;
                    for (const auto& k : v) csv += k.get<std::string>() + ",";
                    c.kinds = parse_kinds(csv);
                }
            } else if (key == "mode") {
                c.mode = parse_mode(v.get<std::string>());
            } else if (key == "seed") {
                c.seed = v.get<std::uint64_t>();
            } else if (key == "analyzer") {
                c.analyzer = v.get<std::string>();
            } else if (key == "edges") {
                std::string csv;
                for (const auto& e : v) csv += std::to_string(e.get<long long>()) + ",";
                c.edges = parse_edges(csv);
            } else if (key == "relaxed_calls") {
                c.relaxed_calls = v.get<bool>();
            } else if (key == "self_check") {
                c.self_check = v.get<bool>();
            } else if (key == "workers") {
                c.workers = v.get<std::size_t>();
            } else if (key == "format") {
                c.format = v.get<std::string>();
            } else if (key == "join_threshold") {
                c.join_threshold = v.get<double>();
            } else if (key == "trials") {
                c.trials = v.get<std::size_t>();
            } else if (key == "timeout_ms") {
                c.timeout = std::chrono::milliseconds(v.get<long long>());
            } else {
                throw UsageError("unknown config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("bad config value: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return c;
}

nlohmann::json config_fingerprint(const RunConfig& c) {
    return {{"kinds", kinds_json(c.kinds)},    {"mode", mode_name(c.mode)},
            {"seed", c.seed},                  {"relaxed_calls", c.relaxed_calls},
            {"self_check", c.self_check},      {"trials", c.trials}};
}

std::size_t effective_workers(const RunConfig& config) {
    if (config.workers) return config.workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<MethodFile> list_methods(const fs::path& dir) { return collect_methods(dir, true); }

void write_corpus(const fs::path& dir, const std::vector<MethodAst>& methods) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < methods.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "m%06zu.mlang", i);
        write_file(dir / name, print(methods[i]));
    }
}

nlohmann::json run_transform(const RunConfig& config) {
    const auto files = list_methods(config.input);
    if (config.out.empty()) throw UsageError("no output directory given");
    // Stale files from an earlier run would otherwise be picked up by predict.
    for (const char* sub : {"originals", "variants"}) {
        const fs::path d = config.out / sub;
        fs::create_directories(d);
        for (const auto& entry : fs::directory_iterator(d)) {
            if (entry.is_regular_file() && entry.path().extension() == ".mlang") fs::remove(entry.path());
        }
    }

    struct Outcome {
        nlohmann::json original;
        std::vector<nlohmann::json> variants;
        std::vector<std::pair<std::string, std::string>> writes;  // relative path, text
        std::vector<nlohmann::json> ineligible;
        std::map<TransformKind, std::size_t> produced;
        std::size_t checked = 0, failed = 0, skipped = 0;
    };
    std::vector<Outcome> outcomes(files.size());
    const CandidateOptions options{config.relaxed_calls};

    parallel_for(files.size(), effective_workers(config), [&](std::size_t i) {
        const MethodFile& f = files[i];
        Outcome& o = outcomes[i];
        o.original = {{"id", f.id}, {"source", f.path.filename().string()}};
        MethodAst ast;
        try {
            ast = parse(f.text);
        } catch (const ParseError& e) {
            o.original["status"] = "error";
            o.original["error"] = std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.message();
            return;
        }
        const std::string original_file = "originals/" + f.id + ".mlang";
        o.original["status"] = "ok";
        o.original["file"] = original_file;
        o.original["name"] = ast.name;
        o.original["stmt_count"] = stmt_count(ast);
        o.writes.emplace_back(original_file, print(ast));

        for (TransformKind kind : config.kinds) {
            if (config.mode == ApplyMode::AllPlace && !all_place_defined(kind)) continue;
            std::vector<TransformedVariant> vs;
            try {
                vs = apply(ast, kind, config.mode, site_seed(config.seed, f.id, kind), options, f.id);
            } catch (const std::exception& e) {
                o.ineligible.push_back({{"original", f.id}, {"kind", kind_name(kind)}, {"reason", e.what()}});
                continue;
            }
            if (vs.empty()) {
                o.ineligible.push_back({{"original", f.id}, {"kind", kind_name(kind)}, {"reason", "no candidate site"}});
                continue;
            }
            o.produced[kind] = vs.size();
            for (std::size_t s = 0; s < vs.size(); ++s) {
                const auto& v = vs[s];
                const std::string vid = f.id + "." + std::string(kind_name(kind)) + "." +
                                        (config.mode == ApplyMode::AllPlace ? std::string("all") : std::to_string(s));
                const std::string file = "variants/" + vid + ".mlang";
                nlohmann::json sites = nlohmann::json::array();
                for (const auto& site : v.sites) sites.push_back(site_json(site));
                nlohmann::json entry{{"id", vid},    {"file", file},         {"original", f.id},
                                     {"kind", kind_name(kind)}, {"mode", mode_name(v.mode)}, {"sites", sites}};
                if (config.self_check) {
                    EquivalenceOptions eo;
                    eo.trials = config.trials;
                    eo.seed = site_seed(config.seed, vid, kind);
                    eo.normal_runs_only = kind == TransformKind::TC;
                    try {
                        const EquivalenceReport r = check_equivalence(ast, v.ast, eo);
                        ++o.checked;
                        entry["equivalence"] = r.equivalent ? "pass" : "fail";
                        if (!r.equivalent) ++o.failed;
                    } catch (const UnsupportedConstruct&) {
                        ++o.skipped;
                        entry["equivalence"] = "skipped";
                    }
                }
                o.variants.push_back(std::move(entry));
                o.writes.emplace_back(file, v.source);
            }
        }
    });

    nlohmann::json originals = nlohmann::json::array();
    nlohmann::json variants = nlohmann::json::array();
    nlohmann::json ineligible = nlohmann::json::array();
    std::map<TransformKind, std::pair<std::size_t, std::size_t>> counts;  // eligible originals, variants
    std::size_t checked = 0, failed = 0, skipped = 0;
    for (auto& o : outcomes) {
        originals.push_back(o.original);
        for (auto& v : o.variants) variants.push_back(std::move(v));
        for (auto& x : o.ineligible) ineligible.push_back(std::move(x));
        for (const auto& [kind, n] : o.produced) {
            ++counts[kind].first;
            counts[kind].second += n;
        }
        for (const auto& [rel, text] : o.writes) write_file(config.out / rel, text);
        checked += o.checked;
        failed += o.failed;
        skipped += o.skipped;
    }

    nlohmann::json unsupported = nlohmann::json::array();
    nlohmann::json count_json = nlohmann::json::object();
    for (TransformKind kind : config.kinds) {
        nlohmann::json c{{"originals", counts[kind].first}, {"transformed", counts[kind].second}};
        if (config.mode == ApplyMode::AllPlace && !all_place_defined(kind)) {
            unsupported.push_back({{"kind", kind_name(kind)},
                                   {"mode", mode_name(config.mode)},
                                   {"reason", ModeUnsupported(kind).what()}});
            c["unsupported"] = true;
        }
        count_json[std::string(kind_name(kind))] = c;
    }

    nlohmann::json manifest{{"config", config_fingerprint(config)},
                            {"originals", originals},
                            {"variants", variants},
                            {"ineligible", ineligible},
                            {"unsupported", unsupported},
                            {"counts", count_json}};
    if (config.self_check) manifest["self_check"] = {{"checked", checked}, {"failed", failed}, {"skipped", skipped}};
    write_file(config.out / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

std::vector<PredictionRecord> run_predict(const RunConfig& config, const fs::path& dir) {
    const auto files = collect_methods(dir, false);
    std::vector<PredictionRecord> out(files.size());
    if (config.analyzer == kBuiltinAnalyzer) {
        parallel_for(files.size(), effective_workers(config), [&](std::size_t i) {
            try {
                out[i] = builtin_predict(parse(files[i].text), files[i].id);
            } catch (const ParseError& e) {
                out[i].method_id = files[i].id;
                out[i].analyzer_id = kBuiltinAnalyzer;
                out[i].label = Label{{"error"}};
                out[i].flagged = true;
                out[i].error = e.what();
            }
        });
        return out;
    }
    if (config.analyzer.rfind("cmd:", 0) == 0) {
        const auto argv = parse_command(config.analyzer.substr(4));
        if (argv.empty()) throw UsageError("empty analyzer command");
        std::vector<AnalyzerRequest> batch;
        batch.reserve(files.size());
        for (const auto& f : files) batch.push_back({f.id, f.text, ""});
        if (batch.empty()) return out;
        ExternalOptions eo;
        eo.timeout = config.timeout;
        eo.workers = effective_workers(config);
        return external_predict(batch, argv, eo);
    }
    throw UsageError("unknown analyzer '" + config.analyzer + "' (expected builtin or cmd:<path>)");
}

nlohmann::json to_json(const PredictionRecord& r) {
    nlohmann::json j{{"method_id", r.method_id},
                     {"analyzer_id", r.analyzer_id},
                     {"label", r.label.subtokens},
                     {"raw", r.raw},
                     {"flagged", r.flagged}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

void write_predictions(const fs::path& file, const std::vector<PredictionRecord>& records) {
    std::string text;
    for (const auto& r : records) text += to_json(r).dump() + "\n";
    write_file(file, text);
}

std::map<std::string, PredictionRecord> read_predictions(const fs::path& file) {
    std::istringstream in(read_file(file));
    std::map<std::string, PredictionRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            PredictionRecord r;
            r.method_id = j.at("method_id").get<std::string>();
            r.analyzer_id = j.value("analyzer_id", std::string());
            r.label.subtokens = j.at("label").get<std::vector<std::string>>();
            r.raw = j.value("raw", r.label.joined());
            r.flagged = j.value("flagged", false);
            r.error = j.value("error", std::string());
            out[r.method_id] = std::move(r);
        } catch (const std::exception& e) {
            throw UsageError(file.string() + " line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

EvaluateResult run_evaluate(const RunConfig& config, const nlohmann::json& manifest,
                            const std::map<std::string, PredictionRecord>& before,
                            const std::map<std::string, PredictionRecord>& after) {
    EvaluateResult result;
    try {
        struct Original {
            Label truth;
            std::size_t stmts = 0;
        };
        std::map<std::string, Original> originals;
        for (const auto& o : manifest.at("originals")) {
            if (o.at("status") != "ok") continue;
            originals[o.at("id").get<std::string>()] = {normalize_label(o.at("name").get<std::string>()),
                                                        o.at("stmt_count").get<std::size_t>()};
        }
        const Label error{{"error"}};
        for (const auto& v : manifest.at("variants")) {
            const std::string vid = v.at("id").get<std::string>();
            const std::string oid = v.at("original").get<std::string>();
            const auto o = originals.find(oid);
            if (o == originals.end()) throw UsageError("variant '" + vid + "' names an unknown original");
            const auto b = before.find(oid);
            const auto a = after.find(vid);
            const bool have_b = b != before.end() && !b->second.flagged;
            const bool have_a = a != after.end() && !a->second.flagged;
            EvaluationRecord r = make_record(oid, vid, parse_kind(v.at("kind").get<std::string>()),
                                             parse_mode(v.at("mode").get<std::string>()), o->second.truth,
                                             have_b ? b->second.label : error, have_a ? a->second.label : error,
                                             o->second.stmts);
            r.flagged = !have_b || !have_a;
            result.flagged += r.flagged;
            result.records.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed manifest: ") + e.what());
    }
    if (!result.records.empty() &&
        static_cast<double>(result.flagged) > config.join_threshold * static_cast<double>(result.records.size())) {
        throw UsageError(std::to_string(result.flagged) + " of " + std::to_string(result.records.size()) +
                         " records lack a prediction, above the join threshold");
    }
    std::vector<TransformKind> kinds;
    for (const auto& k : manifest.at("config").at("kinds")) kinds.push_back(parse_kind(k.get<std::string>()));
    result.report = compute_metrics(result.records, {}, kinds);
    result.by_length = bucket_by_length(result.records, config.edges, kinds);
    result.by_correctness = split_by_correctness(result.records, kinds);
    return result;
}

void write_evaluation(const fs::path& out, const EvaluateResult& result) {
    write_file(out / "records.jsonl", to_jsonl(result.records));
    auto both = [&](const std::string& stem, const MetricsReport& r) {
        write_file(out / (stem + ".json"), r.to_json().dump(2) + "\n");
        write_file(out / (stem + ".csv"), r.to_csv());
    };
    both("report", result.report);
    both("report_length", result.by_length);
    both("report_correctness", result.by_correctness);
}

EvaluateResult run_all(const RunConfig& config) {
    const std::string started = utc_now();
    const nlohmann::json manifest = run_transform(config);
    const auto before = run_predict(config, config.out / "originals");
    const auto after = run_predict(config, config.out / "variants");
    write_predictions(config.out / "predictions_before.jsonl", before);
    write_predictions(config.out / "predictions_after.jsonl", after);
    std::map<std::string, PredictionRecord> b, a;
    for (const auto& r : before) b[r.method_id] = r;
    for (const auto& r : after) a[r.method_id] = r;
    EvaluateResult result = run_evaluate(config, manifest, b, a);
    write_evaluation(config.out, result);
    write_file(config.out / "meta.json",
               nlohmann::json{{"command", "run-all"}, {"started_at", started}, {"finished_at", utc_now()}}.dump(2) +
                   "\n");
    return result;
}

}  // namespace metamorph
