// Command-line driver. Exit codes: 0 success, 1 internal error, 2 usage or
// input error.

#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "metamorph/pipeline.hpp"
#include "metamorph/semantics.hpp"
#include "metamorph/syntax.hpp"

namespace {

using namespace metamorph;

struct Flags {
    std::string config;
    std::optional<std::string> input, out, kinds, mode, analyzer, edges, format;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers, trials;
    bool relaxed_calls = false;
    bool self_check = false;
};

void add_run_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON file mirroring the run configuration; flags override it");
    sub->add_option("--input", f.input, "input directory of method files");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--kinds", f.kinds, "comma-separated subset of VN,BX,LX,SF,PS,TC,UN");
    sub->add_option("--mode", f.mode, "single or all");
    sub->add_option("--seed", f.seed, "corpus seed");
    sub->add_option("--analyzer", f.analyzer, "builtin or cmd:<path>");
    sub->add_option("--edges", f.edges, "comma-separated length bucket edges");
    sub->add_flag("--relaxed-calls", f.relaxed_calls, "treat calls as pure when permuting statements");
    sub->add_flag("--self-check", f.self_check, "check every variant by differential interpretation");
    sub->add_option("--workers", f.workers, "worker threads and analyzer processes");
    sub->add_option("--trials", f.trials, "equivalence trials per variant");
    sub->add_option("--format", f.format, "json or csv, for the report printed to stdout");
}

RunConfig build_config(const Flags& f) {
    RunConfig c;
    if (!f.config.empty()) {
        nlohmann::json j = nlohmann::json::parse(read_file(f.config), nullptr, false);
        if (j.is_discarded()) throw UsageError("config '" + f.config + "' is not valid JSON");
        c = config_from_json(j);
    }
    if (f.input) c.input = *f.input;
    if (f.out) c.out = *f.out;
    if (f.kinds) c.kinds = parse_kinds(*f.kinds);
    if (f.mode) {
        try {
            c.mode = parse_mode(*f.mode);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (f.seed) c.seed = *f.seed;
    if (f.analyzer) c.analyzer = *f.analyzer;
    if (f.edges) c.edges = parse_edges(*f.edges);
    if (f.relaxed_calls) c.relaxed_calls = true;
    if (f.self_check) c.self_check = true;
    if (f.workers) c.workers = *f.workers;
    if (f.trials) c.trials = *f.trials;
    if (f.format) c.format = *f.format;
    if (c.format != "json" && c.format != "csv") throw UsageError("format must be json or csv");
    return c;
}

void require(const std::filesystem::path& p, const char* flag) {
    if (p.empty()) throw UsageError(std::string(flag) + " is required");
}

void summarize(const nlohmann::json& manifest) {
    for (const auto& [kind, c] : manifest["counts"].items()) {
        std::cerr << kind << ": " << c["originals"] << " originals, " << c["transformed"] << " variants";
        if (c.contains("unsupported")) std::cerr << " (mode unsupported)";
        std::cerr << "\n";
    }
}

int check_failures(const nlohmann::json& manifest) {
    if (!manifest.contains("self_check")) return 0;
    const auto failed = manifest["self_check"]["failed"].get<std::size_t>();
    if (failed == 0) return 0;
    std::cerr << "self-check: " << failed << " variants changed behavior\n";
    return 1;
}

void emit(const std::optional<std::string>& out, const std::string& text) {
    if (out && !out->empty()) {
        write_file(*out, text);
    } else {
        std::cout << text;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"metamorph: semantic-preserving method transformations and prediction-change evaluation"};
    app.require_subcommand(1);

    Flags transform_f, predict_f, evaluate_f, run_f, report_f;
    auto* transform = app.add_subcommand("transform", "write variants and a manifest");
    add_run_flags(transform, transform_f);

    auto* predict = app.add_subcommand("predict", "predict method names for a directory of method files");
    add_run_flags(predict, predict_f);

    auto* evaluate = app.add_subcommand("evaluate", "join predictions to a manifest and compute metrics");
    add_run_flags(evaluate, evaluate_f);
    std::string manifest_path, before_path, after_path;
    evaluate->add_option("--manifest", manifest_path, "manifest (default <input>/manifest.json)");
    evaluate->add_option("--before", before_path, "original predictions (default <input>/predictions_before.jsonl)");
    evaluate->add_option("--after", after_path, "variant predictions (default <input>/predictions_after.jsonl)");

    auto* report = app.add_subcommand("report", "metrics for an evaluation record log");
    report->add_option("--input", report_f.input, "records.jsonl")->required();
    report->add_option("--out", report_f.out, "output file (default stdout)");
    report->add_option("--format", report_f.format, "json or csv");
    report->add_option("--edges", report_f.edges, "comma-separated length bucket edges");
    report->add_option("--kinds", report_f.kinds, "kinds to list even without records");
    std::string group = "none";
    report->add_option("--group", group, "comma-separated: none, mode, length, correctness");

    auto* check = app.add_subcommand("check-equivalence", "differential interpretation of two methods");
    std::string left, right;
    EquivalenceOptions eq;
    check->add_option("left", left, "method file")->required();
    check->add_option("right", right, "method file")->required();
    check->add_option("--trials", eq.trials, "trials");
    check->add_option("--seed", eq.seed, "argument seed");
    check->add_option("--budget", eq.step_budget, "step budget per run");
    check->add_flag("--normal-runs-only", eq.normal_runs_only, "compare only runs where the left side raises nothing");

    auto* gen = app.add_subcommand("gen-corpus", "write a seeded random corpus");
    std::string gen_out;
    std::size_t gen_count = 100;
    std::uint64_t gen_seed = 0;
    CorpusOptions gen_options;
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--count", gen_count, "number of methods");
    gen->add_option("--seed", gen_seed, "corpus seed");
    gen->add_option("--max-stmts", gen_options.max_stmts, "statements per method");

    auto* run_all_cmd = app.add_subcommand("run-all", "transform, predict and evaluate in one go");
    add_run_flags(run_all_cmd, run_f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*transform) {
            RunConfig c = build_config(transform_f);
            require(c.input, "--input");
            require(c.out, "--out");
            const auto manifest = run_transform(c);
            summarize(manifest);
            return check_failures(manifest);
        }
        if (*predict) {
            RunConfig c = build_config(predict_f);
            require(c.input, "--input");
            list_methods(c.input);
            std::string text;
            for (const auto& r : run_predict(c, c.input)) text += metamorph::to_json(r).dump() + "\n";
            emit(predict_f.out, text);
            return 0;
        }
        if (*evaluate) {
            RunConfig c = build_config(evaluate_f);
            require(c.input, "--input");
            const std::filesystem::path in = c.input;
            const auto manifest = nlohmann::json::parse(
                read_file(manifest_path.empty() ? in / "manifest.json" : std::filesystem::path(manifest_path)),
                nullptr, false);
            if (manifest.is_discarded()) throw UsageError("manifest is not valid JSON");
            const auto before =
                read_predictions(before_path.empty() ? in / "predictions_before.jsonl" : std::filesystem::path(before_path));
            const auto after =
                read_predictions(after_path.empty() ? in / "predictions_after.jsonl" : std::filesystem::path(after_path));
            const auto result = run_evaluate(c, manifest, before, after);
            write_evaluation(c.out.empty() ? in : c.out, result);
            std::cout << (c.format == "csv" ? result.report.to_csv() : result.report.to_json().dump(2) + "\n");
            return 0;
        }
        if (*report) {
            RunConfig c = build_config(report_f);
            std::istringstream in(read_file(c.input));
            std::vector<EvaluationRecord> records;
            try {
                records = read_jsonl(in);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            GroupBy g;
            g.edges = c.edges;
            std::stringstream ss(group);
            std::string dim;
            while (std::getline(ss, dim, ',')) {
                if (dim == "mode") {
                    g.dims.insert(Dimension::Mode);
                } else if (dim == "length") {
                    g.dims.insert(Dimension::Length);
                } else if (dim == "correctness") {
                    g.dims.insert(Dimension::Correctness);
                } else if (dim != "none" && !dim.empty()) {
                    throw UsageError("unknown grouping '" + dim + "'");
                }
            }
            const auto metrics = compute_metrics(records, g, report_f.kinds ? c.kinds : std::vector<TransformKind>{});
            emit(report_f.out, c.format == "csv" ? metrics.to_csv() : metrics.to_json().dump(2) + "\n");
            return 0;
        }
        if (*check) {
            MethodAst a = parse(read_file(left));
            MethodAst b = parse(read_file(right));
            std::cout << metamorph::to_json(check_equivalence(a, b, eq)).dump(2) << "\n";
            return 0;
        }
        if (*gen) {
            write_corpus(gen_out, gen_corpus(gen_count, gen_seed, gen_options));
            return 0;
        }
        if (*run_all_cmd) {
            RunConfig c = build_config(run_f);
            require(c.input, "--input");
            require(c.out, "--out");
            const auto result = run_all(c);
            std::cout << (c.format == "csv" ? result.report.to_csv() : result.report.to_json().dump(2) + "\n");
            return check_failures(nlohmann::json::parse(read_file(c.out / "manifest.json")));
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const AnalyzerUnavailable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedConstruct& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
