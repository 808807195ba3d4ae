// Batch workflow behind the command-line driver: transform a directory of
// methods, predict names for originals and variants, and evaluate.
//
// Output layout under RunConfig::out:
//   manifest.json               variants, eligibility and per-kind counts
//   originals/<id>.mlang        canonical print of each parsed input
//   variants/<id>.<KIND>.<n>.mlang   (n = site index, or "all")
//   predictions_before.jsonl, predictions_after.jsonl
//   records.jsonl               one EvaluationRecord per variant
//   report.{json,csv}, report_length.{json,csv}, report_correctness.{json,csv}
//   meta.json                   timestamps; the only file that differs between identical runs

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "metamorph/analysis.hpp"
#include "metamorph/analyzer.hpp"
#include "metamorph/evaluation.hpp"
#include "metamorph/transforms.hpp"

namespace metamorph {

/// Bad flags, missing or empty input, join failures. Exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::filesystem::path input;
    std::filesystem::path out;
    std::vector<TransformKind> kinds{std::begin(kAllKinds), std::end(kAllKinds)};
    ApplyMode mode = ApplyMode::SinglePlace;
    std::uint64_t seed = 0;
    std::string analyzer = kBuiltinAnalyzer;  // "builtin" or "cmd:<command line>"
    std::vector<std::size_t> edges = kDefaultEdges;
    bool relaxed_calls = false;
    bool self_check = false;
    std::size_t workers = 0;  // 0: available parallelism
    std::string format = "json";
    double join_threshold = 0.05;  // tolerated fraction of records without predictions
    std::size_t trials = 16;
    std::chrono::milliseconds timeout{10000};
};

/// Keys mirror the field names; `timeout_ms` for the timeout. Unknown keys
/// and bad values throw UsageError.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
/// The fields that determine output bytes; paths and workers are left out.
nlohmann::json config_fingerprint(const RunConfig& config);
std::vector<TransformKind> parse_kinds(const std::string& csv);
std::vector<std::size_t> parse_edges(const std::string& csv);
std::size_t effective_workers(const RunConfig& config);

struct MethodFile {
    std::string id;  // file stem
    std::filesystem::path path;
    std::string text;
};

/// `*.mlang` and `*.java` files, sorted by name. Throws UsageError when the
/// directory is missing or holds no such file.
std::vector<MethodFile> list_methods(const std::filesystem::path& dir);

/// Writes `m<NNNNNN>.mlang` files.
void write_corpus(const std::filesystem::path& dir, const std::vector<MethodAst>& methods);

nlohmann::json run_transform(const RunConfig& config);

/// Predictions for every method file in `dir`, in file order. Unparseable
/// files yield flagged records.
std::vector<PredictionRecord> run_predict(const RunConfig& config, const std::filesystem::path& dir);

nlohmann::json to_json(const PredictionRecord& record);
void write_predictions(const std::filesystem::path& file, const std::vector<PredictionRecord>& records);
std::map<std::string, PredictionRecord> read_predictions(const std::filesystem::path& file);

struct EvaluateResult {
    std::vector<EvaluationRecord> records;
    MetricsReport report;
    MetricsReport by_length;
    MetricsReport by_correctness;
    std::size_t flagged = 0;
};

/// Joins predictions to manifest variants. Throws UsageError when the
/// flagged fraction exceeds the join threshold.
EvaluateResult run_evaluate(const RunConfig& config, const nlohmann::json& manifest,
                            const std::map<std::string, PredictionRecord>& before,
                            const std::map<std::string, PredictionRecord>& after);
void write_evaluation(const std::filesystem::path& out, const EvaluateResult& result);

/// transform, predict both sides, evaluate, then write meta.json.
EvaluateResult run_all(const RunConfig& config);

std::string read_file(const std::filesystem::path& file);
void write_file(const std::filesystem::path& file, const std::string& text);

}  // namespace metamorph
