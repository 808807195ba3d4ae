#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "metamorph/pipeline.hpp"
#include "metamorph/semantics.hpp"
#include "metamorph/syntax.hpp"

namespace fs = std::filesystem;

namespace metamorph {
namespace {

class PipelineTest : public ::testing::Test {
protected:
    void SetUp() override {
        root_ = fs::temp_directory_path() /
                ("mm_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
                 std::to_string(::getpid()));
        fs::remove_all(root_);
        fs::create_directories(root_ / "in");
    }
    void TearDown() override { fs::remove_all(root_); }

    RunConfig config(const std::string& out = "out") const {
        RunConfig c;
        c.input = root_ / "in";
        c.out = root_ / out;
        c.workers = 2;
        return c;
    }

    void put(const std::string& name, const std::string& text) const { write_file(root_ / "in" / name, text); }

    fs::path root_;
};

std::size_t count_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) return 0;
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir)) n += e.is_regular_file();
    return n;
}

TEST_F(PipelineTest, TwoVariablesTwoVariants) {
    put("f.mlang", "int f(int a) { int b = a; return b; }");
    RunConfig c = config();
    c.kinds = {TransformKind::VN};
    const auto manifest = run_transform(c);
    EXPECT_EQ(manifest["variants"].size(), 2u);
    EXPECT_EQ(count_files(c.out / "variants"), 2u);
    EXPECT_TRUE(fs::exists(c.out / "variants" / "f.VN.0.mlang"));
    EXPECT_TRUE(fs::exists(c.out / "variants" / "f.VN.1.mlang"));
    EXPECT_TRUE(fs::exists(c.out / "manifest.json"));
    EXPECT_EQ(manifest["counts"]["VN"]["originals"], 1);
    EXPECT_EQ(manifest["counts"]["VN"]["transformed"], 2);
    EXPECT_EQ(manifest["variants"][0]["sites"][0]["variable"], "a");
    // Variant files parse back to what the manifest describes.
    MethodAst v = parse(read_file(c.out / "variants" / "f.VN.0.mlang"));
    EXPECT_EQ(v.params[0].name, "var0");
}

TEST_F(PipelineTest, AllPlacePermuteIsRecordedNotFatal) {
    put("f.mlang", "int f(int a) { int b = a; int c = 2; return b + c; }");
    RunConfig c = config();
    c.kinds = {TransformKind::PS};
    c.mode = ApplyMode::AllPlace;
    const auto manifest = run_transform(c);
    EXPECT_EQ(manifest["variants"].size(), 0u);
    ASSERT_EQ(manifest["unsupported"].size(), 1u);
    EXPECT_EQ(manifest["unsupported"][0]["kind"], "PS");
    EXPECT_TRUE(manifest["counts"]["PS"]["unsupported"].get<bool>());
}

TEST_F(PipelineTest, ManifestIsByteIdentical) {
    for (std::size_t i = 0; const auto& m : gen_corpus(30, 5)) put("g" + std::to_string(i++) + ".mlang", print(m));
    RunConfig a = config("a");
    RunConfig b = config("b");
    b.workers = 5;
    run_transform(a);
    run_transform(b);
    EXPECT_EQ(read_file(a.out / "manifest.json"), read_file(b.out / "manifest.json"));
    run_transform(a);  // rerun into the same directory
    EXPECT_EQ(read_file(a.out / "manifest.json"), read_file(b.out / "manifest.json"));
}

TEST_F(PipelineTest, ErrorsAndIneligibilityRecorded) {
    put("bad.mlang", "int f( { }");
    put("plain.mlang", "int g(int a) { return a; }");
    RunConfig c = config();
    c.kinds = {TransformKind::SF, TransformKind::VN};
    const auto manifest = run_transform(c);
    ASSERT_EQ(manifest["originals"].size(), 2u);
    EXPECT_EQ(manifest["originals"][0]["status"], "error");
    EXPECT_EQ(manifest["originals"][1]["status"], "ok");
    ASSERT_EQ(manifest["ineligible"].size(), 1u);
    EXPECT_EQ(manifest["ineligible"][0]["kind"], "SF");
    EXPECT_EQ(manifest["counts"]["SF"]["originals"], 0);
    EXPECT_EQ(manifest["counts"]["VN"]["transformed"], 1);
}

TEST_F(PipelineTest, MissingOrEmptyInput) {
    RunConfig c = config();
    EXPECT_THROW(run_transform(c), UsageError);  // empty
    c.input = root_ / "nowhere";
    EXPECT_THROW(run_transform(c), UsageError);
}

TEST_F(PipelineTest, SubcommandsComposeToRunAll) {
    for (std::size_t i = 0; const auto& m : gen_corpus(40, 11)) put("g" + std::to_string(i++) + ".mlang", print(m));
    RunConfig whole = config("whole");
    const EvaluateResult all = run_all(whole);

    RunConfig step = config("step");
    const auto manifest = run_transform(step);
    std::map<std::string, PredictionRecord> before, after;
    for (auto& r : run_predict(step, step.out / "originals")) before[r.method_id] = r;
    for (auto& r : run_predict(step, step.out / "variants")) after[r.method_id] = r;
    const EvaluateResult parts = run_evaluate(step, manifest, before, after);
    write_evaluation(step.out, parts);

    for (const char* f : {"manifest.json", "records.jsonl", "report.json", "report.csv", "report_length.json",
                          "report_correctness.csv"}) {
        EXPECT_EQ(read_file(whole.out / f), read_file(step.out / f)) << f;
    }
    // Files written by run-all read back to the same join.
    const auto again = run_evaluate(whole, nlohmann::json::parse(read_file(whole.out / "manifest.json")),
                                    read_predictions(whole.out / "predictions_before.jsonl"),
                                    read_predictions(whole.out / "predictions_after.jsonl"));
    EXPECT_EQ(to_jsonl(again.records), read_file(whole.out / "records.jsonl"));
    EXPECT_TRUE(fs::exists(whole.out / "meta.json"));
}

TEST_F(PipelineTest, EveryKindRowPresent) {
    write_corpus(root_ / "in", gen_corpus(200, 7));
    const EvaluateResult r = run_all(config());
    ASSERT_FALSE(r.records.empty());
    for (TransformKind k : kAllKinds) {
        auto row = r.report.row(k, "all");
        ASSERT_TRUE(row) << kind_name(k);
        EXPECT_GT(row->variants, 0u) << kind_name(k);
    }
    EXPECT_EQ(r.flagged, 0u);
}

nlohmann::json synthetic_manifest(std::size_t originals, std::size_t variants) {
    nlohmann::json o = nlohmann::json::array();
    for (std::size_t i = 0; i < originals; ++i) {
        o.push_back({{"id", "m" + std::to_string(i)}, {"status", "ok"}, {"name", "compareTo"}, {"stmt_count", 3}});
    }
    nlohmann::json v = nlohmann::json::array();
    for (std::size_t i = 0; i < variants; ++i) {
        v.push_back({{"id", "v" + std::to_string(i)},
                     {"original", "m" + std::to_string(i % originals)},
                     {"kind", "VN"},
                     {"mode", "single"}});
    }
    return {{"config", {{"kinds", {"VN"}}}}, {"originals", o}, {"variants", v}};
}

PredictionRecord pred(const std::string& id, const std::string& raw) {
    return PredictionRecord{id, "fixture", normalize_label(raw), raw, false, ""};
}

TEST(EvaluateTest, RenamingFixtureChangeRate) {
    const auto manifest = synthetic_manifest(1000, 123123);
    std::map<std::string, PredictionRecord> before, after;
    for (std::size_t i = 0; i < 1000; ++i) before["m" + std::to_string(i)] = pred("m" + std::to_string(i), "compareTo");
    for (std::size_t i = 0; i < 123123; ++i) {
        const std::string id = "v" + std::to_string(i);
        after[id] = pred(id, i < 67622 ? "getCount" : "compareTo");
    }
    const auto r = run_evaluate(RunConfig{}, manifest, before, after);
    EXPECT_NE(r.report.to_csv().find("VN,all,1000,123123,67622,54.92,"), std::string::npos);
}

TEST(EvaluateTest, SamePredictionsNoChange) {
    const auto manifest = synthetic_manifest(10, 50);
    std::map<std::string, PredictionRecord> before, after;
    for (std::size_t i = 0; i < 10; ++i) before["m" + std::to_string(i)] = pred("m" + std::to_string(i), "getX");
    for (std::size_t i = 0; i < 50; ++i) after["v" + std::to_string(i)] = before["m" + std::to_string(i % 10)];
    const auto r = run_evaluate(RunConfig{}, manifest, before, after);
    for (const auto* rep : {&r.report, &r.by_length, &r.by_correctness}) {
        for (const auto& row : rep->rows()) {
            if (row.variants) EXPECT_EQ(row.change_pct, 0.0);
        }
    }
}

TEST(EvaluateTest, JoinThreshold) {
    const auto manifest = synthetic_manifest(10, 100);
    std::map<std::string, PredictionRecord> before, after;
    for (std::size_t i = 0; i < 10; ++i) before["m" + std::to_string(i)] = pred("m" + std::to_string(i), "getX");
    for (std::size_t i = 0; i < 95; ++i) after["v" + std::to_string(i)] = pred("v" + std::to_string(i), "getX");
    const auto r = run_evaluate(RunConfig{}, manifest, before, after);  // 5% missing is tolerated
    EXPECT_EQ(r.flagged, 5u);
    EXPECT_EQ(r.report.row(TransformKind::VN, "all")->variants, 95u);
    after.erase("v0");
    EXPECT_THROW(run_evaluate(RunConfig{}, manifest, before, after), UsageError);
}

TEST_F(PipelineTest, ExternalAnalyzerInPipeline) {
    write_corpus(root_ / "in", gen_corpus(20, 2));
    RunConfig c = config();
    c.analyzer = std::string("cmd:") + ECHO_ANALYZER;
    c.kinds = {TransformKind::VN, TransformKind::UN};
    const auto r = run_all(c);
    // The echo analyzer answers with the method's own name: always correct.
    for (const auto& rec : r.records) {
        EXPECT_EQ(rec.category, OutcomeCategory::CCP);
        EXPECT_FALSE(rec.flagged);
    }
    c.analyzer = "cmd:/nonexistent/analyzer";
    EXPECT_THROW(run_all(c), AnalyzerUnavailable);
    c.analyzer = "magic";
    EXPECT_THROW(run_all(c), UsageError);
}

TEST(ConfigTest, JsonAndParsers) {
    auto c = config_from_json(nlohmann::json::parse(
        R"({"kinds": ["UN", "vn"], "mode": "all", "seed": 9, "edges": [5, 50], "relaxed_calls": true, "timeout_ms": 50})"));
    EXPECT_EQ(c.kinds, (std::vector<TransformKind>{TransformKind::VN, TransformKind::UN}));
    EXPECT_EQ(c.mode, ApplyMode::AllPlace);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.edges, (std::vector<std::size_t>{5, 50}));
    EXPECT_TRUE(c.relaxed_calls);
    EXPECT_EQ(c.timeout.count(), 50);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"colour": 1})")), UsageError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"seed": "x"})")), UsageError);
    EXPECT_THROW(parse_kinds("VN,XX"), UsageError);
    EXPECT_THROW(parse_edges("10,5"), UsageError);
    EXPECT_THROW(parse_edges("10,abc"), UsageError);
}

int cli(const std::string& args) {
    const int status = std::system((std::string(METAMORPH_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(PipelineTest, CliExitCodes) {
    const std::string in = (root_ / "in").string();
    const std::string out = (root_ / "out").string();
    EXPECT_EQ(cli("gen-corpus --out " + in + " --count 10 --seed 3"), 0);
    EXPECT_EQ(count_files(root_ / "in"), 10u);
    EXPECT_EQ(cli("transform --input " + in + " --out " + out + " --kinds VN,PS --mode all"), 0);
    EXPECT_EQ(cli("predict --input " + out + "/variants --out " + out + "/p.jsonl"), 0);
    EXPECT_EQ(cli("run-all --input " + in + " --out " + out + " --self-check --format csv"), 0);
    EXPECT_EQ(cli("evaluate --input " + out), 0);
    EXPECT_EQ(cli("report --input " + out + "/records.jsonl --group length,correctness --format csv"), 0);
    EXPECT_EQ(cli("check-equivalence " + in + "/m000000.mlang " + in + "/m000000.mlang"), 0);
    EXPECT_EQ(cli("run-all --input " + (root_ / "none").string() + " --out " + out), 2);
    EXPECT_EQ(cli("transform --input " + in), 2);
    EXPECT_EQ(cli("transform --input " + in + " --out " + out + " --kinds QQ"), 2);
    EXPECT_EQ(cli("transform --bogus"), 2);
    EXPECT_EQ(cli(""), 2);
    EXPECT_EQ(cli("--help"), 0);

    write_file(root_ / "cfg.json", R"({"kinds": "UN", "seed": 4})");
    EXPECT_EQ(cli("transform --config " + (root_ / "cfg.json").string() + " --input " + in + " --out " + out), 0);
    auto manifest = nlohmann::json::parse(read_file(root_ / "out" / "manifest.json"));
    EXPECT_EQ(manifest["config"]["kinds"], nlohmann::json::array({"UN"}));
    EXPECT_EQ(manifest["config"]["seed"], 4);
    EXPECT_EQ(cli("transform --config " + (root_ / "cfg.json").string() + " --seed 8 --input " + in + " --out " + out),
              0);
    manifest = nlohmann::json::parse(read_file(root_ / "out" / "manifest.json"));
    EXPECT_EQ(manifest["config"]["seed"], 8);
}

}  // namespace
}  // namespace metamorph
