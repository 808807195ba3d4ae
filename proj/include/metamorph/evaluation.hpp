// Outcome taxonomy, prediction-change metrics and their groupings.

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "metamorph/analysis.hpp"
#include "metamorph/analyzer.hpp"
#include "metamorph/transforms.hpp"

namespace metamorph {

enum class OutcomeCategory { CCP, CIP, WWSP, WCP, WWDP };

inline constexpr OutcomeCategory kAllCategories[] = {OutcomeCategory::CCP, OutcomeCategory::CIP,
                                                     OutcomeCategory::WWSP, OutcomeCategory::WCP,
                                                     OutcomeCategory::WWDP};

std::string_view category_name(OutcomeCategory category);
OutcomeCategory parse_category(std::string_view text);

struct Classification {
    OutcomeCategory category = OutcomeCategory::CCP;
    bool changed = false;
};

Classification classify_outcome(const Label& truth, const Label& before, const Label& after);

struct EvaluationRecord {
    std::string method_id;   // the original
    std::string variant_id;  // join key of the variant's prediction
    TransformKind kind = TransformKind::VN;
    ApplyMode mode = ApplyMode::SinglePlace;
    Label truth;
    Label before;
    Label after;
    OutcomeCategory category = OutcomeCategory::CCP;
    bool changed = false;
    std::size_t stmt_count = 0;
    bool flagged = false;  // a prediction was missing or failed; excluded from metrics
};

/// Fills category and changed from the three labels.
EvaluationRecord make_record(std::string method_id, std::string variant_id, TransformKind kind, ApplyMode mode,
                             Label truth, Label before, Label after, std::size_t stmt_count);

nlohmann::json to_json(const EvaluationRecord& record);
EvaluationRecord record_from_json(const nlohmann::json& j);
std::string to_jsonl(const std::vector<EvaluationRecord>& records);
std::vector<EvaluationRecord> read_jsonl(std::istream& in);

/// 100 * num / den rounded half-up to hundredths; nullopt when den is 0.
std::optional<double> percentage(std::uint64_t num, std::uint64_t den);

inline const std::vector<std::size_t> kDefaultEdges{10, 20, 50, 100, 200, 500};

/// Buckets [1,e1], (e1,e2], ..., (ek,inf). Throws std::invalid_argument
/// unless edges are strictly increasing and positive.
void check_edges(const std::vector<std::size_t>& edges);
std::size_t bucket_index(std::size_t stmt_count, const std::vector<std::size_t>& edges);
std::string bucket_label(std::size_t bucket, const std::vector<std::size_t>& edges);

enum class Dimension { Mode, Length, Correctness };

struct GroupBy {
    std::set<Dimension> dims;
    std::vector<std::size_t> edges = kDefaultEdges;
};

struct CellCounts {
    std::set<std::string> originals;
    std::uint64_t variants = 0;
    std::uint64_t changed = 0;
    std::uint64_t flagged = 0;
    std::array<std::uint64_t, 5> categories{};

    void add(const CellCounts& other);
};

struct MetricsRow {
    TransformKind kind = TransformKind::VN;
    std::string cell;
    std::size_t originals = 0;
    std::uint64_t variants = 0;
    std::uint64_t changed = 0;
    std::uint64_t flagged = 0;
    std::array<std::uint64_t, 5> counts{};
    std::optional<double> change_pct;
    std::array<std::optional<double>, 5> category_pct;
};

enum class Trend { Increasing, Decreasing, Flat, Mixed, Insufficient };

std::string_view trend_name(Trend trend);

struct MetricsReport {
    // Ordering key: kind, then mode, bucket and correctness (0 correct, 1
    // incorrect); -1 when not grouped.
    struct Key {
        int kind = 0;
        int mode = -1;
        int bucket = -1;
        int correct = -1;
        auto operator<=>(const Key&) const = default;
    };

    GroupBy group;
    std::map<Key, CellCounts> cells;

    std::vector<MetricsRow> rows() const;
    std::optional<MetricsRow> row(TransformKind kind, std::string_view cell) const;
    /// Over non-empty length buckets of one kind; Insufficient without the
    /// Length dimension or with fewer than two non-empty buckets.
    Trend length_trend(TransformKind kind) const;
    std::string cell_label(const Key& key) const;

    /// Counts add, original sets unite. Throws std::invalid_argument when the
    /// groupings differ.
    void merge(const MetricsReport& other);

    nlohmann::json to_json() const;
    /// Header `kind,cell,originals,variants,changed,change_pct,ccp,cip,wwsp,wcp,wwdp`;
    /// empty fields for cells without variants.
    std::string to_csv() const;
};

/// Cells are created for every kind seen or listed in `kinds`, crossed with
/// every value of the grouped dimensions. Flagged records only count as flagged.
MetricsReport compute_metrics(const std::vector<EvaluationRecord>& records, const GroupBy& group = {},
                              const std::vector<TransformKind>& kinds = {});
MetricsReport bucket_by_length(const std::vector<EvaluationRecord>& records,
                               const std::vector<std::size_t>& edges = kDefaultEdges,
                               const std::vector<TransformKind>& kinds = {});
MetricsReport split_by_correctness(const std::vector<EvaluationRecord>& records,
                                   const std::vector<TransformKind>& kinds = {});
MetricsReport merge(const MetricsReport& a, const MetricsReport& b);

}  // namespace metamorph
