#include "metamorph/evaluation.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace metamorph {

std::string_view category_name(OutcomeCategory category) {
    switch (category) {
        case OutcomeCategory::CCP: return "CCP";
        case OutcomeCategory::CIP: return "CIP";
        case OutcomeCategory::WWSP: return "WWSP";
        case OutcomeCategory::WCP: return "WCP";
        case OutcomeCategory::WWDP: return "WWDP";
    }
    return "?";
}

OutcomeCategory parse_category(std::string_view text) {
    for (auto c : kAllCategories) {
        if (category_name(c) == text) return c;
    }
    throw std::invalid_argument("unknown outcome category '" + std::string(text) + "'");
}

Classification classify_outcome(const Label& truth, const Label& before, const Label& after) {
    Classification c;
    c.changed = before != after;
    if (before == truth) {
        c.category = after == truth ? OutcomeCategory::CCP : OutcomeCategory::CIP;
    } else if (after == before) {
        c.category = OutcomeCategory::WWSP;
    } else if (after == truth) {
        c.category = OutcomeCategory::WCP;
    } else {
        c.category = OutcomeCategory::WWDP;
    }
    return c;
}

EvaluationRecord make_record(std::string method_id, std::string variant_id, TransformKind kind, ApplyMode mode,
                             Label truth, Label before, Label after, std::size_t stmt_count) {
    EvaluationRecord r;
    r.method_id = std::move(method_id);
    r.variant_id = std::move(variant_id);
    r.kind = kind;
    r.mode = mode;
    r.truth = std::move(truth);
    r.before = std::move(before);
    r.after = std::move(after);
    const Classification c = classify_outcome(r.truth, r.before, r.after);
    r.category = c.category;
    r.changed = c.changed;
    r.stmt_count = stmt_count;
    return r;
}

nlohmann::json to_json(const EvaluationRecord& r) {
    return {{"method_id", r.method_id},
            {"variant_id", r.variant_id},
            {"kind", kind_name(r.kind)},
            {"mode", mode_name(r.mode)},
            {"truth", r.truth.subtokens},
            {"before", r.before.subtokens},
            {"after", r.after.subtokens},
            {"category", category_name(r.category)},
            {"changed", r.changed},
            {"stmt_count", r.stmt_count},
            {"flagged", r.flagged}};
}

EvaluationRecord record_from_json(const nlohmann::json& j) {
    EvaluationRecord r;
    r.method_id = j.at("method_id").get<std::string>();
    r.variant_id = j.value("variant_id", std::string());
    r.kind = parse_kind(j.at("kind").get<std::string>());
    r.mode = parse_mode(j.at("mode").get<std::string>());
    r.truth.subtokens = j.at("truth").get<std::vector<std::string>>();
    r.before.subtokens = j.at("before").get<std::vector<std::string>>();
    r.after.subtokens = j.at("after").get<std::vector<std::string>>();
    r.category = parse_category(j.at("category").get<std::string>());
    r.changed = j.at("changed").get<bool>();
    r.stmt_count = j.at("stmt_count").get<std::size_t>();
    r.flagged = j.value("flagged", false);
    return r;
}

std::string to_jsonl(const std::vector<EvaluationRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += to_json(r).dump();
        out += '\n';
    }
    return out;
}

std::vector<EvaluationRecord> read_jsonl(std::istream& in) {
    std::vector<EvaluationRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            out.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::invalid_argument("record line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::optional<double> percentage(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return std::nullopt;
    // Integer half-up on hundredths avoids binary-fraction surprises at .005.
    const std::uint64_t hundredths = (20000 * num + den) / (2 * den);
    return static_cast<double>(hundredths) / 100.0;
}

void check_edges(const std::vector<std::size_t>& edges) {
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i] == 0 || (i > 0 && edges[i] <= edges[i - 1])) {
            throw std::invalid_argument("bucket edges must be positive and strictly increasing");
        }
    }
}

std::size_t bucket_index(std::size_t stmt_count, const std::vector<std::size_t>& edges) {
    std::size_t b = 0;
    while (b < edges.size() && stmt_count > edges[b]) ++b;
    return b;
}

std::string bucket_label(std::size_t bucket, const std::vector<std::size_t>& edges) {
    if (edges.empty()) return "[1,inf)";
    if (bucket == 0) return "[1," + std::to_string(edges[0]) + "]";
    if (bucket >= edges.size()) return "(" + std::to_string(edges.back()) + ",inf)";
    return "(" + std::to_string(edges[bucket - 1]) + "," + std::to_string(edges[bucket]) + "]";
}

void CellCounts::add(const CellCounts& other) {
    originals.insert(other.originals.begin(), other.originals.end());
    variants += other.variants;
    changed += other.changed;
    flagged += other.flagged;
    for (std::size_t i = 0; i < categories.size(); ++i) categories[i] += other.categories[i];
}

std::string_view trend_name(Trend trend) {
    switch (trend) {
        case Trend::Increasing: return "increasing";
        case Trend::Decreasing: return "decreasing";
        case Trend::Flat: return "flat";
        case Trend::Mixed: return "mixed";
        case Trend::Insufficient: return "insufficient";
    }
    return "?";
}

std::string MetricsReport::cell_label(const Key& key) const {
    std::string out;
    auto part = [&](const std::string& p) {
        if (!out.empty()) out += '/';
        out += p;
    };
    if (key.mode >= 0) part(std::string(mode_name(static_cast<ApplyMode>(key.mode))));
    if (key.bucket >= 0) part(bucket_label(static_cast<std::size_t>(key.bucket), group.edges));
    if (key.correct >= 0) part(key.correct == 0 ? "correct" : "incorrect");
    return out.empty() ? "all" : out;
}

std::vector<MetricsRow> MetricsReport::rows() const {
    std::vector<MetricsRow> out;
    for (const auto& [key, c] : cells) {
        MetricsRow r;
        r.kind = static_cast<TransformKind>(key.kind);
        r.cell = cell_label(key);
        r.originals = c.originals.size();
        r.variants = c.variants;
        r.changed = c.changed;
        r.flagged = c.flagged;
        r.counts = c.categories;
        r.change_pct = percentage(c.changed, c.variants);
        for (std::size_t i = 0; i < 5; ++i) r.category_pct[i] = percentage(c.categories[i], c.variants);
        out.push_back(std::move(r));
    }
    return out;
}

std::optional<MetricsRow> MetricsReport::row(TransformKind kind, std::string_view cell) const {
    for (auto& r : rows()) {
        if (r.kind == kind && r.cell == cell) return r;
    }
    return std::nullopt;
}

Trend MetricsReport::length_trend(TransformKind kind) const {
    if (!group.dims.count(Dimension::Length)) return Trend::Insufficient;
    // Sum over the other dimensions, then compare exact fractions.
    std::map<int, std::pair<std::uint64_t, std::uint64_t>> per_bucket;
    for (const auto& [key, c] : cells) {
        if (key.kind != static_cast<int>(kind) || c.variants == 0) continue;
        auto& [changed, variants] = per_bucket[key.bucket];
        changed += c.changed;
        variants += c.variants;
    }
    if (per_bucket.size() < 2) return Trend::Insufficient;
    bool up = false;
    bool down = false;
    const std::pair<std::uint64_t, std::uint64_t>* prev = nullptr;
    for (const auto& [b, cur] : per_bucket) {
        if (prev) {
            const auto lhs = cur.first * prev->second;
            const auto rhs = prev->first * cur.second;
            up = up || lhs > rhs;
            down = down || lhs < rhs;
        }
        prev = &cur;
    }
    if (up && down) return Trend::Mixed;
    if (up) return Trend::Increasing;
    if (down) return Trend::Decreasing;
    return Trend::Flat;
}

void MetricsReport::merge(const MetricsReport& other) {
    if (group.dims != other.group.dims || group.edges != other.group.edges) {
        throw std::invalid_argument("cannot merge reports with different groupings");
    }
    for (const auto& [key, c] : other.cells) cells[key].add(c);
}

namespace {

nlohmann::json pct_json(const std::optional<double>& p) { return p ? nlohmann::json(*p) : nlohmann::json(nullptr); }

std::string pct_csv(const std::optional<double>& p) {
    if (!p) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *p);
    return buf;
}

std::string dimension_name(Dimension d) {
    switch (d) {
        case Dimension::Mode: return "mode";
        case Dimension::Length: return "length";
        case Dimension::Correctness: return "correctness";
    }
    return "?";
}

}  // namespace

nlohmann::json MetricsReport::to_json() const {
    nlohmann::json dims = nlohmann::json::array();
    for (auto d : group.dims) dims.push_back(dimension_name(d));
    nlohmann::json rows_json = nlohmann::json::array();
    std::set<int> kinds;
    for (const auto& r : rows()) {
        kinds.insert(static_cast<int>(r.kind));
        nlohmann::json row{{"kind", kind_name(r.kind)}, {"cell", r.cell},          {"originals", r.originals},
                           {"variants", r.variants},    {"changed", r.changed},    {"flagged", r.flagged},
                           {"change_pct", pct_json(r.change_pct)}};
        nlohmann::json counts;
        for (std::size_t i = 0; i < 5; ++i) {
            std::string name(category_name(kAllCategories[i]));
            for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            row[name] = pct_json(r.category_pct[i]);
            counts[name] = r.counts[i];
        }
        row["counts"] = counts;
        rows_json.push_back(std::move(row));
    }
    nlohmann::json j{{"dimensions", dims}, {"rows", rows_json}};
    if (group.dims.count(Dimension::Length)) {
        j["edges"] = group.edges;
        nlohmann::json trends = nlohmann::json::object();
        for (int k : kinds) {
            const auto kind = static_cast<TransformKind>(k);
            trends[std::string(kind_name(kind))] = trend_name(length_trend(kind));
        }
        j["trends"] = trends;
    }
    return j;
}

std::string MetricsReport::to_csv() const {
    std::ostringstream out;
    out << "kind,cell,originals,variants,changed,change_pct,ccp,cip,wwsp,wcp,wwdp\n";
    for (const auto& r : rows()) {
        out << kind_name(r.kind) << ',' << r.cell << ',' << r.originals << ',' << r.variants << ',' << r.changed << ','
            << pct_csv(r.change_pct);
        for (const auto& p : r.category_pct) out << ',' << pct_csv(p);
        out << '\n';
    }
    return out.str();
}

MetricsReport compute_metrics(const std::vector<EvaluationRecord>& records, const GroupBy& group,
                              const std::vector<TransformKind>& kinds) {
    if (group.dims.count(Dimension::Length)) check_edges(group.edges);
    MetricsReport report;
    report.group = group;
    const bool by_mode = group.dims.count(Dimension::Mode);
    const bool by_length = group.dims.count(Dimension::Length);
    const bool by_correct = group.dims.count(Dimension::Correctness);

    std::set<int> seen;
    for (auto k : kinds) seen.insert(static_cast<int>(k));
    for (const auto& r : records) seen.insert(static_cast<int>(r.kind));
    const int modes = by_mode ? 2 : 1;
    const int buckets = by_length ? static_cast<int>(group.edges.size()) + 1 : 1;
    const int corrects = by_correct ? 2 : 1;
    for (int k : seen) {
        for (int m = 0; m < modes; ++m) {
            for (int b = 0; b < buckets; ++b) {
                for (int c = 0; c < corrects; ++c) {
                    report.cells[{k, by_mode ? m : -1, by_length ? b : -1, by_correct ? c : -1}];
                }
            }
        }
    }

    for (const auto& r : records) {
        MetricsReport::Key key{static_cast<int>(r.kind), by_mode ? static_cast<int>(r.mode) : -1,
                               by_length ? static_cast<int>(bucket_index(r.stmt_count, group.edges)) : -1,
                               by_correct ? (r.before == r.truth ? 0 : 1) : -1};
        CellCounts& c = report.cells[key];
        if (r.flagged) {
            ++c.flagged;
            continue;
        }
        c.originals.insert(r.method_id);
        ++c.variants;
        if (r.changed) ++c.changed;
        ++c.categories[static_cast<std::size_t>(r.category)];
    }
    return report;
}

MetricsReport bucket_by_length(const std::vector<EvaluationRecord>& records, const std::vector<std::size_t>& edges,
                               const std::vector<TransformKind>& kinds) {
    GroupBy g;
    g.dims = {Dimension::Length};
    g.edges = edges;
    return compute_metrics(records, g, kinds);
}

MetricsReport split_by_correctness(const std::vector<EvaluationRecord>& records,
                                   const std::vector<TransformKind>& kinds) {
    GroupBy g;
    g.dims = {Dimension::Correctness};
    return compute_metrics(records, g, kinds);
}

MetricsReport merge(const MetricsReport& a, const MetricsReport& b) {
    MetricsReport out = a;
    out.merge(b);
    return out;
}

}  // namespace metamorph
