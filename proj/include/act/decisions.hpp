#pragma once

// The actionable loop: heuristics turn forecasts into Insights, the option
// catalog is matched against them, options are ranked from past feedback and
// new feedback is written back into the graph.

#include "act/graph.hpp"
#include "act/ontology.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace act::decide {

enum class InsightKind { organizational_downtime, stockout_risk, demand_spike, stale_model };

std::string_view to_string(InsightKind k);
std::optional<InsightKind> insight_kind_from_string(std::string_view s);

struct HeuristicConfig {
    /// H1: this completion quantile is compared with the shift end.
    std::string downtime_quantile = "p90";
    double downtime_full_severity_hours = 8;
    /// H3: forecast / trailing mean above this ratio is a spike.
    double spike_ratio = 2.0;
    int trailing_days = 28;
};

struct InsightRef {
    NodeId node{};
    std::string label;
    std::string uuid;
};

struct Insight {
    NodeId id{};
    std::string uuid;
    InsightKind kind{};
    Timestamp date{0};
    double severity = 0;
    std::string heuristic;  // "H1".."H4"
    std::string narrative;
    InsightRef forecast;
    std::vector<InsightRef> refs;  // CONCERNS targets
};

struct DetectReport {
    std::vector<Insight> insights;  // ordered by severity desc, date, uuid
    std::size_t created = 0;
    std::size_t edges_created = 0;
};

/// H1 downtime: the order's completion quantile passes the end of the shift
/// it is released into and that shift has fewer assigned persons than
/// required. H2 stockout: summed demand forecasts of the latest run exceed
/// stock on hand plus open work and stock orders due inside the forecast
/// window. H3 spike: a demand forecast exceeds `spike_ratio` times the
/// trailing mean. H4: models flagged stale by the reasoner.
/// Only forecasts issued at or before `now` are used, and per target only the
/// latest run. Insights are keyed by kind, refs and date, so detection is
/// idempotent.
DetectReport detect_insights(GraphStore& g, const onto::OntologyRegistry& reg, Timestamp now,
                             const HeuristicConfig& config = {});

/// Insight nodes currently in the graph with date >= since, same order as
/// detect_insights.
std::vector<Insight> list_insights(const GraphStore& g, const onto::OntologyRegistry& reg,
                                   std::optional<Timestamp> since = std::nullopt);

Insight load_insight(const GraphStore& g, const onto::OntologyRegistry& reg, NodeId id);
/// Throws NotFound.
Insight find_insight(const GraphStore& g, const onto::OntologyRegistry& reg, const std::string& uuid);

/// Use case of the insight's forecast: RELATES_TO, else FORECASTED_FROM ->
/// CORRESPONDS_TO.
std::optional<NodeId> insight_use_case(const GraphStore& g, const Insight& insight);

struct Option {
    NodeId id{};
    std::string uuid;
    std::string description;  // template text
    std::vector<std::string> applicable_kinds;
    std::optional<std::string> use_case;
    KnowledgeKind knowledge_kind = KnowledgeKind::definitional;
};

Option load_option(const GraphStore& g, NodeId id);

/// Catalog options applicable to the insight's kind and use case, plus
/// options already linked to it by SUGGESTS_ACTION_FOR (e.g. user
/// alternatives). Persists SUGGESTS_ACTION_FOR edges. Sorted by uuid.
std::vector<Option> match_options(GraphStore& g, const onto::OntologyRegistry& reg,
                                  const Insight& insight);

struct FeedbackCounts {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t alternative = 0;
};

/// Same selection as match_options without writing anything.
std::vector<Option> candidate_options(const GraphStore& g, const onto::OntologyRegistry& reg,
                                      const Insight& insight);

FeedbackCounts feedback_counts(const GraphStore& g, NodeId option);

/// (accepted + 1) / (accepted + rejected + 2).
double laplace_score(const FeedbackCounts& c);

struct RankedOption {
    Option option;
    double score = 0.5;
    FeedbackCounts counts;
    std::string filled_description;
};

/// Descending score, ties by uuid. Placeholders {line}, {shift},
/// {work_order}, {material}, {client}, {model} are filled from the
/// insight's refs.
std::vector<RankedOption> rank_options(const GraphStore& g, const std::vector<Option>& options,
                                       const Insight& insight);

std::string fill_template(const std::string& text, const Insight& insight);

enum class Verdict { accepted, rejected, alternative };
std::string_view to_string(Verdict v);
std::optional<Verdict> verdict_from_string(std::string_view s);

struct FeedbackRecord {
    std::string option_uuid;  // may be empty for an alternative
    std::string insight_uuid;
    std::string user;
    Verdict verdict = Verdict::accepted;
    std::string text;  // alternative description
    Timestamp recorded_at{0};
};

struct FeedbackResult {
    EdgeId feedback_edge{};
    std::optional<NodeId> created_option;
    std::string option_uuid;  // option the feedback edge starts from
};

/// Appends a FEEDBACK_ON edge (option -> insight) carrying verdict, user,
/// text and recorded_at. An alternative creates (or reuses) the option
/// "opt-alt-<hash>" with creative provenance and links it to the insight.
/// NotFound for an unknown insight, or an unknown option on accept/reject.
FeedbackResult record_feedback(GraphStore& g, const onto::OntologyRegistry& reg,
                               const FeedbackRecord& record);

/// Whether some feedback on (option, insight) accepted the option.
bool was_accepted(const GraphStore& g, NodeId option, NodeId insight);

}  // namespace act::decide
