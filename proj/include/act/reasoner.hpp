#pragma once

// Deductive rules evaluated with the pattern-query engine. Rules are
// negation-free and only add edges, so repeated application reaches a
// fixpoint.

#include "act/error.hpp"
#include "act/graph.hpp"
#include "act/ontology.hpp"
#include "act/pql.hpp"

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace act::reason {

ACT_DEFINE_ERROR(RuleSchemaError, "reason.rule_schema");
ACT_DEFINE_ERROR(RuleFormatError, "reason.rule_format");
ACT_DEFINE_ERROR(NonTermination, "reason.non_termination");

struct Rule {
    std::string name;
    pql::Query antecedent;
    std::string relation;
    std::string src_var;
    std::string dst_var;
    PropertyMap properties;
};

/// `RULE <name>: <pattern query> => (<src>)-[:REL]->(<dst>)`, one per RULE
/// keyword; a rule may span lines and `//` starts a comment. The antecedent
/// needs no RETURN clause.
std::vector<Rule> parse_rules(std::string_view text);
std::vector<Rule> load_rules(const std::string& path);

/// The shipped set (R1 WORKS_IN, R3 RELATES_TO), identical to
/// fixtures/rules/default.pqlr.
const std::string& default_rules_text();
std::vector<Rule> default_rules();

/// Throws RuleSchemaError if the consequent relation is unregistered or its
/// variables are not node variables of the antecedent.
void check_rule(const Rule& rule, const onto::OntologyRegistry& registry);

/// Adds the consequent edge for every antecedent match lacking it, with
/// provenance {deductive, rule name}. Returns the number created.
std::size_t apply_rule(const Rule& rule, GraphStore& g, const onto::OntologyRegistry& registry,
                       Timestamp recorded_at = Timestamp{0});

struct MaterializationResult {
    std::map<std::string, std::size_t> created_per_rule;
    std::size_t rounds = 0;
    std::size_t total_created = 0;
    bool fixpoint = false;
};

MaterializationResult materialize_all(const std::vector<Rule>& rules, GraphStore& g,
                                      const onto::OntologyRegistry& registry,
                                      Timestamp recorded_at = Timestamp{0},
                                      std::size_t max_rounds = 32);

struct StaleModel {
    NodeId model{};
    std::optional<NodeId> use_case;
    std::int64_t age_millis = 0;
};

struct StaleReport {
    std::vector<StaleModel> stale;  // oldest first
    std::vector<std::pair<NodeId, std::string>> warnings;
};

/// Models with now - trained_at > max_age, one entry per CORRESPONDS_TO use
/// case. Models lacking trained_at are reported as warnings.
StaleReport stale_models(const GraphStore& g, const onto::OntologyRegistry& registry, Timestamp now,
                         std::chrono::milliseconds max_age);

/// Rule R2: sets `stale` on every model from the current clock. Returns the
/// number of model nodes whose flag changed.
std::size_t refresh_stale_flags(GraphStore& g, const onto::OntologyRegistry& registry,
                                Timestamp now, std::chrono::milliseconds max_age);

inline constexpr std::chrono::milliseconds kDefaultMaxModelAge{30LL * 24 * 3600 * 1000};

}  // namespace act::reason
