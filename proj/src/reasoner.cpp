#include "act/reasoner.hpp"

#include "act/error.hpp"
#include "act/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

namespace act::reason {

namespace {

constexpr const char* kDefaultRules = R"rules(// Shipped deductive rules. One rule per RULE keyword; the antecedent is a
// read-only pattern, the consequent a single edge between two of its node
// variables.

RULE R1_WORKS_IN: MATCH (p:Person)-[:ASSIGNED_TO]->(l:ProductionLine)-[:BELONGS_TO]->(pl:ProductionPlant)
  => (p)-[:WORKS_IN]->(pl)

RULE R3_RELATES_TO: MATCH (f:Forecast)-[:FORECASTED_FROM]->(m:Model)-[:CORRESPONDS_TO]->(uc:UseCase)
  => (f)-[:RELATES_TO]->(uc)
)rules";

std::string strip_comments(std::string_view text) {
    std::string out;
    char quote = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quote) {
            out += c;
            if (c == '\\' && i + 1 < text.size()) out += text[++i];
            else if (c == quote) quote = 0;
            continue;
        }
        if (c == '\'' || c == '"') quote = c;
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') ++i;
            out += '\n';
            continue;
        }
        out += c;
    }
    return out;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n;");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<Rule> parse_rules(std::string_view text) {
    const std::string src = strip_comments(text);
    static const std::regex head(R"(\bRULE\s+([A-Za-z_][A-Za-z0-9_\-]*)\s*:)");
    static const std::regex consequent(
        R"(^\(\s*([A-Za-z_]\w*)\s*\)\s*-\s*\[\s*:\s*([A-Za-z_]\w*)\s*\]\s*->\s*\(\s*([A-Za-z_]\w*)\s*\)$)");
    static const std::regex has_return(R"(\bRETURN\b)", std::regex::icase);

    std::vector<std::pair<std::smatch::difference_type, std::smatch>> heads;
    for (auto it = std::sregex_iterator(src.begin(), src.end(), head); it != std::sregex_iterator(); ++it)
        heads.emplace_back(it->position(0), *it);
    if (heads.empty() && !trim(src).empty()) throw RuleFormatError("expected 'RULE <name>:'");
    if (!heads.empty() && !trim(src.substr(0, heads.front().first)).empty())
        throw RuleFormatError("text before the first RULE");

    std::vector<Rule> rules;
    for (std::size_t i = 0; i < heads.size(); ++i) {
        const auto& m = heads[i].second;
        const std::size_t body_from = heads[i].first + m.length(0);
        const std::size_t body_to = i + 1 < heads.size() ? heads[i + 1].first : src.size();
        const std::string body = src.substr(body_from, body_to - body_from);
        Rule rule;
        rule.name = m[1].str();
        const auto arrow = body.rfind("=>");
        if (arrow == std::string::npos) throw RuleFormatError(rule.name + ": missing '=>'");
        const std::string lhs = trim(body.substr(0, arrow));
        const std::string rhs = trim(body.substr(arrow + 2));
        std::smatch cm;
        if (!std::regex_match(rhs, cm, consequent))
            throw RuleFormatError(rule.name + ": consequent must read (src)-[:REL]->(dst)");
        rule.src_var = cm[1].str();
        rule.relation = cm[2].str();
        rule.dst_var = cm[3].str();
        if (std::regex_search(lhs, has_return))
            throw RuleFormatError(rule.name + ": antecedent must not contain RETURN");
        try {
            rule.antecedent =
                pql::parse(lhs + " RETURN DISTINCT " + rule.src_var + ", " + rule.dst_var);
        } catch (const pql::UnboundVariable& e) {
            throw RuleSchemaError(rule.name + ": consequent variable '" + e.name() +
                                  "' is not bound by the antecedent");
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::vector<Rule> load_rules(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open rule file " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_rules(os.str());
}

const std::string& default_rules_text() {
    static const std::string text = kDefaultRules;
    return text;
}

std::vector<Rule> default_rules() { return parse_rules(default_rules_text()); }

void check_rule(const Rule& rule, const onto::OntologyRegistry& registry) {
    if (!registry.find_relation(rule.relation))
        throw RuleSchemaError(rule.name + ": relation '" + rule.relation + "' is not registered");
    const pql::VariableTable vars = pql::variables(rule.antecedent);
    for (const auto* v : {&rule.src_var, &rule.dst_var})
        if (std::find(vars.nodes.begin(), vars.nodes.end(), *v) == vars.nodes.end())
            throw RuleSchemaError(rule.name + ": '" + *v + "' is not a node variable");
}

std::size_t apply_rule(const Rule& rule, GraphStore& g, const onto::OntologyRegistry& registry,
                       Timestamp recorded_at) {
    check_rule(rule, registry);
    pql::EvalOptions opt;
    opt.registry = &registry;
    const pql::ResultSet rs = pql::evaluate(rule.antecedent, g, opt);
    const ProvenanceTag prov{KnowledgeKind::deductive, rule.name, recorded_at};
    std::size_t created = 0;
    for (const auto& row : rs.rows) {
        const NodeId src = row[0].node;
        const NodeId dst = row[1].node;
        if (g.find_edge(rule.relation, src, dst)) continue;
        Edge probe;
        probe.relation = rule.relation;
        const auto v = onto::validate_edge(probe, g.node(src), g.node(dst), registry);
        if (!v.empty())
            throw RuleSchemaError(rule.name + ": consequent " + rule.relation + " violates " +
                                  std::string(onto::to_string(v.front().kind)) + " (" +
                                  v.front().detail + ")");
        g.add_edge(rule.relation, src, dst, rule.properties, prov);
        ++created;
    }
    return created;
}

MaterializationResult materialize_all(const std::vector<Rule>& rules, GraphStore& g,
                                      const onto::OntologyRegistry& registry,
                                      Timestamp recorded_at, std::size_t max_rounds) {
    MaterializationResult result;
    for (const auto& r : rules) {
        check_rule(r, registry);
        result.created_per_rule[r.name] += 0;
    }
    while (true) {
        if (result.rounds == max_rounds)
            throw NonTermination("no fixpoint after " + std::to_string(max_rounds) + " rounds");
        ++result.rounds;
        std::size_t round_created = 0;
        for (const auto& r : rules) {
            const std::size_t n = apply_rule(r, g, registry, recorded_at);
            result.created_per_rule[r.name] += n;
            round_created += n;
        }
        result.total_created += round_created;
        if (round_created == 0) break;
    }
    result.fixpoint = true;
    return result;
}

StaleReport stale_models(const GraphStore& g, const onto::OntologyRegistry& registry, Timestamp now,
                         std::chrono::milliseconds max_age) {
    StaleReport report;
    for (const auto& label : registry.descendants("Model")) {
        for (NodeId id : g.nodes_with_label(label)) {
            const Node& n = g.node(id);
            const PropertyValue* t = n.property("trained_at");
            if (!t || t->kind() != ValueKind::timestamp) {
                report.warnings.emplace_back(id, "model has no trained_at timestamp");
                continue;
            }
            const std::int64_t age = now.millis - t->as_timestamp().millis;
            if (age <= max_age.count()) continue;
            const auto ucs = g.neighbors(id, Direction::out, "CORRESPONDS_TO");
            if (ucs.empty()) report.stale.push_back({id, std::nullopt, age});
            for (const auto& nb : ucs) report.stale.push_back({id, nb.node->id, age});
        }
    }
    std::sort(report.stale.begin(), report.stale.end(), [](const StaleModel& a, const StaleModel& b) {
        if (a.age_millis != b.age_millis) return a.age_millis > b.age_millis;
        if (a.model != b.model) return a.model < b.model;
        return a.use_case < b.use_case;
    });
    std::sort(report.warnings.begin(), report.warnings.end());
    return report;
}

std::size_t refresh_stale_flags(GraphStore& g, const onto::OntologyRegistry& registry,
                                Timestamp now, std::chrono::milliseconds max_age) {
    std::size_t changed = 0;
    for (const auto& label : registry.descendants("Model")) {
        for (NodeId id : g.nodes_with_label(label)) {
            const PropertyValue* t = g.node(id).property("trained_at");
            if (!t || t->kind() != ValueKind::timestamp) continue;
            const bool stale = now.millis - t->as_timestamp().millis > max_age.count();
            changed += g.update_node_properties(id, {{"stale", stale}});
        }
    }
    return changed;
}

}  // namespace act::reason
