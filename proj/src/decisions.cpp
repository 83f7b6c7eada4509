#include "act/decisions.hpp"

#include "act/detail/rng.hpp"
#include "act/error.hpp"
#include "act/ingest.hpp"
#include "act/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace act::decide {

namespace {

std::string text_of(const Node& n, std::string_view key) {
    const PropertyValue* v = n.property(key);
    return v && (v->kind() == ValueKind::text || v->kind() == ValueKind::identifier) ? v->as_text()
                                                                                    : std::string();
}

std::optional<Timestamp> ts_of(const Node& n, std::string_view key) {
    const PropertyValue* v = n.property(key);
    if (!v || v->kind() != ValueKind::timestamp) return std::nullopt;
    return v->as_timestamp();
}

std::optional<double> real_of(const Node& n, std::string_view key) {
    const PropertyValue* v = n.property(key);
    if (!v || (v->kind() != ValueKind::real && v->kind() != ValueKind::integer)) return std::nullopt;
    return v->as_real();
}

InsightRef ref_of(const Node& n) { return {n.id, n.label, text_of(n, "uuid")}; }

std::vector<std::string> split_kinds(const std::string& s) {
    std::vector<std::string> out;
    std::size_t from = 0;
    while (from <= s.size()) {
        const auto bar = s.find('|', from);
        const std::string part = s.substr(from, bar == std::string::npos ? std::string::npos : bar - from);
        if (!part.empty()) out.push_back(part);
        if (bar == std::string::npos) break;
        from = bar + 1;
    }
    return out;
}

std::string hex16(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hours(double h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", h);
    return buf;
}

bool insight_order(const Insight& a, const Insight& b) {
    if (a.severity != b.severity) return a.severity > b.severity;
    if (a.date != b.date) return a.date < b.date;
    return a.uuid < b.uuid;
}

/// Forecast nodes of `kind` issued at or before `now`.
std::vector<NodeId> forecasts_of_kind(const GraphStore& g, const onto::OntologyRegistry& reg,
                                      std::string_view kind, Timestamp now) {
    std::vector<NodeId> out;
    for (const auto& label : reg.descendants("Forecast"))
        for (NodeId f : g.nodes_with_label(label)) {
            const Node& n = g.node(f);
            const auto issued = ts_of(n, "issued_at");
            if (text_of(n, "kind") == kind && issued && *issued <= now) out.push_back(f);
        }
    return out;
}

std::optional<NodeId> target_of(const GraphStore& g, const onto::OntologyRegistry& reg, NodeId f,
                                std::string_view label) {
    for (const auto& nb : g.neighbors(f, Direction::out, "FORECAST_FOR"))
        if (reg.is_a(nb.node->label, label)) return nb.node->id;
    return std::nullopt;
}

/// Latest-issued forecast per key; ties keep the greatest uuid.
template <typename Key>
std::map<Key, std::vector<NodeId>> latest_runs(const GraphStore& g,
                                               const std::vector<std::pair<Key, NodeId>>& keyed) {
    std::map<Key, Timestamp> best;
    for (const auto& [k, f] : keyed) {
        const Timestamp t = *ts_of(g.node(f), "issued_at");
        auto it = best.find(k);
        if (it == best.end() || it->second < t) best[k] = t;
    }
    std::map<Key, std::vector<NodeId>> out;
    for (const auto& [k, f] : keyed)
        if (*ts_of(g.node(f), "issued_at") == best[k]) out[k].push_back(f);
    for (auto& [k, v] : out)
        std::sort(v.begin(), v.end(), [&](NodeId a, NodeId b) {
            return text_of(g.node(a), "uuid") < text_of(g.node(b), "uuid");
        });
    return out;
}

struct Writer {
    GraphStore& g;
    DetectReport& report;

    void emit(Insight ins, const char* heuristic) {
        std::sort(ins.refs.begin(), ins.refs.end(), [](const InsightRef& a, const InsightRef& b) {
            return std::tie(a.label, a.uuid) < std::tie(b.label, b.uuid);
        });
        std::string key(to_string(ins.kind));
        key += "|" + ins.forecast.uuid;
        for (const auto& r : ins.refs) key += "|" + r.label + ":" + r.uuid;
        key += "|" + std::to_string(ins.date.millis);
        ins.uuid = "ins-" + hex16(detail::fnv1a(key));
        ins.heuristic = heuristic;
        ins.severity = std::clamp(ins.severity, 0.0, 1.0);
        const ProvenanceTag prov{KnowledgeKind::deductive, std::string("heuristic:") + heuristic,
                                 ins.date};
        const auto r = ingest::upsert_node(g, "Insight", ins.uuid,
                                           {{"kind", std::string(to_string(ins.kind))},
                                            {"date", ins.date},
                                            {"severity", ins.severity},
                                            {"heuristic", ins.heuristic},
                                            {"narrative", ins.narrative}},
                                           prov);
        ins.id = r.id;
        report.created += r.created;
        report.edges_created += ingest::ensure_edge(g, "DESCRIBES_EVENT_IN", r.id, ins.forecast.node, prov);
        for (const auto& ref : ins.refs)
            report.edges_created += ingest::ensure_edge(g, "CONCERNS", r.id, ref.node, prov);
        report.insights.push_back(std::move(ins));
    }
};

// --- H1 ------------------------------------------------------------------

void detect_downtime(Writer& w, const GraphStore& g, const onto::OntologyRegistry& reg,
                     Timestamp now, const HeuristicConfig& cfg) {
    std::vector<std::pair<NodeId, NodeId>> keyed;
    for (NodeId f : forecasts_of_kind(g, reg, "work_order_completion", now))
        if (auto wo = target_of(g, reg, f, "WorkOrder")) keyed.emplace_back(*wo, f);
    for (const auto& [wo, fs] : latest_runs(g, keyed)) {
        const Node& order = g.node(wo);
        if (text_of(order, "status") == "completed") continue;
        const Node& fc = g.node(fs.back());
        const auto done = ts_of(fc, cfg.downtime_quantile);
        const auto release = ts_of(order, "release_ts");
        if (!done || !release) continue;
        for (const auto& line : g.neighbors(wo, Direction::out, "SCHEDULED_ON")) {
            // Shift the order is released into.
            const Node* shift = nullptr;
            for (const auto& s : g.neighbors(line.node->id, Direction::in, "EXECUTED_ON")) {
                const auto start = ts_of(*s.node, "start_ts");
                const auto end = ts_of(*s.node, "end_ts");
                if (!start || !end || !(*start <= *release && *release < *end)) continue;
                if (!shift || *start < *ts_of(*shift, "start_ts")) shift = s.node;
            }
            if (!shift) continue;
            const Timestamp end = *ts_of(*shift, "end_ts");
            if (!(*done > end)) continue;
            const PropertyValue* req = shift->property("required_headcount");
            if (!req || req->kind() != ValueKind::integer) continue;
            std::int64_t assigned = 0;
            for (const auto& p : g.neighbors(shift->id, Direction::in, "ASSIGNED_TO"))
                assigned += reg.is_a(p.node->label, "Person");
            if (assigned >= req->as_int()) continue;

            const double overrun = static_cast<double>(done->millis - end.millis) / kMillisPerHour;
            Insight ins;
            ins.kind = InsightKind::organizational_downtime;
            ins.date = *ts_of(fc, "issued_at");
            ins.severity = std::min(1.0, overrun / cfg.downtime_full_severity_hours);
            ins.forecast = ref_of(fc);
            ins.refs = {ref_of(*line.node), ref_of(*shift), ref_of(order)};
            ins.narrative = "Work order " + text_of(order, "uuid") + " is expected to complete at " +
                            format_timestamp(*done) + " (" + cfg.downtime_quantile + "), " +
                            hours(overrun) + " h after shift " + text_of(*shift, "uuid") +
                            " ends; " + std::to_string(assigned) + " of " +
                            std::to_string(req->as_int()) + " required persons are assigned.";
            w.emit(std::move(ins), "H1");
        }
    }
}

// --- H2 / H3 ---------------------------------------------------------------

struct DemandRunView {
    std::string material, client;
    NodeId material_node, client_node;
    std::vector<NodeId> forecasts;
};

std::vector<DemandRunView> latest_demand(const GraphStore& g, const onto::OntologyRegistry& reg,
                                         Timestamp now) {
    std::vector<std::pair<std::pair<NodeId, NodeId>, NodeId>> keyed;
    for (NodeId f : forecasts_of_kind(g, reg, "demand", now)) {
        auto m = target_of(g, reg, f, "Material");
        auto c = target_of(g, reg, f, "Client");
        if (m && c) keyed.push_back({{*m, *c}, f});
    }
    std::vector<DemandRunView> out;
    for (auto& [k, fs] : latest_runs(g, keyed))
        out.push_back({text_of(g.node(k.first), "uuid"), text_of(g.node(k.second), "uuid"), k.first,
                       k.second, fs});
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.material, a.client) < std::tie(b.material, b.client);
    });
    return out;
}

void detect_spikes(Writer& w, const GraphStore& g, const onto::OntologyRegistry& reg,
                   const std::vector<DemandRunView>& runs, const HeuristicConfig& cfg) {
    for (const auto& run : runs) {
        const Timestamp issued = *ts_of(g.node(run.forecasts.front()), "issued_at");
        const std::int64_t today = day_index(issued);
        const auto series = models::demand_series(g, reg, run.material, run.client, today);
        double sum = 0;
        for (std::int64_t d = today - cfg.trailing_days; d < today; ++d)
            if (d >= series.first_day) sum += series.at(d);
        const double mean = sum / cfg.trailing_days;
        if (!(mean > 0)) continue;
        // Strongest ratio across the run's horizons.
        const Node* best = nullptr;
        double best_ratio = 0;
        for (NodeId f : run.forecasts) {
            const double ratio = real_of(g.node(f), "value").value_or(0) / mean;
            if (ratio > best_ratio) {
                best_ratio = ratio;
                best = &g.node(f);
            }
        }
        if (!best || !(best_ratio > cfg.spike_ratio)) continue;
        Insight ins;
        ins.kind = InsightKind::demand_spike;
        ins.date = issued;
        ins.severity = std::min(1.0, (best_ratio - cfg.spike_ratio) / 2.0);
        ins.forecast = ref_of(*best);
        ins.refs = {ref_of(g.node(run.material_node)), ref_of(g.node(run.client_node))};
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f", best_ratio);
        ins.narrative = "Forecast demand for material " + run.material + " from client " + run.client +
                        " on " + format_date(*ts_of(*best, "target_date")) + " is " + buf +
                        " times the trailing " + std::to_string(cfg.trailing_days) + "-day mean.";
        w.emit(std::move(ins), "H3");
    }
}

void detect_stockouts(Writer& w, const GraphStore& g, const onto::OntologyRegistry& reg,
                      const std::vector<DemandRunView>& runs) {
    std::map<std::string, std::vector<const DemandRunView*>> by_material;
    for (const auto& r : runs) by_material[r.material].push_back(&r);
    for (const auto& [mat, rs] : by_material) {
        double demand = 0;
        const Node* largest = nullptr;
        Timestamp issued{0}, window_end{0};
        for (const auto* r : rs)
            for (NodeId f : r->forecasts) {
                const Node& n = g.node(f);
                const double v = real_of(n, "value").value_or(0);
                demand += v;
                if (!largest || v > *real_of(*largest, "value")) largest = &n;
                issued = std::max(issued, *ts_of(n, "issued_at"));
                if (auto t = ts_of(n, "target_date"))
                    window_end = std::max(window_end, day_start(day_index(*t) + 1));
            }
        if (!largest || !(demand > 0)) continue;
        const NodeId mnode = rs.front()->material_node;
        double supply = real_of(g.node(mnode), "stock_on_hand").value_or(0);
        for (const auto& in : g.neighbors(mnode, Direction::in, "OF_MATERIAL")) {
            const Node& o = *in.node;
            const auto due = ts_of(o, "due_ts");
            if (!due || !(*due < window_end)) continue;
            if (reg.is_a(o.label, "WorkOrder") && text_of(o, "status") != "completed")
                supply += real_of(o, "qty").value_or(0);
            else if (reg.is_a(o.label, "StockOrder") && *due >= issued)
                supply += real_of(o, "qty").value_or(0);
        }
        if (!(demand > supply)) continue;
        Insight ins;
        ins.kind = InsightKind::stockout_risk;
        ins.date = *ts_of(*largest, "issued_at");
        ins.severity = std::min(1.0, (demand - supply) / demand);
        ins.forecast = ref_of(*largest);
        ins.refs = {ref_of(g.node(mnode))};
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.1f against %.1f available", demand, supply);
        ins.narrative = "Forecast demand for material " + mat + " until " + format_date(window_end) +
                        " is " + buf + " (stock plus open work and stock orders).";
        w.emit(std::move(ins), "H2");
    }
}

// --- H4 ------------------------------------------------------------------

void detect_stale(Writer& w, const GraphStore& g, const onto::OntologyRegistry& reg, Timestamp now) {
    for (const auto& label : reg.descendants("Model"))
        for (NodeId m : g.nodes_with_label(label)) {
            const Node& model = g.node(m);
            const PropertyValue* stale = model.property("stale");
            if (!stale || stale->kind() != ValueKind::boolean || !stale->as_bool()) continue;
            const Node* latest = nullptr;
            for (const auto& f : g.neighbors(m, Direction::in, "FORECASTED_FROM")) {
                const auto t = ts_of(*f.node, "issued_at");
                if (!t || *t > now) continue;
                if (!latest || *ts_of(*latest, "issued_at") < *t ||
                    (*ts_of(*latest, "issued_at") == *t && text_of(*latest, "uuid") < text_of(*f.node, "uuid")))
                    latest = f.node;
            }
            if (!latest) continue;
            Insight ins;
            ins.kind = InsightKind::stale_model;
            ins.date = now;
            ins.severity = 0.5;
            ins.forecast = ref_of(*latest);
            ins.refs = {ref_of(model)};
            const auto trained = ts_of(model, "trained_at");
            ins.narrative = "Model " + text_of(model, "uuid") + " was trained " +
                            (trained ? format_date(*trained) : std::string("at an unknown date")) +
                            " and is flagged stale.";
            w.emit(std::move(ins), "H4");
        }
}

std::string placeholder_for(const std::string& label) {
    if (label == "ProductionLine") return "line";
    if (label == "Shift") return "shift";
    if (label == "WorkOrder") return "work_order";
    if (label == "Material") return "material";
    if (label == "Client") return "client";
    if (label == "Model" || label == "SimulationModel" || label == "RegressionModel") return "model";
    return {};
}

}  // namespace

std::string_view to_string(InsightKind k) {
    switch (k) {
        case InsightKind::organizational_downtime: return "organizational_downtime";
        case InsightKind::stockout_risk: return "stockout_risk";
        case InsightKind::demand_spike: return "demand_spike";
        case InsightKind::stale_model: return "stale_model";
    }
    return "?";
}

std::optional<InsightKind> insight_kind_from_string(std::string_view s) {
    for (auto k : {InsightKind::organizational_downtime, InsightKind::stockout_risk,
                   InsightKind::demand_spike, InsightKind::stale_model})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::accepted: return "accepted";
        case Verdict::rejected: return "rejected";
        case Verdict::alternative: return "alternative";
    }
    return "?";
}

std::optional<Verdict> verdict_from_string(std::string_view s) {
    for (auto v : {Verdict::accepted, Verdict::rejected, Verdict::alternative})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

DetectReport detect_insights(GraphStore& g, const onto::OntologyRegistry& reg, Timestamp now,
                             const HeuristicConfig& config) {
    DetectReport report;
    Writer w{g, report};
    detect_downtime(w, g, reg, now, config);
    const auto runs = latest_demand(g, reg, now);
    detect_stockouts(w, g, reg, runs);
    detect_spikes(w, g, reg, runs, config);
    detect_stale(w, g, reg, now);
    std::sort(report.insights.begin(), report.insights.end(), insight_order);
    return report;
}

Insight load_insight(const GraphStore& g, const onto::OntologyRegistry& reg, NodeId id) {
    const Node& n = g.node(id);
    if (!reg.is_a(n.label, "Insight")) throw NotFound("node is not an Insight");
    Insight ins;
    ins.id = id;
    ins.uuid = text_of(n, "uuid");
    ins.kind = insight_kind_from_string(text_of(n, "kind")).value_or(InsightKind::stale_model);
    ins.date = ts_of(n, "date").value_or(Timestamp{0});
    ins.severity = real_of(n, "severity").value_or(0);
    ins.heuristic = text_of(n, "heuristic");
    ins.narrative = text_of(n, "narrative");
    for (const auto& f : g.neighbors(id, Direction::out, "DESCRIBES_EVENT_IN")) ins.forecast = ref_of(*f.node);
    for (const auto& r : g.neighbors(id, Direction::out, "CONCERNS")) ins.refs.push_back(ref_of(*r.node));
    std::sort(ins.refs.begin(), ins.refs.end(), [](const InsightRef& a, const InsightRef& b) {
        return std::tie(a.label, a.uuid) < std::tie(b.label, b.uuid);
    });
    return ins;
}

Insight find_insight(const GraphStore& g, const onto::OntologyRegistry& reg, const std::string& uuid) {
    auto id = ingest::find_entity(g, reg, "Insight", uuid);
    if (!id) throw NotFound("no insight '" + uuid + "'");
    return load_insight(g, reg, *id);
}

std::vector<Insight> list_insights(const GraphStore& g, const onto::OntologyRegistry& reg,
                                   std::optional<Timestamp> since) {
    std::vector<Insight> out;
    for (const auto& label : reg.descendants("Insight"))
        for (NodeId id : g.nodes_with_label(label)) {
            Insight ins = load_insight(g, reg, id);
            if (!since || ins.date >= *since) out.push_back(std::move(ins));
        }
    std::sort(out.begin(), out.end(), insight_order);
    return out;
}

std::optional<NodeId> insight_use_case(const GraphStore& g, const Insight& insight) {
    if (!g.contains(insight.forecast.node)) return std::nullopt;
    for (const auto& uc : g.neighbors(insight.forecast.node, Direction::out, "RELATES_TO"))
        return uc.node->id;
    for (const auto& m : g.neighbors(insight.forecast.node, Direction::out, "FORECASTED_FROM"))
        for (const auto& uc : g.neighbors(m.node->id, Direction::out, "CORRESPONDS_TO"))
            return uc.node->id;
    return std::nullopt;
}

Option load_option(const GraphStore& g, NodeId id) {
    const Node& n = g.node(id);
    Option o;
    o.id = id;
    o.uuid = text_of(n, "uuid");
    o.description = text_of(n, "description");
    o.applicable_kinds = split_kinds(text_of(n, "applicable_kinds"));
    if (const std::string uc = text_of(n, "use_case"); !uc.empty()) o.use_case = uc;
    o.knowledge_kind = n.provenance.kind;
    return o;
}

std::vector<Option> candidate_options(const GraphStore& g, const onto::OntologyRegistry& reg,
                                      const Insight& insight) {
    const std::string kind(to_string(insight.kind));
    const auto uc_node = insight_use_case(g, insight);
    const std::string uc = uc_node ? text_of(g.node(*uc_node), "uuid") : std::string();
    std::vector<Option> out;
    std::set<NodeId> seen;
    for (const auto& label : reg.descendants("DecisionMakingOption"))
        for (NodeId id : g.nodes_with_label(label)) {
            Option o = load_option(g, id);
            if (o.knowledge_kind == KnowledgeKind::creative) continue;
            if (std::find(o.applicable_kinds.begin(), o.applicable_kinds.end(), kind) ==
                o.applicable_kinds.end())
                continue;
            if (o.use_case && *o.use_case != uc) continue;
            seen.insert(id);
            out.push_back(std::move(o));
        }
    if (g.contains(insight.id))
        for (const auto& nb : g.neighbors(insight.id, Direction::in, "SUGGESTS_ACTION_FOR"))
            if (seen.insert(nb.node->id).second) out.push_back(load_option(g, nb.node->id));
    std::sort(out.begin(), out.end(), [](const Option& a, const Option& b) { return a.uuid < b.uuid; });
    return out;
}

std::vector<Option> match_options(GraphStore& g, const onto::OntologyRegistry& reg,
                                  const Insight& insight) {
    auto out = candidate_options(g, reg, insight);
    const ProvenanceTag prov{KnowledgeKind::deductive, "decisions:match", insight.date};
    for (const auto& o : out)
        if (o.knowledge_kind != KnowledgeKind::creative)
            ingest::ensure_edge(g, "SUGGESTS_ACTION_FOR", o.id, insight.id, prov);
    return out;
}

FeedbackCounts feedback_counts(const GraphStore& g, NodeId option) {
    FeedbackCounts c;
    for (EdgeId e : g.out_edges(option)) {
        const Edge& edge = g.edge(e);
        if (edge.relation != "FEEDBACK_ON") continue;
        auto it = edge.properties.find("verdict");
        if (it == edge.properties.end()) continue;
        const auto v = verdict_from_string(it->second.as_text());
        if (v == Verdict::accepted) ++c.accepted;
        else if (v == Verdict::rejected) ++c.rejected;
        else if (v == Verdict::alternative) ++c.alternative;
    }
    return c;
}

double laplace_score(const FeedbackCounts& c) {
    return (static_cast<double>(c.accepted) + 1.0) / (static_cast<double>(c.accepted + c.rejected) + 2.0);
}

std::string fill_template(const std::string& text, const Insight& insight) {
    std::map<std::string, std::string> values;
    for (const auto& r : insight.refs)
        if (auto key = placeholder_for(r.label); !key.empty()) values.emplace(key, r.uuid);
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '{') {
            const auto close = text.find('}', i);
            if (close != std::string::npos) {
                auto it = values.find(text.substr(i + 1, close - i - 1));
                if (it != values.end()) {
                    out += it->second;
                    i = close;
                    continue;
                }
            }
        }
        out += text[i];
    }
    return out;
}

std::vector<RankedOption> rank_options(const GraphStore& g, const std::vector<Option>& options,
                                       const Insight& insight) {
    std::vector<RankedOption> out;
    for (const auto& o : options) {
        RankedOption r;
        r.option = o;
        r.counts = feedback_counts(g, o.id);
        r.score = laplace_score(r.counts);
        r.filled_description = fill_template(o.description, insight);
        out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(), [](const RankedOption& a, const RankedOption& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.option.uuid < b.option.uuid;
    });
    return out;
}

FeedbackResult record_feedback(GraphStore& g, const onto::OntologyRegistry& reg,
                               const FeedbackRecord& record) {
    if (record.user.empty()) throw InvalidArgument("feedback needs a user");
    const Insight insight = find_insight(g, reg, record.insight_uuid);
    std::optional<NodeId> option;
    if (!record.option_uuid.empty())
        option = ingest::find_entity(g, reg, "DecisionMakingOption", record.option_uuid);
    if (record.verdict != Verdict::alternative && !option)
        throw NotFound("no decision-making option '" + record.option_uuid + "'");

    FeedbackResult result;
    const std::string source = "user:" + record.user;
    if (record.verdict == Verdict::alternative) {
        const auto b = record.text.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) throw InvalidArgument("an alternative needs a description");
        const std::string text = record.text.substr(b, record.text.find_last_not_of(" \t\r\n") - b + 1);
        const ProvenanceTag creative{KnowledgeKind::creative, source, record.recorded_at};
        PropertyMap props{{"description", text},
                          {"applicable_kinds", std::string(to_string(insight.kind))},
                          {"proposed_by", record.user}};
        if (auto uc = insight_use_case(g, insight)) props.emplace("use_case", Identifier{text_of(g.node(*uc), "uuid")});
        const std::string uuid = "opt-alt-" + hex16(detail::fnv1a(insight.uuid + "\n" + text));
        const auto r = ingest::upsert_node(g, "DecisionMakingOption", uuid, props, creative);
        if (r.created) result.created_option = r.id;
        ingest::ensure_edge(g, "SUGGESTS_ACTION_FOR", r.id, insight.id, creative);
        if (!option) option = r.id;
    }
    PropertyMap fb{{"verdict", std::string(to_string(record.verdict))},
                   {"user", record.user},
                   {"recorded_at", record.recorded_at}};
    if (!record.text.empty()) fb.emplace("text", record.text);
    result.feedback_edge = g.add_edge("FEEDBACK_ON", *option, insight.id, std::move(fb),
                                      {KnowledgeKind::definitional, source, record.recorded_at});
    result.option_uuid = text_of(g.node(*option), "uuid");
    return result;
}

bool was_accepted(const GraphStore& g, NodeId option, NodeId insight) {
    for (EdgeId e : g.out_edges(option)) {
        const Edge& edge = g.edge(e);
        if (edge.relation != "FEEDBACK_ON" || edge.dst != insight) continue;
        auto it = edge.properties.find("verdict");
        if (it != edge.properties.end() && it->second.as_text() == "accepted") return true;
    }
    return false;
}

}  // namespace act::decide
