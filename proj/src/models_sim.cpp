#include "act/models.hpp"

#include "act/detail/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace act::models {

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

std::int64_t index_of(const Node& n) {
    const PropertyValue* v = n.property("step_index");
    return v && v->kind() == ValueKind::integer ? v->as_int() : 0;
}

std::optional<NodeId> line_of(const GraphStore& g, NodeId wo) {
    for (const auto& nb : g.neighbors(wo, Direction::out, "SCHEDULED_ON")) return nb.node->id;
    return std::nullopt;
}

struct Step {
    const std::vector<std::int64_t>* pool;  // durations in ms
};

struct Order {
    NodeId id;
    std::string uuid;
    NodeId line;
    Timestamp release;
    Timestamp due;
    std::vector<Step> steps;
    bool low_confidence = false;
};

std::int64_t hours_to_ms(double h) { return std::llround(h * 3'600'000.0); }

}  // namespace

void SimulationConfig::validate() const {
    if (n_trials < 1) throw InvalidArgument("n_trials must be at least 1");
    if (quantiles.empty()) throw InvalidArgument("at least one quantile is required");
    for (std::size_t i = 0; i < quantiles.size(); ++i) {
        if (!(quantiles[i] > 0 && quantiles[i] < 1))
            throw InvalidArgument("quantiles must lie in (0,1)");
        if (i && !(quantiles[i] > quantiles[i - 1]))
            throw InvalidArgument("quantiles must be strictly increasing");
    }
}

Timestamp SimulationForecast::at(double p) const {
    for (const auto& [q, t] : quantiles)
        if (std::abs(q - p) < 1e-12) return t;
    throw NotFound("quantile " + std::to_string(p) + " was not simulated");
}

std::string quantile_property(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "p%g", std::round(p * 1e6) / 1e4);
    return buf;
}

std::string simulation_model_uuid(Timestamp issued_at) {
    std::string s = format_timestamp(issued_at);  // YYYY-MM-DDTHH:MM:SS.mmmZ
    return "model-sim-" + s.substr(0, 4) + s.substr(5, 2) + s.substr(8, 2) + "T" + s.substr(11, 2) +
           s.substr(14, 2);
}

std::vector<SimulationForecast> simulate_work_orders(const GraphStore& g,
                                                     const onto::OntologyRegistry& reg,
                                                     const SimulationConfig& config) {
    config.validate();

    // Historical pools, filled in (order uuid, step) order so resampling is
    // independent of node ids.
    struct Hist {
        std::string wo;
        std::int64_t step;
        NodeId line;
        std::string process;
        std::int64_t ms;
    };
    std::vector<Hist> hist;
    for (const auto& label : reg.descendants("WorkOrder"))
        for (NodeId wo : g.nodes_with_label(label)) {
            const auto line = line_of(g, wo);
            const std::string uuid = text_of(g.node(wo), "uuid");
            for (const auto& nb : g.neighbors(wo, Direction::out, "PRODUCES")) {
                const PropertyValue* d = nb.node->property("duration_h");
                if (!d || (d->kind() != ValueKind::real && d->kind() != ValueKind::integer)) continue;
                hist.push_back({uuid, index_of(*nb.node), line.value_or(NodeId{}),
                                text_of(*nb.node, "process_type"), hours_to_ms(d->as_real())});
            }
        }
    if (hist.empty()) throw SimulationDataError("no historical batch durations in the graph");
    std::sort(hist.begin(), hist.end(), [](const Hist& a, const Hist& b) {
        return std::tie(a.wo, a.step) < std::tie(b.wo, b.step);
    });
    std::map<std::pair<NodeId, std::string>, std::vector<std::int64_t>> by_line;
    std::map<std::string, std::vector<std::int64_t>> plant;
    for (const auto& h : hist) {
        if (h.line != NodeId{}) by_line[{h.line, h.process}].push_back(h.ms);
        plant[h.process].push_back(h.ms);
    }

    std::vector<Order> orders;
    for (const auto& label : reg.descendants("WorkOrder"))
        for (NodeId wo : g.nodes_with_label(label)) {
            const Node& n = g.node(wo);
            if (text_of(n, "status") == "completed") continue;
            const auto line = line_of(g, wo);
            if (!line) continue;
            Order o{wo, text_of(n, "uuid"), *line, ts_of(n, "release_ts").value_or(Timestamp{0}),
                    ts_of(n, "due_ts").value_or(Timestamp{0}), {}, false};
            std::vector<std::pair<std::int64_t, const Node*>> procs;
            for (const auto& nb : g.neighbors(wo, Direction::out, "EXECUTES"))
                procs.emplace_back(index_of(*nb.node), nb.node);
            std::sort(procs.begin(), procs.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first < b.first;
                return text_of(*a.second, "uuid") < text_of(*b.second, "uuid");
            });
            for (const auto& [idx, p] : procs) {
                const std::string type = text_of(*p, "process_type");
                auto it = by_line.find({*line, type});
                if (it != by_line.end()) {
                    o.steps.push_back({&it->second});
                    continue;
                }
                auto pw = plant.find(type);
                if (pw == plant.end())
                    throw SimulationDataError("no historical durations for process '" + type +
                                              "' (work order " + o.uuid + ")");
                o.steps.push_back({&pw->second});
                o.low_confidence = true;
            }
            if (!o.steps.empty()) orders.push_back(std::move(o));
        }
    std::sort(orders.begin(), orders.end(),
              [](const Order& a, const Order& b) { return a.uuid < b.uuid; });

    // Orders grouped per line, in dispatch-priority order.
    std::map<NodeId, std::vector<std::size_t>> lines;
    for (std::size_t i = 0; i < orders.size(); ++i) lines[orders[i].line].push_back(i);
    for (auto& [line, idx] : lines)
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return std::tie(orders[a].due, orders[a].release, orders[a].uuid) <
                   std::tie(orders[b].due, orders[b].release, orders[b].uuid);
        });

    const std::int64_t start = config.start ? config.start->millis
                                            : std::numeric_limits<std::int64_t>::min();
    const std::size_t n = config.n_trials;
    std::vector<std::vector<std::int64_t>> completion(orders.size(), std::vector<std::int64_t>(n));
    std::vector<std::vector<std::int64_t>> durations(orders.size());
    std::vector<std::size_t> next_step(orders.size());
    std::vector<std::int64_t> ready(orders.size());

    for (std::size_t t = 0; t < n; ++t) {
        detail::Rng rng(config.rng_seed, static_cast<std::uint64_t>(t));
        for (std::size_t i = 0; i < orders.size(); ++i) {
            durations[i].resize(orders[i].steps.size());
            for (std::size_t s = 0; s < orders[i].steps.size(); ++s) {
                const auto& pool = *orders[i].steps[s].pool;
                durations[i][s] = pool[rng.below(pool.size())];
            }
        }
        for (const auto& [line, idx] : lines) {
            std::int64_t free_at = start;
            for (std::size_t i : idx) {
                next_step[i] = 0;
                ready[i] = std::max(orders[i].release.millis, start);
            }
            std::size_t remaining = 0;
            for (std::size_t i : idx) remaining += orders[i].steps.size();
            while (remaining--) {
                // Highest-priority order ready when the line frees up; if none,
                // the earliest to become ready.
                std::size_t pick = orders.size();
                std::int64_t earliest = std::numeric_limits<std::int64_t>::max();
                for (std::size_t i : idx) {
                    if (next_step[i] == orders[i].steps.size()) continue;
                    if (ready[i] <= free_at) {
                        pick = i;
                        break;
                    }
                    if (ready[i] < earliest) {
                        earliest = ready[i];
                        pick = i;
                    }
                }
                const std::int64_t begin = std::max(free_at, ready[pick]);
                const std::int64_t end = begin + durations[pick][next_step[pick]++];
                free_at = end;
                ready[pick] = end;
                if (next_step[pick] == orders[pick].steps.size()) completion[pick][t] = end;
            }
        }
    }

    std::vector<SimulationForecast> out;
    out.reserve(orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) {
        auto& c = completion[i];
        std::sort(c.begin(), c.end());
        SimulationForecast f;
        f.work_order = orders[i].id;
        f.work_order_uuid = orders[i].uuid;
        f.line = orders[i].line;
        f.trials = n;
        f.low_confidence = orders[i].low_confidence;
        for (double p : config.quantiles) {
            // Nearest rank: smallest value with at least p*n observations <= it.
            auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-9));
            rank = std::clamp<std::size_t>(rank, 1, n);
            f.quantiles.emplace_back(p, Timestamp{c[rank - 1]});
        }
        out.push_back(std::move(f));
    }
    return out;
}

ingest::IngestReport persist_simulation(GraphStore& g, const onto::OntologyRegistry& reg,
                                        std::vector<SimulationForecast>& forecasts,
                                        const SimulationConfig& config) {
    const std::string model = simulation_model_uuid(config.issued_at);
    ingest::IngestReport report = ingest::load_inductive(
        g, reg, "models:simulation",
        {{"SimulationModel",
          model,
          {{"trained_at", config.issued_at},
           {"n_trials", static_cast<std::int64_t>(config.n_trials)},
           {"rng_seed", static_cast<std::int64_t>(config.rng_seed)}}}},
        {{"CORRESPONDS_TO", model, "SimulationModel", "uc-pp", "UseCase"}}, config.issued_at);

    std::vector<ingest::ForecastRecord> records;
    const std::string stamp = model.substr(std::string("model-sim-").size());
    for (auto& f : forecasts) {
        f.model_uuid = model;
        const Node& wo = g.node(f.work_order);
        ingest::ForecastRecord r;
        r.uuid = "fc-sim-" + f.work_order_uuid + "-" + stamp;
        r.model_uuid = model;
        r.properties = {{"kind", "work_order_completion"},
                        {"issued_at", config.issued_at},
                        {"trials", static_cast<std::int64_t>(f.trials)},
                        {"low_confidence", f.low_confidence}};
        if (auto due = ts_of(wo, "due_ts")) r.properties.emplace("target_date", *due);
        for (const auto& [p, t] : f.quantiles) r.properties.emplace(quantile_property(p), t);
        r.target_uuids = {f.work_order_uuid};
        records.push_back(std::move(r));
    }
    report += ingest::load_forecasts(records, g, reg, config.issued_at);
    return report;
}

}  // namespace act::models
