#include "act/service.hpp"

#include "act/detail/json_codec.hpp"
#include "act/ingest.hpp"
#include "act/metrics.hpp"
#include "act/models.hpp"
#include "act/pql.hpp"
#include "act/reasoner.hpp"

#include <httplib.h>

#include <algorithm>
#include <condition_variable>
#include <mutex>
#include <regex>
#include <set>
#include <thread>

namespace act::service {

namespace {

using detail::plain_properties;

std::string uuid_of(const Node& n) {
    const PropertyValue* v = n.property("uuid");
    return v ? v->as_text() : std::string();
}

Json node_json(const Node& n) {
    return {{"id", raw(n.id)},
            {"uuid", uuid_of(n)},
            {"label", n.label},
            {"properties", plain_properties(n.properties)},
            {"knowledge_kind", std::string(to_string(n.provenance.kind))},
            {"source", n.provenance.source}};
}

Json edge_json(const Edge& e) {
    return {{"id", raw(e.id)},
            {"relation", e.relation},
            {"src", raw(e.src)},
            {"dst", raw(e.dst)},
            {"properties", plain_properties(e.properties)},
            {"knowledge_kind", std::string(to_string(e.provenance.kind))},
            {"source", e.provenance.source}};
}

Json value_json(const GraphStore& g, const pql::Value& v) {
    using K = pql::Value::Kind;
    switch (v.kind) {
        case K::node: return {{"node", node_json(g.node(v.node))}};
        case K::edge: return {{"edge", edge_json(g.edge(v.edge))}};
        case K::path:
        case K::edge_list: {
            Json nodes = Json::array(), edges = Json::array();
            for (NodeId n : v.path.nodes) nodes.push_back(raw(n));
            for (EdgeId e : v.path.edges) edges.push_back(raw(e));
            if (v.kind == K::edge_list) return {{"edges", edges}};
            return {{"path", {{"nodes", nodes}, {"edges", edges}}}};
        }
    }
    return nullptr;
}

Json ref_json(const decide::InsightRef& r) { return {{"label", r.label}, {"uuid", r.uuid}}; }

Json insight_json(const GraphStore& g, const decide::Insight& i) {
    Json refs = Json::array();
    for (const auto& r : i.refs) refs.push_back(ref_json(r));
    const auto uc = decide::insight_use_case(g, i);
    return {{"id", i.uuid},
            {"kind", std::string(decide::to_string(i.kind))},
            {"date", format_timestamp(i.date)},
            {"severity", i.severity},
            {"heuristic", i.heuristic},
            {"narrative", i.narrative},
            {"forecast", i.forecast.uuid},
            {"use_case", uc ? Json(uuid_of(g.node(*uc))) : Json(nullptr)},
            {"refs", refs}};
}

Json ranked_json(const std::vector<decide::RankedOption>& ranked) {
    Json out = Json::array();
    for (const auto& r : ranked)
        out.push_back({{"id", r.option.uuid},
                       {"description", r.filled_description},
                       {"template", r.option.description},
                       {"score", r.score},
                       {"accepted", r.counts.accepted},
                       {"rejected", r.counts.rejected},
                       {"alternatives", r.counts.alternative},
                       {"knowledge_kind", std::string(to_string(r.option.knowledge_kind))},
                       {"creative", r.option.knowledge_kind == KnowledgeKind::creative}});
    return out;
}

Json report_json(const ingest::IngestReport& r) {
    Json rejects = Json::array();
    for (const auto& x : r.rejects) rejects.push_back({{"line", x.line}, {"reason", x.reason}});
    return {{"source", r.source},           {"rows", r.rows},
            {"nodes_created", r.nodes_created}, {"nodes_updated", r.nodes_updated},
            {"edges_created", r.edges_created}, {"rejects", rejects}};
}

Json forecast_json(const GraphStore& g, const Node& f) {
    Json j = node_json(f);
    Json subjects = Json::array();
    for (const auto& nb : g.neighbors(f.id, Direction::out, "FORECAST_FOR"))
        subjects.push_back({{"label", nb.node->label}, {"uuid", uuid_of(*nb.node)}});
    j["subjects"] = subjects;
    const auto model = g.neighbors(f.id, Direction::out, "FORECASTED_FROM");
    j["model"] = model.empty() ? Json(nullptr) : Json(uuid_of(*model.front().node));
    Json ucs = Json::array();
    for (const auto& nb : g.neighbors(f.id, Direction::out, "RELATES_TO")) ucs.push_back(uuid_of(*nb.node));
    j["use_cases"] = ucs;
    return j;
}

Json metrics_json(const metrics::GraphMetrics& m) {
    return {{"scope", m.scope},     {"n_nodes", m.n_nodes}, {"n_relationships", m.n_relationships},
            {"tpl", m.tpl},         {"mpl", m.mpl},         {"apl", m.apl},
            {"pairs", m.pairs},     {"sources", m.sources}, {"sample_fraction", m.sample_fraction},
            {"seed", m.rng_seed}};
}

Json parse_body(const std::string& body) {
    if (body.empty()) return Json::object();
    try {
        Json j = Json::parse(body);
        if (!j.is_object()) throw InvalidArgument("request body must be a JSON object");
        return j;
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("malformed JSON body: ") + e.what());
    }
}

std::string str_field(const Json& body, const char* name, bool required = true) {
    auto it = body.find(name);
    if (it == body.end() || it->is_null()) {
        if (required) throw InvalidArgument(std::string("missing field '") + name + "'");
        return {};
    }
    if (!it->is_string()) throw InvalidArgument(std::string("field '") + name + "' must be a string");
    return it->get<std::string>();
}

template <class T>
std::optional<T> num_field(const Json& body, const char* name) {
    auto it = body.find(name);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw InvalidArgument(std::string("field '") + name + "' must be a number");
    return it->get<T>();
}

Timestamp ts_text(const std::string& s, const char* what) {
    auto t = parse_timestamp(s);
    if (!t) throw InvalidArgument(std::string("bad timestamp for ") + what + ": " + s);
    return *t;
}

double query_number(const std::map<std::string, std::string>& q, const char* name, double fallback) {
    auto it = q.find(name);
    if (it == q.end() || it->second.empty()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(name);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument(std::string("query parameter '") + name + "' must be a number");
    }
}

ACT_DEFINE_ERROR(Unauthorized, "unauthorized");
ACT_DEFINE_ERROR(MethodNotAllowed, "method_not_allowed");

struct RunRecord {
    std::string id;
    std::string kind;
    std::string status = "running";  // running, done, failed
    std::string step;
    double progress = 0;
    Json result;
    Json error;

    Json to_json() const {
        Json j{{"id", id}, {"kind", kind}, {"status", status}, {"progress", progress}, {"step", step}};
        if (!result.is_null()) j["result"] = result;
        if (!error.is_null()) j["error"] = error;
        return j;
    }
};

Json error_json(const Error& e) {
    Json j{{"code", e.code()}, {"message", e.what()}};
    if (auto* s = dynamic_cast<const pql::SyntaxError*>(&e)) {
        j["offset"] = s->offset();
        j["expected"] = Json(std::vector<std::string>(s->expected().begin(), s->expected().end()));
    }
    if (auto* p = dynamic_cast<const PipelineError*>(&e)) j["step"] = p->step();
    return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Errors

int status_for(const std::string& code) {
    static const std::map<std::string, int> table = {
        {"bad_request", 400},
        {"value.invalid", 400},
        {"unauthorized", 401},
        {"not_found", 404},
        {"method_not_allowed", 405},
        {"precondition", 409},
        {"graph.unique_key", 409},
        {"graph.dangling_edge", 422},
        {"models.dataset_too_small", 422},
        {"models.feature_unavailable", 422},
        {"models.simulation_data", 422},
        {"models.singular_design", 422},
        {"metrics.empty_graph", 422},
        {"service.delivery_failed", 502},
    };
    if (auto it = table.find(code); it != table.end()) return it->second;
    if (code.rfind("pql.", 0) == 0 || code.rfind("reason.rule_", 0) == 0 || code.rfind("ontology.", 0) == 0)
        return 400;
    return 500;
}

Response error_response(int status, const std::string& code, const std::string& message, Json extra) {
    Json body{{"error", {{"code", code}, {"message", message}}}};
    for (auto& [k, v] : extra.items()) body["error"][k] = v;
    return {status, body};
}

// ---------------------------------------------------------------------------
// Actuator

Json DeliveryReceipt::to_json() const {
    return {{"url", url},           {"insight_id", insight_id}, {"option_id", option_id},
            {"status", status},     {"attempts", attempts},     {"delivered", delivered},
            {"error", error},       {"sent_at", format_timestamp(sent_at)}};
}

Transport http_transport(std::chrono::milliseconds timeout) {
    return [timeout](const std::string& url, const std::string& body) -> int {
        static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
        std::smatch m;
        if (!std::regex_match(url, m, re)) return 0;
        httplib::Client cli(m[1].str());
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
        cli.set_connection_timeout(secs.count(), usecs.count());
        cli.set_read_timeout(secs.count(), usecs.count());
        cli.set_write_timeout(secs.count(), usecs.count());
        const std::string path = m[2].matched ? m[2].str() : "/";
        auto res = cli.Post(path, body, "application/json");
        return res ? res->status : 0;
    };
}

DeliveryReceipt actuate(const GraphStore& g, const onto::OntologyRegistry& reg, const std::string& url,
                        const std::string& insight_id, const std::string& option_id,
                        const Transport& transport, const RetryPolicy& policy, Timestamp now) {
    const decide::Insight ins = decide::find_insight(g, reg, insight_id);
    const auto opt = ingest::find_entity(g, reg, "DecisionMakingOption", option_id);
    if (!opt) throw NotFound("option '" + option_id + "' not found");
    if (!decide::was_accepted(g, *opt, ins.id))
        throw Precondition("option '" + option_id + "' was not accepted for insight '" + insight_id + "'");
    if (url.empty()) throw InvalidArgument("missing webhook url");

    const decide::Option o = decide::load_option(g, *opt);
    const Json event{{"insight", insight_json(g, ins)},
                     {"option", {{"id", o.uuid}, {"description", decide::fill_template(o.description, ins)}}},
                     {"timestamp", format_timestamp(now)}};
    const std::string body = event.dump();

    DeliveryReceipt r;
    r.url = url;
    r.insight_id = insight_id;
    r.option_id = option_id;
    r.sent_at = now;
    auto backoff = policy.initial_backoff;
    const int attempts = std::clamp(policy.max_attempts, 1, 3);
    for (int i = 0; i < attempts; ++i) {
        if (i > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        ++r.attempts;
        r.status = transport ? transport(url, body) : 0;
        if (r.status >= 200 && r.status < 300) {
            r.delivered = true;
            r.error.clear();
            return r;
        }
        r.error = r.status ? "HTTP " + std::to_string(r.status) : "unreachable";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Api

struct Api::Impl {
    ApiConfig config;
    const onto::OntologyRegistry& reg = onto::default_ontology();

    // Readers hold `graph_mu` shared. Writers serialize on `writer_mu`, work
    // on a private copy and swap it in under a brief exclusive lock.
    mutable std::shared_mutex graph_mu;
    std::mutex writer_mu;
    GraphStore graph;

    std::mutex runs_mu;
    std::condition_variable runs_cv;
    std::map<std::string, RunRecord> runs;
    std::vector<std::thread> workers;
    std::size_t active = 0;
    std::size_t run_counter = 0;

    Impl(GraphStore g, ApiConfig c) : config(std::move(c)), graph(std::move(g)) {
        if (!config.transport) config.transport = http_transport();
    }

    ~Impl() {
        for (auto& t : workers)
            if (t.joinable()) t.join();
    }

    Timestamp now() const {
        if (config.now) return *config.now;
        PipelineConfig pc;
        pc.data_dir = config.data_dir;
        return *resolve(pc).now;
    }

    GraphStore copy() const {
        std::shared_lock lock(graph_mu);
        return graph;
    }

    void commit(GraphStore&& next) {
        {
            std::unique_lock lock(graph_mu);
            std::swap(graph, next);
        }
        if (config.snapshot) {
            std::shared_lock lock(graph_mu);
            graph.save(config.snapshot->string());
        }
    }

    /// Runs `body` on a copy under the writer slot and publishes the copy when
    /// it returns. With `keep_partial` a throwing body still publishes.
    template <class F>
    Json mutate(F&& body, bool keep_partial = false) {
        std::lock_guard w(writer_mu);
        GraphStore work = copy();
        try {
            Json out = body(work);
            commit(std::move(work));
            return out;
        } catch (...) {
            if (keep_partial) commit(std::move(work));
            throw;
        }
    }

    template <class F>
    Json read(F&& body) const {
        std::shared_lock lock(graph_mu);
        return body(static_cast<const GraphStore&>(graph));
    }

    /// Background run holding the writer slot; progress via /runs/{id}.
    template <class F>
    Json start_run(const std::string& kind, F body, bool keep_partial) {
        std::string id;
        {
            std::lock_guard lock(runs_mu);
            id = "run-" + std::to_string(++run_counter);
            runs[id].id = id;
            runs[id].kind = kind;
            ++active;
        }
        workers.emplace_back([this, id, body = std::move(body), keep_partial]() mutable {
            auto progress = [this, id](const std::string& step, double f) {
                std::lock_guard lock(runs_mu);
                runs[id].step = step;
                runs[id].progress = f;
            };
            Json result, error;
            try {
                result = mutate([&](GraphStore& g) { return body(g, progress); }, keep_partial);
            } catch (const Error& e) {
                error = error_json(e);
            } catch (const std::exception& e) {
                error = Json{{"code", "internal"}, {"message", e.what()}};
            }
            std::lock_guard lock(runs_mu);
            RunRecord& r = runs[id];
            r.status = error.is_null() ? "done" : "failed";
            if (error.is_null()) r.progress = 1;
            r.result = result;
            r.error = error;
            --active;
            runs_cv.notify_all();
        });
        std::lock_guard lock(runs_mu);
        return runs[id].to_json();
    }

    Json run_json(const std::string& id) {
        std::lock_guard lock(runs_mu);
        auto it = runs.find(id);
        if (it == runs.end()) throw NotFound("run '" + id + "' not found");
        return it->second.to_json();
    }

    void wait_idle() {
        std::unique_lock lock(runs_mu);
        runs_cv.wait(lock, [this] { return active == 0; });
    }

    // -- endpoint bodies --------------------------------------------------

    Json ingest_body(GraphStore& g, const Json& body) {
        const std::string dir = str_field(body, "dir", false);
        const std::filesystem::path path = dir.empty() ? config.data_dir : std::filesystem::path(dir);
        if (path.empty()) throw InvalidArgument("no data directory configured");
        Json files = Json::array();
        ingest::IngestReport total;
        for (const auto& r : ingest::ingest_directory(path, g, reg)) {
            files.push_back(report_json(r));
            total += r;
        }
        return {{"files", files},
                {"rows", total.rows},
                {"nodes_created", total.nodes_created},
                {"nodes_updated", total.nodes_updated},
                {"edges_created", total.edges_created},
                {"rejects", total.rejects.size()},
                {"nodes", g.node_count()},
                {"edges", g.edge_count()}};
    }

    Json reason_body(GraphStore& g) {
        const Timestamp t = now();
        const auto m = reason::materialize_all(reason::default_rules(), g, reg, t);
        const std::size_t flipped = reason::refresh_stale_flags(g, reg, t, reason::kDefaultMaxModelAge);
        const auto stale = reason::stale_models(g, reg, t, reason::kDefaultMaxModelAge);
        Json per_rule = Json::object();
        for (const auto& [k, v] : m.created_per_rule) per_rule[k] = v;
        Json stale_j = Json::array();
        for (const auto& s : stale.stale)
            stale_j.push_back({{"model", uuid_of(g.node(s.model))},
                               {"use_case", s.use_case ? Json(uuid_of(g.node(*s.use_case))) : Json(nullptr)},
                               {"age_days", static_cast<double>(s.age_millis) / kMillisPerDay}});
        Json warnings = Json::array();
        for (const auto& [id, msg] : stale.warnings)
            warnings.push_back({{"model", uuid_of(g.node(id))}, {"message", msg}});
        return {{"rounds", m.rounds},         {"created_per_rule", per_rule}, {"total_created", m.total_created},
                {"fixpoint", m.fixpoint},     {"stale_flags_changed", flipped}, {"stale", stale_j},
                {"warnings", warnings}};
    }

    Json simulate_body(GraphStore& g, const Json& body) {
        models::SimulationConfig sc;
        if (auto t = num_field<std::int64_t>(body, "trials")) {
            if (*t <= 0) throw InvalidArgument("trials must be positive");
            sc.n_trials = static_cast<std::size_t>(*t);
        }
        sc.rng_seed = num_field<std::uint64_t>(body, "seed").value_or(config.seed);
        const std::string start = str_field(body, "start", false);
        sc.start = start.empty() ? now() : ts_text(start, "start");
        sc.issued_at = *sc.start;
        sc.validate();
        auto fs = models::simulate_work_orders(g, reg, sc);
        const auto rep = models::persist_simulation(g, reg, fs, sc);
        Json out = Json::array();
        for (const auto& f : fs) {
            Json q = Json::object();
            for (const auto& [p, t] : f.quantiles) q[models::quantile_property(p)] = format_timestamp(t);
            out.push_back({{"work_order", f.work_order_uuid},
                           {"line", uuid_of(g.node(f.line))},
                           {"quantiles", q},
                           {"trials", f.trials},
                           {"low_confidence", f.low_confidence}});
        }
        return {{"model", fs.empty() ? Json(nullptr) : Json(fs.front().model_uuid)},
                {"issued_at", format_timestamp(sc.issued_at)},
                {"seed", sc.rng_seed},
                {"forecasts", out},
                {"report", report_json(rep)}};
    }

    Json forecast_body(GraphStore& g, const Json& body) {
        models::DemandJob job;
        job.material_uuid = str_field(body, "material");
        job.client_uuid = str_field(body, "client");
        job.max_horizon = num_field<int>(body, "horizon").value_or(job.max_horizon);
        job.lag_count = num_field<int>(body, "lag_count").value_or(job.lag_count);
        job.l2 = num_field<double>(body, "l2").value_or(job.l2);
        const std::string as_of = str_field(body, "as_of", false);
        job.as_of = as_of.empty() ? now() : ts_text(as_of, "as_of");
        if (job.max_horizon < 1) throw InvalidArgument("horizon must be at least 1");
        if (!ingest::find_entity(g, reg, "Material", job.material_uuid))
            throw NotFound("material '" + job.material_uuid + "' not found");
        if (!ingest::find_entity(g, reg, "Client", job.client_uuid))
            throw NotFound("client '" + job.client_uuid + "' not found");
        const auto run = models::run_demand_forecast(g, reg, job);
        Json out = Json::array();
        for (const auto& f : run.forecasts)
            out.push_back({{"id", f.forecast_uuid},
                           {"model", f.model_uuid},
                           {"horizon_days", f.horizon_days},
                           {"target_date", format_timestamp(f.target_date)},
                           {"value", f.value},
                           {"clamped", f.clamped}});
        return {{"material", job.material_uuid},
                {"client", job.client_uuid},
                {"as_of", format_timestamp(job.as_of)},
                {"forecasts", out},
                {"report", report_json(run.report)}};
    }

    PipelineConfig pipeline_config(const Json& body) const {
        PipelineConfig pc;
        const std::string dir = str_field(body, "dir", false);
        pc.data_dir = dir.empty() ? config.data_dir : std::filesystem::path(dir);
        pc.seed = num_field<std::uint64_t>(body, "seed").value_or(config.seed);
        if (auto t = num_field<std::int64_t>(body, "trials")) {
            if (*t <= 0) throw InvalidArgument("trials must be positive");
            pc.trials = static_cast<std::size_t>(*t);
        }
        const std::string at = str_field(body, "now", false);
        if (!at.empty()) pc.now = ts_text(at, "now");
        else if (config.now) pc.now = config.now;
        return pc;
    }

    Json usecases(const GraphStore& g) const {
        Json out = Json::array();
        for (NodeId id : g.nodes_with_label("UseCase")) {
            const Node& uc = g.node(id);
            std::size_t models = 0, forecasts = 0;
            for (const auto& nb : g.neighbors(id, Direction::in, "CORRESPONDS_TO")) (void)nb, ++models;
            for (const auto& nb : g.neighbors(id, Direction::in, "RELATES_TO"))
                forecasts += nb.node->label == "Forecast";
            out.push_back({{"id", uuid_of(uc)},
                           {"properties", plain_properties(uc.properties)},
                           {"models", models},
                           {"forecasts", forecasts}});
        }
        std::sort(out.begin(), out.end(), [](const Json& a, const Json& b) { return a["id"] < b["id"]; });
        return out;
    }

    Json forecasts(const GraphStore& g, const std::map<std::string, std::string>& q) const {
        std::optional<NodeId> uc;
        if (auto it = q.find("use_case"); it != q.end() && !it->second.empty()) {
            for (NodeId id : g.nodes_with_label("UseCase")) {
                const Node& n = g.node(id);
                auto matches = [&](const char* prop) {
                    const PropertyValue* v = n.property(prop);
                    return v && v->as_text() == it->second;
                };
                if (matches("uuid") || matches("name") || matches("description")) uc = id;
            }
            if (!uc) throw NotFound("use case '" + it->second + "' not found");
        }
        const std::string kind = q.count("kind") ? q.at("kind") : std::string();
        Json out = Json::array();
        for (NodeId id : g.nodes_with_label("Forecast")) {
            const Node& f = g.node(id);
            if (!kind.empty() && (!f.property("kind") || f.property("kind")->as_text() != kind)) continue;
            if (uc && !g.find_edge("RELATES_TO", id, *uc)) continue;
            out.push_back(forecast_json(g, f));
        }
        std::sort(out.begin(), out.end(), [](const Json& a, const Json& b) { return a["uuid"] < b["uuid"]; });
        return out;
    }

    Json options_payload(const GraphStore& g, const decide::Insight& ins) const {
        const auto ranked = decide::rank_options(g, decide::candidate_options(g, reg, ins), ins);
        return {{"insight", insight_json(g, ins)}, {"options", ranked_json(ranked)}};
    }

    Json feedback_body(GraphStore& g, const Json& body) {
        decide::FeedbackRecord rec;
        rec.insight_uuid = str_field(body, "insight_id");
        rec.option_uuid = str_field(body, "option_id", false);
        rec.user = str_field(body, "user");
        rec.text = str_field(body, "text", false);
        const std::string verdict = str_field(body, "verdict");
        const auto v = decide::verdict_from_string(verdict);
        if (!v) throw InvalidArgument("verdict must be accepted, rejected or alternative, got '" + verdict + "'");
        rec.verdict = *v;
        rec.recorded_at = config.now ? *config.now : Timestamp::now();
        const auto res = decide::record_feedback(g, reg, rec);
        const auto ins = decide::find_insight(g, reg, rec.insight_uuid);
        decide::match_options(g, reg, ins);
        Json out = options_payload(g, ins);
        out["feedback"] = {{"edge", raw(res.feedback_edge)},
                           {"option_id", res.option_uuid},
                           {"verdict", verdict},
                           {"created_option", res.created_option.has_value()}};
        return out;
    }

    Json metrics_body(const GraphStore& g, const std::map<std::string, std::string>& q) const {
        const double fraction = query_number(q, "fraction", 1.0);
        const double seed = query_number(q, "seed", 7);
        if (seed < 0) throw InvalidArgument("seed must be non-negative");
        const std::string scope = q.count("scope") ? q.at("scope") : std::string();
        std::vector<metrics::GraphMetrics> ms;
        for (const auto& s : metrics::default_scopes(reg)) {
            if (!scope.empty() && s.name != scope) continue;
            ms.push_back(metrics::scope_metrics(g, reg, s, fraction, static_cast<std::uint64_t>(seed)));
        }
        if (ms.empty()) throw NotFound("scope '" + scope + "' not found");
        Json out = Json::array();
        for (const auto& m : ms) out.push_back(metrics_json(m));
        return {{"metrics", out}, {"csv", metrics::radar_csv(ms)}};
    }

    Json schema(const GraphStore& g) const {
        Json classes = Json::array(), relations = Json::array();
        for (const auto& [name, def] : reg.classes()) {
            Json props = Json::array();
            for (const auto& p : def.properties)
                props.push_back({{"name", p.name}, {"kind", std::string(to_string(p.kind))}, {"required", p.required}});
            classes.push_back({{"name", name},
                               {"parent", def.parent ? Json(*def.parent) : Json(nullptr)},
                               {"definition", def.definition},
                               {"properties", props},
                               {"instances", g.nodes_with_label(name).size()}});
        }
        for (const auto& [name, def] : reg.relations())
            relations.push_back({{"name", name},
                                 {"domain", Json(std::vector<std::string>(def.domain.begin(), def.domain.end()))},
                                 {"range", Json(std::vector<std::string>(def.range.begin(), def.range.end()))}});
        const auto rep = onto::conformance_report(g, reg);
        return {{"classes", classes}, {"relations", relations}, {"violations", rep.total_violations}};
    }

    Response dispatch(const Request& req) {
        std::string path = req.path;
        if (path.rfind("/api/v1", 0) == 0) path = path.substr(7);
        if (path.empty()) path = "/";
        if (path.size() > 1 && path.back() == '/') path.pop_back();
        const bool get = req.method == "GET", post = req.method == "POST";

        if (path == "/health") {
            if (!get) throw MethodNotAllowed(req.method + " " + path);
            return {200, read([](const GraphStore& g) -> Json {
                        return {{"status", "ok"}, {"nodes", g.node_count()}, {"edges", g.edge_count()}};
                    })};
        }
        if (!config.token.empty() && req.authorization != "Bearer " + config.token)
            throw Unauthorized("missing or invalid bearer token");

        static const std::regex options_re("^/insights/([^/]+)/options$");
        static const std::regex runs_re("^/runs/([^/]+)$");
        std::smatch m;
        const auto method = [&](bool ok) {
            if (!ok) throw MethodNotAllowed(req.method + " " + path);
        };

        if (path == "/ingest") {
            method(post);
            const Json body = parse_body(req.body);
            return {200, mutate([&](GraphStore& g) { return ingest_body(g, body); })};
        }
        if (path == "/reason") {
            method(post);
            return {200, mutate([&](GraphStore& g) { return reason_body(g); })};
        }
        if (path == "/simulate") {
            method(post);
            const Json body = parse_body(req.body);
            if (body.value("wait", false))
                return {200, mutate([&](GraphStore& g) { return simulate_body(g, body); })};
            return {202, start_run(
                             "simulate",
                             [this, body](GraphStore& g, const auto& progress) {
                                 progress("simulate", 0);
                                 return simulate_body(g, body);
                             },
                             false)};
        }
        if (path == "/forecast") {
            method(post);
            const Json body = parse_body(req.body);
            return {200, mutate([&](GraphStore& g) { return forecast_body(g, body); })};
        }
        if (path == "/pipeline") {
            method(post);
            const Json body = parse_body(req.body);
            PipelineConfig pc = pipeline_config(body);
            auto body_fn = [this, pc](GraphStore& g, const auto& progress) mutable {
                pc.progress = progress;
                return run_pipeline(g, reg, pc).to_json();
            };
            if (body.value("wait", false)) {
                return {200, mutate([&](GraphStore& g) { return body_fn(g, [](const std::string&, double) {}); },
                                    true)};
            }
            return {202, start_run("pipeline", std::move(body_fn), true)};
        }
        if (path == "/feedback") {
            method(post);
            const Json body = parse_body(req.body);
            return {200, mutate([&](GraphStore& g) { return feedback_body(g, body); })};
        }
        if (path == "/query") {
            method(post);
            const Json body = parse_body(req.body);
            const pql::Query q = pql::parse(str_field(body, "text"));
            return {200, read([&](const GraphStore& g) -> Json {
                        pql::EvalOptions opt;
                        opt.registry = &reg;
                        const auto rs = pql::evaluate(q, g, opt);
                        Json rows = Json::array();
                        for (const auto& row : rs.rows) {
                            Json r = Json::array();
                            for (const auto& v : row) r.push_back(value_json(g, v));
                            rows.push_back(r);
                        }
                        return {{"columns", rs.columns}, {"rows", rows}, {"count", rs.rows.size()}};
                    })};
        }
        if (path == "/actuate") {
            method(post);
            const Json body = parse_body(req.body);
            const std::string ins = str_field(body, "insight_id"), opt = str_field(body, "option_id");
            const std::string hook = str_field(body, "webhook");
            const Timestamp at = config.now ? *config.now : Timestamp::now();
            DeliveryReceipt r;
            {
                // The receipt needs a consistent view; delivery itself runs
                // without holding the graph.
                const GraphStore g = copy();
                r = actuate(g, reg, hook, ins, opt, config.transport, config.retry, at);
            }
            if (!r.delivered)
                return error_response(502, "service.delivery_failed",
                                      "delivery to " + hook + " failed after " + std::to_string(r.attempts) +
                                          " attempts: " + r.error,
                                      {{"receipt", r.to_json()}});
            return {200, r.to_json()};
        }
        if (path == "/usecases") {
            method(get);
            return {200, read([&](const GraphStore& g) { return usecases(g); })};
        }
        if (path == "/forecasts") {
            method(get);
            return {200, read([&](const GraphStore& g) { return forecasts(g, req.query); })};
        }
        if (path == "/insights") {
            method(get);
            std::optional<Timestamp> since;
            if (auto it = req.query.find("since"); it != req.query.end() && !it->second.empty())
                since = ts_text(it->second, "since");
            return {200, read([&](const GraphStore& g) -> Json {
                        Json out = Json::array();
                        for (const auto& i : decide::list_insights(g, reg, since)) out.push_back(insight_json(g, i));
                        return out;
                    })};
        }
        if (std::regex_match(path, m, options_re)) {
            method(get);
            const std::string id = m[1].str();
            return {200, read([&](const GraphStore& g) {
                        return options_payload(g, decide::find_insight(g, reg, id));
                    })};
        }
        if (path == "/metrics") {
            method(get);
            return {200, read([&](const GraphStore& g) { return metrics_body(g, req.query); })};
        }
        if (path == "/schema") {
            method(get);
            return {200, read([&](const GraphStore& g) { return schema(g); })};
        }
        if (std::regex_match(path, m, runs_re)) {
            method(get);
            return {200, run_json(m[1].str())};
        }
        throw NotFound("no route for " + req.method + " " + path);
    }
};

Api::Api(GraphStore graph, ApiConfig config) : impl_(std::make_unique<Impl>(std::move(graph), std::move(config))) {}
Api::~Api() = default;

Response Api::handle(const Request& request) {
    try {
        return impl_->dispatch(request);
    } catch (const Error& e) {
        Json extra = error_json(e);
        extra.erase("code");
        extra.erase("message");
        return error_response(status_for(e.code()), e.code(), e.what(), extra);
    } catch (const std::exception& e) {
        return error_response(500, "internal", e.what());
    }
}

GraphStore Api::snapshot() const { return impl_->copy(); }

void Api::wait_idle() { impl_->wait_idle(); }

// ---------------------------------------------------------------------------
// HTTP binding

struct HttpServer::Impl {
    Api& api;
    httplib::Server server;

    explicit Impl(Api& a) : api(a) {
        auto handler = [this](const httplib::Request& req, httplib::Response& res) {
            Request r;
            r.method = req.method;
            r.path = req.path;
            for (const auto& [k, v] : req.params) r.query[k] = v;
            r.body = req.body;
            r.authorization = req.get_header_value("Authorization");
            const Response out = api.handle(r);
            res.status = out.status;
            res.set_content(out.body.dump(), "application/json");
        };
        server.Get(".*", handler);
        server.Post(".*", handler);
    }
};

HttpServer::HttpServer(Api& api) : impl_(std::make_unique<Impl>(api)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound <= 0) throw InvalidArgument("cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace act::service
