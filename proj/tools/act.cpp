// act: command-line front end. Every subcommand except synth and serve is
// routed through service::Api, so its stdout equals the HTTP response body.

#include "act/ingest.hpp"
#include "act/metrics.hpp"
#include "act/ontology.hpp"
#include "act/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace act;
using service::Json;

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

struct Common {
    std::string snapshot = env_or("ACT_SNAPSHOT", "");
    std::string data_dir = env_or("ACT_DATA_DIR", "");
    std::string now;
    std::string token;
    bool pretty = false;
};

void add_common(CLI::App* app, Common& c, bool needs_snapshot) {
    auto* s = app->add_option("--snapshot", c.snapshot, "Graph snapshot file (env ACT_SNAPSHOT)");
    if (needs_snapshot && c.snapshot.empty()) s->required();
    app->add_option("--data-dir", c.data_dir, "Scenario directory (env ACT_DATA_DIR)");
    app->add_option("--now", c.now, "Fixed clock, ISO timestamp");
    app->add_flag("--pretty", c.pretty, "Indent JSON output");
}

GraphStore open_graph(const std::string& snapshot) {
    const auto& reg = onto::default_ontology();
    if (!snapshot.empty() && std::filesystem::exists(snapshot)) {
        const auto idx = reg.index_declarations();
        return GraphStore::load(snapshot, idx);
    }
    GraphStore g;
    reg.install_indexes(g);
    return g;
}

service::ApiConfig api_config(const Common& c) {
    service::ApiConfig cfg;
    cfg.data_dir = c.data_dir;
    if (!c.snapshot.empty()) cfg.snapshot = c.snapshot;
    cfg.token = c.token;
    if (!c.now.empty()) {
        auto t = parse_timestamp(c.now);
        if (!t) throw InvalidArgument("bad --now timestamp: " + c.now);
        cfg.now = *t;
    }
    return cfg;
}

int emit(const service::Response& r, bool pretty) {
    const std::string text = pretty ? r.body.dump(2) : r.body.dump();
    if (r.status >= 200 && r.status < 300) {
        std::cout << text << '\n';
        return 0;
    }
    std::cerr << text << '\n';
    return r.status >= 500 ? 3 : 2;
}

/// One request against the snapshot; mutations are saved back by the Api.
int run_request(const Common& c, const std::string& method, const std::string& path, const Json& body,
                std::map<std::string, std::string> query = {}) {
    service::Api api(open_graph(c.snapshot), api_config(c));
    service::Request req;
    req.method = method;
    req.path = path;
    req.query = std::move(query);
    if (!body.is_null()) req.body = body.dump();
    return emit(api.handle(req), c.pretty);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

service::HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Actionable cognitive twin engine"};
    app.require_subcommand(1);
    Common c;
    std::function<int()> action;

    // synth
    auto* synth = app.add_subcommand("synth", "Generate the synthetic plant scenario");
    std::string synth_out;
    ingest::ScenarioSpec spec;
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--seed", spec.seed, "Generator seed");
    synth->add_option("--lines", spec.n_lines);
    synth->add_option("--persons", spec.n_persons);
    synth->add_option("--materials", spec.n_materials);
    synth->add_option("--clients", spec.n_clients);
    synth->add_option("--history-days", spec.horizon_days);
    synth->callback([&] {
        action = [&] {
            const auto files = ingest::generate_scenario(spec, synth_out);
            Json out = Json::array();
            for (const auto& f : files) out.push_back(f.string());
            std::cout << (c.pretty ? out.dump(2) : out.dump()) << '\n';
            return 0;
        };
    });

    // ingest
    auto* ing = app.add_subcommand("ingest", "Ingest a scenario directory into the snapshot");
    add_common(ing, c, true);
    std::string ing_dir;
    ing->add_option("--dir", ing_dir, "Directory with <kind>.csv files");
    ing->callback([&] {
        action = [&] {
            Json body = Json::object();
            if (!ing_dir.empty()) body["dir"] = ing_dir;
            return run_request(c, "POST", "/ingest", body);
        };
    });

    // query
    auto* qry = app.add_subcommand("query", "Evaluate a pattern query");
    add_common(qry, c, true);
    std::string q_text, q_file;
    qry->add_option("--text", q_text, "Query text");
    qry->add_option("--file", q_file, "File holding one query");
    qry->callback([&] {
        action = [&] {
            const std::string text = q_file.empty() ? q_text : read_text(q_file);
            if (text.empty()) throw InvalidArgument("give --text or --file");
            return run_request(c, "POST", "/query", Json{{"text", text}});
        };
    });

    // reason
    auto* rsn = app.add_subcommand("reason", "Materialize deductive rules and staleness flags");
    add_common(rsn, c, true);
    rsn->callback([&] { action = [&] { return run_request(c, "POST", "/reason", Json::object()); }; });

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo completion forecasts for pending work orders");
    add_common(sim, c, true);
    std::optional<std::int64_t> sim_trials;
    std::optional<std::uint64_t> sim_seed;
    std::string sim_start;
    sim->add_option("--trials", sim_trials);
    sim->add_option("--seed", sim_seed);
    sim->add_option("--start", sim_start, "Lines idle from this instant");
    sim->callback([&] {
        action = [&] {
            Json body{{"wait", true}};
            if (sim_trials) body["trials"] = *sim_trials;
            if (sim_seed) body["seed"] = *sim_seed;
            if (!sim_start.empty()) body["start"] = sim_start;
            return run_request(c, "POST", "/simulate", body);
        };
    });

    // forecast
    auto* fc = app.add_subcommand("forecast", "Demand forecasts for one material and client");
    add_common(fc, c, true);
    std::string fc_mat, fc_client, fc_asof;
    std::optional<int> fc_h, fc_lags;
    std::optional<double> fc_l2;
    fc->add_option("--material", fc_mat)->required();
    fc->add_option("--client", fc_client)->required();
    fc->add_option("--horizon", fc_h);
    fc->add_option("--lags", fc_lags);
    fc->add_option("--l2", fc_l2);
    fc->add_option("--as-of", fc_asof);
    fc->callback([&] {
        action = [&] {
            Json body{{"material", fc_mat}, {"client", fc_client}};
            if (fc_h) body["horizon"] = *fc_h;
            if (fc_lags) body["lag_count"] = *fc_lags;
            if (fc_l2) body["l2"] = *fc_l2;
            if (!fc_asof.empty()) body["as_of"] = fc_asof;
            return run_request(c, "POST", "/forecast", body);
        };
    });

    // insights
    auto* ins = app.add_subcommand("insights", "List insights");
    add_common(ins, c, true);
    std::string ins_since;
    ins->add_option("--since", ins_since);
    ins->callback([&] {
        action = [&] {
            std::map<std::string, std::string> q;
            if (!ins_since.empty()) q["since"] = ins_since;
            return run_request(c, "GET", "/insights", nullptr, q);
        };
    });

    // forecasts
    auto* fcs = app.add_subcommand("forecasts", "List forecasts");
    add_common(fcs, c, true);
    std::string fcs_uc;
    fcs->add_option("--use-case", fcs_uc);
    fcs->callback([&] {
        action = [&] {
            std::map<std::string, std::string> q;
            if (!fcs_uc.empty()) q["use_case"] = fcs_uc;
            return run_request(c, "GET", "/forecasts", nullptr, q);
        };
    });

    // usecases
    auto* ucs = app.add_subcommand("usecases", "List use cases");
    add_common(ucs, c, true);
    ucs->callback([&] { action = [&] { return run_request(c, "GET", "/usecases", nullptr); }; });

    // options
    auto* opt = app.add_subcommand("options", "Ranked decision options for an insight");
    add_common(opt, c, true);
    std::string opt_insight;
    opt->add_option("--insight", opt_insight)->required();
    opt->callback([&] { action = [&] { return run_request(c, "GET", "/insights/" + opt_insight + "/options", nullptr); }; });

    // feedback
    auto* fb = app.add_subcommand("feedback", "Record a decision on an option");
    add_common(fb, c, true);
    std::string fb_insight, fb_option, fb_verdict, fb_user, fb_text;
    fb->add_option("--insight", fb_insight)->required();
    fb->add_option("--option", fb_option);
    fb->add_option("--verdict", fb_verdict)->required()->check(CLI::IsMember({"accepted", "rejected", "alternative"}));
    fb->add_option("--user", fb_user)->required();
    fb->add_option("--text", fb_text, "Alternative description");
    fb->callback([&] {
        action = [&] {
            Json body{{"insight_id", fb_insight}, {"verdict", fb_verdict}, {"user", fb_user}};
            if (!fb_option.empty()) body["option_id"] = fb_option;
            if (!fb_text.empty()) body["text"] = fb_text;
            return run_request(c, "POST", "/feedback", body);
        };
    });

    // metrics
    auto* met = app.add_subcommand("metrics", "Path-length statistics per scope");
    add_common(met, c, true);
    double met_fraction = 1.0;
    std::uint64_t met_seed = 7;
    std::string met_out, met_scope;
    met->add_option("--fraction", met_fraction);
    met->add_option("--seed", met_seed);
    met->add_option("--scope", met_scope);
    met->add_option("--out", met_out, "Write the radar CSV here");
    met->callback([&] {
        action = [&] {
            service::Api api(open_graph(c.snapshot), api_config(c));
            service::Request req{"GET", "/metrics", {{"fraction", std::to_string(met_fraction)},
                                                     {"seed", std::to_string(met_seed)}}, "", ""};
            if (!met_scope.empty()) req.query["scope"] = met_scope;
            const auto r = api.handle(req);
            if (r.status == 200 && !met_out.empty()) {
                std::ofstream out(met_out, std::ios::binary | std::ios::trunc);
                if (!out) throw Error("io", "cannot write " + met_out);
                out << r.body["csv"].get<std::string>();
            }
            return emit(r, c.pretty);
        };
    });

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "ingest, reason, models and insights in one run");
    add_common(pipe, c, false);
    std::optional<std::int64_t> pipe_trials;
    std::optional<std::uint64_t> pipe_seed;
    pipe->add_option("--trials", pipe_trials);
    pipe->add_option("--seed", pipe_seed);
    pipe->callback([&] {
        action = [&] {
            if (c.data_dir.empty()) throw InvalidArgument("--data-dir (or ACT_DATA_DIR) is required");
            Json body{{"wait", true}};
            if (pipe_trials) body["trials"] = *pipe_trials;
            if (pipe_seed) body["seed"] = *pipe_seed;
            return run_request(c, "POST", "/pipeline", body);
        };
    });

    // actuate
    auto* act_cmd = app.add_subcommand("actuate", "Send an accepted option to a webhook");
    add_common(act_cmd, c, true);
    std::string a_insight, a_option, a_hook;
    act_cmd->add_option("--insight", a_insight)->required();
    act_cmd->add_option("--option", a_option)->required();
    act_cmd->add_option("--webhook", a_hook)->required();
    act_cmd->callback([&] {
        action = [&] {
            return run_request(c, "POST", "/actuate",
                               Json{{"insight_id", a_insight}, {"option_id", a_option}, {"webhook", a_hook}});
        };
    });

    // schema
    auto* sch = app.add_subcommand("schema", "Registered classes and relations with conformance");
    add_common(sch, c, false);
    sch->callback([&] { action = [&] { return run_request(c, "GET", "/schema", nullptr); }; });

    // serve
    auto* srv = app.add_subcommand("serve", "HTTP API under /api/v1");
    add_common(srv, c, false);
    std::string host = "127.0.0.1";
    int port = std::atoi(env_or("ACT_PORT", "8080").c_str());
    c.token = env_or("ACT_TOKEN", "");
    srv->add_option("--host", host);
    srv->add_option("--port", port, "Port (env ACT_PORT); 0 picks a free one");
    srv->add_option("--token", c.token, "Bearer token (env ACT_TOKEN)");
    srv->callback([&] {
        action = [&] {
            service::Api api(open_graph(c.snapshot), api_config(c));
            service::HttpServer server(api);
            const int bound = server.bind(host, port);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "listening on http://" << host << ':' << bound << "/api/v1" << std::endl;
            server.listen();
            g_server = nullptr;
            api.wait_idle();
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    try {
        return action ? action() : 0;
    } catch (const Error& e) {
        std::cerr << Json{{"error", {{"code", e.code()}, {"message", e.what()}}}}.dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << Json{{"error", {{"code", "internal"}, {"message", e.what()}}}}.dump() << '\n';
        return 3;
    }
}
