#include "act/service.hpp"
#include "support/seed.hpp"
#include "support/tempdir.hpp"

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <thread>

using namespace act;
using namespace act::service;
using act::testing::TempDir;

namespace {

ApiConfig seeded_config() {
    ApiConfig c;
    c.data_dir = act::testing::seed_dir().path();
    c.now = ingest::scenario_now();
    c.retry.initial_backoff = std::chrono::milliseconds(1);
    return c;
}

Response call(Api& api, const std::string& method, const std::string& path, const Json& body = nullptr,
              std::map<std::string, std::string> query = {}) {
    Request r;
    r.method = method;
    r.path = path;
    r.query = std::move(query);
    if (!body.is_null()) r.body = body.dump();
    return api.handle(r);
}

/// Api over the graph after one synchronous pipeline run.
std::unique_ptr<Api> pipeline_api(ApiConfig c = seeded_config()) {
    auto api = std::make_unique<Api>(act::testing::pipeline_graph(), std::move(c));
    return api;
}

Json downtime_insight(Api& api) {
    const auto r = call(api, "GET", "/insights");
    REQUIRE(r.status == 200);
    for (const auto& i : r.body)
        if (i["kind"] == "organizational_downtime") return i;
    FAIL("no downtime insight");
    return nullptr;
}

double score_of(const Json& options, const std::string& id) {
    for (const auto& o : options["options"])
        if (o["id"] == id) return o["score"].get<double>();
    return -1;
}

}  // namespace

TEST_SUITE("service") {
    TEST_CASE("health and routing") {
        Api api(act::testing::seed_graph(), seeded_config());
        auto h = call(api, "GET", "/api/v1/health");
        CHECK(h.status == 200);
        CHECK(h.body["status"] == "ok");
        CHECK(h.body["nodes"] == act::testing::seed_graph().node_count());
        CHECK(call(api, "GET", "/health").status == 200);
        CHECK(call(api, "GET", "/nope").status == 404);
        CHECK(call(api, "POST", "/health").status == 405);
        CHECK(call(api, "GET", "/query").status == 405);
        Request bad{"POST", "/query", {}, "{not json", ""};
        const auto r = api.handle(bad);
        CHECK(r.status == 400);
        CHECK(r.body["error"]["code"] == "bad_request");
    }

    TEST_CASE("bearer token") {
        ApiConfig c = seeded_config();
        c.token = "s3cret";
        Api api(act::testing::seed_graph(), c);
        CHECK(call(api, "GET", "/health").status == 200);
        const auto denied = call(api, "GET", "/usecases");
        CHECK(denied.status == 401);
        CHECK(denied.body["error"]["code"] == "unauthorized");
        Request ok{"GET", "/usecases", {}, "", "Bearer s3cret"};
        CHECK(api.handle(ok).status == 200);
    }

    TEST_CASE("query endpoint") {
        Api api(act::testing::seed_graph(), seeded_config());
        const auto bad = call(api, "POST", "/query", {{"text", "MATCH (n:WorkOrder RETURN n"}});
        CHECK(bad.status == 400);
        CHECK(bad.body["error"]["code"] == "pql.syntax");
        CHECK(bad.body["error"]["offset"] == 19);  // at RETURN
        const auto ok = call(api, "POST", "/query", {{"text", "MATCH (u:UseCase) RETURN u"}});
        REQUIRE(ok.status == 200);
        CHECK(ok.body["columns"] == Json::array({"u"}));
        CHECK(ok.body["count"] == 2);
        CHECK(ok.body["rows"][0][0]["node"]["label"] == "UseCase");
        CHECK(call(api, "POST", "/query", Json::object()).status == 400);
    }

    TEST_CASE("pipeline end to end through the api") {
        Api api(act::testing::seed_graph(), seeded_config());
        const auto run = call(api, "POST", "/pipeline", {{"wait", true}});
        REQUIRE(run.status == 200);
        CHECK(run.body["forecasts"].get<int>() > 0);
        CHECK(run.body["insights"].get<int>() >= 2);
        std::vector<std::string> names;
        for (const auto& s : run.body["steps"]) names.push_back(s["name"]);
        CHECK(names == std::vector<std::string>{"ingest", "reason", "models", "insights"});

        const Json down = downtime_insight(api);
        bool shift = false;
        for (const auto& r : down["refs"]) shift |= r["uuid"] == ingest::ScenarioAnchors::downtime_shift;
        CHECK(shift);
        CHECK(down["use_case"] == "uc-pp");

        const auto again = call(api, "POST", "/pipeline", {{"wait", true}});
        REQUIRE(again.status == 200);
        CHECK(again.body["created"] == 0);
    }

    TEST_CASE("pipeline errors name the step") {
        Api api(GraphStore{}, seeded_config());
        const auto r = call(api, "POST", "/pipeline", {{"wait", true}, {"dir", "/nonexistent/act"}});
        CHECK(r.status == 404);
        CHECK(r.body["error"]["step"] == "ingest");
        PipelineConfig pc;
        pc.data_dir = "/nonexistent/act";
        GraphStore g;
        try {
            run_pipeline(g, onto::default_ontology(), pc);
            FAIL("expected PipelineError");
        } catch (const PipelineError& e) {
            CHECK(e.step() == "ingest");
        }
    }

    TEST_CASE("background runs report progress") {
        Api api(act::testing::seed_graph(), seeded_config());
        const auto started = call(api, "POST", "/pipeline");
        REQUIRE(started.status == 202);
        const std::string id = started.body["id"];
        // Readers are not blocked while the run holds the writer slot.
        std::atomic<int> ok{0};
        std::vector<std::thread> readers;
        for (int t = 0; t < 4; ++t)
            readers.emplace_back([&] {
                for (int k = 0; k < 20; ++k) ok += call(api, "GET", "/health").status == 200;
            });
        for (auto& t : readers) t.join();
        CHECK(ok == 80);
        api.wait_idle();
        const auto r = call(api, "GET", "/runs/" + id);
        REQUIRE(r.status == 200);
        CHECK(r.body["status"] == "done");
        CHECK(r.body["progress"] == 1.0);
        CHECK(r.body["result"]["insights"].get<int>() >= 2);
        CHECK(call(api, "GET", "/runs/run-999").status == 404);

        const auto sim = call(api, "POST", "/simulate", {{"trials", 500}, {"seed", 3}});
        REQUIRE(sim.status == 202);
        api.wait_idle();
        const auto s = call(api, "GET", "/runs/" + sim.body["id"].get<std::string>());
        CHECK(s.body["status"] == "done");
        CHECK_FALSE(s.body["result"]["forecasts"].empty());
    }

    TEST_CASE("read endpoints never mutate") {
        auto api = pipeline_api();
        const std::string before = api->snapshot().canonical();
        const std::string id = downtime_insight(*api)["id"];
        for (const auto& path : {"/health", "/usecases", "/forecasts", "/insights", "/metrics", "/schema"})
            CHECK(call(*api, "GET", path).status == 200);
        CHECK(call(*api, "GET", "/forecasts", nullptr, {{"use_case", "uc-df"}}).status == 200);
        CHECK(call(*api, "GET", "/insights/" + id + "/options").status == 200);
        CHECK(call(*api, "POST", "/query", {{"text", "MATCH (f:Forecast) RETURN f"}}).status == 200);
        CHECK(call(*api, "GET", "/metrics", nullptr, {{"fraction", "0.1"}, {"seed", "3"}}).status == 200);
        CHECK(api->snapshot().canonical() == before);
    }

    TEST_CASE("feedback is visible to the next options read") {
        auto api = pipeline_api();
        const std::string id = downtime_insight(*api)["id"];
        const auto before = call(*api, "GET", "/insights/" + id + "/options");
        REQUIRE(before.status == 200);
        CHECK(score_of(before.body, "opt-pp-reschedule") == 0.5);
        CHECK(score_of(before.body, "opt-pp-extra-shift") == 0.5);

        const auto fb = call(*api, "POST", "/feedback",
                             {{"insight_id", id}, {"option_id", "opt-pp-reschedule"}, {"verdict", "accepted"}, {"user", "ana"}});
        REQUIRE(fb.status == 200);
        const auto after = call(*api, "GET", "/insights/" + id + "/options");
        CHECK(score_of(after.body, "opt-pp-reschedule") == doctest::Approx(2.0 / 3.0));
        CHECK(after.body["options"][0]["id"] == "opt-pp-reschedule");

        const auto alt = call(*api, "POST", "/feedback",
                              {{"insight_id", id}, {"verdict", "alternative"}, {"text", "move to night shift"}, {"user", "ana"}});
        REQUIRE(alt.status == 200);
        CHECK(alt.body["feedback"]["created_option"] == true);
        bool creative = false;
        const auto listed = call(*api, "GET", "/insights/" + id + "/options");
        for (const auto& o : listed.body["options"])
            creative |= o["creative"] == true && o["description"] == "move to night shift";
        CHECK(creative);

        CHECK(call(*api, "POST", "/feedback", {{"insight_id", id}, {"option_id", "opt-pp-reschedule"}, {"verdict", "maybe"}, {"user", "a"}}).status == 400);
        CHECK(call(*api, "POST", "/feedback", {{"insight_id", "ins-none"}, {"option_id", "opt-pp-reschedule"}, {"verdict", "accepted"}, {"user", "a"}}).status == 404);
        CHECK(call(*api, "GET", "/insights/ins-none/options").status == 404);
    }

    TEST_CASE("actuation") {
        std::vector<std::string> bodies;
        int reply = 200;
        ApiConfig c = seeded_config();
        c.transport = [&](const std::string&, const std::string& body) {
            bodies.push_back(body);
            return reply;
        };
        auto api = pipeline_api(c);
        const std::string id = downtime_insight(*api)["id"];
        const Json req{{"insight_id", id}, {"option_id", "opt-pp-reschedule"}, {"webhook", "http://hook.test/x"}};
        const auto refused = call(*api, "POST", "/actuate", req);
        CHECK(refused.status == 409);
        CHECK(refused.body["error"]["code"] == "precondition");
        CHECK(bodies.empty());

        call(*api, "POST", "/feedback", {{"insight_id", id}, {"option_id", "opt-pp-reschedule"}, {"verdict", "accepted"}, {"user", "u"}});
        const auto ok = call(*api, "POST", "/actuate", req);
        REQUIRE(ok.status == 200);
        CHECK(ok.body["status"] == 200);
        CHECK(ok.body["attempts"] == 1);
        REQUIRE(bodies.size() == 1);
        const Json event = Json::parse(bodies[0]);
        CHECK(event["insight"]["id"] == id);
        CHECK(event["option"]["id"] == "opt-pp-reschedule");
        CHECK(event.contains("timestamp"));

        reply = 500;
        bodies.clear();
        const auto failed = call(*api, "POST", "/actuate", req);
        CHECK(failed.status == 502);
        CHECK(failed.body["error"]["code"] == "service.delivery_failed");
        CHECK(failed.body["error"]["receipt"]["attempts"] == 3);
        CHECK(failed.body["error"]["receipt"]["status"] == 500);
        CHECK(bodies.size() == 3);
    }

    TEST_CASE("backoff doubles between attempts") {
        const GraphStore g = act::testing::pipeline_graph();
        auto copy = g;
        const auto& reg = onto::default_ontology();
        const auto ins = decide::list_insights(copy, reg).front();
        const auto opts = decide::match_options(copy, reg, ins);
        decide::record_feedback(copy, reg, {opts.front().uuid, ins.uuid, "u", decide::Verdict::accepted, "", Timestamp{0}});
        std::vector<std::chrono::steady_clock::time_point> at;
        const Transport t = [&](const std::string&, const std::string&) {
            at.push_back(std::chrono::steady_clock::now());
            return 0;
        };
        RetryPolicy p;
        p.max_attempts = 5;  // capped at three
        p.initial_backoff = std::chrono::milliseconds(20);
        const auto r = actuate(copy, reg, "http://x", ins.uuid, opts.front().uuid, t, p, Timestamp{0});
        CHECK_FALSE(r.delivered);
        CHECK(r.status == 0);
        REQUIRE(at.size() == 3);
        CHECK(at[1] - at[0] >= std::chrono::milliseconds(20));
        CHECK(at[2] - at[1] >= std::chrono::milliseconds(40));
    }

    TEST_CASE("mutations persist the snapshot") {
        TempDir dir("svc");
        ApiConfig c = seeded_config();
        c.snapshot = dir / "g.snap";
        Api api(GraphStore{}, c);
        const auto ing = call(api, "POST", "/ingest", Json::object());
        REQUIRE(ing.status == 200);
        CHECK(ing.body["nodes_created"].get<int>() > 0);
        REQUIRE(std::filesystem::exists(dir / "g.snap"));
        CHECK(GraphStore::load((dir / "g.snap").string()).canonical() == api.snapshot().canonical());
        const auto rs = call(api, "POST", "/reason");
        REQUIRE(rs.status == 200);
        CHECK(rs.body["created_per_rule"]["R1_WORKS_IN"].get<int>() > 0);
        const auto fc = call(api, "POST", "/forecast", {{"material", "m1"}, {"client", "c1"}, {"horizon", 3}});
        REQUIRE(fc.status == 200);
        CHECK(fc.body["forecasts"].size() == 3);
        CHECK(call(api, "POST", "/forecast", {{"material", "zz"}, {"client", "c1"}}).status == 404);
        CHECK(GraphStore::load((dir / "g.snap").string()).canonical() == api.snapshot().canonical());
        // RELATES_TO comes from the reasoner.
        CHECK(call(api, "GET", "/forecasts", nullptr, {{"use_case", "uc-df"}}).body.empty());
        call(api, "POST", "/reason");
        const auto uc = call(api, "GET", "/forecasts", nullptr, {{"use_case", "uc-df"}});
        CHECK(uc.body.size() == 3);
        CHECK(call(api, "GET", "/forecasts", nullptr, {{"use_case", "uc-zz"}}).status == 404);
    }

    TEST_CASE("http binding matches the in-process api") {
        auto api = pipeline_api();
        HttpServer server(*api);
        const int port = server.bind("127.0.0.1", 0);
        std::thread t([&] { server.listen(); });
        httplib::Client cli("127.0.0.1", port);
        for (int k = 0; k < 100 && !cli.Get("/api/v1/health"); ++k) std::this_thread::sleep_for(std::chrono::milliseconds(10));
        const auto h = cli.Get("/api/v1/insights");
        REQUIRE(h);
        CHECK(h->status == 200);
        CHECK(h->body == call(*api, "GET", "/insights").body.dump());
        const auto q = cli.Post("/api/v1/query", R"({"text":"MATCH (x RETURN x"})", "application/json");
        REQUIRE(q);
        CHECK(q->status == 400);
        CHECK(Json::parse(q->body)["error"]["code"] == "pql.syntax");
        const auto m = cli.Get("/api/v1/metrics?fraction=0.5&seed=2");
        REQUIRE(m);
        CHECK(m->body == call(*api, "GET", "/metrics", nullptr, {{"fraction", "0.5"}, {"seed", "2"}}).body.dump());

        // A real webhook receiver.
        httplib::Server hook;
        std::string received;
        hook.Post("/hook", [&](const httplib::Request& r, httplib::Response& res) {
            received = r.body;
            res.status = 200;
        });
        const int hport = hook.bind_to_any_port("127.0.0.1");
        std::thread ht([&] { hook.listen_after_bind(); });
        const Transport http = http_transport(std::chrono::seconds(2));
        CHECK(http("http://127.0.0.1:" + std::to_string(hport) + "/hook", "{}") == 200);
        CHECK(received == "{}");
        CHECK(http("http://127.0.0.1:1/none", "{}") == 0);
        hook.stop();
        ht.join();

        server.stop();
        t.join();
    }
}
