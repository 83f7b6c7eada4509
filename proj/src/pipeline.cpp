#include "act/service.hpp"

#include "act/ingest.hpp"
#include "act/models.hpp"
#include "act/reasoner.hpp"

#include <chrono>
#include <fstream>

namespace act::service {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Timestamp parse_ts(const Json& j, const char* what) {
    if (!j.is_string()) throw InvalidArgument(std::string(what) + " must be an ISO timestamp");
    auto t = parse_timestamp(j.get<std::string>());
    if (!t) throw InvalidArgument(std::string("bad timestamp for ") + what + ": " + j.get<std::string>());
    return *t;
}

void add(StepRecord& s, const ingest::IngestReport& r) {
    s.counts["rows"] += static_cast<std::int64_t>(r.rows);
    s.counts["nodes_created"] += static_cast<std::int64_t>(r.nodes_created);
    s.counts["nodes_updated"] += static_cast<std::int64_t>(r.nodes_updated);
    s.counts["edges_created"] += static_cast<std::int64_t>(r.edges_created);
    s.counts["rejects"] += static_cast<std::int64_t>(r.rejects.size());
}

}  // namespace

PipelineConfig resolve(PipelineConfig c) {
    Json manifest = Json::object();
    const auto path = c.data_dir / "scenario.json";
    if (!c.data_dir.empty() && std::filesystem::exists(path)) {
        std::ifstream in(path);
        try {
            manifest = Json::parse(in);
        } catch (const Json::exception& e) {
            throw InvalidArgument("scenario.json: " + std::string(e.what()));
        }
    }
    if (!c.now) c.now = manifest.contains("now") ? parse_ts(manifest["now"], "now") : Timestamp::now();
    if (!c.trials) c.trials = manifest.value("simulation_trials", std::size_t{10000});
    if (!c.lag_count) c.lag_count = manifest.value("lag_count", 7);
    if (!c.horizon_days) c.horizon_days = manifest.value("forecast_horizon", 7);
    if (!c.runs) {
        std::vector<ModelRun> runs;
        if (manifest.contains("runs"))
            for (const auto& r : manifest["runs"])
                runs.push_back({r.value("name", std::string("run")), parse_ts(r.at("as_of"), "as_of"),
                                r.value("simulate", true)});
        else
            runs.push_back({"main", *c.now, true});
        std::stable_sort(runs.begin(), runs.end(),
                         [](const ModelRun& a, const ModelRun& b) { return a.as_of < b.as_of; });
        c.runs = runs;
    }
    return c;
}

Json PipelineRun::to_json() const {
    Json steps_j = Json::array();
    for (const auto& s : steps) {
        Json counts = Json::object();
        for (const auto& [k, v] : s.counts) counts[k] = v;
        steps_j.push_back({{"name", s.name}, {"seconds", s.seconds}, {"counts", counts}});
    }
    return {{"id", id},   {"now", format_timestamp(now)}, {"steps", steps_j},
            {"forecasts", forecasts}, {"insights", insights}, {"created", created}};
}

PipelineRun run_pipeline(GraphStore& g, const onto::OntologyRegistry& reg, const PipelineConfig& raw) {
    PipelineRun run;
    PipelineConfig cfg;
    const auto progress = [&](const std::string& step, double f) {
        if (raw.progress) raw.progress(step, f);
    };
    const auto step = [&](const std::string& name, auto&& body) {
        progress(name, 0);
        StepRecord rec;
        rec.name = name;
        const auto t0 = Clock::now();
        try {
            body(rec);
        } catch (const PipelineError&) {
            throw;
        } catch (const Error& e) {
            throw PipelineError(name, e);
        } catch (const std::exception& e) {
            throw PipelineError(name, e.what());
        }
        rec.seconds = since(t0);
        run.steps.push_back(std::move(rec));
        progress(name, 1);
    };

    step("ingest", [&](StepRecord& rec) {
        if (raw.data_dir.empty() || !std::filesystem::is_directory(raw.data_dir))
            throw NotFound("data directory '" + raw.data_dir.string() + "' does not exist");
        cfg = resolve(raw);
        run.now = *cfg.now;
        run.id = "pipeline-" + models::simulation_model_uuid(run.now).substr(10);
        const auto reports = ingest::ingest_directory(cfg.data_dir, g, reg);
        rec.counts["files"] = static_cast<std::int64_t>(reports.size());
        for (const auto& r : reports) add(rec, r);
    });

    step("reason", [&](StepRecord& rec) {
        const auto m = reason::materialize_all(reason::default_rules(), g, reg, run.now);
        rec.counts["rounds"] = static_cast<std::int64_t>(m.rounds);
        rec.counts["edges_created"] = static_cast<std::int64_t>(m.total_created);
        rec.counts["stale_flags_changed"] =
            static_cast<std::int64_t>(reason::refresh_stale_flags(g, reg, run.now, cfg.max_model_age));
    });

    step("models", [&](StepRecord& rec) {
        const auto pairs = models::demand_pairs(g, reg);
        std::size_t done = 0;
        for (const auto& mr : *cfg.runs) {
            for (const auto& [mat, client] : pairs) {
                models::DemandJob job{mat, client, *cfg.lag_count, *cfg.horizon_days, cfg.l2, mr.as_of};
                try {
                    const auto dr = models::run_demand_forecast(g, reg, job);
                    add(rec, dr.report);
                    rec.counts["demand_forecasts"] += static_cast<std::int64_t>(dr.forecasts.size());
                    run.forecasts += dr.forecasts.size();
                } catch (const models::DatasetTooSmall&) {
                    ++rec.counts["skipped_pairs"];
                }
            }
            if (mr.simulate) {
                models::SimulationConfig sc;
                sc.n_trials = *cfg.trials;
                sc.rng_seed = cfg.seed;
                sc.start = mr.as_of;
                sc.issued_at = mr.as_of;
                auto fs = models::simulate_work_orders(g, reg, sc);
                add(rec, models::persist_simulation(g, reg, fs, sc));
                rec.counts["simulated_orders"] += static_cast<std::int64_t>(fs.size());
                run.forecasts += fs.size();
            }
            ++rec.counts["runs"];
            progress("models", static_cast<double>(++done) / static_cast<double>(cfg.runs->size()));
        }
    });

    step("insights", [&](StepRecord& rec) {
        // New forecasts need their deductive links and staleness before the
        // heuristics look at them.
        const auto m = reason::materialize_all(reason::default_rules(), g, reg, run.now);
        rec.counts["deduced_edges"] = static_cast<std::int64_t>(m.total_created);
        rec.counts["stale_flags_changed"] =
            static_cast<std::int64_t>(reason::refresh_stale_flags(g, reg, run.now, cfg.max_model_age));
        const std::size_t before = g.edge_count();
        const auto report = decide::detect_insights(g, reg, run.now, cfg.heuristics);
        for (const auto& ins : report.insights) decide::match_options(g, reg, ins);
        rec.counts["insights"] = static_cast<std::int64_t>(report.insights.size());
        rec.counts["insights_created"] = static_cast<std::int64_t>(report.created);
        rec.counts["edges_created"] = static_cast<std::int64_t>(g.edge_count() - before);
        for (const auto& ins : report.insights) ++rec.counts["kind." + std::string(decide::to_string(ins.kind))];
        run.insights = report.insights.size();
    });

    for (const auto& s : run.steps)
        for (const char* k : {"nodes_created", "edges_created", "insights_created", "deduced_edges"}) {
            auto it = s.counts.find(k);
            if (it != s.counts.end()) run.created += static_cast<std::size_t>(it->second);
        }
    return run;
}

}  // namespace act::service
