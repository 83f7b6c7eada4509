// Acceptance gate: one PASS/FAIL line per primary criterion. Exit status is
// the number of failed criteria.

#include "act/decisions.hpp"
#include "act/metrics.hpp"
#include "act/models.hpp"
#include "act/pql.hpp"
#include "act/reasoner.hpp"
#include "act/service.hpp"
#include "support/fixtures.hpp"
#include "support/metrics_oracle.hpp"
#include "support/model_fixtures.hpp"
#include "support/pql_oracle.hpp"
#include "support/seed.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace act;

namespace {

// Tolerances and limits.
constexpr double kQueriesSeconds = 5;
constexpr int kOracleCases = 500;
constexpr double kOracleSeconds = 60;
constexpr int kMetricGraphs = 20;
constexpr int kMetricMaxNodes = 200;
constexpr double kHandAplTol = 1e-9;
constexpr double kMetricsSeconds = 30;
constexpr int kSamplingNodes = 2000;
constexpr int kSamplingSeeds = 50;
constexpr double kSamplingFraction = 0.05;
constexpr double kSamplingRelTol = 0.05;
constexpr double kSamplingSeconds = 120;
constexpr double kReasonerSeconds = 10;
constexpr std::size_t kConvolutionTrials = 100000;
constexpr double kP50TolHours = 0.1;
constexpr double kSimulationSeconds = 30;
constexpr double kExactLineTol = 1e-9;
constexpr double kRidgeRelTol = 1e-8;
constexpr int kShrinkDatasets = 10;
constexpr double kRegressionSeconds = 10;
constexpr std::size_t kLoopTrials = 10000;
constexpr double kLoopSeconds = 120;

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            if (!ok) detail << "; ";
            detail << what;
            ok = false;
        }
    }
};

int failures = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    o.expect(secs < limit_seconds, "runtime " + std::to_string(secs) + "s over " + std::to_string(limit_seconds) + "s");
    if (!o.ok) ++failures;
    std::printf("%s %s (%.2fs)%s%s\n", o.ok ? "PASS" : "FAIL", name.c_str(), secs, o.ok ? "" : ": ",
                o.ok ? "" : o.detail.str().c_str());
    std::fflush(stdout);
}

std::string uuid_of(const GraphStore& g, NodeId id) {
    const PropertyValue* v = g.node(id).property("uuid");
    return v ? v->as_text() : std::string();
}

using Pairs = std::set<std::pair<std::string, std::string>>;

Pairs edges_of(const GraphStore& g, const std::string& relation) {
    Pairs out;
    for (const Edge& e : g.edges())
        if (e.relation == relation) out.emplace(uuid_of(g, e.src), uuid_of(g, e.dst));
    return out;
}

/// Copy of `g` without edges of the given relations.
GraphStore without(const GraphStore& g, const std::set<std::string>& relations) {
    GraphStore out;
    onto::default_ontology().install_indexes(out);
    for (const Node& n : g.nodes()) out.add_node(n.label, n.properties, n.provenance);
    for (const Edge& e : g.edges())
        if (!relations.count(e.relation)) out.add_edge(e.relation, e.src, e.dst, e.properties, e.provenance);
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

int main() {
    const auto& reg = onto::default_ontology();

    criterion("seven-query fixture", kQueriesSeconds, [&](Outcome& o) {
        const GraphStore g = act::testing::pipeline_graph();
        const auto t0 = Clock::now();
        const auto qs = act::testing::fixture_queries();
        o.expect(qs.size() == 7, "parsed " + std::to_string(qs.size()) + " queries");
        pql::EvalOptions opt;
        opt.registry = &reg;
        for (std::size_t i = 0; i < qs.size(); ++i) {
            const auto rs = pql::evaluate(qs[i], g, opt);
            o.expect(!rs.rows.empty(), "Q" + std::to_string(i + 1) + " returned no rows");
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        o.expect(secs < kQueriesSeconds, "queries took " + fmt(secs) + "s");
    });

    criterion("query oracle equivalence", kOracleSeconds, [&](Outcome& o) {
        int mismatches = 0, nonempty = 0;
        for (int seed = 0; seed < kOracleCases; ++seed) {
            std::mt19937_64 rng(static_cast<std::uint64_t>(seed) + 100000);
            const GraphStore g = act::testing::random_graph(rng);
            const pql::Query q = act::testing::random_query(rng);
            pql::EvalOptions opt;
            opt.default_max_hops = 3;
            const auto got = pql::evaluate(q, g, opt);
            const auto want = act::testing::BruteForce(q, g, 3).run();
            if (got.rows != want.rows || got.columns != want.columns) ++mismatches;
            nonempty += !want.rows.empty();
        }
        // Guard against a generator that only yields empty results.
        o.expect(nonempty >= kOracleCases / 4, "only " + std::to_string(nonempty) + " cases had rows");
        o.expect(mismatches == 0, std::to_string(mismatches) + " of " + std::to_string(kOracleCases) + " cases differ");
    });

    criterion("metrics oracle", kMetricsSeconds, [&](Outcome& o) {
        auto hand = [&](const std::vector<std::pair<int, int>>& edges, std::uint64_t tpl, std::uint64_t mpl,
                        double apl, const char* name) {
            GraphStore g;
            const ProvenanceTag tag{KnowledgeKind::definitional, "acceptance", Timestamp{0}};
            std::vector<NodeId> ids;
            for (int i = 0; i < 3; ++i) ids.push_back(g.add_node("N", {}, tag));
            for (auto [a, b] : edges) g.add_edge("E", ids[static_cast<std::size_t>(a)], ids[static_cast<std::size_t>(b)], {}, tag);
            const auto m = metrics::compute_metrics(g, 1.0, 0);
            o.expect(m.tpl == tpl && m.mpl == mpl && std::abs(m.apl - apl) <= kHandAplTol,
                     std::string(name) + " gave TPL " + std::to_string(m.tpl) + " MPL " + std::to_string(m.mpl) +
                         " APL " + fmt(m.apl));
        };
        hand({{0, 1}, {1, 2}, {2, 0}}, 6, 1, 1.0, "triangle");
        hand({{0, 1}, {1, 2}}, 8, 2, 4.0 / 3.0, "P3");
        std::mt19937_64 rng(2024);
        for (int k = 0; k < kMetricGraphs; ++k) {
            const int n = 2 + static_cast<int>(rng() % (kMetricMaxNodes - 1));
            const double degree = 0.5 + static_cast<double>(rng() % 400) / 100.0;
            const GraphStore g = act::testing::random_metric_graph(rng, n, degree);
            const auto want = act::testing::floyd_warshall(g);
            const auto got = metrics::compute_metrics(g, 1.0, static_cast<std::uint64_t>(k));
            o.expect(got.tpl == want.tpl && got.mpl == want.mpl && got.apl == want.apl(),
                     "graph " + std::to_string(k) + " (n=" + std::to_string(n) + ") differs");
        }
    });

    criterion("sampling estimator", kSamplingSeconds, [&](Outcome& o) {
        std::mt19937_64 rng(77);
        const GraphStore g = act::testing::random_metric_graph(rng, kSamplingNodes, 3.0);
        const auto exact = act::testing::bfs_totals(g);
        double sum = 0;
        int over = 0;
        for (int s = 0; s < kSamplingSeeds; ++s) {
            const auto m = metrics::compute_metrics(g, kSamplingFraction, static_cast<std::uint64_t>(s));
            sum += m.apl;
            over += m.mpl > exact.mpl;
        }
        const double mean = sum / kSamplingSeeds;
        const double rel = std::abs(mean - exact.apl()) / exact.apl();
        o.expect(rel <= kSamplingRelTol, "mean APL " + fmt(mean) + " vs exact " + fmt(exact.apl()) +
                                             " (rel " + fmt(rel) + ")");
        o.expect(over == 0, std::to_string(over) + " runs exceeded the exact MPL");
    });

    criterion("reasoner", kReasonerSeconds, [&](Outcome& o) {
        const GraphStore full = act::testing::pipeline_graph();
        const GraphStore base = without(full, {"WORKS_IN", "RELATES_TO"});
        // Enumeration oracle by adjacency walks on the base graph.
        Pairs works_in, relates_to;
        for (NodeId p : base.nodes_with_label("Person"))
            for (const auto& l : base.neighbors(p, Direction::out, "ASSIGNED_TO")) {
                if (l.node->label != "ProductionLine") continue;
                for (const auto& pl : base.neighbors(l.node->id, Direction::out, "BELONGS_TO"))
                    if (pl.node->label == "ProductionPlant") works_in.emplace(uuid_of(base, p), uuid_of(base, pl.node->id));
            }
        const auto model_list = reg.descendants("Model");
        const std::set<std::string> models(model_list.begin(), model_list.end());
        for (NodeId f : base.nodes_with_label("Forecast"))
            for (const auto& m : base.neighbors(f, Direction::out, "FORECASTED_FROM")) {
                if (!models.count(m.node->label)) continue;
                for (const auto& uc : base.neighbors(m.node->id, Direction::out, "CORRESPONDS_TO"))
                    if (uc.node->label == "UseCase") relates_to.emplace(uuid_of(base, f), uuid_of(base, uc.node->id));
            }
        auto rules = reason::default_rules();
        GraphStore a = base;
        reason::materialize_all(rules, a, reg);
        o.expect(edges_of(a, "WORKS_IN") == works_in,
                 "WORKS_IN " + std::to_string(edges_of(a, "WORKS_IN").size()) + " vs oracle " + std::to_string(works_in.size()));
        o.expect(edges_of(a, "RELATES_TO") == relates_to, "RELATES_TO " + std::to_string(edges_of(a, "RELATES_TO").size()) +
                                                             " vs oracle " + std::to_string(relates_to.size()));
        o.expect(!works_in.empty() && !relates_to.empty(), "oracle sets are empty");
        const auto second = reason::materialize_all(rules, a, reg);
        o.expect(second.total_created == 0, "second run created " + std::to_string(second.total_created));
        std::reverse(rules.begin(), rules.end());
        GraphStore b = base;
        reason::materialize_all(rules, b, reg);
        o.expect(edges_of(a, "WORKS_IN") == edges_of(b, "WORKS_IN") && edges_of(a, "RELATES_TO") == edges_of(b, "RELATES_TO"),
                 "rule order changed the edge set");
    });

    criterion("simulation", kSimulationSeconds, [&](Outcome& o) {
        using namespace act::testing;
        {
            Plant p;
            p.line("L");
            for (int i = 0; i < 3; ++i) p.history("L", {{"a", 2}, {"b", 2}, {"c", 2}});
            p.order("w", "L", at("2020-01-01T08:00:00Z"), at("2020-01-01T20:00:00Z"), {"a", "b", "c"});
            models::SimulationConfig cfg;
            cfg.n_trials = 1000;
            const auto fs = models::simulate_work_orders(p.g, p.reg, cfg);
            bool exact = fs.size() == 1;
            for (double q : {0.1, 0.5, 0.9}) exact = exact && fs[0].at(q) == at("2020-01-01T14:00:00Z");
            o.expect(exact, "zero-variance quantiles differ from 14:00");
        }
        std::vector<std::pair<double, double>> oracle;
        for (double x : {1.0, 3.0})
            for (double y : {1.0, 3.0}) oracle.emplace_back(x + y, 0.25);
        std::sort(oracle.begin(), oracle.end());
        Plant p = uniform_two_step();
        models::SimulationConfig cfg;
        cfg.n_trials = kConvolutionTrials;
        cfg.rng_seed = 11;
        const auto fs = models::simulate_work_orders(p.g, p.reg, cfg);
        const double p50 = static_cast<double>(fs.at(0).at(0.5).millis - at("2020-01-01T00:00:00Z").millis) / H;
        o.expect(std::abs(p50 - discrete_quantile(oracle, 0.5)) <= kP50TolHours,
                 "p50 " + fmt(p50) + "h vs oracle " + fmt(discrete_quantile(oracle, 0.5)) + "h");
        const auto again = models::simulate_work_orders(p.g, p.reg, cfg);
        o.expect(serialize(fs) == serialize(again), "same seed gave different forecasts");
    });

    criterion("regression", kRegressionSeconds, [&](Outcome& o) {
        using namespace act::testing;
        {
            models::Dataset d;
            for (int i = 0; i < 40; ++i) {
                d.x.push_back({static_cast<double>(i), std::sin(i * 0.7)});
                d.y.push_back(3.0 + 2.0 * i - 0.5 * std::sin(i * 0.7));
            }
            const auto fit = models::fit_regression(d, 0.0);
            o.expect(std::abs(fit.weights[0] - 2.0) <= kExactLineTol && std::abs(fit.weights[1] + 0.5) <= kExactLineTol &&
                         std::abs(fit.intercept - 3.0) <= kExactLineTol,
                     "exact line off: w=" + fmt(fit.weights[0]) + "," + fmt(fit.weights[1]) + " b=" + fmt(fit.intercept));
        }
        detail::Rng rng(31);
        double worst = 0;
        bool monotone = true;
        for (int k = 0; k < kShrinkDatasets; ++k) {
            const auto d = random_dataset(rng, 60, 5);
            for (double l2 : {0.01, 1.0, 25.0}) {
                const auto fit = models::fit_regression(d, l2);
                const Eigen::VectorXd ref = eigen_ridge(d, l2);
                double num = 0, den = 0;
                for (std::size_t j = 0; j < fit.weights.size(); ++j) {
                    num += std::pow(fit.weights[j] - ref(static_cast<Eigen::Index>(j)), 2);
                    den += std::pow(ref(static_cast<Eigen::Index>(j)), 2);
                }
                num += std::pow(fit.intercept - ref(static_cast<Eigen::Index>(fit.weights.size())), 2);
                den += std::pow(ref(static_cast<Eigen::Index>(fit.weights.size())), 2);
                worst = std::max(worst, std::sqrt(num / den));
            }
            double prev = 1e300;
            for (double l2 : {0.0, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
                const double w = norm(models::fit_regression(d, l2).weights);
                monotone = monotone && w <= prev + 1e-12;
                prev = w;
            }
        }
        o.expect(worst <= kRidgeRelTol, "ridge vs normal equations relative error " + fmt(worst));
        o.expect(monotone, "weight norm not monotone in l2");
    });

    // Shared by the loop and provenance checks.
    GraphStore loop_graph;
    criterion("actionable loop end-to-end", kLoopSeconds, [&](Outcome& o) {
        GraphStore g;
        reg.install_indexes(g);
        service::PipelineConfig cfg;
        cfg.data_dir = act::testing::seed_dir().path();
        cfg.trials = kLoopTrials;
        const auto run = service::run_pipeline(g, reg, cfg);
        const auto insights = decide::list_insights(g, reg);
        const decide::Insight* down = nullptr;
        bool spike = false;
        for (const auto& i : insights) {
            if (i.kind == decide::InsightKind::organizational_downtime && !down) down = &i;
            spike |= i.kind == decide::InsightKind::demand_spike;
        }
        o.expect(down != nullptr, "no organizational_downtime insight");
        o.expect(spike, "no demand_spike insight");
        if (!down) return;
        auto options = decide::match_options(g, reg, *down);
        std::set<std::string> ids;
        for (const auto& opt : options) ids.insert(opt.uuid);
        o.expect(ids.count("opt-pp-reschedule") && ids.count("opt-pp-extra-shift"),
                 "downtime options miss a catalog entry");
        for (int k = 0; k < 3; ++k) {
            decide::record_feedback(g, reg, {"opt-pp-reschedule", down->uuid, "planner", decide::Verdict::accepted, "", run.now});
            decide::record_feedback(g, reg, {"opt-pp-extra-shift", down->uuid, "planner", decide::Verdict::rejected, "", run.now});
        }
        const auto ranked = decide::rank_options(g, options, *down);
        double a = -1, b = -1;
        std::size_t ia = 0, ib = 0;
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            if (ranked[i].option.uuid == "opt-pp-reschedule") a = ranked[i].score, ia = i;
            if (ranked[i].option.uuid == "opt-pp-extra-shift") b = ranked[i].score, ib = i;
        }
        o.expect(std::abs(a - 0.8) < 1e-12 && std::abs(b - 0.2) < 1e-12, "scores " + fmt(a) + " / " + fmt(b));
        o.expect(ia < ib, "accepted option not ranked above the rejected one");
        const auto alt = decide::record_feedback(
            g, reg, {"", down->uuid, "planner", decide::Verdict::alternative, "Split the order across both lines", run.now});
        o.expect(alt.created_option && g.node(*alt.created_option).provenance.kind == KnowledgeKind::creative,
                 "alternative did not create a creative option node");
        loop_graph = std::move(g);
    });

    criterion("conformance and provenance", 60, [&](Outcome& o) {
        GraphStore g = loop_graph.node_count() ? loop_graph : act::testing::pipeline_graph();
        const auto rep = onto::conformance_report(g, reg);
        o.expect(rep.total_violations == 0, std::to_string(rep.total_violations) + " ontology violations");

        std::set<std::string> deductive_sources{"decisions:match"};
        for (const auto& r : reason::default_rules()) deductive_sources.insert(r.name);
        for (const char* h : {"heuristic:H1", "heuristic:H2", "heuristic:H3", "heuristic:H4"}) deductive_sources.insert(h);
        std::set<std::string> model_uuids;
        for (const auto& label : reg.descendants("Model"))
            for (NodeId id : g.nodes_with_label(label)) model_uuids.insert(uuid_of(g, id));

        std::size_t bad_kind = 0, bad_deductive = 0, bad_inductive = 0, bad_creative = 0, total = 0;
        auto check = [&](const ProvenanceTag& p, bool alt_option) {
            ++total;
            if (!knowledge_kind_from_string(to_string(p.kind)) || p.source.empty()) ++bad_kind;
            switch (p.kind) {
                case KnowledgeKind::deductive: bad_deductive += !deductive_sources.count(p.source); break;
                case KnowledgeKind::inductive:
                    bad_inductive += p.source.rfind("models:", 0) != 0 && !model_uuids.count(p.source);
                    break;
                case KnowledgeKind::creative: bad_creative += !(alt_option && p.source.rfind("user:", 0) == 0); break;
                case KnowledgeKind::definitional: break;
            }
        };
        for (const Node& n : g.nodes())
            check(n.provenance, n.label == "DecisionMakingOption" && uuid_of(g, n.id).rfind("opt-alt-", 0) == 0);
        for (const Edge& e : g.edges())
            check(e.provenance, e.relation == "SUGGESTS_ACTION_FOR" && uuid_of(g, e.src).rfind("opt-alt-", 0) == 0);
        o.expect(bad_kind == 0, std::to_string(bad_kind) + " of " + std::to_string(total) + " entities lack a valid tag");
        o.expect(bad_deductive == 0, std::to_string(bad_deductive) + " deductive writes outside rules and heuristics");
        o.expect(bad_inductive == 0, std::to_string(bad_inductive) + " inductive writes outside model loading");
        o.expect(bad_creative == 0, std::to_string(bad_creative) + " creative writes outside alternative feedback");
    });

    criterion("snapshot round-trip", 60, [&](Outcome& o) {
        const GraphStore g = loop_graph.node_count() ? loop_graph : act::testing::pipeline_graph();
        const std::string first = g.canonical();
        std::istringstream in(first);
        const auto idx = reg.index_declarations();
        const GraphStore back = GraphStore::read_canonical(in, idx);
        const std::string second = back.canonical();
        o.expect(first == second, "canonical text changed after a round trip");
        o.expect(back.node_count() == g.node_count() && back.edge_count() == g.edge_count(), "counts changed");
        act::testing::TempDir dir("acceptance");
        back.save((dir / "g.snap").string());
        o.expect(GraphStore::load((dir / "g.snap").string(), idx).canonical() == first, "file round trip differs");
    });

    return failures;
}
