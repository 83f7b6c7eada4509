#include "act/decisions.hpp"
#include "act/detail/rng.hpp"
#include "act/error.hpp"
#include "act/ingest.hpp"
#include "act/pql.hpp"
#include "support/seed.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>

using namespace act;
using namespace act::decide;
using act::testing::pipeline_graph;
using act::testing::seed_dir;

namespace {

const onto::OntologyRegistry& reg() { return onto::default_ontology(); }

std::vector<Insight> of_kind(const std::vector<Insight>& all, InsightKind k) {
    std::vector<Insight> out;
    for (const auto& i : all)
        if (i.kind == k) out.push_back(i);
    return out;
}

std::set<std::string> uuids(const std::vector<Option>& os) {
    std::set<std::string> out;
    for (const auto& o : os) out.insert(o.uuid);
    return out;
}

bool has_ref(const Insight& i, const std::string& label, const std::string& uuid) {
    return std::any_of(i.refs.begin(), i.refs.end(),
                       [&](const InsightRef& r) { return r.label == label && r.uuid == uuid; });
}

/// Catalog rows straight from the generated CSV.
std::vector<std::vector<std::string>> catalog_rows() {
    std::ifstream in(seed_dir() / "decision_option_catalog.csv");
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : ingest::read_csv(in).rows) rows.push_back(r.cells);
    return rows;
}

std::set<std::string> catalog_lookup(const std::string& kind, const std::string& use_case) {
    std::set<std::string> out;
    for (const auto& r : catalog_rows())
        if ((r[2] == kind || r[2].find(kind + "|") == 0 || r[2].find("|" + kind) != std::string::npos) &&
            r[3] == use_case)
            out.insert(r[0]);
    return out;
}

FeedbackRecord fb(const std::string& option, const std::string& insight, Verdict v,
                  const std::string& user = "u1", const std::string& text = "") {
    return {option, insight, user, v, text, Timestamp{1000}};
}

}  // namespace

TEST_SUITE("decisions") {
    TEST_CASE("no forecasts, no insights") {
        GraphStore g;
        reg().install_indexes(g);
        ingest::bootstrap(g, reg());
        const auto rep = detect_insights(g, reg(), ingest::scenario_now());
        CHECK(rep.insights.empty());
        CHECK(rep.created == 0);
        CHECK(list_insights(g, reg()).empty());
    }

    TEST_CASE("scripted short-staffed shift yields one downtime insight") {
        GraphStore g = pipeline_graph();
        const auto all = detect_insights(g, reg(), ingest::scenario_now()).insights;
        const auto down = of_kind(all, InsightKind::organizational_downtime);
        REQUIRE(down.size() == 1);
        const Insight& i = down.front();
        // p90 16:00 against a 14:00 shift end: 2h / 8h.
        CHECK(i.severity == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(i.date == ingest::scenario_now());
        CHECK(i.heuristic == "H1");
        CHECK(has_ref(i, "Shift", ingest::ScenarioAnchors::downtime_shift));
        CHECK(has_ref(i, "ProductionLine", ingest::ScenarioAnchors::primary_line));
        CHECK(has_ref(i, "WorkOrder", ingest::ScenarioAnchors::downtime_order));
        const Node& f = g.node(i.forecast.node);
        CHECK(f.label == "Forecast");
        CHECK(g.neighbors(f.id, Direction::out, "FORECAST_FOR").front().node->property("uuid")->as_text() ==
              ingest::ScenarioAnchors::downtime_order);
        CHECK(g.node(i.id).provenance.kind == KnowledgeKind::deductive);
        CHECK(g.node(i.id).provenance.source == "heuristic:H1");

        const auto opts = match_options(g, reg(), i);
        CHECK(uuids(opts) == catalog_lookup("organizational_downtime", "uc-pp"));
        CHECK(uuids(opts).count("opt-pp-reschedule"));
        CHECK(uuids(opts).count("opt-pp-extra-shift"));
        for (const auto& r : rank_options(g, opts, i)) {
            CHECK(r.filled_description.find('{') == std::string::npos);
            if (r.option.uuid == "opt-pp-reschedule") {
                CHECK(r.filled_description.find(ingest::ScenarioAnchors::downtime_order) != std::string::npos);
                CHECK(r.filled_description.find(ingest::ScenarioAnchors::downtime_shift) != std::string::npos);
            }
        }
    }

    TEST_CASE("staffing the shift removes the downtime") {
        GraphStore g = pipeline_graph();
        const NodeId shift = *ingest::find_entity(g, reg(), "Shift", ingest::ScenarioAnchors::downtime_shift);
        const NodeId p = ingest::upsert_node(g, "Person", "extra", {}, {KnowledgeKind::definitional, "t", Timestamp{0}}).id;
        ingest::ensure_edge(g, "ASSIGNED_TO", p, shift, {KnowledgeKind::definitional, "t", Timestamp{0}});
        const auto all = detect_insights(g, reg(), ingest::scenario_now()).insights;
        CHECK(of_kind(all, InsightKind::organizational_downtime).empty());
    }

    TEST_CASE("demand spike severity follows the trailing-mean ratio") {
        GraphStore g = pipeline_graph();
        const Timestamp now = ingest::scenario_now();
        const auto spikes = of_kind(detect_insights(g, reg(), now).insights, InsightKind::demand_spike);
        REQUIRE_FALSE(spikes.empty());
        // Trailing mean recomputed from the generated CSV.
        std::ifstream in(seed_dir() / "shipping_order.csv");
        const auto rows = ingest::read_csv(in).rows;
        const std::int64_t today = day_index(now);
        bool m1c1 = false;
        for (const auto& s : spikes) {
            CHECK(has_ref(s, "Client", "c1"));
            std::string mat;
            for (const auto& r : s.refs)
                if (r.label == "Material") mat = r.uuid;
            double sum = 0;
            for (const auto& r : rows) {
                const std::int64_t d = day_index(*parse_timestamp(r.cells[4]));
                if (r.cells[1] == mat && r.cells[2] == "c1" && d >= today - 28 && d < today) sum += std::stod(r.cells[3]);
            }
            const double value = g.node(s.forecast.node).property("value")->as_real();
            const double ratio = value / (sum / 28);
            CHECK(ratio >= 2.0);
            CHECK(s.severity == doctest::Approx(std::min(1.0, (ratio - 2) / 2)).epsilon(1e-9));
            m1c1 |= mat == "m1";
            const auto opts = match_options(g, reg(), s);
            CHECK(uuids(opts) == catalog_lookup("demand_spike", "uc-df"));
        }
        CHECK(m1c1);
    }

    TEST_CASE("stockout options come from the catalog") {
        GraphStore g = pipeline_graph();
        const auto so = of_kind(detect_insights(g, reg(), ingest::scenario_now()).insights, InsightKind::stockout_risk);
        REQUIRE(so.size() == 1);
        CHECK(has_ref(so[0], "Material", "m1"));
        CHECK(so[0].severity > 0);
        CHECK(so[0].severity <= 1);
        const auto opts = match_options(g, reg(), so[0]);
        CHECK(uuids(opts) == std::set<std::string>{"opt-df-add-wo", "opt-df-raise-stock"});
        CHECK(uuids(opts) == catalog_lookup("stockout_risk", "uc-df"));
    }

    TEST_CASE("stale models are reported once per model") {
        GraphStore g = pipeline_graph();
        const auto stale = of_kind(detect_insights(g, reg(), ingest::scenario_now()).insights, InsightKind::stale_model);
        CHECK_FALSE(stale.empty());
        std::set<std::string> models;
        for (const auto& s : stale) {
            CHECK(s.severity == 0.5);
            REQUIRE(s.refs.size() == 1);
            CHECK(models.insert(s.refs[0].uuid).second);
            CHECK(g.node(s.refs[0].node).property("stale")->as_bool());
            CHECK(uuids(match_options(g, reg(), s)).count("opt-df-retrain"));
        }
    }

    TEST_CASE("detection is idempotent") {
        GraphStore g = pipeline_graph();
        const std::size_t nodes = g.node_count(), edges = g.edge_count();
        const auto a = detect_insights(g, reg(), ingest::scenario_now());
        const auto b = detect_insights(g, reg(), ingest::scenario_now());
        CHECK(a.created == 0);
        CHECK(b.edges_created == 0);
        CHECK(g.node_count() == nodes);
        CHECK(g.edge_count() == edges);
        REQUIRE(a.insights.size() == b.insights.size());
        for (std::size_t i = 0; i < a.insights.size(); ++i) CHECK(a.insights[i].uuid == b.insights[i].uuid);
        CHECK(list_insights(g, reg()).size() == a.insights.size());
        for (std::size_t i = 1; i < a.insights.size(); ++i)
            CHECK(a.insights[i - 1].severity >= a.insights[i].severity);
    }

    TEST_CASE("every insight is reachable from its use case") {
        const GraphStore g = pipeline_graph();
        pql::EvalOptions opt;
        opt.registry = &reg();
        const auto rs = pql::evaluate(
            pql::parse("MATCH (i:Insight)-[:DESCRIBES_EVENT_IN]->(f:Forecast)-[:RELATES_TO]->(uc:UseCase) "
                       "RETURN DISTINCT i"),
            g, opt);
        CHECK(rs.rows.size() == list_insights(g, reg()).size());
        for (const auto& i : list_insights(g, reg())) CHECK(insight_use_case(g, i).has_value());
    }

    TEST_CASE("options rank by smoothed acceptance") {
        GraphStore g = pipeline_graph();
        const auto down = of_kind(list_insights(g, reg()), InsightKind::organizational_downtime).front();
        auto opts = match_options(g, reg(), down);
        auto ranked = rank_options(g, opts, down);
        for (const auto& r : ranked) CHECK(r.score == 0.5);
        for (std::size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].option.uuid < ranked[i].option.uuid);

        record_feedback(g, reg(), fb("opt-pp-reschedule", down.uuid, Verdict::accepted));
        ranked = rank_options(g, opts, down);
        CHECK(ranked.front().option.uuid == "opt-pp-reschedule");
        CHECK(ranked.front().score == doctest::Approx(2.0 / 3.0));

        for (int k = 0; k < 2; ++k) record_feedback(g, reg(), fb("opt-pp-reschedule", down.uuid, Verdict::accepted));
        for (int k = 0; k < 3; ++k) record_feedback(g, reg(), fb("opt-pp-extra-shift", down.uuid, Verdict::rejected));
        ranked = rank_options(g, opts, down);
        REQUIRE(ranked.size() >= 2);
        CHECK(ranked.front().option.uuid == "opt-pp-reschedule");
        CHECK(ranked.front().score == doctest::Approx(0.8));
        CHECK(ranked.back().option.uuid == "opt-pp-extra-shift");
        CHECK(ranked.back().score == doctest::Approx(0.2));
        CHECK(ranked.front().counts.accepted == 3);
        CHECK(ranked.back().counts.rejected == 3);
        const NodeId opt = *ingest::find_entity(g, reg(), "DecisionMakingOption", "opt-pp-reschedule");
        CHECK(was_accepted(g, opt, down.id));
        const NodeId other = *ingest::find_entity(g, reg(), "DecisionMakingOption", "opt-pp-extra-shift");
        CHECK_FALSE(was_accepted(g, other, down.id));
    }

    TEST_CASE("score properties over random feedback tables") {
        detail::Rng rng(17);
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<FeedbackCounts> table(6);
            for (auto& c : table) {
                c.accepted = rng.below(20);
                c.rejected = rng.below(20);
            }
            for (const auto& c : table) {
                const double s = laplace_score(c);
                CHECK(s > 0);
                CHECK(s < 1);
                FeedbackCounts up = c, down = c;
                ++up.accepted;
                ++down.rejected;
                CHECK(laplace_score(up) >= s);
                CHECK(laplace_score(down) <= s);
            }
            // Equal accept bumps keep every pair in order whenever the
            // leader has no more rejects than the follower.
            const std::size_t extra = 1 + rng.below(10);
            for (const auto& a : table)
                for (const auto& b : table) {
                    if (laplace_score(a) < laplace_score(b) || a.rejected > b.rejected) continue;
                    FeedbackCounts a2 = a, b2 = b;
                    a2.accepted += extra;
                    b2.accepted += extra;
                    CHECK(laplace_score(a2) >= laplace_score(b2));
                }
        }
    }

    TEST_CASE("equal accept bumps can reorder options with more rejects") {
        // 40/10 leads 2/0 before ten extra accepts each and trails after.
        const FeedbackCounts busy{40, 10, 0}, fresh{2, 0, 0};
        CHECK(laplace_score(busy) > laplace_score(fresh));
        CHECK(laplace_score({50, 10, 0}) < laplace_score({12, 0, 0}));
    }

    TEST_CASE("alternative feedback creates a creative option") {
        GraphStore g = pipeline_graph();
        const auto down = of_kind(list_insights(g, reg()), InsightKind::organizational_downtime).front();
        const auto res = record_feedback(g, reg(), fb("", down.uuid, Verdict::alternative, "u2", "re-route to line 2"));
        REQUIRE(res.created_option.has_value());
        const Node& o = g.node(*res.created_option);
        CHECK(o.provenance.kind == KnowledgeKind::creative);
        CHECK(o.provenance.source == "user:u2");
        CHECK(o.property("description")->as_text() == "re-route to line 2");
        CHECK(o.property("applicable_kinds")->as_text() == "organizational_downtime");
        CHECK(res.option_uuid.rfind("opt-alt-", 0) == 0);
        const auto opts = match_options(g, reg(), down);
        CHECK(uuids(opts).count(res.option_uuid));
        const auto ranked = rank_options(g, opts, down);
        const auto alt = std::find_if(ranked.begin(), ranked.end(),
                                      [&](const RankedOption& r) { return r.option.uuid == res.option_uuid; });
        REQUIRE(alt != ranked.end());
        CHECK(alt->option.knowledge_kind == KnowledgeKind::creative);
        CHECK(alt->score == 0.5);
        CHECK(onto::conformance_report(g, reg()).total_violations == 0);

        // The same proposal again reuses the node.
        const auto again = record_feedback(g, reg(), fb("", down.uuid, Verdict::alternative, "u3", "re-route to line 2"));
        CHECK_FALSE(again.created_option.has_value());
        CHECK(again.option_uuid == res.option_uuid);

        // Creative provenance appears only on the alternative's node and edge.
        std::size_t creative = 0;
        for (const Node& n : g.nodes()) creative += n.provenance.kind == KnowledgeKind::creative;
        for (const Edge& e : g.edges()) creative += e.provenance.kind == KnowledgeKind::creative;
        CHECK(creative == 2);
    }

    TEST_CASE("feedback validation") {
        GraphStore g = pipeline_graph();
        const auto down = of_kind(list_insights(g, reg()), InsightKind::organizational_downtime).front();
        CHECK_THROWS_AS(record_feedback(g, reg(), fb("opt-nope", down.uuid, Verdict::rejected)), NotFound);
        CHECK_THROWS_AS(record_feedback(g, reg(), fb("opt-pp-reschedule", "ins-nope", Verdict::accepted)), NotFound);
        CHECK_THROWS_AS(record_feedback(g, reg(), fb("", down.uuid, Verdict::alternative, "u", "  ")), InvalidArgument);
        CHECK_THROWS_AS(record_feedback(g, reg(), fb("opt-pp-reschedule", down.uuid, Verdict::accepted, "")), InvalidArgument);
        const auto r = record_feedback(g, reg(), fb("opt-pp-reschedule", down.uuid, Verdict::accepted));
        const Edge& e = g.edge(r.feedback_edge);
        CHECK(e.relation == "FEEDBACK_ON");
        CHECK(e.properties.at("verdict").as_text() == "accepted");
        CHECK(e.properties.at("user").as_text() == "u1");
        CHECK(e.provenance.kind == KnowledgeKind::definitional);
        CHECK(verdict_from_string("alternative") == Verdict::alternative);
        CHECK_FALSE(verdict_from_string("maybe").has_value());
    }

    TEST_CASE("kinds without catalog entries match nothing") {
        GraphStore g = pipeline_graph();
        const auto down = of_kind(list_insights(g, reg()), InsightKind::organizational_downtime).front();
        // A fresh insight node of a kind the uc-pp catalog does not cover.
        Insight probe = down;
        probe.kind = InsightKind::stockout_risk;
        probe.id = ingest::upsert_node(g, "Insight", "ins-probe", {}, {KnowledgeKind::deductive, "t", Timestamp{0}}).id;
        ingest::ensure_edge(g, "DESCRIBES_EVENT_IN", probe.id, down.forecast.node,
                            {KnowledgeKind::deductive, "t", Timestamp{0}});
        CHECK(match_options(g, reg(), probe).empty());
        CHECK(fill_template("x {unknown} {line}", down) ==
              "x {unknown} " + std::string(ingest::ScenarioAnchors::primary_line));
    }

    TEST_CASE("candidate options are read-only") {
        GraphStore g = pipeline_graph();
        const auto so = of_kind(list_insights(g, reg()), InsightKind::stockout_risk).front();
        const std::size_t edges = g.edge_count();
        const auto c = candidate_options(g, reg(), so);
        CHECK(g.edge_count() == edges);
        CHECK(uuids(c) == uuids(match_options(g, reg(), so)));
    }
}
