#include "act/error.hpp"
#include "act/ingest.hpp"
#include "support/tempdir.hpp"

#include <doctest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace act;
using namespace act::ingest;
using act::testing::TempDir;

namespace {

void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Graph with the bootstrap entities, one plant, line "L1" and material "M1".
GraphStore base_graph(const TempDir& dir) {
    const auto& reg = onto::default_ontology();
    GraphStore g;
    reg.install_indexes(g);
    bootstrap(g, reg);
    write(dir / "organization.csv", "uuid,name\norg,Org\n");
    write(dir / "plant.csv", "uuid,name,organization_uuid\npl,Plant,org\n");
    write(dir / "production_line.csv", "uuid,name,plant_uuid\nL1,Line,pl\n");
    write(dir / "material.csv", "uuid,name,stock_on_hand,stock_location_uuid\nM1,Mat,5,\n");
    for (const char* kind : {"organization", "plant", "production_line", "material"}) {
        auto r = ingest_file(dir / (std::string(kind) + ".csv"), kind, g, reg);
        REQUIRE(r.rejects.empty());
    }
    return g;
}

std::size_t count_label(const GraphStore& g, std::string_view label) {
    return g.nodes_with_label(label).size();
}

}  // namespace

TEST_SUITE("ingest") {
    TEST_CASE("csv reader handles quoting and line numbers") {
        std::istringstream in("a,b\n1,\"x,y\"\n\n2,\"multi\nline\"\n3,\"say \"\"hi\"\"\"\r\n");
        const CsvTable t = read_csv(in);
        CHECK(t.header == std::vector<std::string>{"a", "b"});
        REQUIRE(t.rows.size() == 3);
        CHECK(t.rows[0].line == 2);
        CHECK(t.rows[0].cells[1] == "x,y");
        CHECK(t.rows[1].line == 4);
        CHECK(t.rows[1].cells[1] == "multi\nline");
        CHECK(t.rows[2].line == 6);
        CHECK(t.rows[2].cells[1] == "say \"hi\"");
        CHECK(csv_escape("plain") == "plain");
        CHECK(csv_escape("a,\"b\"") == "\"a,\"\"b\"\"\"");

        std::istringstream bad("a\n\"open\n");
        CHECK(read_csv(bad).malformed.size() == 1);
    }

    TEST_CASE("builtin mapping covers every record kind") {
        const auto& mt = MappingTable::builtin();
        const std::vector<std::string> kinds = {
            "organization", "plant", "shop_floor", "production_line", "person",
            "shift", "stock_location", "material", "client", "work_order",
            "stock_order", "shipping_order", "timeseries_point", "decision_option_catalog"};
        CHECK(mt.kinds.size() == kinds.size());
        for (const auto& k : kinds) CHECK(mt.find(k) != nullptr);
        CHECK(mt.header("work_order") ==
              "uuid,material_uuid,line_uuid,qty,release_ts,due_ts,status,step_processes,"
              "batch_durations_h");
        CHECK_THROWS_AS(mt.header("nope"), NotFound);
    }

    TEST_CASE("one work order row expands into process nodes and edges") {
        TempDir dir("wo");
        GraphStore g = base_graph(dir);
        const auto& reg = onto::default_ontology();
        write(dir / "work_order.csv",
              MappingTable::builtin().header("work_order") +
                  "\nW1,M1,L1,10,,2019-10-02T14:00:00Z,,,\n");
        auto r = ingest_file(dir / "work_order.csv", "work_order", g, reg);
        CHECK(r.rejects.empty());
        // WorkOrder + one default ManufacturingProcess step.
        CHECK(r.nodes_created == 2);
        // OF_MATERIAL, SCHEDULED_ON, EXECUTES
        CHECK(r.edges_created == 3);
        const NodeId wo = *g.find_by_key("WorkOrder", "uuid", Identifier{"W1"});
        CHECK(g.neighbors(wo, Direction::out, "EXECUTES").size() == 1);
        CHECK(g.neighbors(wo, Direction::out, "OF_MATERIAL").size() == 1);
        CHECK(g.node(wo).provenance.kind == KnowledgeKind::definitional);
        CHECK(g.node(wo).provenance.source == (dir / "work_order.csv").string());

        auto again = ingest_file(dir / "work_order.csv", "work_order", g, reg);
        CHECK(again.nodes_created == 0);
        CHECK(again.edges_created == 0);
        CHECK(again.nodes_updated == 0);
    }

    TEST_CASE("historical batches carry durations and material") {
        TempDir dir("batch");
        GraphStore g = base_graph(dir);
        write(dir / "work_order.csv",
              MappingTable::builtin().header("work_order") +
                  "\nW2,M1,L1,10,2019-09-01T06:00:00Z,2019-09-02T06:00:00Z,completed,"
                  "mixing|packing,2.5|3\n");
        auto r = ingest_file(dir / "work_order.csv", "work_order", g, onto::default_ontology());
        REQUIRE(r.rejects.empty());
        CHECK(r.nodes_created == 5);
        CHECK(count_label(g, "ManufacturedBatch") == 2);
        const NodeId b = *g.find_by_key("ManufacturedBatch", "uuid", Identifier{"W2-b2"});
        CHECK(g.node(b).property("duration_h")->as_real() == 3.0);
        CHECK(g.node(b).property("process_type")->as_text() == "packing");
        CHECK(g.neighbors(b, Direction::out, "OF_MATERIAL").size() == 1);

        write(dir / "bad.csv", MappingTable::builtin().header("work_order") +
                                   "\nW3,M1,L1,1,,2019-09-02T06:00:00Z,,mixing|packing,2\n");
        auto bad = ingest_file(dir / "bad.csv", "work_order", g, onto::default_ontology());
        CHECK(bad.rejects.size() == 1);
    }

    TEST_CASE("row-level rejects keep the rest of the file") {
        TempDir dir("rej");
        GraphStore g = base_graph(dir);
        const auto& reg = onto::default_ontology();
        write(dir / "so.csv",
              "uuid,material_uuid,qty,due_ts\n"
              "S1,M1,5,2019-10-01T00:00:00Z\n"
              "S2,M1,5,2019-13-01\n"
              "S3,MX,5,2019-10-01\n"
              "S4,M1,5\n"
              ",M1,5,2019-10-01\n"
              "S5,M1,5,2019-10-03\n");
        auto r = ingest_file(dir / "so.csv", "stock_order", g, reg);
        CHECK(r.nodes_created == 2);
        REQUIRE(r.rejects.size() == 4);
        CHECK(r.rejects[0].line == 3);
        CHECK(r.rejects[0].reason.find("due_ts") != std::string::npos);
        CHECK(r.rejects[1].line == 4);
        CHECK(r.rejects[1].reason.find("unknown Material 'MX'") != std::string::npos);
        CHECK(r.rejects[2].line == 5);
        CHECK(r.rejects[3].line == 6);
    }

    TEST_CASE("header mismatch rejects every row") {
        TempDir dir("hdr");
        GraphStore g = base_graph(dir);
        write(dir / "c.csv", "uuid,title\nc1,x\nc2,y\n");
        auto r = ingest_file(dir / "c.csv", "client", g, onto::default_ontology());
        CHECK(r.nodes_created == 0);
        REQUIRE(r.rejects.size() == 3);
        CHECK(r.rejects[0].line == 1);
    }

    TEST_CASE("shift crews link persons to the shift") {
        TempDir dir("shift");
        GraphStore g = base_graph(dir);
        const auto& reg = onto::default_ontology();
        write(dir / "person.csv", "uuid,name,line_uuid\np1,A,L1\np2,B,L1\n");
        REQUIRE(ingest_file(dir / "person.csv", "person", g, reg).rejects.empty());
        write(dir / "shift.csv",
              "uuid,line_uuid,start_ts,end_ts,required_headcount,person_uuids\n"
              "sh1,L1,2019-10-02T06:00:00Z,2019-10-02T14:00:00Z,3,p1|p2\n"
              "sh2,L1,2019-10-02T14:00:00Z,2019-10-02T22:00:00Z,1,p9\n");
        auto r = ingest_file(dir / "shift.csv", "shift", g, reg);
        CHECK(r.nodes_created == 1);
        CHECK(r.rejects.size() == 1);
        const NodeId sh = *g.find_by_key("Shift", "uuid", Identifier{"sh1"});
        CHECK(g.neighbors(sh, Direction::in, "ASSIGNED_TO").size() == 2);
        CHECK(g.neighbors(sh, Direction::out, "EXECUTED_ON").size() == 1);
    }

    TEST_CASE("upsert updates changed properties") {
        TempDir dir("upd");
        GraphStore g = base_graph(dir);
        write(dir / "material.csv", "uuid,name,stock_on_hand,stock_location_uuid\nM1,Mat,7,\n");
        auto r = ingest_file(dir / "material.csv", "material", g, onto::default_ontology());
        CHECK(r.nodes_created == 0);
        CHECK(r.nodes_updated == 1);
        const NodeId m = *g.find_by_key("Material", "uuid", Identifier{"M1"});
        CHECK(g.node(m).property("stock_on_hand")->as_real() == 7.0);
    }

    TEST_CASE("mapping tables are data") {
        const MappingTable custom = MappingTable::from_json(R"({"kinds": [
            {"kind": "artifact", "label": "Artifact",
             "columns": [{"name": "uuid", "property": "uuid", "kind": "id", "required": true},
                         {"name": "name", "property": "name"}]}]})");
        TempDir dir("custom");
        write(dir / "artifact.csv", "uuid,name\na1,Jig\n");
        GraphStore g;
        onto::default_ontology().install_indexes(g);
        auto r = ingest_file(dir / "artifact.csv", "artifact", g, onto::default_ontology(), custom);
        CHECK(r.nodes_created == 1);
        CHECK_THROWS_AS(MappingTable::from_json("{\"kinds\": [{}]}"), InvalidArgument);
    }

    TEST_CASE("load_forecasts") {
        TempDir dir("fc");
        GraphStore g = base_graph(dir);
        const auto& reg = onto::default_ontology();
        write(dir / "work_order.csv", MappingTable::builtin().header("work_order") +
                                          "\nW1,M1,L1,10,,2019-10-02T14:00:00Z,,,\n");
        ingest_file(dir / "work_order.csv", "work_order", g, reg);
        const Timestamp at = *parse_timestamp("2019-10-01T13:00:00Z");
        auto m = load_inductive(g, reg, "sim-1", {{"SimulationModel", "sim-1", {{"trained_at", at}}}},
                                {{"CORRESPONDS_TO", "sim-1", "Model", "uc-pp", "UseCase"}}, at);
        REQUIRE(m.rejects.empty());

        CHECK_FALSE(load_forecasts({}, g, reg, at).changed());

        ForecastRecord f;
        f.uuid = "fc-1";
        f.model_uuid = "sim-1";
        f.properties = {{"kind", "simulation"}, {"issued_at", at}, {"p90", 2.0}};
        f.target_uuids = {"W1"};
        auto r = load_forecasts({f}, g, reg, at);
        CHECK(r.rejects.empty());
        CHECK(r.nodes_created == 1);
        CHECK(r.edges_created == 2);
        const NodeId fid = *g.find_by_key("Forecast", "uuid", Identifier{"fc-1"});
        const auto models = g.neighbors(fid, Direction::out, "FORECASTED_FROM");
        REQUIRE(models.size() == 1);
        CHECK(models[0].node->label == "SimulationModel");
        CHECK(g.node(fid).provenance.kind == KnowledgeKind::inductive);
        CHECK(g.node(fid).provenance.source == "sim-1");
        CHECK_FALSE(load_forecasts({f}, g, reg, at).changed());

        ForecastRecord ghost = f;
        ghost.uuid = "fc-2";
        ghost.model_uuid = "nope";
        auto bad = load_forecasts({ghost}, g, reg, at);
        CHECK(bad.rejects.size() == 1);
        CHECK(bad.nodes_created == 0);
    }

    TEST_CASE("scenario generation is deterministic") {
        TempDir a("gen-a"), b("gen-b");
        ScenarioSpec spec;
        auto fa = generate_scenario(spec, a.path());
        auto fb = generate_scenario(spec, b.path());
        REQUIRE(fa.size() == fb.size());
        for (std::size_t i = 0; i < fa.size(); ++i) {
            CAPTURE(fa[i]);
            CHECK(slurp(fa[i]) == slurp(fb[i]));
        }
        ScenarioSpec other = spec;
        other.seed = 7;
        TempDir c("gen-c");
        generate_scenario(other, c.path());
        CHECK(slurp(a / "shipping_order.csv") != slurp(c / "shipping_order.csv"));
        CHECK_THROWS_AS([] {
            ScenarioSpec bad;
            bad.n_lines = 0;
            bad.validate();
        }(), InvalidArgument);
    }

    TEST_CASE("small scenario emits one shipping order per day at rate 1") {
        TempDir dir("small");
        ScenarioSpec spec;
        spec.n_lines = 1;
        spec.n_persons = 2;
        spec.n_materials = 1;
        spec.n_clients = 1;
        spec.horizon_days = 30;
        spec.daily_order_rate = 1;
        generate_scenario(spec, dir.path());
        std::ifstream in(dir / "shipping_order.csv");
        const CsvTable t = read_csv(in);
        CHECK(t.rows.size() == 30);

        GraphStore g;
        const auto& reg = onto::default_ontology();
        reg.install_indexes(g);
        for (const auto& r : ingest_directory(dir.path(), g, reg)) {
            CAPTURE(r.source);
            CHECK(r.rejects.empty());
        }
        CHECK(onto::conformance_report(g, reg).total_violations == 0);
    }

    TEST_CASE("seed scenario ingests cleanly and idempotently") {
        TempDir dir("seed");
        generate_scenario(ScenarioSpec{}, dir.path());
        const auto& reg = onto::default_ontology();
        GraphStore g;
        reg.install_indexes(g);
        for (const auto& r : ingest_directory(dir.path(), g, reg)) {
            CAPTURE(r.source);
            CHECK(r.rejects.empty());
        }
        const auto report = onto::conformance_report(g, reg);
        CHECK(report.total_violations == 0);
        CHECK(report.total_warnings == 0);

        // Foreign-key columns each produced an edge to an existing node.
        CHECK(count_label(g, "ShippingOrder") > 0);
        for (NodeId so : g.nodes_with_label("ShippingOrder")) {
            CHECK(g.neighbors(so, Direction::out, "OF_MATERIAL").size() == 1);
            CHECK(g.neighbors(so, Direction::out, "SHIPS_TO").size() == 1);
        }
        for (NodeId wo : g.nodes_with_label("WorkOrder")) {
            CHECK(g.neighbors(wo, Direction::out, "SCHEDULED_ON").size() == 1);
            CHECK_FALSE(g.neighbors(wo, Direction::out, "EXECUTES").empty());
        }
        for (const Node& n : g.nodes()) CHECK(n.provenance.kind == KnowledgeKind::definitional);

        const std::string before = g.canonical();
        for (const auto& r : ingest_directory(dir.path(), g, reg)) CHECK_FALSE(r.changed());
        CHECK(g.canonical() == before);

        // The scripted shift is short of one person.
        const NodeId sh =
            *g.find_by_key("Shift", "uuid", Identifier{ScenarioAnchors::downtime_shift});
        const auto crew = g.neighbors(sh, Direction::in, "ASSIGNED_TO");
        CHECK(g.node(sh).property("required_headcount")->as_int() ==
              static_cast<std::int64_t>(crew.size()) + 1);
        const auto line = g.neighbors(sh, Direction::out, "EXECUTED_ON");
        REQUIRE(line.size() == 1);
        CHECK(line[0].node->property("uuid")->as_text() == ScenarioAnchors::primary_line);
        CHECK(g.find_by_key("ProductionLine", "uuid", Identifier{"0a1e"}));
    }

    TEST_CASE("seed shipping history triples for the first client over the last week") {
        TempDir dir("spike");
        generate_scenario(ScenarioSpec{}, dir.path());
        std::ifstream in(dir / "shipping_order.csv");
        const CsvTable t = read_csv(in);
        std::map<std::string, double> c1, c2;
        for (const auto& row : t.rows) {
            const std::string day = row.cells[4].substr(0, 10);
            (row.cells[2] == "c1" ? c1 : c2)[day] += std::stod(row.cells[3]);
        }
        REQUIRE(c1.size() == 127);
        auto mean = [](const std::map<std::string, double>& m, std::size_t from, std::size_t to) {
            double s = 0;
            std::size_t i = 0;
            for (const auto& [d, v] : m) {
                if (i >= from && i < to) s += v;
                ++i;
            }
            return s / static_cast<double>(to - from);
        };
        const double before = mean(c1, 120 - 28, 120);
        const double spike = mean(c1, 120, 127);
        CHECK(spike / before > 2.4);
        CHECK(spike / before < 3.6);
        CHECK(mean(c2, 120, 127) / mean(c2, 92, 120) < 1.5);
        // Earlier promotion weeks eight and sixteen weeks before.
        for (std::size_t from : {64u, 8u}) CHECK(mean(c1, from, from + 7) / before > 2.4);
        CHECK(mean(c1, 71, 120) / before < 1.3);
    }
}
