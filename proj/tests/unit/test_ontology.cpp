#include "act/error.hpp"
#include "act/ontology.hpp"

#include <doctest.h>

#include <sstream>

using namespace act;
using namespace act::onto;

namespace {
ProvenanceTag def() { return {KnowledgeKind::definitional, "test", Timestamp{0}}; }

Node make_node(std::string label, PropertyMap props = {}) {
    Node n;
    n.id = NodeId{1};
    n.label = std::move(label);
    n.properties = std::move(props);
    n.provenance = def();
    return n;
}
}  // namespace

TEST_SUITE("ontology") {
    TEST_CASE("default registry contents") {
        const auto& reg = default_ontology();
        CHECK(reg.classes().size() == 31);
        CHECK(reg.relations().size() >= 22);
        for (const char* name :
             {"Shift", "ManufacturingProcess", "DataSource", "FeatureVector",
              "DecisionMakingOption", "UseCase", "Forecast", "Model", "SimulationModel",
              "RegressionModel", "DatasetSpecification", "Dataset", "Algorithm",
              "RegressionAlgorithm", "InformationProvenance", "TimeSeries", "WorkOrder",
              "StockOrder", "ShippingOrder", "StockLocation", "Artifact", "ManufacturedBatch",
              "Material", "Person", "Client", "ShopFloor", "ProductionLine", "ProductionPlant",
              "Organization", "Insight", "Analysis"})
            CHECK_MESSAGE(reg.find_class(name), name);
        REQUIRE(reg.find_class("Forecast"));
        CHECK(reg.find_class("Forecast")->definition == "Prediction of a future value.");
        CHECK(reg.find_class("Shift")->definition ==
              "The time period during which a person is at work.");
        CHECK(reg.lineage("ManufacturingProcess") == Lineage::occurrent);
        CHECK(reg.lineage("Person") == Lineage::continuant);
        for (const char* rel : {"FORECASTED_FROM", "CORRESPONDS_TO", "EXECUTED_ON",
                                "SUGGESTS_ACTION_FOR", "DESCRIBES_EVENT_IN"}) {
            REQUIRE(reg.find_relation(rel));
            CHECK_FALSE(reg.find_relation(rel)->invented);
        }
        CHECK(reg.find_relation("WORKS_IN")->deductive_only);
        CHECK(reg.find_relation("RELATES_TO")->deductive_only);
        CHECK(reg.find_relation("BELONGS_TO")->invented);
    }

    TEST_CASE("closed under reference") {
        const auto& reg = default_ontology();
        for (const auto& [name, rel] : reg.relations()) {
            for (const auto& c : rel.domain) CHECK(reg.find_class(c));
            for (const auto& c : rel.range) CHECK(reg.find_class(c));
        }
        OntologyRegistry r;
        r.add_class({"A", Lineage::continuant, "a", {}, {}, false});
        CHECK_THROWS_AS(r.add_class({"A", Lineage::continuant, "a", {}, {}, false}),
                        InvalidArgument);
        CHECK_THROWS_AS(r.add_relation({"R", {"A"}, {"B"}, Cardinality::many_to_many, false, false}),
                        InvalidArgument);
    }

    TEST_CASE("subclass closure") {
        const auto& reg = default_ontology();
        CHECK(reg.is_a("SimulationModel", "Model"));
        CHECK(reg.is_a("RegressionModel", "Model"));
        CHECK(reg.is_a("RegressionAlgorithm", "Algorithm"));
        CHECK_FALSE(reg.is_a("Model", "SimulationModel"));
        auto d = reg.descendants("Model");
        CHECK(d.size() == 3);
    }

    TEST_CASE("validate_node") {
        const auto& reg = default_ontology();
        const auto ts = PropertyValue(Timestamp{0});
        CHECK(validate_node(make_node("Shift", {{"uuid", Identifier{"s"}}, {"start_ts", ts},
                                                {"end_ts", ts}}),
                            reg)
                  .empty());
        auto missing =
            validate_node(make_node("Shift", {{"uuid", Identifier{"s"}}, {"start_ts", ts}}), reg);
        REQUIRE(missing.size() == 1);
        CHECK(missing[0].kind == ViolationKind::missing_required_property);
        CHECK(missing[0].detail == "end_ts");
        auto wizard = validate_node(make_node("Wizard"), reg);
        REQUIRE(wizard.size() == 1);
        CHECK(wizard[0].kind == ViolationKind::unknown_class);
        auto wrong = validate_node(
            make_node("Shift", {{"uuid", Identifier{"s"}}, {"start_ts", "noon"}, {"end_ts", ts}}),
            reg);
        REQUIRE(wrong.size() == 1);
        CHECK(wrong[0].kind == ViolationKind::wrong_property_kind);
        // Subclasses inherit the parent's key.
        auto sim = validate_node(make_node("SimulationModel"), reg);
        REQUIRE(sim.size() == 1);
        CHECK(sim[0].detail == "uuid");
    }

    TEST_CASE("validate_edge") {
        const auto& reg = default_ontology();
        Edge e;
        e.relation = "FORECASTED_FROM";
        CHECK(validate_edge(e, make_node("Forecast"), make_node("SimulationModel"), reg).empty());
        auto bad = validate_edge(e, make_node("Person"), make_node("Model"), reg);
        REQUIRE(bad.size() == 1);
        CHECK(bad[0].kind == ViolationKind::domain_violation);
        e.relation = "CORRESPONDS_TO";
        CHECK(validate_edge(e, make_node("Model"), make_node("UseCase"), reg).empty());
        CHECK(validate_edge(e, make_node("RegressionModel"), make_node("Person"), reg)[0].kind ==
              ViolationKind::range_violation);
        e.relation = "NOPE";
        CHECK(validate_edge(e, make_node("Model"), make_node("UseCase"), reg)[0].kind ==
              ViolationKind::unknown_relation);
    }

    TEST_CASE("validate_edge is label-monotone") {
        OntologyRegistry r = register_default_ontology();
        Edge e;
        e.relation = "CORRESPONDS_TO";
        r.add_class({"Gadget", Lineage::continuant, "unrelated", {}, {}, true});
        CHECK(validate_edge(e, make_node("Model"), make_node("UseCase"), r).empty());
    }

    TEST_CASE("conformance report") {
        const auto& reg = default_ontology();
        GraphStore g;
        CHECK(conformance_report(g, reg).total_violations == 0);
        const NodeId f = g.add_node("Forecast",
                                    {{"uuid", Identifier{"f"}},
                                     {"kind", "demand"},
                                     {"issued_at", Timestamp{0}}},
                                    def());
        const NodeId m = g.add_node("RegressionModel", {{"uuid", Identifier{"m"}}}, def());
        g.add_edge("FORECASTED_FROM", f, m, {}, def());
        CHECK(conformance_report(g, reg).total_violations == 0);
        g.add_edge("CORRESPONDS_TO", f, m, {}, def());
        auto rep = conformance_report(g, reg);
        CHECK(rep.total_violations == 2);  // wrong domain and wrong range
        CHECK(rep.per_relation["CORRESPONDS_TO"] == 2);
        g.add_edge("FORECASTED_FROM", f, m, {}, def());
        rep = conformance_report(g, reg);
        CHECK(rep.total_warnings == 1);
        CHECK(rep.total_violations == 2);
    }

    TEST_CASE("schema export") {
        std::ostringstream os;
        default_ontology().write_schema(os);
        const std::string s = os.str();
        CHECK(s.find("class Forecast [continuant]: Prediction of a future value.") !=
              std::string::npos);
        CHECK(std::count(s.begin(), s.end(), '\n') ==
              static_cast<long>(default_ontology().classes().size() +
                                default_ontology().relations().size()));
    }
}
