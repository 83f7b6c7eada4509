#include "act/ontology.hpp"

#include "act/error.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_map>

namespace act::onto {

std::string_view to_string(Lineage l) {
    return l == Lineage::continuant ? "continuant" : "occurrent";
}

std::string_view to_string(Cardinality c) {
    switch (c) {
        case Cardinality::one_to_one: return "one-to-one";
        case Cardinality::one_to_many: return "one-to-many";
        case Cardinality::many_to_many: return "many-to-many";
    }
    return "many-to-many";
}

std::string_view to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::unknown_class: return "UnknownClass";
        case ViolationKind::missing_required_property: return "MissingRequiredProperty";
        case ViolationKind::wrong_property_kind: return "WrongPropertyKind";
        case ViolationKind::unknown_relation: return "UnknownRelation";
        case ViolationKind::domain_violation: return "DomainViolation";
        case ViolationKind::range_violation: return "RangeViolation";
        case ViolationKind::cardinality_warning: return "CardinalityWarning";
    }
    return "Unknown";
}

void OntologyRegistry::add_class(ClassDef def) {
    if (def.name.empty()) throw InvalidArgument("class name must be non-empty");
    if (classes_.contains(def.name)) throw InvalidArgument("duplicate class " + def.name);
    if (def.parent && !classes_.contains(*def.parent))
        throw InvalidArgument("class " + def.name + " has unregistered parent " + *def.parent);
    std::set<std::string> seen;
    for (const auto& p : def.properties)
        if (!seen.insert(p.name).second)
            throw InvalidArgument("duplicate property " + p.name + " on " + def.name);
    const std::string name = def.name;
    classes_.emplace(name, std::move(def));
}

void OntologyRegistry::add_relation(RelationDef def) {
    if (def.name.empty()) throw InvalidArgument("relation name must be non-empty");
    if (relations_.contains(def.name)) throw InvalidArgument("duplicate relation " + def.name);
    if (def.domain.empty() || def.range.empty())
        throw InvalidArgument("relation " + def.name + " needs a non-empty domain and range");
    for (const auto* side : {&def.domain, &def.range})
        for (const auto& c : *side)
            if (!classes_.contains(c))
                throw InvalidArgument("relation " + def.name + " references unregistered class " +
                                      c);
    const std::string name = def.name;
    relations_.emplace(name, std::move(def));
}

const ClassDef* OntologyRegistry::find_class(std::string_view name) const {
    auto it = classes_.find(name);
    return it == classes_.end() ? nullptr : &it->second;
}

const RelationDef* OntologyRegistry::find_relation(std::string_view name) const {
    auto it = relations_.find(name);
    return it == relations_.end() ? nullptr : &it->second;
}

bool OntologyRegistry::is_a(std::string_view label, std::string_view ancestor) const {
    const ClassDef* c = find_class(label);
    if (!c) return label == ancestor;
    while (c) {
        if (c->name == ancestor) return true;
        c = c->parent ? find_class(*c->parent) : nullptr;
    }
    return false;
}

std::vector<std::string> OntologyRegistry::descendants(std::string_view label) const {
    std::vector<std::string> out;
    for (const auto& [name, def] : classes_)
        if (is_a(name, label)) out.push_back(name);
    if (out.empty()) out.emplace_back(label);
    return out;
}

Lineage OntologyRegistry::lineage(std::string_view class_name) const {
    const ClassDef* c = find_class(class_name);
    if (!c) throw NotFound("class " + std::string(class_name));
    return c->lineage;
}

std::vector<GraphStore::IndexDecl> OntologyRegistry::index_declarations() const {
    std::vector<GraphStore::IndexDecl> out;
    for (const auto& [name, def] : classes_) {
        for (const ClassDef* c = &def; c; c = c->parent ? find_class(*c->parent) : nullptr)
            for (const auto& p : c->properties)
                if (p.unique) out.push_back({name, p.name, true});
    }
    return out;
}

void OntologyRegistry::install_indexes(GraphStore& g) const {
    for (const auto& d : index_declarations()) g.declare_index(d.label, d.property, d.unique);
}

void OntologyRegistry::write_schema(std::ostream& os) const {
    for (const auto& [name, c] : classes_) {
        os << "class " << name << " [" << to_string(c.lineage) << "]";
        if (c.parent) os << " is-a " << *c.parent;
        if (c.invented) os << " (invented)";
        os << ": " << c.definition;
        if (!c.properties.empty()) {
            os << " {";
            bool first = true;
            for (const auto& p : c.properties) {
                os << (first ? "" : ", ") << p.name << ":" << to_string(p.kind)
                   << (p.required ? "!" : "") << (p.unique ? " unique" : "");
                first = false;
            }
            os << "}";
        }
        os << '\n';
    }
    for (const auto& [name, r] : relations_) {
        auto join = [](const std::set<std::string>& s) {
            std::string out;
            for (const auto& x : s) out += (out.empty() ? "" : "|") + x;
            return out;
        };
        os << "relation " << name << " (" << join(r.domain) << ") -> (" << join(r.range) << ") "
           << to_string(r.cardinality);
        if (r.invented) os << " (invented)";
        if (r.deductive_only) os << " (deductive-only)";
        os << '\n';
    }
}

namespace {

PropertySpec req(std::string name, ValueKind kind) { return {std::move(name), kind, true, false}; }
PropertySpec opt(std::string name, ValueKind kind) { return {std::move(name), kind, false, false}; }
PropertySpec natural_key() { return {"uuid", ValueKind::identifier, true, true}; }

struct ClassRow {
    const char* name;
    Lineage lineage;
    const char* parent;
    const char* definition;
    std::vector<PropertySpec> props;
    bool invented;
};

struct RelationRow {
    const char* name;
    std::vector<std::string> domain;
    std::vector<std::string> range;
    Cardinality cardinality;
    bool invented;
    bool deductive_only;
};

}  // namespace

OntologyRegistry register_default_ontology() {
    using enum ValueKind;
    const auto C = Lineage::continuant;
    const auto O = Lineage::occurrent;
    const std::vector<ClassRow> classes = {
        {"Shift", O, nullptr, "The time period during which a person is at work.",
         {req("start_ts", timestamp), req("end_ts", timestamp), opt("required_headcount", integer)},
         false},
        {"ManufacturingProcess", O, nullptr,
         "Process in which materials are changed, converted, or transformed into a different "
         "state or form from which they previously existed and includes refining materials, "
         "assembling parts, and preparing raw materials and parts by mixing, measuring, "
         "blending, or otherwise committing such materials or parts to the manufacturing "
         "process.",
         {req("process_type", text), opt("step_index", integer)}, false},
        {"DataSource", C, nullptr,
         "A data source is anything that produces digital information, from the perspective of "
         "systems which consume this information.",
         {opt("name", text)}, false},
        {"FeatureVector", C, nullptr,
         "Individual measurable property or characteristic of a phenomenon being observed.",
         {opt("features", text), opt("as_of", timestamp)}, false},
        {"DecisionMakingOption", C, nullptr,
         "Different alternatives or solutions under consideration when making a decision.",
         {req("description", text), req("applicable_kinds", text), opt("use_case", identifier)},
         false},
        {"UseCase", C, nullptr,
         "A list of actions or event steps typically defining the interactions between a role "
         "and a system to achieve a goal.",
         {req("description", text)}, false},
        {"Forecast", C, nullptr, "Prediction of a future value.",
         {req("kind", text), req("issued_at", timestamp), opt("target_date", timestamp),
          opt("value", real)},
         false},
        {"Model", C, nullptr,
         "A simplified representation of a system at some particular point in time or space "
         "intended to promote understanding of the real system.",
         {opt("trained_at", timestamp), opt("target_date", timestamp), opt("stale", boolean)},
         false},
        {"SimulationModel", C, "Model",
         "A model that behaves or operates like a given system when provided a set of "
         "controlled inputs.",
         {}, false},
        {"RegressionModel", C, "Model",
         "A model that summarises relationships between an array of continuous input variables, "
         "and a continuous output variable.",
         {}, false},
        {"DatasetSpecification", C, nullptr,
         "Is a data item specification about a dataset defined with a data type specification "
         "of the data examples aggregated in the dataset.",
         {opt("lag_count", integer), opt("horizon_days", integer)}, false},
        {"Dataset", C, nullptr, "A collection of data.", {opt("rows", integer)}, false},
        {"Algorithm", C, nullptr,
         "A finite sequence of well-defined, computer-implementable instructions, to solve a "
         "class of problems or to perform a computation.",
         {opt("name", text)}, false},
        {"RegressionAlgorithm", C, "Algorithm",
         "Regression algorithms predict the output values based on input features from the data "
         "fed in the system.",
         {}, false},
        {"InformationProvenance", C, nullptr,
         "The place of origin or earliest known history of certain data.", {opt("name", text)},
         false},
        {"TimeSeries", C, nullptr,
         "A series of data points indexed (or listed or graphed) in time order.",
         {opt("ts", timestamp), opt("value", real)}, false},
        {"WorkOrder", C, nullptr,
         "A task or a job for a customer, that can be scheduled or assigned to someone.",
         {req("due_ts", timestamp), opt("release_ts", timestamp), opt("qty", real),
          opt("status", text)},
         false},
        {"StockOrder", C, nullptr,
         "The ordering of new stock to refill the inventory, replenish shelves, or when a large "
         "order has been made etc.",
         {req("due_ts", timestamp), req("qty", real)}, false},
        {"ShippingOrder", C, nullptr,
         "A copy of the bill of lading containing the shipper's instructions to the carrier for "
         "transmission of goods.",
         {req("due_ts", timestamp), req("qty", real)}, false},
        {"StockLocation", C, nullptr, "The area in the warehouse where the stock item is stored.",
         {opt("name", text)}, false},
        {"Artifact", C, nullptr,
         "A general term for an item made or given shape by humans, such as a tool or a work of "
         "art, especially an object of archaeological interest.",
         {opt("name", text)}, false},
        {"ManufacturedBatch", C, nullptr,
         "A group of identical or similar items that are produced together, and which go "
         "through a stage of the production process before moving onto the next one to make the "
         "desired product.",
         {opt("process_type", text), opt("duration_h", real)}, false},
        {"Material", C, nullptr,
         "An independent continuant that at all times at which it exists has some portion of "
         "matter as continuant part.",
         {opt("name", text), opt("stock_on_hand", real)}, false},
        {"Person", C, nullptr, "Is a member of the species Homo sapiens.", {opt("name", text)},
         false},
        {"Client", C, nullptr, "A company that receives a service from them in return for payment.",
         {opt("name", text)}, false},
        {"ShopFloor", C, nullptr,
         "The part of a workshop or factory where production as distinct from administrative "
         "work is carried out.",
         {opt("name", text)}, false},
        {"ProductionLine", C, nullptr,
         "Is an artifact aggregate enabling a set of sequential operations established in a "
         "plant site where components are assembled to make a finished article or where "
         "materials are put through a refining process to produce an end-product that is "
         "suitable for onward consumption.",
         {opt("name", text)}, false},
        {"ProductionPlant", C, nullptr,
         "An Artifact that is consisting of buildings and machinery, or more commonly a complex "
         "having several buildings, where workers manufacture goods or operate machines "
         "processing one product into another.",
         {opt("name", text)}, false},
        {"Organization", C, nullptr,
         "An object aggregate that corresponds to social institutions such as companies, or "
         "societies, that does something.",
         {opt("name", text)}, false},
        {"Insight", C, nullptr,
         "A detected, dated and severity-scored condition derived from forecasts.",
         {req("kind", text), req("date", timestamp), req("severity", real), opt("narrative", text)},
         false},
        {"Analysis", O, nullptr,
         "Outcome of heuristics informing whether the production goals are met.", {}, false},
    };

    const auto M2M = Cardinality::many_to_many;
    const auto O2M = Cardinality::one_to_many;
    const auto O2O = Cardinality::one_to_one;
    const std::vector<RelationRow> relations = {
        {"FORECASTED_FROM", {"Forecast"}, {"Model"}, O2M, false, false},
        {"CORRESPONDS_TO", {"Model"}, {"UseCase"}, M2M, false, false},
        {"EXECUTED_ON", {"Shift"}, {"ProductionLine"}, O2M, false, false},
        {"SUGGESTS_ACTION_FOR", {"DecisionMakingOption"}, {"Insight"}, M2M, false, false},
        {"DESCRIBES_EVENT_IN", {"Insight"}, {"Forecast"}, O2M, false, false},
        {"BELONGS_TO", {"ProductionLine"}, {"ProductionPlant"}, O2M, true, false},
        {"PART_OF", {"ProductionPlant", "ShopFloor"}, {"Organization", "ProductionPlant"}, O2M,
         true, false},
        {"ASSIGNED_TO", {"Person"}, {"Shift", "ProductionLine"}, M2M, true, false},
        {"EXECUTES", {"WorkOrder"}, {"ManufacturingProcess"}, M2M, true, false},
        {"PRODUCES", {"WorkOrder"}, {"ManufacturedBatch"}, M2M, true, false},
        {"OF_MATERIAL", {"ManufacturedBatch", "ShippingOrder", "StockOrder", "WorkOrder"},
         {"Material"}, O2M, true, false},
        {"STORED_AT", {"Material"}, {"StockLocation"}, M2M, true, false},
        {"SHIPS_TO", {"ShippingOrder"}, {"Client"}, O2M, true, false},
        {"SPECIFIED_BY", {"Dataset"}, {"DatasetSpecification"}, O2M, true, false},
        {"SOURCED_FROM", {"DatasetSpecification"}, {"InformationProvenance"}, M2M, true, false},
        {"TRAINED_ON", {"RegressionModel"}, {"Dataset"}, O2M, true, false},
        {"USES_ALGORITHM", {"RegressionModel"}, {"RegressionAlgorithm"}, O2M, true, false},
        {"INPUT_OF", {"FeatureVector"}, {"Forecast"}, O2O, true, false},
        {"OBSERVED_AT", {"TimeSeries"}, {"DataSource"}, O2M, true, false},
        {"WORKS_IN", {"Person"}, {"ProductionPlant"}, M2M, true, true},
        {"RELATES_TO", {"Forecast"}, {"UseCase"}, M2M, true, true},
        {"SCHEDULED_ON", {"WorkOrder"}, {"ProductionLine"}, O2M, true, false},
        {"FORECAST_FOR", {"Forecast"}, {"WorkOrder", "Material", "Client"}, M2M, true, false},
        {"CONCERNS",
         {"Insight"},
         {"ProductionLine", "Shift", "Material", "Client", "WorkOrder", "Model"},
         M2M, true, false},
        {"FEEDBACK_ON", {"DecisionMakingOption"}, {"Insight"}, M2M, true, false},
    };

    OntologyRegistry reg;
    for (const auto& row : classes) {
        ClassDef def;
        def.name = row.name;
        def.lineage = row.lineage;
        def.definition = row.definition;
        if (row.parent) def.parent = row.parent;
        // Subclasses inherit uuid from their parent.
        if (!row.parent) def.properties.push_back(natural_key());
        for (const auto& p : row.props) def.properties.push_back(p);
        def.invented = row.invented;
        reg.add_class(std::move(def));
    }
    for (const auto& row : relations) {
        RelationDef def;
        def.name = row.name;
        def.domain = {row.domain.begin(), row.domain.end()};
        def.range = {row.range.begin(), row.range.end()};
        def.cardinality = row.cardinality;
        def.invented = row.invented;
        def.deductive_only = row.deductive_only;
        reg.add_relation(std::move(def));
    }
    return reg;
}

const OntologyRegistry& default_ontology() {
    static const OntologyRegistry reg = register_default_ontology();
    return reg;
}

std::vector<Violation> validate_node(const Node& node, const OntologyRegistry& registry) {
    std::vector<Violation> out;
    const ClassDef* cls = registry.find_class(node.label);
    if (!cls) {
        out.push_back({ViolationKind::unknown_class, node.label, {}});
        return out;
    }
    for (const ClassDef* c = cls; c; c = c->parent ? registry.find_class(*c->parent) : nullptr) {
        for (const auto& spec : c->properties) {
            const PropertyValue* v = node.property(spec.name);
            if (!v) {
                if (spec.required)
                    out.push_back({ViolationKind::missing_required_property, node.label, spec.name});
                continue;
            }
            const bool ok = v->kind() == spec.kind ||
                            (spec.kind == ValueKind::real && v->kind() == ValueKind::integer) ||
                            (spec.kind == ValueKind::identifier && v->kind() == ValueKind::text);
            if (!ok) out.push_back({ViolationKind::wrong_property_kind, node.label, spec.name});
        }
    }
    return out;
}

std::vector<Violation> validate_edge(const Edge& edge, const Node& src, const Node& dst,
                                     const OntologyRegistry& registry) {
    std::vector<Violation> out;
    const RelationDef* rel = registry.find_relation(edge.relation);
    if (!rel) {
        out.push_back({ViolationKind::unknown_relation, edge.relation, {}});
        return out;
    }
    auto member = [&](const std::set<std::string>& side, const std::string& label) {
        return std::any_of(side.begin(), side.end(),
                           [&](const std::string& c) { return registry.is_a(label, c); });
    };
    if (!member(rel->domain, src.label))
        out.push_back({ViolationKind::domain_violation, edge.relation, src.label});
    if (!member(rel->range, dst.label))
        out.push_back({ViolationKind::range_violation, edge.relation, dst.label});
    return out;
}

ConformanceReport conformance_report(const GraphStore& graph, const OntologyRegistry& registry) {
    ConformanceReport report;
    auto record = [&](std::string subject, Violation v, std::map<std::string, std::size_t>& bucket,
                      const std::string& key) {
        if (v.is_warning()) {
            ++report.total_warnings;
        } else {
            ++report.total_violations;
            ++bucket[key];
        }
        report.details.emplace_back(std::move(subject), std::move(v));
    };
    for (const Node& n : graph.nodes())
        for (auto& v : validate_node(n, registry))
            record("node:" + std::to_string(raw(n.id)), std::move(v), report.per_class, n.label);

    // Cardinality: one-to-many means each source has at most one outgoing edge of
    // the relation; one-to-one additionally bounds incoming edges per target.
    std::unordered_map<std::string, std::unordered_map<std::int64_t, int>> out_count, in_count;
    for (const Edge& e : graph.edges()) {
        for (auto& v : validate_edge(e, graph.node(e.src), graph.node(e.dst), registry))
            record("edge:" + std::to_string(raw(e.id)), std::move(v), report.per_relation,
                   e.relation);
        const RelationDef* rel = registry.find_relation(e.relation);
        if (!rel || rel->cardinality == Cardinality::many_to_many) continue;
        if (++out_count[e.relation][raw(e.src)] == 2)
            record("edge:" + std::to_string(raw(e.id)),
                   {ViolationKind::cardinality_warning, e.relation, "multiple targets"},
                   report.per_relation, e.relation);
        if (rel->cardinality == Cardinality::one_to_one && ++in_count[e.relation][raw(e.dst)] == 2)
            record("edge:" + std::to_string(raw(e.id)),
                   {ViolationKind::cardinality_warning, e.relation, "multiple sources"},
                   report.per_relation, e.relation);
    }
    return report;
}

}  // namespace act::onto
