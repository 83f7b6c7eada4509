#pragma once

// Domain ontology registry: classes (with a continuant/occurrent lineage and
// optional parent class) and relation types with domain/range constraints.
// A registry is immutable once built and may be shared across threads.

#include "act/graph.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace act::onto {

enum class Lineage { continuant, occurrent };
enum class Cardinality { one_to_one, one_to_many, many_to_many };

std::string_view to_string(Lineage l);
std::string_view to_string(Cardinality c);

struct PropertySpec {
    std::string name;
    ValueKind kind = ValueKind::text;
    bool required = false;
    bool unique = false;
};

struct ClassDef {
    std::string name;
    Lineage lineage = Lineage::continuant;
    std::string definition;
    std::optional<std::string> parent;
    std::vector<PropertySpec> properties;
    /// False for schema elements not named by the source domain model.
    bool invented = false;
};

struct RelationDef {
    std::string name;
    std::set<std::string> domain;
    std::set<std::string> range;
    Cardinality cardinality = Cardinality::many_to_many;
    bool invented = false;
    /// Edges of this relation are only ever created by the reasoner.
    bool deductive_only = false;
};

enum class ViolationKind {
    unknown_class,
    missing_required_property,
    wrong_property_kind,
    unknown_relation,
    domain_violation,
    range_violation,
    cardinality_warning,
};

std::string_view to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    std::string subject;  // class or relation name
    std::string detail;   // property name, offending label, ...

    bool operator==(const Violation&) const = default;
    bool is_warning() const { return kind == ViolationKind::cardinality_warning; }
};

class OntologyRegistry {
public:
    /// Throws InvalidArgument on duplicate names or dangling references.
    void add_class(ClassDef def);
    void add_relation(RelationDef def);

    const ClassDef* find_class(std::string_view name) const;
    const RelationDef* find_relation(std::string_view name) const;

    const std::map<std::string, ClassDef, std::less<>>& classes() const { return classes_; }
    const std::map<std::string, RelationDef, std::less<>>& relations() const { return relations_; }

    /// True if `label` is `ancestor` or a (transitive) subclass of it.
    bool is_a(std::string_view label, std::string_view ancestor) const;

    /// `label` and every class derived from it.
    std::vector<std::string> descendants(std::string_view label) const;

    Lineage lineage(std::string_view class_name) const;

    /// Unique-key declarations to install on a GraphStore.
    std::vector<GraphStore::IndexDecl> index_declarations() const;
    void install_indexes(GraphStore& g) const;

    /// One line per class/relation, with definition text.
    void write_schema(std::ostream& os) const;

private:
    std::map<std::string, ClassDef, std::less<>> classes_;
    std::map<std::string, RelationDef, std::less<>> relations_;
};

/// Classes and relations of the production-planning / demand-forecasting
/// twin.
const OntologyRegistry& default_ontology();
OntologyRegistry register_default_ontology();

std::vector<Violation> validate_node(const Node& node, const OntologyRegistry& registry);
std::vector<Violation> validate_edge(const Edge& edge, const Node& src, const Node& dst,
                                     const OntologyRegistry& registry);

struct ConformanceReport {
    std::map<std::string, std::size_t> per_class;     // error count by node label
    std::map<std::string, std::size_t> per_relation;  // error count by relation
    std::vector<std::pair<std::string, Violation>> details;  // "node:<id>"/"edge:<id>"
    std::size_t total_violations = 0;  // errors only
    std::size_t total_warnings = 0;
};

ConformanceReport conformance_report(const GraphStore& graph, const OntologyRegistry& registry);

}  // namespace act::onto
