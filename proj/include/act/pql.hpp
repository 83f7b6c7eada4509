#pragma once

// Pattern query language: a small Cypher-like subset.
//
//   MATCH [p =] (a:Label {k: v})-[r:REL]->(b)<-[*1..3]-(c), ...
//   [MATCH ...]
//   [WHERE expr]
//   RETURN [DISTINCT] a, r, p, relationships(p)
//
// The grammar is documented in docs/pql.ebnf.

#include "act/error.hpp"
#include "act/graph.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace act::onto {
class OntologyRegistry;
}

namespace act::pql {

using PropertyConstraints = std::vector<std::pair<std::string, PropertyValue>>;

struct NodePattern {
    std::optional<std::string> variable;
    std::optional<std::string> label;
    PropertyConstraints properties;

    bool operator==(const NodePattern&) const = default;
};

enum class RelDirection { right, left, undirected };

struct RelPattern {
    std::optional<std::string> variable;
    std::optional<std::string> relation;
    RelDirection direction = RelDirection::right;
    PropertyConstraints properties;
    bool variable_length = false;
    int min_hops = 1;
    /// Unset means "use the evaluator default".
    std::optional<int> max_hops;

    bool operator==(const RelPattern&) const = default;
};

/// nodes.size() == rels.size() + 1.
struct PathPattern {
    std::optional<std::string> path_variable;
    std::vector<NodePattern> nodes;
    std::vector<RelPattern> rels;

    bool operator==(const PathPattern&) const = default;
};

struct MatchClause {
    std::vector<PathPattern> patterns;
    bool operator==(const MatchClause&) const = default;
};

enum class CompareOp { eq, ne, lt, le, gt, ge };

std::string_view to_string(CompareOp op);

struct Expr {
    enum class Kind { variable, property, literal, compare, conj, disj, negation };

    Kind kind = Kind::literal;
    std::string name;      // variable name (variable, property)
    std::string property;  // property
    PropertyValue literal;
    /// compare: operands = children, ops.size() == children.size() - 1.
    /// A chain `a <> b <> c` holds three operands and means
    /// `a <> b AND b <> c`.
    std::vector<CompareOp> ops;
    std::vector<Expr> children;

    bool operator==(const Expr&) const = default;

    static Expr variable_ref(std::string name);
    static Expr property_ref(std::string name, std::string property);
    static Expr value(PropertyValue v);
};

struct ReturnItem {
    enum class Kind { variable, relationships };
    Kind kind = Kind::variable;
    std::string name;

    bool operator==(const ReturnItem&) const = default;
};

struct Query {
    std::vector<MatchClause> matches;
    std::optional<Expr> where;
    bool distinct = false;
    std::vector<ReturnItem> returns;

    bool operator==(const Query&) const = default;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, std::set<std::string> expected, const std::string& found);

    std::size_t offset() const noexcept { return offset_; }
    const std::set<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::set<std::string> expected_;
};

class UnboundVariable : public Error {
public:
    explicit UnboundVariable(std::string name)
        : Error("pql.unbound_variable", "unbound variable '" + name + "'"),
          name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// Well-formed text that is not a valid query (conflicting variable kinds,
/// bad hop bounds, ...).
ACT_DEFINE_ERROR(SemanticError, "pql.semantic");

ACT_DEFINE_ERROR(VariableLengthBlowup, "pql.blowup");

/// Parse exactly one query; a trailing ';' is allowed.
Query parse(std::string_view text);

/// Parse ';'-separated queries. `//` comments are skipped.
std::vector<Query> parse_script(std::string_view text);

/// Canonical text; parse(to_text(q)) == q.
std::string to_text(const Query& q);
std::string to_text(const Expr& e);

/// Variables introduced by MATCH, split by kind.
struct VariableTable {
    std::vector<std::string> nodes;
    std::vector<std::string> rels;
    std::vector<std::string> paths;
};
VariableTable variables(const Query& q);

// ---------------------------------------------------------------------------
// Evaluation

struct PathValue {
    std::vector<NodeId> nodes;
    std::vector<EdgeId> edges;

    auto operator<=>(const PathValue&) const = default;
};

/// One returned column value.
struct Value {
    enum class Kind { node, edge, path, edge_list };
    Kind kind = Kind::node;
    NodeId node{};
    EdgeId edge{};
    PathValue path;  // path; edge_list uses path.edges only

    auto operator<=>(const Value&) const = default;
};

using BindingRow = std::vector<Value>;

struct ResultSet {
    std::vector<std::string> columns;
    std::vector<BindingRow> rows;
};

struct EvalOptions {
    /// Upper bound on traversal steps before VariableLengthBlowup.
    std::size_t max_partial_paths = 1'000'000;
    /// Upper hop bound for `*` and `*n..` without an explicit maximum. Four
    /// keeps every fixture query under a few thousand partial paths on the
    /// seeded plant; at five and above the trail count grows past a million.
    int default_max_hops = 4;
    /// When set, a label also matches its subclasses.
    const onto::OntologyRegistry* registry = nullptr;
};

struct EvalStats {
    std::size_t partial_paths = 0;
};

ResultSet evaluate(const Query& q, const GraphStore& g, const EvalOptions& options = {},
                   EvalStats* stats = nullptr);

/// WHERE comparison semantics shared with tests and tooling.
/// Three-valued: nullopt is "unknown".
std::optional<bool> compare_values(const PropertyValue& a, CompareOp op, const PropertyValue& b);

}  // namespace act::pql
