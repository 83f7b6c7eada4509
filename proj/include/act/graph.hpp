#pragma once

// In-memory labeled property graph.
//
// Ids are dense, engine-assigned and monotonically increasing (nodes and
// edges have separate counters starting at 1). There is no deletion; a store
// is rebuilt from ingestion instead.
//
// Concurrency: single writer, many readers. Const member functions may run
// concurrently with each other; any non-const call needs exclusive access.

#include "act/value.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace act {

enum class NodeId : std::int64_t {};
enum class EdgeId : std::int64_t {};

constexpr std::int64_t raw(NodeId id) { return static_cast<std::int64_t>(id); }
constexpr std::int64_t raw(EdgeId id) { return static_cast<std::int64_t>(id); }

enum class KnowledgeKind { definitional, deductive, inductive, creative };

std::string_view to_string(KnowledgeKind kind);
std::optional<KnowledgeKind> knowledge_kind_from_string(std::string_view name);

struct ProvenanceTag {
    KnowledgeKind kind = KnowledgeKind::definitional;
    std::string source;
    Timestamp recorded_at;

    bool operator==(const ProvenanceTag&) const = default;
};

struct Node {
    NodeId id{};
    std::string label;
    PropertyMap properties;
    ProvenanceTag provenance;

    const PropertyValue* property(std::string_view name) const {
        auto it = properties.find(name);
        return it == properties.end() ? nullptr : &it->second;
    }
};

struct Edge {
    EdgeId id{};
    std::string relation;
    NodeId src{};
    NodeId dst{};
    PropertyMap properties;
    ProvenanceTag provenance;

    NodeId other(NodeId from) const { return from == src ? dst : src; }
};

enum class Direction { out, in, both };

struct Neighbor {
    const Edge* edge;
    const Node* node;
};

class GraphStore {
public:
    GraphStore() = default;

    /// Declare a (label, property) secondary index. Unique indexes reject a
    /// second node of the same label carrying a matching value.
    void declare_index(std::string label, std::string property, bool unique);
    bool has_index(std::string_view label, std::string_view property) const;

    struct IndexDecl {
        std::string label;
        std::string property;
        bool unique;
    };
    std::vector<IndexDecl> index_declarations() const;

    NodeId add_node(std::string label, PropertyMap properties, ProvenanceTag provenance);
    EdgeId add_edge(std::string relation, NodeId src, NodeId dst, PropertyMap properties,
                    ProvenanceTag provenance);

    /// Merge `changes` into the node's properties. Returns true if anything
    /// changed. Indexes are kept consistent; unique keys are enforced.
    bool update_node_properties(NodeId id, const PropertyMap& changes);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    bool contains(NodeId id) const {
        return raw(id) >= 1 && static_cast<std::size_t>(raw(id)) <= nodes_.size();
    }
    bool contains(EdgeId id) const {
        return raw(id) >= 1 && static_cast<std::size_t>(raw(id)) <= edges_.size();
    }

    /// Throw NotFound on unknown ids.
    const Node& node(NodeId id) const;
    const Edge& edge(EdgeId id) const;

    std::span<const Node> nodes() const { return nodes_; }
    std::span<const Edge> edges() const { return edges_; }

    std::span<const EdgeId> out_edges(NodeId id) const;
    std::span<const EdgeId> in_edges(NodeId id) const;

    /// Adjacent (edge, node) pairs, ordered by edge id. A self-loop appears
    /// once for Direction::both.
    std::vector<Neighbor> neighbors(NodeId id, Direction direction,
                                    std::optional<std::string_view> relation = {}) const;

    const std::vector<NodeId>& nodes_with_label(std::string_view label) const;

    /// Nodes of `label` whose `property` matches `value` (index when
    /// declared, scan otherwise). Ascending id order.
    std::vector<NodeId> lookup(std::string_view label, std::string_view property,
                               const PropertyValue& value) const;

    /// Unique-key lookup convenience.
    std::optional<NodeId> find_by_key(std::string_view label, std::string_view property,
                                      const PropertyValue& value) const;

    std::optional<EdgeId> find_edge(std::string_view relation, NodeId src, NodeId dst) const;

    /// Canonical line-delimited serialization (see snapshot.cpp).
    void write_canonical(std::ostream& os) const;
    std::string canonical() const;

    void save(const std::string& path) const;
    /// Index declarations must be supplied by the caller; they are not part of
    /// the snapshot format.
    static GraphStore load(const std::string& path,
                           std::span<const IndexDecl> indexes = {});
    static GraphStore read_canonical(std::istream& is, std::span<const IndexDecl> indexes = {});

private:
    struct Index {
        bool unique = false;
        std::unordered_map<std::string, std::vector<NodeId>> entries;
    };

    static std::string index_name(std::string_view label, std::string_view property);
    void index_insert(const Node& n);
    void check_unique(const std::string& label, const PropertyMap& props,
                      std::optional<NodeId> self) const;

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> out_;
    std::vector<std::vector<EdgeId>> in_;
    std::unordered_map<std::string, std::vector<NodeId>> by_label_;
    std::unordered_map<std::string, Index> indexes_;
    std::vector<IndexDecl> index_decls_;
};

}  // namespace act
