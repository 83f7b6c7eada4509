#include "act/graph.hpp"

#include "act/error.hpp"

#include <algorithm>

namespace act {

std::string_view to_string(KnowledgeKind kind) {
    switch (kind) {
        case KnowledgeKind::definitional: return "definitional";
        case KnowledgeKind::deductive: return "deductive";
        case KnowledgeKind::inductive: return "inductive";
        case KnowledgeKind::creative: return "creative";
    }
    return "definitional";
}

std::optional<KnowledgeKind> knowledge_kind_from_string(std::string_view name) {
    if (name == "definitional") return KnowledgeKind::definitional;
    if (name == "deductive") return KnowledgeKind::deductive;
    if (name == "inductive") return KnowledgeKind::inductive;
    if (name == "creative") return KnowledgeKind::creative;
    return std::nullopt;
}

std::string GraphStore::index_name(std::string_view label, std::string_view property) {
    std::string key(label);
    key.push_back('\x1f');
    key.append(property);
    return key;
}

void GraphStore::declare_index(std::string label, std::string property, bool unique) {
    const std::string key = index_name(label, property);
    if (indexes_.contains(key)) return;
    Index idx;
    idx.unique = unique;
    for (NodeId id : nodes_with_label(label)) {
        const Node& n = node(id);
        if (const auto* v = n.property(property)) {
            auto& bucket = idx.entries[index_key(*v)];
            if (unique && !bucket.empty())
                throw UniqueKeyViolation("existing duplicates for " + label + "." + property);
            bucket.push_back(id);
        }
    }
    indexes_.emplace(key, std::move(idx));
    index_decls_.push_back({std::move(label), std::move(property), unique});
}

bool GraphStore::has_index(std::string_view label, std::string_view property) const {
    return indexes_.contains(index_name(label, property));
}

std::vector<GraphStore::IndexDecl> GraphStore::index_declarations() const { return index_decls_; }

void GraphStore::check_unique(const std::string& label, const PropertyMap& props,
                              std::optional<NodeId> self) const {
    for (const auto& [name, value] : props) {
        auto it = indexes_.find(index_name(label, name));
        if (it == indexes_.end() || !it->second.unique) continue;
        auto hit = it->second.entries.find(index_key(value));
        if (hit == it->second.entries.end()) continue;
        for (NodeId other : hit->second) {
            if (!self || other != *self)
                throw UniqueKeyViolation(label + "." + name + " = '" + value.to_display() +
                                         "' already exists");
        }
    }
}

void GraphStore::index_insert(const Node& n) {
    for (const auto& [name, value] : n.properties) {
        auto it = indexes_.find(index_name(n.label, name));
        if (it != indexes_.end()) it->second.entries[index_key(value)].push_back(n.id);
    }
}

NodeId GraphStore::add_node(std::string label, PropertyMap properties, ProvenanceTag provenance) {
    if (label.empty()) throw InvalidArgument("node label must be non-empty");
    if (provenance.source.empty()) throw InvalidArgument("provenance source must be non-empty");
    check_unique(label, properties, std::nullopt);
    const NodeId id{static_cast<std::int64_t>(nodes_.size()) + 1};
    nodes_.push_back(Node{id, std::move(label), std::move(properties), std::move(provenance)});
    out_.emplace_back();
    in_.emplace_back();
    const Node& n = nodes_.back();
    by_label_[n.label].push_back(id);
    index_insert(n);
    return id;
}

EdgeId GraphStore::add_edge(std::string relation, NodeId src, NodeId dst, PropertyMap properties,
                            ProvenanceTag provenance) {
    if (relation.empty()) throw InvalidArgument("edge relation must be non-empty");
    if (provenance.source.empty()) throw InvalidArgument("provenance source must be non-empty");
    if (!contains(src) || !contains(dst))
        throw DanglingEdge("edge " + relation + " references missing node " +
                           std::to_string(contains(src) ? raw(dst) : raw(src)));
    const EdgeId id{static_cast<std::int64_t>(edges_.size()) + 1};
    edges_.push_back(
        Edge{id, std::move(relation), src, dst, std::move(properties), std::move(provenance)});
    out_[raw(src) - 1].push_back(id);
    in_[raw(dst) - 1].push_back(id);
    return id;
}

bool GraphStore::update_node_properties(NodeId id, const PropertyMap& changes) {
    if (!contains(id)) throw NotFound("node " + std::to_string(raw(id)));
    Node& n = nodes_[raw(id) - 1];
    PropertyMap delta;
    for (const auto& [name, value] : changes) {
        auto it = n.properties.find(name);
        if (it == n.properties.end() || !(it->second == value)) delta.emplace(name, value);
    }
    if (delta.empty()) return false;
    check_unique(n.label, delta, id);
    for (const auto& [name, value] : delta) {
        auto idx = indexes_.find(index_name(n.label, name));
        if (idx != indexes_.end()) {
            if (auto old = n.properties.find(name); old != n.properties.end()) {
                auto& bucket = idx->second.entries[index_key(old->second)];
                bucket.erase(std::remove(bucket.begin(), bucket.end(), id), bucket.end());
            }
            auto& bucket = idx->second.entries[index_key(value)];
            bucket.insert(std::lower_bound(bucket.begin(), bucket.end(), id), id);
        }
        n.properties.insert_or_assign(name, value);
    }
    return true;
}

const Node& GraphStore::node(NodeId id) const {
    if (!contains(id)) throw NotFound("node " + std::to_string(raw(id)));
    return nodes_[raw(id) - 1];
}

const Edge& GraphStore::edge(EdgeId id) const {
    if (!contains(id)) throw NotFound("edge " + std::to_string(raw(id)));
    return edges_[raw(id) - 1];
}

std::span<const EdgeId> GraphStore::out_edges(NodeId id) const {
    if (!contains(id)) throw NotFound("node " + std::to_string(raw(id)));
    return out_[raw(id) - 1];
}

std::span<const EdgeId> GraphStore::in_edges(NodeId id) const {
    if (!contains(id)) throw NotFound("node " + std::to_string(raw(id)));
    return in_[raw(id) - 1];
}

std::vector<Neighbor> GraphStore::neighbors(NodeId id, Direction direction,
                                            std::optional<std::string_view> relation) const {
    std::vector<Neighbor> result;
    auto accept = [&](EdgeId eid, bool outgoing) {
        const Edge& e = edges_[raw(eid) - 1];
        if (relation && e.relation != *relation) return;
        result.push_back({&e, &nodes_[raw(outgoing ? e.dst : e.src) - 1]});
    };
    const auto outs = out_edges(id);
    const auto ins = in_edges(id);
    if (direction == Direction::out) {
        for (EdgeId e : outs) accept(e, true);
    } else if (direction == Direction::in) {
        for (EdgeId e : ins) accept(e, false);
    } else {
        // Merge the two sorted lists; a self-loop occurs in both and is kept once.
        std::size_t i = 0, j = 0;
        while (i < outs.size() || j < ins.size()) {
            if (j == ins.size() || (i < outs.size() && outs[i] < ins[j])) {
                accept(outs[i++], true);
            } else if (i == outs.size() || ins[j] < outs[i]) {
                accept(ins[j++], false);
            } else {
                accept(outs[i++], true);
                ++j;
            }
        }
    }
    return result;
}

const std::vector<NodeId>& GraphStore::nodes_with_label(std::string_view label) const {
    static const std::vector<NodeId> empty;
    auto it = by_label_.find(std::string(label));
    return it == by_label_.end() ? empty : it->second;
}

std::vector<NodeId> GraphStore::lookup(std::string_view label, std::string_view property,
                                       const PropertyValue& value) const {
    if (auto it = indexes_.find(index_name(label, property)); it != indexes_.end()) {
        auto hit = it->second.entries.find(index_key(value));
        if (hit == it->second.entries.end()) return {};
        return hit->second;
    }
    std::vector<NodeId> out;
    for (NodeId id : nodes_with_label(label)) {
        const Node& n = nodes_[raw(id) - 1];
        if (const auto* v = n.property(property); v && values_match(*v, value)) out.push_back(id);
    }
    return out;
}

std::optional<NodeId> GraphStore::find_by_key(std::string_view label, std::string_view property,
                                              const PropertyValue& value) const {
    auto hits = lookup(label, property, value);
    if (hits.empty()) return std::nullopt;
    return hits.front();
}

std::optional<EdgeId> GraphStore::find_edge(std::string_view relation, NodeId src,
                                            NodeId dst) const {
    if (!contains(src)) return std::nullopt;
    for (EdgeId eid : out_[raw(src) - 1]) {
        const Edge& e = edges_[raw(eid) - 1];
        if (e.dst == dst && e.relation == relation) return eid;
    }
    return std::nullopt;
}

}  // namespace act
