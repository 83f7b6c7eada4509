#include "act/detail/json_codec.hpp"
#include "act/error.hpp"
#include "act/graph.hpp"

#include <fstream>
#include <sstream>

namespace act {

namespace detail {

Json encode_value(const PropertyValue& v) {
    Json pair = Json::array();
    pair.push_back(std::string(to_string(v.kind())));
    switch (v.kind()) {
        case ValueKind::text:
        case ValueKind::identifier: pair.push_back(v.as_text()); break;
        case ValueKind::integer: pair.push_back(v.as_int()); break;
        case ValueKind::real: pair.push_back(v.as_real()); break;
        case ValueKind::boolean: pair.push_back(v.as_bool()); break;
        case ValueKind::timestamp: pair.push_back(format_timestamp(v.as_timestamp())); break;
    }
    return pair;
}

PropertyValue decode_value(const Json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_string())
        throw InvalidValue("value must be a [kind, value] pair");
    const auto kind = value_kind_from_string(j[0].get<std::string>());
    if (!kind) throw InvalidValue("unknown value kind " + j[0].get<std::string>());
    const Json& raw_value = j[1];
    switch (*kind) {
        case ValueKind::text:
            if (!raw_value.is_string()) break;
            return PropertyValue(raw_value.get<std::string>());
        case ValueKind::identifier:
            if (!raw_value.is_string()) break;
            return PropertyValue(Identifier{raw_value.get<std::string>()});
        case ValueKind::integer:
            if (!raw_value.is_number_integer()) break;
            return PropertyValue(raw_value.get<std::int64_t>());
        case ValueKind::real:
            if (!raw_value.is_number()) break;
            return PropertyValue(raw_value.get<double>());
        case ValueKind::boolean:
            if (!raw_value.is_boolean()) break;
            return PropertyValue(raw_value.get<bool>());
        case ValueKind::timestamp: {
            if (!raw_value.is_string()) break;
            auto ts = parse_timestamp(raw_value.get<std::string>());
            if (!ts) throw InvalidValue("malformed timestamp " + raw_value.get<std::string>());
            return PropertyValue(*ts);
        }
    }
    throw InvalidValue("value does not match its kind tag");
}

Json encode_properties(const PropertyMap& props) {
    Json obj = Json::object();
    for (const auto& [k, v] : props) obj[k] = encode_value(v);
    return obj;
}

PropertyMap decode_properties(const Json& j) {
    if (!j.is_object()) throw InvalidValue("props must be an object");
    PropertyMap out;
    for (const auto& [k, v] : j.items()) out.emplace(k, decode_value(v));
    return out;
}

Json encode_provenance(const ProvenanceTag& p) {
    return Json{{"kind", std::string(to_string(p.kind))},
                {"source", p.source},
                {"recorded_at", format_timestamp(p.recorded_at)}};
}

ProvenanceTag decode_provenance(const Json& j) {
    if (!j.is_object()) throw InvalidValue("provenance must be an object");
    ProvenanceTag p;
    const auto kind = knowledge_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw InvalidValue("unknown knowledge kind");
    p.kind = *kind;
    p.source = j.at("source").get<std::string>();
    if (p.source.empty()) throw InvalidValue("empty provenance source");
    auto ts = parse_timestamp(j.at("recorded_at").get<std::string>());
    if (!ts) throw InvalidValue("malformed recorded_at");
    p.recorded_at = *ts;
    return p;
}

Json plain_value(const PropertyValue& v) {
    switch (v.kind()) {
        case ValueKind::text:
        case ValueKind::identifier: return v.as_text();
        case ValueKind::integer: return v.as_int();
        case ValueKind::real: return v.as_real();
        case ValueKind::boolean: return v.as_bool();
        case ValueKind::timestamp: return format_timestamp(v.as_timestamp());
    }
    return nullptr;
}

Json plain_properties(const PropertyMap& props) {
    Json obj = Json::object();
    for (const auto& [k, v] : props) obj[k] = plain_value(v);
    return obj;
}

Json node_record(const Node& n) {
    return Json{{"kind", "node"},
                {"id", raw(n.id)},
                {"label", n.label},
                {"props", encode_properties(n.properties)},
                {"provenance", encode_provenance(n.provenance)}};
}

Json edge_record(const Edge& e) {
    return Json{{"kind", "edge"},
                {"id", raw(e.id)},
                {"relation", e.relation},
                {"src", raw(e.src)},
                {"dst", raw(e.dst)},
                {"props", encode_properties(e.properties)},
                {"provenance", encode_provenance(e.provenance)}};
}

}  // namespace detail

using detail::Json;

void GraphStore::write_canonical(std::ostream& os) const {
    for (const Node& n : nodes_) os << detail::node_record(n).dump() << '\n';
    for (const Edge& e : edges_) os << detail::edge_record(e).dump() << '\n';
    // Footer makes truncation at a line boundary detectable.
    os << Json{{"kind", "end"}, {"nodes", nodes_.size()}, {"edges", edges_.size()}}.dump()
       << '\n';
}

std::string GraphStore::canonical() const {
    std::ostringstream os;
    write_canonical(os);
    return os.str();
}

void GraphStore::save(const std::string& path) const {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("snapshot.io", "cannot write snapshot " + path);
        write_canonical(out);
        if (!out) throw Error("snapshot.io", "failed writing snapshot " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("snapshot.io", "cannot replace snapshot " + path);
}

GraphStore GraphStore::load(const std::string& path, std::span<const IndexDecl> indexes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("snapshot.io", "cannot read snapshot " + path);
    return read_canonical(in, indexes);
}

GraphStore GraphStore::read_canonical(std::istream& is, std::span<const IndexDecl> indexes) {
    GraphStore g;
    for (const auto& d : indexes) g.declare_index(d.label, d.property, d.unique);
    std::string line;
    std::size_t lineno = 0;
    bool ended = false;
    bool in_edges = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (ended) throw SnapshotFormatError(lineno, "content after end record");
        Json rec;
        try {
            rec = Json::parse(line);
        } catch (const std::exception& e) {
            throw SnapshotFormatError(lineno, std::string("malformed record: ") + e.what());
        }
        try {
            const std::string kind = rec.at("kind").get<std::string>();
            if (kind == "node") {
                if (in_edges) throw SnapshotFormatError(lineno, "node record after edges");
                const auto id = rec.at("id").get<std::int64_t>();
                if (id != static_cast<std::int64_t>(g.node_count()) + 1)
                    throw SnapshotFormatError(lineno, "node ids must be dense and sorted");
                g.add_node(rec.at("label").get<std::string>(),
                           detail::decode_properties(rec.at("props")),
                           detail::decode_provenance(rec.at("provenance")));
            } else if (kind == "edge") {
                in_edges = true;
                const auto id = rec.at("id").get<std::int64_t>();
                if (id != static_cast<std::int64_t>(g.edge_count()) + 1)
                    throw SnapshotFormatError(lineno, "edge ids must be dense and sorted");
                g.add_edge(rec.at("relation").get<std::string>(),
                           NodeId{rec.at("src").get<std::int64_t>()},
                           NodeId{rec.at("dst").get<std::int64_t>()},
                           detail::decode_properties(rec.at("props")),
                           detail::decode_provenance(rec.at("provenance")));
            } else if (kind == "end") {
                if (rec.at("nodes").get<std::size_t>() != g.node_count() ||
                    rec.at("edges").get<std::size_t>() != g.edge_count())
                    throw SnapshotFormatError(lineno, "end record counts do not match");
                ended = true;
            } else {
                throw SnapshotFormatError(lineno, "unknown record kind '" + kind + "'");
            }
        } catch (const SnapshotFormatError&) {
            throw;
        } catch (const std::exception& e) {
            throw SnapshotFormatError(lineno, e.what());
        }
    }
    if (!ended) throw SnapshotFormatError(lineno + 1, "missing end record (truncated file?)");
    return g;
}

}  // namespace act
