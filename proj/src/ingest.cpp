#include "act/ingest.hpp"

#include "act/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

namespace act::ingest {

namespace {

using Json = nlohmann::json;

// Default mapping table. Documented column by column in docs/formats.md.
constexpr const char* kBuiltinMapping = R"json({
  "kinds": [
    {"kind": "organization", "file": "organization.csv", "label": "Organization",
     "columns": [
       {"name": "uuid", "property": "uuid", "kind": "id", "required": true},
       {"name": "name", "property": "name"}]},
    {"kind": "plant", "file": "plant.csv", "label": "ProductionPlant",
     "columns": [
       {"name": "uuid", "property": "uuid", "kind": "id", "required": true},
       {"name": "name", "property": "name"},
       {"name": "organization_uuid", "required": true,
        "link": {"relation": "PART_OF", "target": "Organization"}}]},
    {"kind": "shop_floor", "file": "shop_floor.csv", "label": "ShopFloor",
     "columns": [
       {"name": "uuid", "property": "uuid", "kind": "id", "required": true},
       {"name": "name", "property": "name"},
       {"name": "plant_uuid", "required": true,
        "link": {"relation": "PART_OF", "target": "ProductionPlant"}}]},
    {"kind": "production_line", "file": "production_line.csv", "label": "ProductionLine",
     "columns": [
       {"name": "uuid", "property": "uuid", "kind": "id", "required": true},
       {"name": "name", "property": "name"},
       {"name": "plant_uuid", "required": true,
        "link": {"relation": "BELONGS_TO", "target": "ProductionPlant"}}]},
    {"kind": "person", "file": "person.csv", "label": "Person",
     "columns": [
       {"name": "uuid", "property": "uuid", "kind": "id", "required": true},
       {"name": "name", "property": "name"},
       {"name": "line_uuid", "link": {"relation": "ASSIGNED_TO", "target": "ProductionLine"}}]},
    {"kind": "shift", "file": "shift.csv", "label": "Shift",
     "columns": [
       {"name": "uuid", "property": "uuid", "kind": "id", "required": true},
       {"name": "line_uuid", "required": true,
        "link": {"relation": "EXECUTED_ON", "target": "ProductionLine"}},
       {"name": "start_ts", "property": "start_ts", "kind": "ts", "required": true},
       {"name": "end_ts", "property": "end_ts", "kind": "ts", "required": true},
       {"name": "required_headcount", "property": "required_headcount", "kind": "int"},
       {"name": "person_uuids", "list": true,
        "link": {"relation": "ASSIGNED_TO", "target": "Person", "direction": "in"}}]},
    {"kind": "stock_location", "file": "stock_location.csv", "label": "StockLocation",
     "columns": [
       {"name": "uuid", "property": "uuid", "kind": "id", "required": true},
       {"name": "name", "property": "name"}]},
    {"kind": "material", "file": "material.csv", "label": "Material",
     "columns": [
       {"name": "uuid", "property": "uuid", "kind": "id", "required": true},
       {"name": "name", "property": "name"},
       {"name": "stock_on_hand", "property": "stock_on_hand", "kind": "float"},
       {"name": "stock_location_uuid",
        "link": {"relation": "STORED_AT", "target": "StockLocation"}}]},
    {"kind": "client", "file": "client.csv", "label": "Client",
     "columns": [
       {"name": "uuid", "property": "uuid", "kind": "id", "required": true},
       {"name": "name", "property": "name"}]},
    {"kind": "work_order", "file": "work_order.csv", "label": "WorkOrder",
     "columns": [
       {"name": "uuid", "property": "uuid", "kind": "id", "required": true},
       {"name": "material_uuid", "required": true,
        "link": {"relation": "OF_MATERIAL", "target": "Material"}},
       {"name": "line_uuid", "required": true,
        "link": {"relation": "SCHEDULED_ON", "target": "ProductionLine"}},
       {"name": "qty", "property": "qty", "kind": "float"},
       {"name": "release_ts", "property": "release_ts", "kind": "ts"},
       {"name": "due_ts", "property": "due_ts", "kind": "ts", "required": true},
       {"name": "status", "property": "status"},
       {"name": "step_processes", "list": true},
       {"name": "batch_durations_h", "list": true, "kind": "float"}],
     "children": [
       {"label": "ManufacturingProcess", "key_suffix": "-s", "relation": "EXECUTES",
        "index_property": "step_index",
        "list_columns": {"process_type": "step_processes"},
        "default_element": {"process_type": "production"}},
       {"label": "ManufacturedBatch", "key_suffix": "-b", "relation": "PRODUCES",
        "index_property": "step_index",
        "list_columns": {"process_type": "step_processes", "duration_h": "batch_durations_h"},
        "kinds": {"duration_h": "float"},
        "when_nonempty": "batch_durations_h",
        "links": [{"column": "material_uuid", "relation": "OF_MATERIAL", "target": "Material"}]}]},
    {"kind": "stock_order", "file": "stock_order.csv", "label": "StockOrder",
     "columns": [
       {"name": "uuid", "property": "uuid", "kind": "id", "required": true},
       {"name": "material_uuid", "required": true,
        "link": {"relation": "OF_MATERIAL", "target": "Material"}},
       {"name": "qty", "property": "qty", "kind": "float", "required": true},
       {"name": "due_ts", "property": "due_ts", "kind": "ts", "required": true}]},
    {"kind": "shipping_order", "file": "shipping_order.csv", "label": "ShippingOrder",
     "columns": [
       {"name": "uuid", "property": "uuid", "kind": "id", "required": true},
       {"name": "material_uuid", "required": true,
        "link": {"relation": "OF_MATERIAL", "target": "Material"}},
       {"name": "client_uuid", "required": true,
        "link": {"relation": "SHIPS_TO", "target": "Client"}},
       {"name": "qty", "property": "qty", "kind": "float", "required": true},
       {"name": "due_ts", "property": "due_ts", "kind": "ts", "required": true}]},
    {"kind": "timeseries_point", "file": "timeseries_point.csv", "label": "TimeSeries",
     "columns": [
       {"name": "uuid", "property": "uuid", "kind": "id", "required": true},
       {"name": "source_uuid", "required": true,
        "link": {"relation": "OBSERVED_AT", "target": "DataSource"}},
       {"name": "ts", "property": "ts", "kind": "ts", "required": true},
       {"name": "value", "property": "value", "kind": "float", "required": true}]},
    {"kind": "decision_option_catalog", "file": "decision_option_catalog.csv",
     "label": "DecisionMakingOption",
     "columns": [
       {"name": "uuid", "property": "uuid", "kind": "id", "required": true},
       {"name": "description", "property": "description", "required": true},
       {"name": "applicable_kinds", "property": "applicable_kinds", "required": true},
       {"name": "use_case_uuid", "property": "use_case", "kind": "id", "required": true,
        "link": {"relation": "", "target": "UseCase"}}]}
  ]
})json";

ValueKind kind_of(const Json& j, const char* key, ValueKind fallback) {
    if (!j.contains(key)) return fallback;
    const std::string name = j.at(key).get<std::string>();
    auto k = value_kind_from_string(name);
    if (!k) throw InvalidArgument("mapping: unknown value kind '" + name + "'");
    return *k;
}

LinkSpec parse_link(const Json& j) {
    LinkSpec link;
    link.relation = j.value("relation", "");
    link.target = j.at("target").get<std::string>();
    const std::string dir = j.value("direction", "out");
    if (dir == "in")
        link.direction = LinkDirection::in;
    else if (dir != "out")
        throw InvalidArgument("mapping: link direction must be 'in' or 'out'");
    return link;
}

std::vector<std::string> split_list(const std::string& cell) {
    std::vector<std::string> out;
    if (cell.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto bar = cell.find('|', start);
        out.push_back(cell.substr(start, bar - start));
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    return out;
}

ProvenanceTag definitional(const std::string& source, Timestamp at) {
    return {KnowledgeKind::definitional, source, at};
}

Timestamp file_time(const std::filesystem::path& path) {
    std::error_code ec;
    const auto ft = std::filesystem::last_write_time(path, ec);
    if (ec) return Timestamp{0};
    const auto sys = std::chrono::file_clock::to_sys(ft);
    return Timestamp{
        std::chrono::duration_cast<std::chrono::milliseconds>(sys.time_since_epoch()).count()};
}

/// Row-level failure; turned into a Reject by the caller.
struct RowError {
    std::string reason;
};

// A fully resolved row, ready to apply without further checks.
struct PlannedNode {
    std::string label;
    std::string uuid;
    PropertyMap props;
    std::vector<std::tuple<std::string, NodeId, LinkDirection>> links;  // to existing nodes
    std::string parent_relation;  // child nodes only
};

class RowPlanner {
public:
    RowPlanner(const KindMapping& km, const GraphStore& g, const onto::OntologyRegistry& reg)
        : km_(km), g_(g), reg_(reg) {}

    std::vector<PlannedNode> plan(const std::vector<std::string>& cells) {
        if (cells.size() != km_.columns.size())
            throw RowError{"expected " + std::to_string(km_.columns.size()) + " columns, found " +
                           std::to_string(cells.size())};
        cells_ = &cells;
        std::vector<PlannedNode> out;
        PlannedNode root;
        root.label = km_.label;
        for (std::size_t i = 0; i < km_.columns.size(); ++i) {
            const ColumnSpec& col = km_.columns[i];
            const std::string& cell = cells[i];
            if (cell.empty()) {
                if (col.required) throw RowError{"missing required column '" + col.name + "'"};
                continue;
            }
            if (col.list) {
                for (const auto& item : split_list(cell)) {
                    if (col.kind != ValueKind::text && !parse_value(item, col.kind))
                        throw RowError{bad_cell(col.name, item, col.kind)};
                    if (col.link) root.links.emplace_back(
                        col.link->relation, resolve(col.name, item, *col.link), col.link->direction);
                }
                continue;
            }
            if (!col.property.empty()) {
                auto v = parse_value(cell, col.kind);
                if (!v) throw RowError{bad_cell(col.name, cell, col.kind)};
                root.props[col.property] = std::move(*v);
            }
            if (col.link) {
                const NodeId target = resolve(col.name, cell, *col.link);
                if (!col.link->relation.empty())
                    root.links.emplace_back(col.link->relation, target, col.link->direction);
            }
        }
        const PropertyValue* key = root.props.count("uuid") ? &root.props.at("uuid") : nullptr;
        if (!key) throw RowError{"mapping for '" + km_.kind + "' stores no uuid"};
        root.uuid = key->as_text();
        check(root);
        out.push_back(std::move(root));

        for (const ChildSpec& child : km_.children) expand(child, out);
        return out;
    }

private:
    static std::string bad_cell(const std::string& column, const std::string& cell, ValueKind k) {
        return "column '" + column + "': cannot parse '" + cell + "' as " +
               std::string(to_string(k));
    }

    const std::string& cell(const std::string& column) const {
        for (std::size_t i = 0; i < km_.columns.size(); ++i)
            if (km_.columns[i].name == column) return (*cells_)[i];
        throw InvalidArgument("mapping: unknown column '" + column + "'");
    }

    NodeId resolve(const std::string& column, const std::string& uuid, const LinkSpec& link) const {
        auto id = find_entity(g_, reg_, link.target, uuid);
        if (!id) throw RowError{"unknown " + link.target + " '" + uuid + "' in column '" + column + "'"};
        return *id;
    }

    void check(const PlannedNode& p) const {
        Node probe;
        probe.label = p.label;
        if (auto existing = g_.find_by_key(p.label, "uuid", Identifier{p.uuid}))
            probe.properties = g_.node(*existing).properties;
        for (const auto& [k, v] : p.props) probe.properties[k] = v;
        for (const auto& viol : onto::validate_node(probe, reg_))
            throw RowError{std::string(onto::to_string(viol.kind)) + " " + viol.subject + "." +
                           viol.detail};
        for (const auto& [rel, target, dir] : p.links) {
            Edge e;
            e.relation = rel;
            const Node& other = g_.node(target);
            const auto v = dir == LinkDirection::out ? onto::validate_edge(e, probe, other, reg_)
                                                     : onto::validate_edge(e, other, probe, reg_);
            if (!v.empty())
                throw RowError{std::string(onto::to_string(v.front().kind)) + " " + rel + " " +
                               v.front().detail};
        }
    }

    void expand(const ChildSpec& child, std::vector<PlannedNode>& out) {
        if (!child.when_nonempty.empty() && cell(child.when_nonempty).empty()) return;
        std::vector<std::pair<std::string, std::vector<std::string>>> lists;
        std::size_t n = 0;
        for (const auto& [prop, column] : child.list_columns) {
            lists.emplace_back(prop, split_list(cell(column)));
            n = std::max(n, lists.back().second.size());
        }
        for (const auto& [prop, items] : lists)
            if (!items.empty() && items.size() != n)
                throw RowError{"list columns for " + child.label + " differ in length"};
        const bool use_default = n == 0 && !child.default_element.empty();
        if (use_default) n = 1;

        std::vector<std::tuple<std::string, NodeId, LinkDirection>> links;
        for (const auto& [column, link] : child.links) {
            const std::string& v = cell(column);
            if (!v.empty()) links.emplace_back(link.relation, resolve(column, v, link), link.direction);
        }
        const std::string parent_uuid = out.front().uuid;
        for (std::size_t i = 0; i < n; ++i) {
            PlannedNode p;
            p.label = child.label;
            p.uuid = parent_uuid + child.key_suffix + std::to_string(i + 1);
            p.props["uuid"] = Identifier{p.uuid};
            if (!child.index_property.empty())
                p.props[child.index_property] = static_cast<std::int64_t>(i + 1);
            if (use_default) {
                for (const auto& [k, v] : child.default_element) p.props[k] = v;
            } else {
                for (const auto& [prop, items] : lists) {
                    if (items.empty()) continue;
                    ValueKind kind = ValueKind::text;
                    for (const auto& [kp, kk] : child.kinds)
                        if (kp == prop) kind = kk;
                    auto v = parse_value(items[i], kind);
                    if (!v) throw RowError{bad_cell(prop, items[i], kind)};
                    p.props[prop] = std::move(*v);
                }
            }
            p.links = links;
            p.parent_relation = child.relation;
            check(p);
            out.push_back(std::move(p));
        }
    }

    const KindMapping& km_;
    const GraphStore& g_;
    const onto::OntologyRegistry& reg_;
    const std::vector<std::string>* cells_ = nullptr;
};

void apply(GraphStore& g, std::vector<PlannedNode>& plan, const ProvenanceTag& prov,
           IngestReport& report) {
    NodeId parent{};
    for (std::size_t i = 0; i < plan.size(); ++i) {
        PlannedNode& p = plan[i];
        const UpsertResult r = upsert_node(g, p.label, p.uuid, std::move(p.props), prov);
        report.nodes_created += r.created;
        report.nodes_updated += r.updated;
        if (i == 0) parent = r.id;
        for (const auto& [rel, target, dir] : p.links) {
            const bool made = dir == LinkDirection::out ? ensure_edge(g, rel, r.id, target, prov)
                                                        : ensure_edge(g, rel, target, r.id, prov);
            report.edges_created += made;
        }
        if (i > 0 && !p.parent_relation.empty())
            report.edges_created += ensure_edge(g, p.parent_relation, parent, r.id, prov);
    }
}

}  // namespace

IngestReport& IngestReport::operator+=(const IngestReport& other) {
    rows += other.rows;
    nodes_created += other.nodes_created;
    nodes_updated += other.nodes_updated;
    edges_created += other.edges_created;
    rejects.insert(rejects.end(), other.rejects.begin(), other.rejects.end());
    return *this;
}

UpsertResult upsert_node(GraphStore& g, const std::string& label, const std::string& uuid,
                         PropertyMap props, const ProvenanceTag& provenance) {
    props["uuid"] = Identifier{uuid};
    if (auto id = g.find_by_key(label, "uuid", Identifier{uuid})) {
        const bool changed = g.update_node_properties(*id, props);
        return {*id, false, changed};
    }
    return {g.add_node(label, std::move(props), provenance), true, false};
}

bool ensure_edge(GraphStore& g, const std::string& relation, NodeId src, NodeId dst,
                 const ProvenanceTag& provenance, PropertyMap props) {
    if (g.find_edge(relation, src, dst)) return false;
    g.add_edge(relation, src, dst, std::move(props), provenance);
    return true;
}

std::optional<NodeId> find_entity(const GraphStore& g, const onto::OntologyRegistry& reg,
                                  const std::string& label, const std::string& uuid) {
    std::vector<std::string> labels = reg.descendants(label);
    if (labels.empty()) labels.push_back(label);
    for (const auto& l : labels)
        if (auto id = g.find_by_key(l, "uuid", Identifier{uuid})) return id;
    return std::nullopt;
}

// ---------------------------------------------------------------------------

const KindMapping* MappingTable::find(std::string_view kind) const {
    for (const auto& k : kinds)
        if (k.kind == kind) return &k;
    return nullptr;
}

std::string MappingTable::header(std::string_view kind) const {
    const KindMapping* km = find(kind);
    if (!km) throw NotFound("unknown record kind '" + std::string(kind) + "'");
    std::string out;
    for (const auto& c : km->columns) {
        if (!out.empty()) out += ',';
        out += c.name;
    }
    return out;
}

MappingTable MappingTable::from_json(const std::string& text) {
    MappingTable table;
    try {
        const Json doc = Json::parse(text);
        for (const Json& jk : doc.at("kinds")) {
            KindMapping km;
            km.kind = jk.at("kind").get<std::string>();
            km.file = jk.value("file", km.kind + ".csv");
            km.label = jk.at("label").get<std::string>();
            for (const Json& jc : jk.at("columns")) {
                ColumnSpec c;
                c.name = jc.at("name").get<std::string>();
                c.property = jc.value("property", "");
                c.kind = kind_of(jc, "kind", ValueKind::text);
                c.required = jc.value("required", false);
                c.list = jc.value("list", false);
                if (jc.contains("link")) c.link = parse_link(jc.at("link"));
                km.columns.push_back(std::move(c));
            }
            if (jk.contains("children")) {
                for (const Json& jch : jk.at("children")) {
                    ChildSpec ch;
                    ch.label = jch.at("label").get<std::string>();
                    ch.key_suffix = jch.value("key_suffix", "-");
                    ch.relation = jch.at("relation").get<std::string>();
                    ch.index_property = jch.value("index_property", "");
                    const Json lists = jch.value("list_columns", Json::object());
                    const Json kinds = jch.value("kinds", Json::object());
                    const Json defaults = jch.value("default_element", Json::object());
                    const Json links = jch.value("links", Json::array());
                    for (const auto& [prop, col] : lists.items())
                        ch.list_columns.emplace_back(prop, col.get<std::string>());
                    for (const auto& [prop, k] : kinds.items()) {
                        auto kind = value_kind_from_string(k.get<std::string>());
                        if (!kind) throw InvalidArgument("mapping: unknown value kind");
                        ch.kinds.emplace_back(prop, *kind);
                    }
                    ch.when_nonempty = jch.value("when_nonempty", "");
                    for (const auto& [prop, v] : defaults.items())
                        ch.default_element[prop] = v.get<std::string>();
                    for (const Json& jl : links)
                        ch.links.emplace_back(jl.at("column").get<std::string>(), parse_link(jl));
                    km.children.push_back(std::move(ch));
                }
            }
            table.kinds.push_back(std::move(km));
        }
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("mapping table: ") + e.what());
    }
    return table;
}

const MappingTable& MappingTable::builtin() {
    static const MappingTable table = from_json(kBuiltinMapping);
    return table;
}

// ---------------------------------------------------------------------------

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::vector<std::string> record;
    std::string field;
    std::size_t line = 1;
    std::size_t record_line = 1;
    bool quoted = false;
    bool any = false;  // current record has content
    bool header_done = false;

    auto end_record = [&] {
        record.push_back(std::move(field));
        field.clear();
        if (!header_done) {
            table.header = std::move(record);
            header_done = true;
        } else if (!(record.size() == 1 && record[0].empty())) {
            table.rows.push_back({record_line, std::move(record)});
        }
        record.clear();
        any = false;
    };

    char c;
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (!any) {
            record_line = line;
            any = true;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            end_record();
            ++line;
        } else {
            field += c;
        }
    }
    if (quoted) {
        table.malformed.push_back({record_line, "unterminated quoted field"});
    } else if (any) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        end_record();
    }
    return table;
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// ---------------------------------------------------------------------------

IngestReport bootstrap(GraphStore& g, const onto::OntologyRegistry& reg) {
    (void)reg;
    IngestReport report;
    report.source = "act:bootstrap";
    const ProvenanceTag prov = definitional("act:bootstrap", Timestamp{0});
    struct Seed {
        const char* label;
        const char* uuid;
        PropertyMap props;
    };
    const std::vector<Seed> seeds = {
        {"UseCase", "uc-pp", {{"description", "Production Planning"}, {"name", "production planning"}}},
        {"UseCase", "uc-df", {{"description", "Demand Forecasting"}, {"name", "demand forecasting"}}},
        {"RegressionAlgorithm", "alg-ridge", {{"name", "ridge regression"}}},
        {"DataSource", "ds-erp", {{"name", "ERP exports"}}},
        {"DataSource", "ds-mes", {{"name", "MES telemetry"}}},
        {"InformationProvenance", "ip-shipping-orders", {{"name", "shipping_order.csv"}}},
    };
    for (const auto& s : seeds) {
        const UpsertResult r = upsert_node(g, s.label, s.uuid, s.props, prov);
        report.nodes_created += r.created;
        report.nodes_updated += r.updated;
    }
    return report;
}

IngestReport ingest_file(const std::filesystem::path& path, std::string_view kind, GraphStore& g,
                         const onto::OntologyRegistry& reg, const MappingTable& mapping) {
    const KindMapping* km = mapping.find(kind);
    if (!km) throw InvalidArgument("unknown record kind '" + std::string(kind) + "'");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFound("cannot open " + path.string());

    IngestReport report;
    report.source = path.string();
    const CsvTable table = read_csv(in);
    report.rejects = table.malformed;
    report.rows = table.rows.size();

    std::vector<std::string> expected;
    for (const auto& c : km->columns) expected.push_back(c.name);
    if (table.header != expected) {
        const std::string reason = "header mismatch: expected '" + mapping.header(kind) + "'";
        report.rejects.push_back({1, reason});
        for (const auto& row : table.rows) report.rejects.push_back({row.line, reason});
        return report;
    }

    const ProvenanceTag prov = definitional(path.string(), file_time(path));
    RowPlanner planner(*km, g, reg);
    for (const auto& row : table.rows) {
        try {
            auto plan = planner.plan(row.cells);
            apply(g, plan, prov, report);
        } catch (const RowError& e) {
            report.rejects.push_back({row.line, e.reason});
        } catch (const UniqueKeyViolation& e) {
            report.rejects.push_back({row.line, e.what()});
        }
    }
    return report;
}

std::vector<IngestReport> ingest_directory(const std::filesystem::path& dir, GraphStore& g,
                                           const onto::OntologyRegistry& reg,
                                           const MappingTable& mapping) {
    if (!std::filesystem::is_directory(dir)) throw NotFound("not a directory: " + dir.string());
    std::vector<IngestReport> reports;
    reports.push_back(bootstrap(g, reg));
    for (const auto& km : mapping.kinds) {
        const auto path = dir / km.file;
        if (std::filesystem::exists(path)) reports.push_back(ingest_file(path, km.kind, g, reg, mapping));
    }
    return reports;
}

// ---------------------------------------------------------------------------

IngestReport load_inductive(GraphStore& g, const onto::OntologyRegistry& reg,
                            const std::string& source, const std::vector<NodeRecord>& nodes,
                            const std::vector<LinkRecord>& links, Timestamp recorded_at) {
    IngestReport report;
    report.source = source;
    report.rows = nodes.size() + links.size();
    const ProvenanceTag prov{KnowledgeKind::inductive, source, recorded_at};
    std::size_t line = 0;
    for (const auto& rec : nodes) {
        ++line;
        Node probe;
        probe.label = rec.label;
        if (auto existing = g.find_by_key(rec.label, "uuid", Identifier{rec.uuid}))
            probe.properties = g.node(*existing).properties;
        for (const auto& [k, v] : rec.properties) probe.properties[k] = v;
        probe.properties["uuid"] = Identifier{rec.uuid};
        const auto viol = onto::validate_node(probe, reg);
        if (!viol.empty()) {
            report.rejects.push_back({line, std::string(onto::to_string(viol.front().kind)) + " " +
                                                rec.label + "." + viol.front().detail});
            continue;
        }
        const UpsertResult r = upsert_node(g, rec.label, rec.uuid, rec.properties, prov);
        report.nodes_created += r.created;
        report.nodes_updated += r.updated;
    }
    for (const auto& l : links) {
        ++line;
        auto src = find_entity(g, reg, l.src_label, l.src_uuid);
        auto dst = find_entity(g, reg, l.dst_label, l.dst_uuid);
        if (!src || !dst) {
            report.rejects.push_back(
                {line, "unknown endpoint for " + l.relation + ": " + (src ? l.dst_uuid : l.src_uuid)});
            continue;
        }
        Edge e;
        e.relation = l.relation;
        const auto viol = onto::validate_edge(e, g.node(*src), g.node(*dst), reg);
        if (!viol.empty()) {
            report.rejects.push_back({line, std::string(onto::to_string(viol.front().kind)) + " " +
                                                l.relation + " " + viol.front().detail});
            continue;
        }
        report.edges_created += ensure_edge(g, l.relation, *src, *dst, prov);
    }
    return report;
}

IngestReport load_forecasts(const std::vector<ForecastRecord>& forecasts, GraphStore& g,
                            const onto::OntologyRegistry& reg, Timestamp recorded_at) {
    IngestReport report;
    report.source = "forecasts";
    report.rows = forecasts.size();
    static const char* kTargets[] = {"WorkOrder", "Material", "Client"};
    std::size_t line = 0;
    for (const auto& f : forecasts) {
        ++line;
        auto model = find_entity(g, reg, "Model", f.model_uuid);
        if (!model) {
            report.rejects.push_back({line, "unknown model '" + f.model_uuid + "'"});
            continue;
        }
        std::vector<NodeId> targets;
        std::string missing;
        for (const auto& t : f.target_uuids) {
            std::optional<NodeId> id;
            for (const char* label : kTargets)
                if (!id) id = find_entity(g, reg, label, t);
            if (!id) {
                missing = t;
                break;
            }
            targets.push_back(*id);
        }
        if (!missing.empty()) {
            report.rejects.push_back({line, "unknown forecast target '" + missing + "'"});
            continue;
        }
        Node probe;
        probe.label = "Forecast";
        probe.properties = f.properties;
        probe.properties["uuid"] = Identifier{f.uuid};
        auto viol = onto::validate_node(probe, reg);
        if (f.feature_vector && viol.empty()) {
            Node fv;
            fv.label = f.feature_vector->label;
            fv.properties = f.feature_vector->properties;
            fv.properties["uuid"] = Identifier{f.feature_vector->uuid};
            viol = onto::validate_node(fv, reg);
        }
        if (!viol.empty()) {
            report.rejects.push_back({line, std::string(onto::to_string(viol.front().kind)) + " " +
                                                viol.front().subject + "." + viol.front().detail});
            continue;
        }

        const ProvenanceTag prov{KnowledgeKind::inductive, f.model_uuid, recorded_at};
        const UpsertResult r = upsert_node(g, "Forecast", f.uuid, f.properties, prov);
        report.nodes_created += r.created;
        report.nodes_updated += r.updated;
        report.edges_created += ensure_edge(g, "FORECASTED_FROM", r.id, *model, prov);
        for (NodeId t : targets) report.edges_created += ensure_edge(g, "FORECAST_FOR", r.id, t, prov);
        if (f.feature_vector) {
            const UpsertResult v = upsert_node(g, f.feature_vector->label, f.feature_vector->uuid,
                                               f.feature_vector->properties, prov);
            report.nodes_created += v.created;
            report.nodes_updated += v.updated;
            report.edges_created += ensure_edge(g, "INPUT_OF", v.id, r.id, prov);
        }
    }
    return report;
}

}  // namespace act::ingest
