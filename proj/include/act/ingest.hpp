#pragma once

// Virtual mapping procedures: tabular source files -> graph instances, plus
// loaders for model output and the synthetic plant-data generator.
//
// Column schemas and the mapping-table format are documented in
// docs/formats.md.

#include "act/graph.hpp"
#include "act/ontology.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace act::ingest {

struct Reject {
    std::size_t line = 0;  // 1-based; the header is line 1
    std::string reason;
};

struct IngestReport {
    std::string source;
    std::size_t rows = 0;
    std::size_t nodes_created = 0;
    std::size_t nodes_updated = 0;
    std::size_t edges_created = 0;
    std::vector<Reject> rejects;

    IngestReport& operator+=(const IngestReport& other);
    bool changed() const { return nodes_created || nodes_updated || edges_created; }
};

// ---------------------------------------------------------------------------
// Upsert primitives shared by every writer.

struct UpsertResult {
    NodeId id{};
    bool created = false;
    bool updated = false;
};

/// Find a node by (label, uuid); create it or merge `props` into it.
/// Provenance is only set on creation.
UpsertResult upsert_node(GraphStore& g, const std::string& label, const std::string& uuid,
                         PropertyMap props, const ProvenanceTag& provenance);

/// Create the edge unless one with the same (relation, src, dst) exists.
bool ensure_edge(GraphStore& g, const std::string& relation, NodeId src, NodeId dst,
                 const ProvenanceTag& provenance, PropertyMap props = {});

/// Node with the given uuid and a label that is-a `label`.
std::optional<NodeId> find_entity(const GraphStore& g, const onto::OntologyRegistry& reg,
                                  const std::string& label, const std::string& uuid);

// ---------------------------------------------------------------------------
// Mapping tables

enum class LinkDirection { out, in };

struct LinkSpec {
    std::string relation;  // empty: only check that the referenced node exists
    std::string target;    // target class (subclasses accepted)
    LinkDirection direction = LinkDirection::out;
};

struct ColumnSpec {
    std::string name;
    std::string property;  // empty: not stored as a property
    ValueKind kind = ValueKind::text;
    bool required = false;
    bool list = false;  // '|'-separated values
    std::optional<LinkSpec> link;
};

struct ChildSpec {
    std::string label;
    std::string key_suffix;  // child uuid = parent uuid + suffix + index
    std::string relation;    // parent -> child
    std::string index_property;
    /// property name -> list column, zipped element-wise
    std::vector<std::pair<std::string, std::string>> list_columns;
    std::vector<std::pair<std::string, ValueKind>> kinds;
    /// Skip the expansion when this column is empty.
    std::string when_nonempty;
    /// Used when every list column is empty.
    PropertyMap default_element;
    /// Links from the child, resolved through a parent column.
    std::vector<std::pair<std::string, LinkSpec>> links;
};

struct KindMapping {
    std::string kind;
    std::string file;
    std::string label;
    std::vector<ColumnSpec> columns;
    std::vector<ChildSpec> children;
};

struct MappingTable {
    std::vector<KindMapping> kinds;  // in ingestion order

    const KindMapping* find(std::string_view kind) const;
    static MappingTable from_json(const std::string& text);
    static const MappingTable& builtin();
    std::string header(std::string_view kind) const;
};

// ---------------------------------------------------------------------------
// Ingestion

/// Definitional entities every deployment carries: the two use cases, the
/// ridge algorithm, data sources and the shipping-history provenance.
IngestReport bootstrap(GraphStore& g, const onto::OntologyRegistry& reg);

IngestReport ingest_file(const std::filesystem::path& path, std::string_view kind, GraphStore& g,
                         const onto::OntologyRegistry& reg,
                         const MappingTable& mapping = MappingTable::builtin());

/// Bootstrap then every `<kind>.csv` present in `dir`, in mapping order.
/// Throws NotFound when `dir` is not a directory.
std::vector<IngestReport> ingest_directory(const std::filesystem::path& dir, GraphStore& g,
                                           const onto::OntologyRegistry& reg,
                                           const MappingTable& mapping = MappingTable::builtin());

// ---------------------------------------------------------------------------
// Inductive knowledge

struct NodeRecord {
    std::string label;
    std::string uuid;
    PropertyMap properties;
};

struct LinkRecord {
    std::string relation;
    std::string src_uuid;
    std::string src_label;
    std::string dst_uuid;
    std::string dst_label;
};

/// Model-side entities (models, datasets, feature vectors) with provenance
/// {inductive, source}. Links whose endpoints are unknown are rejected.
IngestReport load_inductive(GraphStore& g, const onto::OntologyRegistry& reg,
                            const std::string& source, const std::vector<NodeRecord>& nodes,
                            const std::vector<LinkRecord>& links, Timestamp recorded_at);

struct ForecastRecord {
    std::string uuid;
    std::string model_uuid;
    PropertyMap properties;  // kind, issued_at, target_date, value, quantiles ...
    std::vector<std::string> target_uuids;  // FORECAST_FOR targets
    std::optional<NodeRecord> feature_vector;  // linked INPUT_OF
};

/// Forecast nodes with provenance {inductive, source = model uuid} and their
/// FORECASTED_FROM / FORECAST_FOR / INPUT_OF edges.
IngestReport load_forecasts(const std::vector<ForecastRecord>& forecasts, GraphStore& g,
                            const onto::OntologyRegistry& reg, Timestamp recorded_at);

// ---------------------------------------------------------------------------
// Synthetic scenario

struct ScenarioSpec {
    std::uint64_t seed = 42;
    int n_lines = 2;
    int n_persons = 6;
    int n_materials = 2;
    int n_clients = 2;
    int horizon_days = 127;     // days of generated shipping history
    int daily_order_rate = 1;   // orders per client and material per day
    int planning_days = 7;      // days covered by shifts and scheduled orders

    void validate() const;
};

/// Instant the scenario treats as "now".
Timestamp scenario_now();

/// Well-known identifiers of the scripted situations.
struct ScenarioAnchors {
    static constexpr const char* primary_line = "93216b15b0b74712bcb62c0397da394e";
    static constexpr const char* secondary_line = "0a1e";
    static constexpr const char* downtime_shift = "dab85031f7414e15b6917b7d83d884e5";
    static constexpr const char* downtime_order = "wo-scripted-downtime";
};

/// Writes one CSV per kind plus scenario.json. Deterministic in `spec`.
std::vector<std::filesystem::path> generate_scenario(const ScenarioSpec& spec,
                                                     const std::filesystem::path& out_dir);

/// 32-hex identifier derived from (seed, tag).
std::string synthetic_uuid(std::uint64_t seed, std::string_view tag);

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
    std::vector<std::string> header;
    struct Row {
        std::size_t line;
        std::vector<std::string> cells;
    };
    std::vector<Row> rows;
    std::vector<Reject> malformed;  // unterminated quotes etc.
};

CsvTable read_csv(std::istream& in);
std::string csv_escape(const std::string& cell);

}  // namespace act::ingest
