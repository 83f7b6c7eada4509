#pragma once

// Structural statistics of a graph: size, and total / maximum / average
// shortest-path length over a random sample of source nodes. Edges count as
// undirected for distances; unreachable pairs are left out.

#include "act/error.hpp"
#include "act/graph.hpp"
#include "act/ontology.hpp"

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace act::metrics {

ACT_DEFINE_ERROR(EmptyGraph, "metrics.empty_graph");

struct GraphMetrics {
    std::string scope = "ALL";
    std::size_t n_nodes = 0;
    std::size_t n_relationships = 0;
    std::uint64_t tpl = 0;  // sum of distances over ordered (source, target) pairs
    std::uint64_t mpl = 0;
    double apl = 0;         // tpl / pairs, 0 when no pair is connected
    std::uint64_t pairs = 0;
    std::size_t sources = 0;
    double sample_fraction = 1;
    std::uint64_t rng_seed = 0;
};

struct ScopeDef {
    std::string name;
    std::set<std::string> classes;
};

ScopeDef scope_all(const onto::OntologyRegistry& reg);
ScopeDef scope_production_planning();
ScopeDef scope_demand_forecasting();
/// Classes that belong to both use-case scopes.
std::set<std::string> shared_classes();
/// ALL, Production Planning, Demand Forecasting.
std::vector<ScopeDef> default_scopes(const onto::OntologyRegistry& reg);

/// Induced subgraph on nodes whose label is whitelisted. InvalidArgument for
/// an empty whitelist or an unregistered class.
GraphStore scope_subgraph(const GraphStore& g, const onto::OntologyRegistry& reg, const ScopeDef& scope);

/// Breadth-first distances from max(2, ceil(fraction * n)) sources drawn
/// without replacement (all nodes at fraction 1). EmptyGraph for a graph
/// without nodes; InvalidArgument for a fraction outside (0, 1] or a
/// single-node graph sampled below 1.
GraphMetrics compute_metrics(const GraphStore& g, double sample_fraction, std::uint64_t rng_seed);

GraphMetrics scope_metrics(const GraphStore& g, const onto::OntologyRegistry& reg, const ScopeDef& scope,
                           double sample_fraction, std::uint64_t rng_seed);

/// `scope,n_nodes,n_relationships,mpl,tpl,apl,sample_fraction,seed` with APL
/// at two decimals.
std::string radar_csv(const std::vector<GraphMetrics>& metrics);
/// InvalidArgument for an empty list, Error "io" when the file cannot be
/// written.
void emit_radar_csv(const std::vector<GraphMetrics>& metrics, const std::filesystem::path& path);

}  // namespace act::metrics
