#include "act/metrics.hpp"

#include "act/detail/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace act::metrics {

namespace {

// Undirected adjacency in compressed rows, indexed by node position.
struct Adjacency {
    std::vector<std::size_t> offset;
    std::vector<std::uint32_t> target;
};

Adjacency undirected(const GraphStore& g) {
    const std::size_t n = g.node_count();
    Adjacency a;
    a.offset.assign(n + 1, 0);
    for (const Edge& e : g.edges()) {
        ++a.offset[static_cast<std::size_t>(raw(e.src))];
        ++a.offset[static_cast<std::size_t>(raw(e.dst))];
    }
    for (std::size_t i = 1; i <= n; ++i) a.offset[i] += a.offset[i - 1];
    a.target.resize(a.offset[n]);
    std::vector<std::size_t> fill(a.offset.begin(), a.offset.end() - 1);
    for (const Edge& e : g.edges()) {
        const auto s = static_cast<std::uint32_t>(raw(e.src) - 1);
        const auto d = static_cast<std::uint32_t>(raw(e.dst) - 1);
        a.target[fill[s]++] = d;
        a.target[fill[d]++] = s;
    }
    return a;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string shortest(double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
}

}  // namespace

std::set<std::string> shared_classes() {
    return {"Forecast", "UseCase", "DecisionMakingOption", "Material", "Client", "Organization",
            "ProductionPlant", "ShopFloor", "Model", "Insight", "Analysis"};
}

ScopeDef scope_production_planning() {
    ScopeDef s{"Production Planning",
               {"WorkOrder", "ProductionLine", "Shift", "Person", "ManufacturedBatch",
                "ManufacturingProcess", "SimulationModel"}};
    for (const auto& c : shared_classes()) s.classes.insert(c);
    return s;
}

ScopeDef scope_demand_forecasting() {
    ScopeDef s{"Demand Forecasting",
               {"ShippingOrder", "StockOrder", "StockLocation", "DatasetSpecification", "Dataset",
                "FeatureVector", "RegressionModel", "Algorithm", "RegressionAlgorithm",
                "InformationProvenance", "DataSource", "TimeSeries"}};
    for (const auto& c : shared_classes()) s.classes.insert(c);
    return s;
}

ScopeDef scope_all(const onto::OntologyRegistry& reg) {
    ScopeDef s{"ALL", {}};
    for (const auto& [name, def] : reg.classes()) s.classes.insert(name);
    return s;
}

std::vector<ScopeDef> default_scopes(const onto::OntologyRegistry& reg) {
    return {scope_all(reg), scope_production_planning(), scope_demand_forecasting()};
}

GraphStore scope_subgraph(const GraphStore& g, const onto::OntologyRegistry& reg, const ScopeDef& scope) {
    if (scope.classes.empty()) throw InvalidArgument("scope '" + scope.name + "' has no classes");
    for (const auto& c : scope.classes)
        if (!reg.find_class(c)) throw InvalidArgument("scope '" + scope.name + "': unknown class " + c);
    GraphStore out;
    std::vector<NodeId> remap(g.node_count() + 1, NodeId{});
    for (const Node& n : g.nodes())
        if (scope.classes.count(n.label))
            remap[static_cast<std::size_t>(raw(n.id))] = out.add_node(n.label, n.properties, n.provenance);
    for (const Edge& e : g.edges()) {
        const NodeId s = remap[static_cast<std::size_t>(raw(e.src))];
        const NodeId d = remap[static_cast<std::size_t>(raw(e.dst))];
        if (raw(s) != 0 && raw(d) != 0) out.add_edge(e.relation, s, d, e.properties, e.provenance);
    }
    return out;
}

GraphMetrics compute_metrics(const GraphStore& g, double sample_fraction, std::uint64_t rng_seed) {
    const std::size_t n = g.node_count();
    if (n == 0) throw EmptyGraph("graph has no nodes");
    if (!(sample_fraction > 0 && sample_fraction <= 1))
        throw InvalidArgument("sample fraction must be in (0, 1], got " + shortest(sample_fraction));
    if (sample_fraction < 1 && n < 2) throw InvalidArgument("sampling needs at least 2 nodes");

    GraphMetrics m;
    m.n_nodes = n;
    m.n_relationships = g.edge_count();
    m.sample_fraction = sample_fraction;
    m.rng_seed = rng_seed;

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::size_t k = n;
    if (sample_fraction < 1) {
        const auto want = static_cast<std::size_t>(std::ceil(sample_fraction * static_cast<double>(n) - 1e-9));
        k = std::min(n, std::max<std::size_t>(2, want));
        // Partial Fisher-Yates: the first k entries are the sample.
        detail::Rng rng(rng_seed, "metrics");
        for (std::size_t i = 0; i < k; ++i) std::swap(order[i], order[i + rng.below(n - i)]);
    }
    m.sources = k;

    const Adjacency adj = undirected(g);
    std::vector<std::uint32_t> dist(n), queue(n);
    constexpr std::uint32_t kUnseen = ~0u;
    for (std::size_t s = 0; s < k; ++s) {
        std::fill(dist.begin(), dist.end(), kUnseen);
        std::size_t head = 0, tail = 0;
        dist[order[s]] = 0;
        queue[tail++] = order[s];
        while (head < tail) {
            const std::uint32_t u = queue[head++];
            for (std::size_t i = adj.offset[u]; i < adj.offset[u + 1]; ++i) {
                const std::uint32_t v = adj.target[i];
                if (dist[v] != kUnseen) continue;
                dist[v] = dist[u] + 1;
                m.tpl += dist[v];
                m.mpl = std::max<std::uint64_t>(m.mpl, dist[v]);
                ++m.pairs;
                queue[tail++] = v;
            }
        }
    }
    m.apl = m.pairs ? static_cast<double>(m.tpl) / static_cast<double>(m.pairs) : 0.0;
    return m;
}

GraphMetrics scope_metrics(const GraphStore& g, const onto::OntologyRegistry& reg, const ScopeDef& scope,
                           double sample_fraction, std::uint64_t rng_seed) {
    GraphMetrics m = compute_metrics(scope_subgraph(g, reg, scope), sample_fraction, rng_seed);
    m.scope = scope.name;
    return m;
}

std::string radar_csv(const std::vector<GraphMetrics>& metrics) {
    std::ostringstream os;
    os << "scope,n_nodes,n_relationships,mpl,tpl,apl,sample_fraction,seed\n";
    for (const auto& m : metrics) {
        const bool quote = m.scope.find_first_of(",\"") != std::string::npos;
        std::string scope = m.scope;
        if (quote) {
            std::string q = "\"";
            for (char c : scope) q += c == '"' ? std::string("\"\"") : std::string(1, c);
            scope = q + "\"";
        }
        os << scope << ',' << m.n_nodes << ',' << m.n_relationships << ',' << m.mpl << ',' << m.tpl << ','
           << fixed(m.apl, 2) << ',' << shortest(m.sample_fraction) << ',' << m.rng_seed << '\n';
    }
    return os.str();
}

void emit_radar_csv(const std::vector<GraphMetrics>& metrics, const std::filesystem::path& path) {
    if (metrics.empty()) throw InvalidArgument("no scopes to write");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write " + path.string());
    out << radar_csv(metrics);
    if (!out.flush()) throw Error("io", "cannot write " + path.string());
}

}  // namespace act::metrics
