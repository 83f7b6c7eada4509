#include "act/ontology.hpp"
#include "act/pql.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace act::pql {

std::optional<bool> compare_values(const PropertyValue& a, CompareOp op, const PropertyValue& b) {
    auto rank = [](const PropertyValue& v) {
        if (v.is_numeric()) return 1;
        if (v.is_text_like()) return 3;
        return v.kind() == ValueKind::boolean ? 0 : 2;
    };
    const bool same_rank = rank(a) == rank(b);
    switch (op) {
        case CompareOp::eq: return same_rank && values_match(a, b);
        case CompareOp::ne: return !(same_rank && values_match(a, b));
        default: break;
    }
    if (!same_rank) return std::nullopt;
    const auto c = act::compare_values(a, b);
    switch (op) {
        case CompareOp::lt: return c < 0;
        case CompareOp::le: return c <= 0;
        case CompareOp::gt: return c > 0;
        case CompareOp::ge: return c >= 0;
        default: return std::nullopt;
    }
}

namespace {

constexpr std::uint8_t kFar = 255;

enum class Trav { out, in, both };

Trav forward(RelDirection d) {
    switch (d) {
        case RelDirection::right: return Trav::out;
        case RelDirection::left: return Trav::in;
        case RelDirection::undirected: return Trav::both;
    }
    return Trav::both;
}

Trav flip(Trav t) {
    if (t == Trav::out) return Trav::in;
    if (t == Trav::in) return Trav::out;
    return Trav::both;
}

template <typename F>
void for_each_adjacent(const GraphStore& g, NodeId n, Trav t, F&& f) {
    if (t != Trav::in)
        for (EdgeId e : g.out_edges(n)) f(g.edge(e), g.edge(e).dst);
    if (t != Trav::out)
        for (EdgeId e : g.in_edges(n)) {
            const Edge& edge = g.edge(e);
            if (t == Trav::both && edge.src == edge.dst) continue;  // already seen as out
            f(edge, edge.src);
        }
}

bool props_match(const PropertyMap& have, const PropertyConstraints& want) {
    for (const auto& [k, v] : want) {
        auto it = have.find(k);
        if (it == have.end() || !values_match(it->second, v)) return false;
    }
    return true;
}

/// Static constraints of one node-pattern occurrence.
struct NodeFilter {
    const NodePattern* pattern = nullptr;
    bool any = true;                 // no label, no properties
    std::vector<NodeId> candidates;  // ascending
    std::vector<char> member;        // indexed by raw id

    bool accepts(NodeId id) const { return any || member[static_cast<std::size_t>(raw(id))]; }
};

struct Conjunct {
    const Expr* expr;
    std::vector<int> node_slots;
    std::vector<int> rel_slots;
};

struct Step {
    enum class Kind { bind, expand, finish };
    Kind kind = Kind::bind;
    int clause = 0;
    bool starts_clause = false;

    // bind / expand target
    int node_slot = -1;
    int filter = -1;           // index into filters
    bool slot_prebound = false;  // variable already bound before this step
    int eq_slot = -1;          // seeded from an equality with a bound slot

    // expand
    int from_slot = -1;
    const RelPattern* rel = nullptr;
    Trav trav = Trav::out;
    int rel_slot = -1;
    int seg = -1;
    int min_hops = 1, max_hops = 1;
    bool var_length = false;

    // finish
    int pattern = -1;

    std::vector<int> conjuncts;  // checked once this step has bound its slot
};

struct PatternInfo {
    int path_slot = -1;
    int first_node_slot = -1;
    std::vector<int> segs;       // per rel position
    std::vector<bool> reversed;  // seg was collected walking right-to-left
};

class Evaluator {
public:
    Evaluator(const Query& q, const GraphStore& g, const EvalOptions& o) : q_(q), g_(g), opt_(o) {}

    ResultSet run(EvalStats* stats) {
        compile();
        ResultSet rs;
        for (const auto& item : q_.returns)
            rs.columns.push_back(item.kind == ReturnItem::Kind::relationships
                                     ? "relationships(" + item.name + ")"
                                     : item.name);
        if (!impossible_) {
            node_val_.assign(node_slot_names_.size(), NodeId{0});
            rel_val_.assign(rel_slot_names_.size(), EdgeId{0});
            segs_.assign(seg_count_, {});
            paths_.assign(path_slot_names_.size(), {});
            clause_begin_.assign(q_.matches.size(), 0);
            exec(0, rs.rows);
        }
        std::sort(rs.rows.begin(), rs.rows.end());
        if (q_.distinct) rs.rows.erase(std::unique(rs.rows.begin(), rs.rows.end()), rs.rows.end());
        if (stats) stats->partial_paths = partial_;
        return rs;
    }

private:
    // ---- compilation -------------------------------------------------------

    std::vector<std::string> accepted_labels(const std::string& label) const {
        if (!opt_.registry) return {label};
        return opt_.registry->descendants(label);
    }

    int make_filter(const NodePattern& p) {
        NodeFilter f;
        f.pattern = &p;
        f.any = !p.label && p.properties.empty();
        if (!f.any) {
            std::vector<NodeId> base;
            if (p.label) {
                for (const auto& l : accepted_labels(*p.label)) {
                    if (!p.properties.empty()) {
                        auto hits = g_.lookup(l, p.properties.front().first,
                                              p.properties.front().second);
                        base.insert(base.end(), hits.begin(), hits.end());
                    } else {
                        const auto& all = g_.nodes_with_label(l);
                        base.insert(base.end(), all.begin(), all.end());
                    }
                }
                std::sort(base.begin(), base.end());
            } else {
                for (const Node& n : g_.nodes()) base.push_back(n.id);
            }
            for (NodeId id : base)
                if (props_match(g_.node(id).properties, p.properties)) f.candidates.push_back(id);
            f.member.assign(g_.node_count() + 1, 0);
            for (NodeId id : f.candidates) f.member[static_cast<std::size_t>(raw(id))] = 1;
        }
        filters_.push_back(std::move(f));
        return static_cast<int>(filters_.size()) - 1;
    }

    std::size_t filter_size(int f) const {
        return filters_[f].any ? g_.node_count() : filters_[f].candidates.size();
    }

    int node_slot(const std::optional<std::string>& name) {
        if (name) {
            auto it = node_slots_.find(*name);
            if (it != node_slots_.end()) return it->second;
            node_slot_names_.push_back(*name);
            return node_slots_[*name] = static_cast<int>(node_slot_names_.size()) - 1;
        }
        node_slot_names_.emplace_back();
        return static_cast<int>(node_slot_names_.size()) - 1;
    }

    int rel_slot(const std::optional<std::string>& name) {
        if (!name) return -1;
        auto it = rel_slots_.find(*name);
        if (it != rel_slots_.end()) return it->second;
        rel_slot_names_.push_back(*name);
        return rel_slots_[*name] = static_cast<int>(rel_slot_names_.size()) - 1;
    }

    void collect_conjuncts(const Expr& e) {
        if (e.kind == Expr::Kind::conj) {
            for (const auto& c : e.children) collect_conjuncts(c);
            return;
        }
        if (e.kind == Expr::Kind::compare && e.children.size() > 2) {
            // Chains split into adjacent pairs so each can be pushed down.
            for (std::size_t i = 0; i + 1 < e.children.size(); ++i) {
                Expr pair;
                pair.kind = Expr::Kind::compare;
                pair.ops = {e.ops[i]};
                pair.children = {e.children[i], e.children[i + 1]};
                split_.push_back(std::move(pair));
            }
            return;
        }
        roots_.push_back(&e);
    }

    void variables_of(const Expr& e, Conjunct& c) const {
        if (e.kind == Expr::Kind::variable || e.kind == Expr::Kind::property) {
            if (auto it = node_slots_.find(e.name); it != node_slots_.end())
                c.node_slots.push_back(it->second);
            else if (auto r = rel_slots_.find(e.name); r != rel_slots_.end())
                c.rel_slots.push_back(r->second);
        }
        for (const auto& ch : e.children) variables_of(ch, c);
    }

    void compile() {
        // Slots first so conjunct variables resolve.
        for (const auto& m : q_.matches)
            for (const auto& p : m.patterns) {
                for (const auto& n : p.nodes)
                    if (n.variable) node_slot(n.variable);
                for (const auto& r : p.rels) rel_slot(r.variable);
                if (p.path_variable) {
                    path_slots_[*p.path_variable] = static_cast<int>(path_slot_names_.size());
                    path_slot_names_.push_back(*p.path_variable);
                }
            }
        if (q_.where) collect_conjuncts(*q_.where);
        for (const auto& e : split_) roots_.push_back(&e);
        for (const Expr* e : roots_) {
            Conjunct c{e, {}, {}};
            variables_of(*e, c);
            conjuncts_.push_back(std::move(c));
        }

        std::vector<char> node_bound(node_slot_names_.size() + 64, 0);
        std::vector<char> rel_bound(rel_slot_names_.size(), 0);

        // Plain `x = y` between node variables seeds x from y.
        std::vector<std::pair<int, int>> node_equalities;
        for (const auto& c : conjuncts_) {
            const Expr& e = *c.expr;
            if (e.kind == Expr::Kind::compare && e.ops.size() == 1 && e.ops[0] == CompareOp::eq &&
                e.children[0].kind == Expr::Kind::variable &&
                e.children[1].kind == Expr::Kind::variable) {
                auto a = node_slots_.find(e.children[0].name);
                auto b = node_slots_.find(e.children[1].name);
                if (a != node_slots_.end() && b != node_slots_.end() && a->second != b->second)
                    node_equalities.emplace_back(a->second, b->second);
            }
        }
        auto eq_partner = [&](int slot) {
            for (auto [a, b] : node_equalities) {
                if (a == slot && node_bound[b]) return b;
                if (b == slot && node_bound[a]) return a;
            }
            return -1;
        };

        for (std::size_t ci = 0; ci < q_.matches.size(); ++ci) {
            bool first_in_clause = true;
            for (const auto& p : q_.matches[ci].patterns) {
                PatternInfo info;
                info.path_slot = p.path_variable ? path_slots_[*p.path_variable] : -1;
                std::vector<int> slots, filters;
                for (const auto& n : p.nodes) {
                    slots.push_back(node_slot(n.variable));
                    filters.push_back(make_filter(n));
                }
                if (node_bound.size() <= node_slot_names_.size())
                    node_bound.resize(node_slot_names_.size() + 1, 0);
                if (std::any_of(filters.begin(), filters.end(), [&](int f) {
                        return !filters_[f].any && filters_[f].candidates.empty();
                    }))
                    impossible_ = true;
                for (std::size_t r = 0; r < p.rels.size(); ++r) {
                    info.segs.push_back(seg_count_++);
                    info.reversed.push_back(false);
                }
                info.first_node_slot = slots[0];

                // Anchor: the most selective node occurrence.
                std::size_t anchor = 0;
                std::size_t best = SIZE_MAX;
                for (std::size_t i = 0; i < p.nodes.size(); ++i) {
                    std::size_t est = filter_size(filters[i]);
                    if (node_bound[slots[i]] || eq_partner(slots[i]) >= 0) est = 0;
                    if (est < best) {
                        best = est;
                        anchor = i;
                    }
                }

                auto mark_node = [&](Step& s, int slot) {
                    s.slot_prebound = node_bound[slot];
                    if (!s.slot_prebound) s.eq_slot = eq_partner(slot);
                    node_bound[slot] = 1;
                };

                Step bind;
                bind.kind = Step::Kind::bind;
                bind.clause = static_cast<int>(ci);
                bind.starts_clause = first_in_clause;
                first_in_clause = false;
                bind.node_slot = slots[anchor];
                bind.filter = filters[anchor];
                mark_node(bind, slots[anchor]);
                steps_.push_back(bind);

                auto expand = [&](std::size_t r, std::size_t from, std::size_t to, bool reverse) {
                    const RelPattern& rel = p.rels[r];
                    Step s;
                    s.kind = Step::Kind::expand;
                    s.clause = static_cast<int>(ci);
                    s.from_slot = slots[from];
                    s.node_slot = slots[to];
                    s.filter = filters[to];
                    s.rel = &rel;
                    s.trav = reverse ? flip(forward(rel.direction)) : forward(rel.direction);
                    s.rel_slot = rel_slot(rel.variable);
                    s.seg = info.segs[r];
                    s.var_length = rel.variable_length;
                    if (rel.variable_length) {
                        s.min_hops = rel.min_hops;
                        s.max_hops = rel.max_hops.value_or(opt_.default_max_hops);
                        if (s.max_hops < s.min_hops) impossible_ = true;
                    }
                    if (reverse) info.reversed[r] = true;
                    mark_node(s, slots[to]);
                    if (s.rel_slot >= 0) rel_bound[s.rel_slot] = 1;
                    steps_.push_back(s);
                };
                for (std::size_t r = anchor; r < p.rels.size(); ++r) expand(r, r, r + 1, false);
                for (std::size_t r = anchor; r-- > 0;) expand(r, r + 1, r, true);

                Step fin;
                fin.kind = Step::Kind::finish;
                fin.clause = static_cast<int>(ci);
                fin.pattern = static_cast<int>(patterns_.size());
                steps_.push_back(fin);
                patterns_.push_back(std::move(info));
                pattern_refs_.push_back(&p);
            }
        }

        // Each conjunct runs after the step that binds its last variable.
        std::vector<int> node_step(node_slot_names_.size(), -1), rel_step(rel_slot_names_.size(), -1);
        for (std::size_t i = 0; i < steps_.size(); ++i) {
            const Step& s = steps_[i];
            if (s.kind == Step::Kind::finish) continue;
            if (node_step[s.node_slot] < 0) node_step[s.node_slot] = static_cast<int>(i);
            if (s.rel_slot >= 0 && rel_step[s.rel_slot] < 0)
                rel_step[s.rel_slot] = static_cast<int>(i);
        }
        for (std::size_t c = 0; c < conjuncts_.size(); ++c) {
            int at = 0;
            for (int s : conjuncts_[c].node_slots) at = std::max(at, node_step[s]);
            for (int s : conjuncts_[c].rel_slots) at = std::max(at, rel_step[s]);
            if (steps_.empty()) {
                impossible_ = true;
                break;
            }
            steps_[static_cast<std::size_t>(at)].conjuncts.push_back(static_cast<int>(c));
        }
    }

    // ---- expression evaluation --------------------------------------------

    struct Operand {
        enum class Kind { null, node, edge, value } kind = Kind::null;
        std::int64_t id = 0;
        const PropertyValue* value = nullptr;
    };

    Operand resolve(const Expr& e) const {
        Operand o;
        if (e.kind == Expr::Kind::literal) {
            o.kind = Operand::Kind::value;
            o.value = &e.literal;
            return o;
        }
        const PropertyMap* props = nullptr;
        if (auto it = node_slots_.find(e.name); it != node_slots_.end()) {
            const NodeId id = node_val_[it->second];
            if (e.kind == Expr::Kind::variable) return {Operand::Kind::node, raw(id), nullptr};
            props = &g_.node(id).properties;
        } else if (auto r = rel_slots_.find(e.name); r != rel_slots_.end()) {
            const EdgeId id = rel_val_[r->second];
            if (e.kind == Expr::Kind::variable) return {Operand::Kind::edge, raw(id), nullptr};
            props = &g_.edge(id).properties;
        }
        if (!props) return o;
        auto it = props->find(e.property);
        if (it == props->end()) return o;
        o.kind = Operand::Kind::value;
        o.value = &it->second;
        return o;
    }

    static std::optional<bool> compare(const Operand& a, CompareOp op, const Operand& b) {
        using K = Operand::Kind;
        if (a.kind == K::null || b.kind == K::null) return std::nullopt;
        if (a.kind == K::value && b.kind == K::value) return compare_values(*a.value, op, *b.value);
        if (op != CompareOp::eq && op != CompareOp::ne) return std::nullopt;
        const bool same = a.kind == b.kind && a.id == b.id;
        return op == CompareOp::eq ? same : !same;
    }

    std::optional<bool> eval(const Expr& e) const {
        switch (e.kind) {
            case Expr::Kind::literal:
                if (e.literal.kind() == ValueKind::boolean) return e.literal.as_bool();
                return std::nullopt;
            case Expr::Kind::variable:
            case Expr::Kind::property: {
                Operand o = resolve(e);
                if (o.kind == Operand::Kind::value && o.value->kind() == ValueKind::boolean)
                    return o.value->as_bool();
                return std::nullopt;
            }
            case Expr::Kind::compare: {
                std::optional<bool> acc = true;
                for (std::size_t i = 0; i + 1 < e.children.size(); ++i) {
                    auto r = compare(resolve(e.children[i]), e.ops[i], resolve(e.children[i + 1]));
                    if (r == false) return false;
                    if (!r) acc = std::nullopt;
                }
                return acc;
            }
            case Expr::Kind::conj: {
                std::optional<bool> acc = true;
                for (const auto& c : e.children) {
                    auto r = eval(c);
                    if (r == false) return false;
                    if (!r) acc = std::nullopt;
                }
                return acc;
            }
            case Expr::Kind::disj: {
                std::optional<bool> acc = false;
                for (const auto& c : e.children) {
                    auto r = eval(c);
                    if (r == true) return true;
                    if (!r) acc = std::nullopt;
                }
                return acc;
            }
            case Expr::Kind::negation: {
                auto r = eval(e.children[0]);
                if (!r) return std::nullopt;
                return !*r;
            }
        }
        return std::nullopt;
    }

    bool conjuncts_hold(const Step& s) const {
        for (int c : s.conjuncts)
            if (eval(*conjuncts_[c].expr) != true) return false;
        return true;
    }

    // ---- execution ---------------------------------------------------------

    bool edge_used(const Step& s, EdgeId e) const {
        for (std::size_t i = clause_begin_[s.clause]; i < used_.size(); ++i)
            if (used_[i] == e) return true;
        return false;
    }

    bool target_ok(const Step& s, NodeId n) const {
        if (!filters_[s.filter].accepts(n)) return false;
        if (s.slot_prebound) return node_val_[s.node_slot] == n;
        if (s.eq_slot >= 0) return node_val_[s.eq_slot] == n;
        return true;
    }

    bool edge_ok(const Step& s, const Edge& e) const {
        if (s.rel->relation && e.relation != *s.rel->relation) return false;
        return props_match(e.properties, s.rel->properties);
    }

    void exec(std::size_t i, std::vector<BindingRow>& rows) {
        if (i == steps_.size()) {
            rows.push_back(project());
            return;
        }
        const Step& s = steps_[i];
        switch (s.kind) {
            case Step::Kind::bind: {
                if (s.starts_clause) clause_begin_[s.clause] = used_.size();
                auto visit = [&](NodeId n) {
                    if (!target_ok(s, n)) return;
                    const NodeId saved = node_val_[s.node_slot];
                    node_val_[s.node_slot] = n;
                    if (conjuncts_hold(s)) exec(i + 1, rows);
                    node_val_[s.node_slot] = saved;
                };
                if (s.slot_prebound) {
                    visit(node_val_[s.node_slot]);
                } else if (s.eq_slot >= 0) {
                    visit(node_val_[s.eq_slot]);
                } else if (filters_[s.filter].any) {
                    for (const Node& n : g_.nodes()) visit(n.id);
                } else {
                    for (NodeId n : filters_[s.filter].candidates) visit(n);
                }
                return;
            }
            case Step::Kind::expand:
                if (s.var_length)
                    expand_var(i, s, node_val_[s.from_slot], 0, rows);
                else
                    expand_fixed(i, s, rows);
                return;
            case Step::Kind::finish: {
                const PatternInfo& info = patterns_[s.pattern];
                if (info.path_slot >= 0) {
                    PathValue& pv = paths_[info.path_slot];
                    pv.nodes.clear();
                    pv.edges.clear();
                    NodeId cur = node_val_[info.first_node_slot];
                    pv.nodes.push_back(cur);
                    for (std::size_t r = 0; r < info.segs.size(); ++r) {
                        const auto& seg = segs_[info.segs[r]];
                        auto walk = [&](EdgeId e) {
                            pv.edges.push_back(e);
                            cur = g_.edge(e).other(cur);
                            pv.nodes.push_back(cur);
                        };
                        if (info.reversed[r])
                            std::for_each(seg.rbegin(), seg.rend(), walk);
                        else
                            std::for_each(seg.begin(), seg.end(), walk);
                    }
                }
                exec(i + 1, rows);
                return;
            }
        }
    }

    void expand_fixed(std::size_t i, const Step& s, std::vector<BindingRow>& rows) {
        for_each_adjacent(g_, node_val_[s.from_slot], s.trav, [&](const Edge& e, NodeId next) {
            if (!edge_ok(s, e) || edge_used(s, e.id) || !target_ok(s, next)) return;
            if (s.rel_slot >= 0 && raw(rel_val_[s.rel_slot]) != 0 && rel_val_[s.rel_slot] != e.id)
                return;
            const NodeId saved_node = node_val_[s.node_slot];
            const EdgeId saved_rel = s.rel_slot >= 0 ? rel_val_[s.rel_slot] : EdgeId{0};
            node_val_[s.node_slot] = next;
            if (s.rel_slot >= 0) rel_val_[s.rel_slot] = e.id;
            used_.push_back(e.id);
            segs_[s.seg].assign(1, e.id);
            if (conjuncts_hold(s)) exec(i + 1, rows);
            used_.pop_back();
            node_val_[s.node_slot] = saved_node;
            if (s.rel_slot >= 0) rel_val_[s.rel_slot] = saved_rel;
        });
    }

    /// Hop distance from each node to the step's target set, following the
    /// step's traversal direction. Lower bound for trail lengths.
    const std::vector<std::uint8_t>* distances(std::size_t i, const Step& s) {
        std::vector<NodeId> sources;
        std::unordered_map<std::int64_t, std::vector<std::uint8_t>>* cache = nullptr;
        std::int64_t key = 0;
        if (s.slot_prebound || s.eq_slot >= 0) {
            const NodeId t = node_val_[s.slot_prebound ? s.node_slot : s.eq_slot];
            cache = &dynamic_dist_[i];
            key = raw(t);
            if (auto it = cache->find(key); it != cache->end()) return &it->second;
            if (cache->size() > 4096) cache->clear();
            sources.push_back(t);
        } else {
            if (auto it = static_dist_.find(i); it != static_dist_.end()) return &it->second;
            const NodeFilter& f = filters_[s.filter];
            if (f.any) return nullptr;  // every node is a target
            sources = f.candidates;
        }
        std::vector<std::uint8_t> dist(g_.node_count() + 1, kFar);
        std::vector<NodeId> frontier;
        for (NodeId n : sources) {
            dist[static_cast<std::size_t>(raw(n))] = 0;
            frontier.push_back(n);
        }
        const Trav back = flip(s.trav);
        for (int d = 1; d <= s.max_hops && !frontier.empty(); ++d) {
            std::vector<NodeId> next;
            for (NodeId n : frontier)
                for_each_adjacent(g_, n, back, [&](const Edge& e, NodeId m) {
                    if (s.rel->relation && e.relation != *s.rel->relation) return;
                    auto& dm = dist[static_cast<std::size_t>(raw(m))];
                    if (dm != kFar) return;
                    dm = static_cast<std::uint8_t>(d);
                    next.push_back(m);
                });
            frontier = std::move(next);
        }
        if (cache) return &((*cache)[key] = std::move(dist));
        return &(static_dist_[i] = std::move(dist));
    }

    void expand_var(std::size_t i, const Step& s, NodeId cur, int depth,
                    std::vector<BindingRow>& rows) {
        if (depth >= s.min_hops && target_ok(s, cur)) {
            const NodeId saved = node_val_[s.node_slot];
            node_val_[s.node_slot] = cur;
            if (conjuncts_hold(s)) exec(i + 1, rows);
            node_val_[s.node_slot] = saved;
        }
        if (depth == s.max_hops) return;
        const std::vector<std::uint8_t>* dist = distances(i, s);
        const int remaining = s.max_hops - depth - 1;
        auto& seg = segs_[s.seg];
        if (depth == 0) seg.clear();
        for_each_adjacent(g_, cur, s.trav, [&](const Edge& e, NodeId next) {
            if (!edge_ok(s, e) || edge_used(s, e.id)) return;
            if (dist && (*dist)[static_cast<std::size_t>(raw(next))] > remaining) return;
            if (++partial_ > opt_.max_partial_paths)
                throw VariableLengthBlowup(
                    "variable-length expansion exceeded " + std::to_string(opt_.max_partial_paths) +
                    " partial paths; tighten the hop bounds");
            used_.push_back(e.id);
            seg.push_back(e.id);
            expand_var(i, s, next, depth + 1, rows);
            seg.pop_back();
            used_.pop_back();
        });
    }

    BindingRow project() const {
        BindingRow row;
        row.reserve(q_.returns.size());
        for (const auto& item : q_.returns) {
            Value v;
            if (item.kind == ReturnItem::Kind::relationships) {
                v.kind = Value::Kind::edge_list;
                v.path.edges = paths_[path_slots_.at(item.name)].edges;
            } else if (auto n = node_slots_.find(item.name); n != node_slots_.end()) {
                v.kind = Value::Kind::node;
                v.node = node_val_[n->second];
            } else if (auto r = rel_slots_.find(item.name); r != rel_slots_.end()) {
                v.kind = Value::Kind::edge;
                v.edge = rel_val_[r->second];
            } else {
                v.kind = Value::Kind::path;
                v.path = paths_[path_slots_.at(item.name)];
            }
            row.push_back(std::move(v));
        }
        return row;
    }

    const Query& q_;
    const GraphStore& g_;
    const EvalOptions& opt_;

    std::map<std::string, int, std::less<>> node_slots_, rel_slots_, path_slots_;
    std::vector<std::string> node_slot_names_, rel_slot_names_, path_slot_names_;
    std::vector<NodeFilter> filters_;
    std::vector<Expr> split_;
    std::vector<const Expr*> roots_;
    std::vector<Conjunct> conjuncts_;
    std::vector<Step> steps_;
    std::vector<PatternInfo> patterns_;
    std::vector<const PathPattern*> pattern_refs_;
    int seg_count_ = 0;
    bool impossible_ = false;

    std::vector<NodeId> node_val_;
    std::vector<EdgeId> rel_val_;
    std::vector<std::vector<EdgeId>> segs_;
    std::vector<PathValue> paths_;
    std::vector<EdgeId> used_;
    std::vector<std::size_t> clause_begin_;
    std::size_t partial_ = 0;

    std::unordered_map<std::size_t, std::vector<std::uint8_t>> static_dist_;
    std::unordered_map<std::size_t, std::unordered_map<std::int64_t, std::vector<std::uint8_t>>>
        dynamic_dist_;
};

}  // namespace

ResultSet evaluate(const Query& q, const GraphStore& g, const EvalOptions& options,
                   EvalStats* stats) {
    return Evaluator(q, g, options).run(stats);
}

}  // namespace act::pql
