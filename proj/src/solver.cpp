#include "propsel/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "propsel/util.hpp"

namespace propsel {

std::string VariantId::str() const {
    if (!gac) return "naive";
    std::string s = "gac-";
    s += incremental_matching ? "incr" : "scratch";
    s += scc == SccScope::PerComponent ? "-comp" : "-full";
    s += trigger == Trigger::AssignmentOnly ? "-assign" : "-any";
    return s;
}

VariantId VariantId::from_index(int i) {
    if (i < 0 || i >= kVariantCount) throw std::out_of_range("variant index out of range");
    if (i == 0) return naive();
    VariantId v;
    v.gac = true;
    v.incremental_matching = ((i - 1) & 4) != 0;
    v.scc = ((i - 1) & 2) != 0 ? SccScope::PerComponent : SccScope::Full;
    v.trigger = ((i - 1) & 1) != 0 ? Trigger::AssignmentOnly : Trigger::AnyDomainChange;
    return v;
}

std::optional<VariantId> VariantId::from_string(std::string_view s) {
    for (const auto& v : all())
        if (v.str() == s) return v;
    return std::nullopt;
}

const std::array<VariantId, 9>& VariantId::all() {
    static const std::array<VariantId, 9> table = [] {
        std::array<VariantId, 9> t;
        for (int i = 0; i < kVariantCount; ++i) t[i] = from_index(i);
        return t;
    }();
    return table;
}

VariantId default_variant() {
    VariantId v;
    v.gac = true;
    v.incremental_matching = true;
    v.scc = SccScope::PerComponent;
    v.trigger = Trigger::AnyDomainChange;
    return v;
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Sat: return "sat";
        case SolveStatus::Unsat: return "unsat";
        case SolveStatus::Timeout: return "timeout";
    }
    return "?";
}

std::optional<SolveStatus> status_from_string(std::string_view s) {
    if (s == "sat") return SolveStatus::Sat;
    if (s == "unsat") return SolveStatus::Unsat;
    if (s == "timeout") return SolveStatus::Timeout;
    return std::nullopt;
}

namespace {

// Current-domain store with a deletion trail.
struct Store {
    std::vector<std::vector<int64_t>> values;  // per var, declared order
    std::vector<std::vector<uint8_t>> present;
    std::vector<int> dom_size;
    std::vector<std::unordered_map<int64_t, int>> pos_of;  // value -> declared position

    std::vector<std::pair<int, int>> trail;  // (var, position)
    std::vector<size_t> frames;

    // Vars whose domain changed since the last drain.
    std::vector<int> touched;
    std::vector<uint8_t> touched_flag;

    void init(const std::vector<std::vector<int64_t>>& domains) {
        const int n = static_cast<int>(domains.size());
        values = domains;
        present.assign(n, {});
        dom_size.assign(n, 0);
        pos_of.assign(n, {});
        touched_flag.assign(n, 0);
        for (int i = 0; i < n; ++i) {
            present[i].assign(values[i].size(), 1);
            dom_size[i] = static_cast<int>(values[i].size());
            for (int p = 0; p < static_cast<int>(values[i].size()); ++p)
                pos_of[i][values[i][p]] = p;
        }
    }

    // Returns false on wipe-out (the removal is still recorded on the trail).
    bool remove(int var, int pos) {
        present[var][pos] = 0;
        --dom_size[var];
        trail.emplace_back(var, pos);
        if (!touched_flag[var]) {
            touched_flag[var] = 1;
            touched.push_back(var);
        }
        return dom_size[var] > 0;
    }

    void push_frame() { frames.push_back(trail.size()); }

    void pop_frame() {
        const size_t mark = frames.back();
        frames.pop_back();
        while (trail.size() > mark) {
            auto [var, pos] = trail.back();
            trail.pop_back();
            present[var][pos] = 1;
            ++dom_size[var];
        }
    }

    void clear_touched() {
        for (int v : touched) touched_flag[v] = 0;
        touched.clear();
    }

    int64_t assigned_value(int var) const {
        for (size_t p = 0; p < present[var].size(); ++p)
            if (present[var][p]) return values[var][p];
        return 0;  // unreachable on size-1 domains
    }

    std::vector<int64_t> remaining(int var) const {
        std::vector<int64_t> out;
        for (size_t p = 0; p < present[var].size(); ++p)
            if (present[var][p]) out.push_back(values[var][p]);
        return out;
    }
};

// Persistent per-constraint state for an alldifferent constraint.
struct AlldiffState {
    std::vector<int> scope;     // var ids
    std::vector<int64_t> vals;  // sorted union of the scope's original domains
    std::unordered_map<int64_t, int> val_idx;
    std::vector<std::vector<int>> dom_pos;  // [scope pos][val idx] -> declared position, -1 absent
    std::vector<std::vector<int>> val_at;   // [scope pos][declared position] -> val idx

    // Maximum matching, kept across calls when incremental_matching is on.
    std::vector<int> match_of_var;  // scope pos -> val idx, -1 unmatched
    std::vector<int> match_of_val;  // val idx -> scope pos, -1 free

    // Workspace.
    std::vector<int> visited;  // stamps, per value
    int stamp = 0;
    std::vector<uint8_t> reached;
    std::vector<int> scc_id, comp_id, tj_index, tj_low;
    std::vector<uint8_t> on_stack;
    std::vector<int> scc_stack, work_stack;

    int var_count() const { return static_cast<int>(scope.size()); }
    int val_count() const { return static_cast<int>(vals.size()); }
};

AlldiffState make_alldiff_state(const Store& store, const std::vector<int>& scope) {
    AlldiffState g;
    g.scope = scope;
    for (int var : scope)
        for (int64_t v : store.values[var]) g.vals.push_back(v);
    std::sort(g.vals.begin(), g.vals.end());
    g.vals.erase(std::unique(g.vals.begin(), g.vals.end()), g.vals.end());
    for (int i = 0; i < static_cast<int>(g.vals.size()); ++i) g.val_idx[g.vals[i]] = i;

    const int k = g.var_count();
    const int m = g.val_count();
    g.dom_pos.assign(k, std::vector<int>(m, -1));
    g.val_at.resize(k);
    for (int i = 0; i < k; ++i) {
        const int var = scope[i];
        g.val_at[i].resize(store.values[var].size());
        for (int p = 0; p < static_cast<int>(store.values[var].size()); ++p) {
            const int vi = g.val_idx.at(store.values[var][p]);
            g.val_at[i][p] = vi;
            g.dom_pos[i][vi] = p;
        }
    }
    g.match_of_var.assign(k, -1);
    g.match_of_val.assign(m, -1);
    g.visited.assign(m, 0);
    return g;
}

// Residual digraph node ids: scope positions are 0..k-1, value nodes are
// k..k+m-1. Matched edges point var -> value, unmatched value -> var.
// next_edge advances the cursor and returns the next target, or -1.
int next_edge(const Store& store, const AlldiffState& g, int node, int& cursor, uint64_t& ops) {
    const int k = g.var_count();
    if (node < k) {
        if (cursor == 0) {
            cursor = 1;
            ++ops;
            if (g.match_of_var[node] >= 0) return k + g.match_of_var[node];
        }
        return -1;
    }
    const int v = node - k;
    while (cursor < k) {
        const int j = cursor++;
        ++ops;
        if (g.match_of_var[j] == v) continue;
        const int dp = g.dom_pos[j][v];
        if (dp < 0 || !store.present[g.scope[j]][dp]) continue;
        return j;
    }
    return -1;
}

// Undirected view of the same graph (used for the per-component pass).
int next_undirected_edge(const Store& store, const AlldiffState& g, int node, int& cursor,
                         uint64_t& ops) {
    const int k = g.var_count();
    if (node < k) {
        const int var = g.scope[node];
        const int d = static_cast<int>(store.present[var].size());
        while (cursor < d) {
            const int p = cursor++;
            ++ops;
            if (!store.present[var][p]) continue;
            return k + g.val_at[node][p];
        }
        return -1;
    }
    const int v = node - k;
    while (cursor < k) {
        const int j = cursor++;
        ++ops;
        const int dp = g.dom_pos[j][v];
        if (dp < 0 || !store.present[g.scope[j]][dp]) continue;
        return j;
    }
    return -1;
}

bool augment(Store& store, AlldiffState& g, int pos, uint64_t& ops) {
    const int var = g.scope[pos];
    const auto& pres = store.present[var];
    for (int dp = 0; dp < static_cast<int>(pres.size()); ++dp) {
        if (!pres[dp]) continue;
        ++ops;
        const int v = g.val_at[pos][dp];
        if (g.visited[v] == g.stamp) continue;
        g.visited[v] = g.stamp;
        if (g.match_of_val[v] < 0 || augment(store, g, g.match_of_val[v], ops)) {
            g.match_of_var[pos] = v;
            g.match_of_val[v] = pos;
            return true;
        }
    }
    return false;
}

void tarjan_scc(const Store& store, AlldiffState& g, const std::vector<int>& roots,
                uint64_t& ops) {
    const int n = g.var_count() + g.val_count();
    g.tj_index.assign(n, -1);
    g.tj_low.assign(n, 0);
    g.on_stack.assign(n, 0);
    g.scc_id.assign(n, -1);
    g.scc_stack.clear();
    int next_index = 0;
    int next_scc = 0;

    struct Frame {
        int node;
        int cursor;
    };
    std::vector<Frame> call;
    for (int root : roots) {
        if (g.tj_index[root] != -1) continue;
        call.push_back({root, 0});
        g.tj_index[root] = g.tj_low[root] = next_index++;
        g.scc_stack.push_back(root);
        g.on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            const int to = next_edge(store, g, f.node, f.cursor, ops);
            if (to >= 0) {
                if (g.tj_index[to] == -1) {
                    g.tj_index[to] = g.tj_low[to] = next_index++;
                    g.scc_stack.push_back(to);
                    g.on_stack[to] = 1;
                    call.push_back({to, 0});
                } else if (g.on_stack[to]) {
                    g.tj_low[f.node] = std::min(g.tj_low[f.node], g.tj_index[to]);
                }
            } else {
                if (g.tj_low[f.node] == g.tj_index[f.node]) {
                    for (;;) {
                        const int w = g.scc_stack.back();
                        g.scc_stack.pop_back();
                        g.on_stack[w] = 0;
                        g.scc_id[w] = next_scc;
                        if (w == f.node) break;
                    }
                    ++next_scc;
                }
                const int done = f.node;
                call.pop_back();
                if (!call.empty())
                    g.tj_low[call.back().node] =
                        std::min(g.tj_low[call.back().node], g.tj_low[done]);
            }
        }
    }
}

// Regin-style filtering: compute a maximum matching covering every scope
// variable (fail otherwise), then keep exactly the edges that are matched,
// inside an SCC of the residual digraph, or on an alternating path from a
// free value. Any maximum matching yields the same surviving edge set, so
// the result is identical for every knob combination.
bool gac_alldiff_run(Store& store, AlldiffState& g, const VariantId& variant, uint64_t& ops,
                     bool& changed) {
    changed = false;
    const int k = g.var_count();
    const int m = g.val_count();

    if (!variant.incremental_matching) {
        std::fill(g.match_of_var.begin(), g.match_of_var.end(), -1);
        std::fill(g.match_of_val.begin(), g.match_of_val.end(), -1);
    } else {
        for (int i = 0; i < k; ++i) {
            ++ops;
            const int v = g.match_of_var[i];
            if (v < 0) continue;
            const int dp = g.dom_pos[i][v];
            if (dp < 0 || !store.present[g.scope[i]][dp]) {
                g.match_of_var[i] = -1;
                g.match_of_val[v] = -1;
            }
        }
    }
    for (int i = 0; i < k; ++i) {
        if (g.match_of_var[i] >= 0) continue;
        ++g.stamp;
        if (!augment(store, g, i, ops)) return false;
    }

    const int n = k + m;

    // Nodes on alternating paths from free values.
    g.reached.assign(n, 0);
    g.work_stack.clear();
    for (int v = 0; v < m; ++v) {
        if (g.match_of_val[v] < 0) {
            g.reached[k + v] = 1;
            g.work_stack.push_back(k + v);
        }
    }
    while (!g.work_stack.empty()) {
        const int node = g.work_stack.back();
        g.work_stack.pop_back();
        int cursor = 0;
        int to;
        while ((to = next_edge(store, g, node, cursor, ops)) >= 0) {
            if (!g.reached[to]) {
                g.reached[to] = 1;
                g.work_stack.push_back(to);
            }
        }
    }

    // SCCs, either in one pass or per connected component.
    std::vector<int> roots(n);
    std::iota(roots.begin(), roots.end(), 0);
    if (variant.scc == SccScope::PerComponent) {
        g.comp_id.assign(n, -1);
        int next_comp = 0;
        for (int s = 0; s < n; ++s) {
            if (g.comp_id[s] != -1) continue;
            g.comp_id[s] = next_comp;
            g.work_stack.clear();
            g.work_stack.push_back(s);
            while (!g.work_stack.empty()) {
                const int node = g.work_stack.back();
                g.work_stack.pop_back();
                int cursor = 0;
                int to;
                while ((to = next_undirected_edge(store, g, node, cursor, ops)) >= 0) {
                    if (g.comp_id[to] == -1) {
                        g.comp_id[to] = next_comp;
                        g.work_stack.push_back(to);
                    }
                }
            }
            ++next_comp;
        }
        std::stable_sort(roots.begin(), roots.end(),
                         [&](int a, int b) { return g.comp_id[a] < g.comp_id[b]; });
    }
    tarjan_scc(store, g, roots, ops);

    // Delete unsupported edges.
    for (int i = 0; i < k; ++i) {
        const int var = g.scope[i];
        for (int dp = 0; dp < static_cast<int>(store.present[var].size()); ++dp) {
            if (!store.present[var][dp]) continue;
            ++ops;
            const int v = g.val_at[i][dp];
            if (v == g.match_of_var[i]) continue;
            if (g.reached[k + v]) continue;
            if (g.scc_id[i] == g.scc_id[k + v]) continue;
            store.remove(var, dp);  // the matched value remains, no wipe-out
            changed = true;
        }
    }
    return true;
}

// Pairwise-decomposition behaviour: assigned values are removed from the
// rest of the scope, iterated to a local fixpoint.
bool naive_alldiff_run(Store& store, AlldiffState& g, uint64_t& ops, bool& changed) {
    changed = false;
    const int k = g.var_count();
    bool progress = true;
    while (progress) {
        progress = false;
        for (int i = 0; i < k; ++i) {
            const int var = g.scope[i];
            if (store.dom_size[var] != 1) continue;
            ++ops;
            int assigned_pos = 0;
            for (size_t p = 0; p < store.present[var].size(); ++p)
                if (store.present[var][p]) {
                    assigned_pos = static_cast<int>(p);
                    break;
                }
            const int vi = g.val_at[i][assigned_pos];
            for (int j = 0; j < k; ++j) {
                if (j == i) continue;
                ++ops;
                const int dp = g.dom_pos[j][vi];
                if (dp < 0 || !store.present[g.scope[j]][dp]) continue;
                if (!store.remove(g.scope[j], dp)) {
                    changed = true;
                    return false;
                }
                changed = true;
                progress = true;
            }
        }
    }
    return true;
}

bool diseq_run(Store& store, int a, int b, uint64_t& ops, bool& changed) {
    changed = false;
    for (int round = 0; round < 2; ++round) {
        const int x = round == 0 ? a : b;
        const int y = round == 0 ? b : a;
        ++ops;
        if (store.dom_size[x] != 1) continue;
        const int64_t v = store.assigned_value(x);
        auto it = store.pos_of[y].find(v);
        if (it == store.pos_of[y].end() || !store.present[y][it->second]) continue;
        changed = true;
        if (!store.remove(y, it->second)) return false;
    }
    return true;
}

struct TableState {
    std::vector<int> scope;
    TablePolarity polarity = TablePolarity::Allowed;
    std::vector<std::vector<int64_t>> tuples;         // positive: as declared
    std::vector<std::vector<int64_t>> sorted_tuples;  // negative: lexicographic
    std::vector<uint8_t> tuple_valid;                 // workspace
};

bool negative_has_support(const Store& store, TableState& t, int fixed_pos, int64_t fixed_val,
                          std::vector<int64_t>& buf, size_t pos, uint64_t& ops) {
    const size_t k = t.scope.size();
    if (pos == k) {
        ++ops;
        return !std::binary_search(t.sorted_tuples.begin(), t.sorted_tuples.end(), buf);
    }
    if (static_cast<int>(pos) == fixed_pos) {
        buf[pos] = fixed_val;
        return negative_has_support(store, t, fixed_pos, fixed_val, buf, pos + 1, ops);
    }
    const int var = t.scope[pos];
    for (size_t p = 0; p < store.present[var].size(); ++p) {
        if (!store.present[var][p]) continue;
        ++ops;
        buf[pos] = store.values[var][p];
        if (negative_has_support(store, t, fixed_pos, fixed_val, buf, pos + 1, ops)) return true;
    }
    return false;
}

// One support-scan pass. Iterated to fixpoint by the outer propagation
// loop, which re-runs the constraint whenever a scope domain changes.
bool table_run(Store& store, TableState& t, uint64_t& ops, bool& changed) {
    changed = false;
    const int k = static_cast<int>(t.scope.size());
    if (t.polarity == TablePolarity::Allowed) {
        t.tuple_valid.assign(t.tuples.size(), 0);
        for (size_t ti = 0; ti < t.tuples.size(); ++ti) {
            bool valid = true;
            for (int j = 0; j < k && valid; ++j) {
                ++ops;
                auto it = store.pos_of[t.scope[j]].find(t.tuples[ti][j]);
                valid = it != store.pos_of[t.scope[j]].end() &&
                        store.present[t.scope[j]][it->second];
            }
            t.tuple_valid[ti] = valid;
        }
        for (int i = 0; i < k; ++i) {
            const int var = t.scope[i];
            for (size_t p = 0; p < store.present[var].size(); ++p) {
                if (!store.present[var][p]) continue;
                const int64_t v = store.values[var][p];
                bool supported = false;
                for (size_t ti = 0; ti < t.tuples.size() && !supported; ++ti) {
                    ++ops;
                    supported = t.tuple_valid[ti] && t.tuples[ti][i] == v;
                }
                if (supported) continue;
                changed = true;
                if (!store.remove(var, static_cast<int>(p))) return false;
            }
        }
        return true;
    }
    std::vector<int64_t> buf(k);
    for (int i = 0; i < k; ++i) {
        const int var = t.scope[i];
        for (size_t p = 0; p < store.present[var].size(); ++p) {
            if (!store.present[var][p]) continue;
            if (negative_has_support(store, t, i, store.values[var][p], buf, 0, ops)) continue;
            changed = true;
            if (!store.remove(var, static_cast<int>(p))) return false;
        }
    }
    return true;
}

class Searcher {
public:
    Searcher(const CspInstance& inst, const VariantId& variant, const SearchLimits& limits)
        : inst_(inst), variant_(variant), limits_(limits) {
        std::vector<std::vector<int64_t>> domains;
        domains.reserve(inst.variables.size());
        for (const auto& v : inst.variables) domains.push_back(v.domain);
        store_.init(domains);

        const int nc = static_cast<int>(inst.constraints.size());
        alldiff_.resize(nc);
        table_.resize(nc);
        cons_of_var_.assign(inst.variables.size(), {});
        in_queue_.assign(nc, 0);
        for (int ci = 0; ci < nc; ++ci) {
            const Constraint& c = inst.constraints[ci];
            for (int var : c.scope) cons_of_var_[var].push_back(ci);
            if (c.kind == ConstraintKind::AllDifferent) {
                alldiff_[ci] = make_alldiff_state(store_, c.scope);
            } else if (c.kind == ConstraintKind::Table) {
                TableState t;
                t.scope = c.scope;
                t.polarity = c.polarity;
                t.tuples = c.tuples;
                if (c.polarity == TablePolarity::Disallowed) {
                    t.sorted_tuples = c.tuples;
                    std::sort(t.sorted_tuples.begin(), t.sorted_tuples.end());
                }
                table_[ci] = std::move(t);
            }
        }
        check_clock_ = std::isfinite(limits_.time_limit_s);
        start_cpu_ = thread_cpu_seconds();
    }

    SolveResult run() {
        SolveResult result;
        result.record.instance = inst_.name;
        result.record.variant = variant_;

        SolveStatus status;
        if (!propagate_to_fixpoint()) {
            clear_queue();
            status = SolveStatus::Unsat;
        } else if (stop_) {
            status = SolveStatus::Timeout;
        } else {
            status = search(0);
        }
        result.record.status = status;
        result.record.nodes = nodes_;
        result.record.op_count = ops_;
        result.record.cpu_time_s = thread_cpu_seconds() - start_cpu_;
        if (status == SolveStatus::Sat) result.solution = solution_;
        return result;
    }

private:
    bool limits_hit() {
        if (stop_) return true;
        if (limits_.op_limit && ops_ >= *limits_.op_limit) return stop_ = true;
        if (limits_.node_limit && nodes_ >= *limits_.node_limit) return stop_ = true;
        if (check_clock_ && thread_cpu_seconds() - start_cpu_ >= limits_.time_limit_s)
            return stop_ = true;
        return false;
    }

    bool wants_event(int ci, bool assigned) const {
        switch (inst_.constraints[ci].kind) {
            case ConstraintKind::AllDifferent:
                if (!variant_.gac) return assigned;
                return variant_.trigger == Trigger::AnyDomainChange || assigned;
            case ConstraintKind::Disequality:
                return assigned;
            case ConstraintKind::Table:
                return true;
        }
        return true;
    }

    void drain_changes() {
        for (int var : store_.touched) {
            const bool assigned = store_.dom_size[var] == 1;
            for (int ci : cons_of_var_[var]) {
                if (in_queue_[ci] || !wants_event(ci, assigned)) continue;
                in_queue_[ci] = 1;
                queue_.push_back(ci);
            }
        }
        store_.clear_touched();
    }

    void clear_queue() {
        for (int ci : queue_) in_queue_[ci] = 0;
        queue_.clear();
        store_.clear_touched();
    }

    bool run_propagator(int ci, bool& changed) {
        const Constraint& c = inst_.constraints[ci];
        switch (c.kind) {
            case ConstraintKind::AllDifferent:
                return variant_.gac ? gac_alldiff_run(store_, alldiff_[ci], variant_, ops_, changed)
                                    : naive_alldiff_run(store_, alldiff_[ci], ops_, changed);
            case ConstraintKind::Disequality:
                return diseq_run(store_, c.scope[0], c.scope[1], ops_, changed);
            case ConstraintKind::Table:
                return table_run(store_, table_[ci], ops_, changed);
        }
        return true;
    }

    // Queue-driven propagation followed by stabilisation sweeps. The sweeps
    // re-run every propagator until nothing changes, so the fixpoint does
    // not depend on the trigger policy; only the op count does.
    bool propagate_to_fixpoint() {
        const int nc = static_cast<int>(inst_.constraints.size());
        for (;;) {
            while (!queue_.empty()) {
                if (limits_hit()) return true;
                const int ci = queue_.front();
                queue_.pop_front();
                in_queue_[ci] = 0;
                bool changed = false;
                if (!run_propagator(ci, changed)) return false;
                drain_changes();
            }
            if (limits_hit()) return true;
            bool any = false;
            for (int ci = 0; ci < nc; ++ci) {
                bool changed = false;
                if (!run_propagator(ci, changed)) return false;
                if (changed) {
                    any = true;
                    drain_changes();
                }
                if (limits_hit()) return true;
            }
            if (!any && queue_.empty()) return true;
        }
    }

    SolveStatus search(int depth) {
        if (depth == static_cast<int>(inst_.variables.size())) {
            solution_.resize(inst_.variables.size());
            for (size_t v = 0; v < inst_.variables.size(); ++v)
                solution_[v] = store_.assigned_value(static_cast<int>(v));
            return SolveStatus::Sat;
        }
        const int var = depth;
        std::vector<int> candidates;
        candidates.reserve(store_.dom_size[var]);
        for (int p = 0; p < static_cast<int>(store_.present[var].size()); ++p)
            if (store_.present[var][p]) candidates.push_back(p);

        for (int pick : candidates) {
            if (limits_hit()) return SolveStatus::Timeout;
            ++nodes_;
            store_.push_frame();
            for (int p = 0; p < static_cast<int>(store_.present[var].size()); ++p) {
                if (p == pick || !store_.present[var][p]) continue;
                store_.remove(var, p);
            }
            drain_changes();
            if (propagate_to_fixpoint()) {
                if (stop_) return SolveStatus::Timeout;
                const SolveStatus st = search(depth + 1);
                if (st != SolveStatus::Unsat) return st;
            } else {
                clear_queue();
            }
            store_.pop_frame();
        }
        return SolveStatus::Unsat;
    }

    const CspInstance& inst_;
    VariantId variant_;
    SearchLimits limits_;
    Store store_;
    std::vector<AlldiffState> alldiff_;
    std::vector<TableState> table_;
    std::vector<std::vector<int>> cons_of_var_;
    std::deque<int> queue_;
    std::vector<uint8_t> in_queue_;
    uint64_t ops_ = 0;
    uint64_t nodes_ = 0;
    double start_cpu_ = 0.0;
    bool check_clock_ = true;
    bool stop_ = false;
    std::vector<int64_t> solution_;
};

}  // namespace

SolveResult solve(const CspInstance& instance, const VariantId& variant,
                  const SearchLimits& limits) {
    if (limits.time_limit_s <= 0) throw std::invalid_argument("time limit must be positive");
    if (limits.node_limit && *limits.node_limit == 0)
        throw std::invalid_argument("node limit must be positive");
    if (limits.op_limit && *limits.op_limit == 0)
        throw std::invalid_argument("op limit must be positive");
    Searcher searcher(instance, variant, limits);
    return searcher.run();
}

PropagateOutcome propagate_naive_alldiff(std::vector<std::vector<int64_t>>& domains,
                                         uint64_t* op_count) {
    Store store;
    store.init(domains);
    std::vector<int> scope(domains.size());
    std::iota(scope.begin(), scope.end(), 0);
    AlldiffState g = make_alldiff_state(store, scope);
    uint64_t ops = 0;
    bool changed = false;
    const bool ok = naive_alldiff_run(store, g, ops, changed);
    if (op_count) *op_count += ops;
    for (size_t i = 0; i < domains.size(); ++i) domains[i] = store.remaining(static_cast<int>(i));
    if (!ok) return PropagateOutcome::Failed;
    return changed ? PropagateOutcome::Pruned : PropagateOutcome::Stable;
}

PropagateOutcome propagate_gac_alldiff(std::vector<std::vector<int64_t>>& domains,
                                       const VariantId& knobs, uint64_t* op_count) {
    Store store;
    store.init(domains);
    std::vector<int> scope(domains.size());
    std::iota(scope.begin(), scope.end(), 0);
    AlldiffState g = make_alldiff_state(store, scope);
    VariantId v = knobs;
    v.gac = true;
    uint64_t ops = 0;
    bool changed = false;
    const bool ok = gac_alldiff_run(store, g, v, ops, changed);
    if (op_count) *op_count += ops;
    for (size_t i = 0; i < domains.size(); ++i) domains[i] = store.remaining(static_cast<int>(i));
    if (!ok) return PropagateOutcome::Failed;
    return changed ? PropagateOutcome::Pruned : PropagateOutcome::Stable;
}

}  // namespace propsel
