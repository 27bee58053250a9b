#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "crowdroute/plan.hpp"

namespace crowdroute {

enum class MoveKind : int { IntraRoute = 0, InterRoute = 1, OneExchange = 2 };

inline constexpr int kNumMoveKinds = 3;

/// Route-level sort key of a priority list: remaining available time for intra-route moves,
/// occupation time for inter-route moves, largest request unused service time for 1-exchange.
inline double priority_key(MoveKind kind, const PlanState& plan, int k) {
    switch (kind) {
        case MoveKind::IntraRoute: return plan.schedule(k).remaining;
        case MoveKind::InterRoute: return route_occupation(plan, k);
        case MoveKind::OneExchange: {
            double best = -std::numeric_limits<double>::infinity();
            for (int j : plan.requests_on(k)) best = std::max(best, request_metrics(plan, j).unused_service);
            return best;
        }
    }
    return 0.0;
}

/// Routes sorted by descending key. Each route is handed out at most once per life cycle;
/// an exhausted list is rebuilt over all current non-idle routes.
class PriorityList {
public:
    struct Entry {
        double key;
        int route;
    };

    explicit PriorityList(MoveKind kind = MoveKind::IntraRoute) : kind_(kind) {}

    MoveKind kind() const { return kind_; }
    const std::vector<Entry>& entries() const { return entries_; }
    int rebuild_count() const { return rebuilds_; }

    void rebuild(const PlanState& plan) {
        entries_.clear();
        consumed_.assign(plan.num_routes(), 0);
        for (int k = 0; k < plan.num_routes(); ++k)
            if (!plan.is_idle(k)) entries_.push_back({priority_key(kind_, plan, k), k});
        std::sort(entries_.begin(), entries_.end(), before);
        ++rebuilds_;
    }

    /// Head of the list, rebuilding once if nothing usable remains. nullopt only when every
    /// courier is idle.
    std::optional<int> next_route(const PlanState& plan, int exclude = -1) {
        if (auto head = usable_head(plan, exclude)) return head;
        rebuild(plan);
        return usable_head(plan, exclude);
    }

    /// Marks route k as considered for this life cycle.
    void remove(int k) {
        std::erase_if(entries_, [k](const Entry& e) { return e.route == k; });
        if (k >= 0 && k < static_cast<int>(consumed_.size())) consumed_[k] = 1;
    }

    /// Re-keys route k and re-inserts it by binary search. Routes already consumed in this
    /// life cycle stay out.
    void update_key(int k, double key) {
        std::erase_if(entries_, [k](const Entry& e) { return e.route == k; });
        if (k < static_cast<int>(consumed_.size()) && consumed_[k]) return;
        const Entry e{key, k};
        entries_.insert(std::upper_bound(entries_.begin(), entries_.end(), e, before), e);
    }

private:
    static bool before(const Entry& a, const Entry& b) {
        return a.key > b.key || (a.key == b.key && a.route < b.route);
    }

    std::optional<int> usable_head(const PlanState& plan, int exclude) {
        std::erase_if(entries_, [&](const Entry& e) { return plan.is_idle(e.route); });
        for (const Entry& e : entries_)
            if (e.route != exclude) return e.route;
        return std::nullopt;
    }

    MoveKind kind_;
    std::vector<Entry> entries_;
    std::vector<char> consumed_;
    int rebuilds_ = 0;
};

enum class Relation { Precedes, Follows };

/// Remaining tenures for forbidden adjacencies.
///
/// `precede` (2|J| x 2|J|): entry [row b][col a] > 0 forbids node a directly preceding node b.
/// `follow` ((|K| + 2|J|) x 2|J|): entry [row b][col a] > 0 forbids node a directly following
/// node b; the first |K| rows are crowdsourcee origins. Request nodes are numbered pickup j -> j,
/// delivery j -> |J| + j.
class TabuLedger {
public:
    TabuLedger(int n_requests, int n_crowdsourcees, int tenure)
        : n_req_(n_requests), n_cour_(n_crowdsourcees), tenure_(tenure),
          precede_(static_cast<std::size_t>(4 * n_requests * n_requests), 0),
          follow_(static_cast<std::size_t>((n_crowdsourcees + 2 * n_requests) * 2 * n_requests), 0) {}

    int tenure() const { return tenure_; }
    std::pair<int, int> precede_shape() const { return {2 * n_req_, 2 * n_req_}; }
    std::pair<int, int> follow_shape() const { return {n_cour_ + 2 * n_req_, 2 * n_req_}; }

    int node_column(NodeRef n) const { return n.is_pickup() ? n.index : n_req_ + n.index; }
    int follow_row(NodeRef n) const { return n.is_origin() ? n.index : n_cour_ + node_column(n); }

    /// Remaining tenure of "a `relation` b" (a precedes b / a follows b).
    int entry(NodeRef a, NodeRef b, Relation relation) const {
        if (a.is_origin()) return 0;
        if (relation == Relation::Precedes) {
            if (b.is_origin()) return 0;
            return precede_[index_precede(b, a)];
        }
        return follow_[index_follow(b, a)];
    }

    bool is_tabu(NodeRef a, NodeRef b, Relation relation) const { return entry(a, b, relation) > 0; }

    /// Forbids `moved` from returning to `relation` of `former_neighbor` for `tenure` ticks.
    void record_separation(NodeRef moved, NodeRef former_neighbor, Relation relation) {
        if (moved.is_origin() || tenure_ <= 0) return;
        if (relation == Relation::Precedes) {
            if (former_neighbor.is_origin()) return;
            precede_[index_precede(former_neighbor, moved)] = tenure_;
        } else {
            follow_[index_follow(former_neighbor, moved)] = tenure_;
        }
    }

    void tick() {
        for (int& v : precede_) v = v > 0 ? v - 1 : 0;
        for (int& v : follow_) v = v > 0 ? v - 1 : 0;
    }

    int max_entry() const {
        int m = 0;
        for (int v : precede_) m = std::max(m, v);
        for (int v : follow_) m = std::max(m, v);
        return m;
    }

    std::size_t precede_cells() const { return precede_.size(); }
    std::size_t follow_cells() const { return follow_.size(); }

    /// True if adjacency pred -> succ is currently forbidden from either side.
    bool adjacency_tabu(NodeRef pred, NodeRef succ) const {
        return is_tabu(succ, pred, Relation::Follows) || is_tabu(pred, succ, Relation::Precedes);
    }

private:
    std::size_t index_precede(NodeRef row, NodeRef col) const {
        return static_cast<std::size_t>(node_column(row)) * (2 * n_req_) + node_column(col);
    }
    std::size_t index_follow(NodeRef row, NodeRef col) const {
        return static_cast<std::size_t>(follow_row(row)) * (2 * n_req_) + node_column(col);
    }

    int n_req_;
    int n_cour_;
    int tenure_;
    std::vector<int> precede_;
    std::vector<int> follow_;
};

struct RuleConfig {
    bool enabled = true;
    int tabu_tenure = 3;
    // One ledger per neighborhood move kind instead of a shared pair of matrices.
    bool per_move_kind = false;
};

/// Rule state owned by a rollout: three priority lists and the tabu ledger(s).
class RuleSet {
public:
    RuleSet(const ProblemInstance& inst, RuleConfig cfg = {})
        : cfg_(cfg),
          lists_{PriorityList(MoveKind::IntraRoute), PriorityList(MoveKind::InterRoute),
                 PriorityList(MoveKind::OneExchange)} {
        const int n_ledgers = cfg.per_move_kind ? kNumMoveKinds : 1;
        for (int i = 0; i < n_ledgers; ++i)
            ledgers_.emplace_back(inst.num_requests(), inst.num_crowdsourcees(), cfg.tabu_tenure);
    }

    const RuleConfig& config() const { return cfg_; }
    bool enabled() const { return cfg_.enabled; }

    PriorityList& list(MoveKind kind) { return lists_[static_cast<int>(kind)]; }
    const PriorityList& list(MoveKind kind) const { return lists_[static_cast<int>(kind)]; }

    TabuLedger& ledger(MoveKind kind) { return ledgers_[cfg_.per_move_kind ? static_cast<int>(kind) : 0]; }
    const TabuLedger& ledger(MoveKind kind) const {
        return ledgers_[cfg_.per_move_kind ? static_cast<int>(kind) : 0];
    }
    const std::vector<TabuLedger>& ledgers() const { return ledgers_; }

    /// Called once per applied neighborhood move, before its separations are recorded.
    void tick() {
        for (auto& l : ledgers_) l.tick();
    }

private:
    RuleConfig cfg_;
    std::array<PriorityList, kNumMoveKinds> lists_;
    std::vector<TabuLedger> ledgers_;
};

/// Adjacencies of `after` that were not present in `before`.
inline std::vector<std::pair<NodeRef, NodeRef>> new_adjacencies(std::span<const NodeRef> before,
                                                                 std::span<const NodeRef> after) {
    std::vector<std::pair<NodeRef, NodeRef>> out;
    for (std::size_t i = 1; i < after.size(); ++i) {
        const std::pair<NodeRef, NodeRef> adj{after[i - 1], after[i]};
        bool existed = false;
        for (std::size_t m = 1; m < before.size() && !existed; ++m)
            existed = before[m - 1] == adj.first && before[m] == adj.second;
        if (!existed) out.push_back(adj);
    }
    return out;
}

/// True if `after` creates an adjacency the ledger forbids.
inline bool creates_tabu_adjacency(const TabuLedger& ledger, std::span<const NodeRef> before,
                                   std::span<const NodeRef> after) {
    for (const auto& [pred, succ] : new_adjacencies(before, after))
        if (ledger.adjacency_tabu(pred, succ)) return true;
    return false;
}

/// Records every adjacency involving a moved request node that existed in `before_routes`
/// but no longer exists in `after_routes`.
inline void record_broken_adjacencies(TabuLedger& ledger, const std::vector<Route>& before_routes,
                                      const std::vector<Route>& after_routes, const std::vector<int>& moved_requests) {
    auto moved = [&](NodeRef n) {
        return !n.is_origin() && std::find(moved_requests.begin(), moved_requests.end(), n.index) != moved_requests.end();
    };
    auto still_adjacent = [&](NodeRef a, NodeRef b) {
        for (const Route& r : after_routes)
            for (std::size_t i = 1; i < r.size(); ++i)
                if (r[i - 1] == a && r[i] == b) return true;
        return false;
    };
    for (const Route& r : before_routes) {
        for (std::size_t i = 1; i < r.size(); ++i) {
            const NodeRef pred = r[i - 1], succ = r[i];
            if (still_adjacent(pred, succ)) continue;
            if (moved(succ)) ledger.record_separation(succ, pred, Relation::Follows);
            if (moved(pred)) ledger.record_separation(pred, succ, Relation::Precedes);
        }
    }
}

}  // namespace crowdroute
