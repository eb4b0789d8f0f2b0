#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "rangeagg/core.hpp"

namespace rangeagg {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct TreeNode {
    NodeId parent = kNoNode;
    NodeId left = kNoNode;
    NodeId right = kNoNode;
    double size = 0.0;   // s(v)
    double merge = 0.0;  // single-linkage distance at which the node was formed
    PointId rep = 0;     // lowest point id below the node
    std::uint32_t begin = 0, end = 0;  // span in leaf_order
};

/// Single-linkage dendrogram. Leaves are nodes 0..n-1 (node i holds point i);
/// internal nodes are numbered in merge order, so children always precede parents.
class AggregationTree {
 public:
    AggregationTree() = default;
    AggregationTree(std::size_t n, std::vector<TreeNode> nodes, std::vector<PointId> leaf_order)
        : n_(n), nodes_(std::move(nodes)), leaf_order_(std::move(leaf_order)) {
        if (n_ == 0 || nodes_.size() != 2 * n_ - 1 || leaf_order_.size() != n_)
            throw std::invalid_argument("malformed aggregation tree");
    }

    std::size_t num_points() const { return n_; }
    std::size_t num_nodes() const { return nodes_.size(); }
    NodeId root() const { return static_cast<NodeId>(nodes_.size() - 1); }
    bool is_leaf(NodeId v) const { return v < n_; }
    NodeId leaf(PointId p) const { return p; }
    const TreeNode& node(NodeId v) const { return nodes_[v]; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const std::vector<PointId>& leaf_order() const { return leaf_order_; }
    double size(NodeId v) const { return nodes_[v].size; }
    PointId rep(NodeId v) const { return nodes_[v].rep; }
    NodeId parent(NodeId v) const { return nodes_[v].parent; }

    std::span<const PointId> members(NodeId v) const {
        return {leaf_order_.data() + nodes_[v].begin, nodes_[v].end - nodes_[v].begin};
    }
    std::size_t count(NodeId v) const { return nodes_[v].end - nodes_[v].begin; }

    /// Nodes from v up to the root, inclusive.
    std::vector<NodeId> path_to_root(NodeId v) const {
        std::vector<NodeId> path;
        for (; v != kNoNode; v = nodes_[v].parent) path.push_back(v);
        return path;
    }

    bool is_ancestor(NodeId anc, NodeId v) const {
        const auto& a = nodes_[anc];
        const auto& b = nodes_[v];
        return a.begin <= b.begin && b.end <= a.end && (anc != v);
    }

 private:
    std::size_t n_ = 0;
    std::vector<TreeNode> nodes_;
    std::vector<PointId> leaf_order_;
};

/// Prim's MST in O(n^2 d) followed by single-linkage merging. Equal-length edges are
/// processed by lower endpoint id.
inline AggregationTree build_tree(const PointSet& P) {
    const std::size_t n = P.size();
    if (n == 0) throw std::invalid_argument("cannot build a tree over an empty point set");

    struct Edge {
        double len;
        PointId u, v;
    };
    std::vector<Edge> edges;
    edges.reserve(n - 1);
    {
        std::vector<double> best(n, std::numeric_limits<double>::infinity());
        std::vector<PointId> from(n, 0);
        std::vector<char> done(n, 0);
        PointId cur = 0;
        done[0] = 1;
        for (std::size_t it = 1; it < n; ++it) {
            PointId next = 0;
            double nd = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j) {
                if (done[j]) continue;
                double d2 = dist2_unchecked(P[cur], P[j]);
                if (d2 < best[j] || (d2 == best[j] && cur < from[j])) {
                    best[j] = d2;
                    from[j] = cur;
                }
                if (best[j] < nd) {
                    nd = best[j];
                    next = static_cast<PointId>(j);
                }
            }
            done[next] = 1;
            edges.push_back({std::sqrt(nd), std::min(from[next], next), std::max(from[next], next)});
            cur = next;
        }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        return std::tie(x.len, x.u, x.v) < std::tie(y.len, y.u, y.v);
    });

    std::vector<TreeNode> nodes(2 * n - 1);
    std::vector<std::uint32_t> cnt(2 * n - 1, 1);
    for (std::size_t i = 0; i < n; ++i) nodes[i].rep = static_cast<PointId>(i);

    std::vector<std::uint32_t> uf(n);
    std::iota(uf.begin(), uf.end(), 0U);
    std::vector<NodeId> top(n);  // union-find root -> current tree node
    std::iota(top.begin(), top.end(), NodeId{0});
    auto find = [&](std::uint32_t x) {
        while (uf[x] != x) x = uf[x] = uf[uf[x]];
        return x;
    };

    NodeId next_id = static_cast<NodeId>(n);
    for (const auto& e : edges) {
        auto ru = find(e.u), rv = find(e.v);
        NodeId a = top[ru], b = top[rv];
        if (nodes[b].rep < nodes[a].rep) std::swap(a, b);
        NodeId v = next_id++;
        nodes[v].left = a;
        nodes[v].right = b;
        nodes[v].merge = e.len;
        nodes[v].rep = nodes[a].rep;
        cnt[v] = cnt[a] + cnt[b];
        nodes[v].size = static_cast<double>(cnt[v] - 1) * e.len;
        nodes[a].parent = v;
        nodes[b].parent = v;
        uf[rv] = ru;
        top[ru] = v;
    }

    std::vector<PointId> order;
    order.reserve(n);
    std::vector<NodeId> stack{static_cast<NodeId>(2 * n - 2)};
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        if (v < n) {
            nodes[v].begin = static_cast<std::uint32_t>(order.size());
            order.push_back(static_cast<PointId>(v));
            nodes[v].end = nodes[v].begin + 1;
            continue;
        }
        stack.push_back(nodes[v].right);
        stack.push_back(nodes[v].left);
    }
    // internal spans: children precede parents in id order
    for (std::size_t v = n; v < 2 * n - 1; ++v) {
        nodes[v].begin = nodes[nodes[v].left].begin;
        nodes[v].end = nodes[nodes[v].right].end;
    }
    return AggregationTree(n, std::move(nodes), std::move(order));
}

struct TreeCheck {
    bool ok = true;
    int property = 0;
    std::string message;
};

/// Exhaustive check of the structural, size and separation guarantees. O(n^2 d + sum |P(v)|^2).
inline TreeCheck check_tree_properties(const AggregationTree& T, const PointSet& P) {
    const std::size_t n = P.size();
    auto fail = [](int prop, std::string msg) { return TreeCheck{false, prop, std::move(msg)}; };
    if (T.num_points() != n) return fail(1, "point count mismatch");
    const double dn = static_cast<double>(P.dim()) * static_cast<double>(n);

    std::vector<double> D(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) D[i * n + j] = D[j * n + i] = dist(P[i], P[j]);

    // 1: the root covers P exactly once
    {
        auto all = T.members(T.root());
        std::vector<char> seen(n, 0);
        if (all.size() != n) return fail(1, "root does not cover every point");
        for (PointId p : all) {
            if (p >= n || seen[p]) return fail(1, "root span repeats a point");
            seen[p] = 1;
        }
    }
    double dia_all = 0.0;
    for (double x : D) dia_all = std::max(dia_all, x);

    for (NodeId v = 0; v < T.num_nodes(); ++v) {
        const auto& nd = T.node(v);
        auto mem = T.members(v);
        // 3: leaves
        if (T.is_leaf(v)) {
            if (nd.size != 0.0 || mem.size() != 1 || mem[0] != v) return fail(3, "leaf malformed");
        } else {
            // 4: partition and strict growth
            const auto& l = T.node(nd.left);
            const auto& r = T.node(nd.right);
            if (l.parent != v || r.parent != v) return fail(4, "child parent link broken");
            if (l.begin != nd.begin || l.end != r.begin || r.end != nd.end) return fail(4, "children do not partition");
            bool coincident = nd.size == 0.0 && nd.merge == 0.0;
            if (!(nd.size > std::max(l.size, r.size)) && !coincident)
                return fail(4, "s(v) not larger than children at node " + std::to_string(v));
        }
        if (nd.rep != *std::min_element(mem.begin(), mem.end())) return fail(4, "representative is not the lowest id");
        // 2: diameter bound and distortion
        double dia = 0.0;
        for (std::size_t i = 0; i < mem.size(); ++i)
            for (std::size_t j = i + 1; j < mem.size(); ++j) dia = std::max(dia, D[mem[i] * n + mem[j]]);
        if (!leq_tol(dia, nd.size)) return fail(2, "diameter exceeds s(v) at node " + std::to_string(v));
        if (dia_all > 0.0 && !leq_tol(nd.size / dia_all, dn)) return fail(2, "s(v) exceeds dn * Dia(P)");
        // 5: separation from the rest of P
        if (v != T.root()) {
            std::vector<char> inside(n, 0);
            for (PointId p : mem) inside[p] = 1;
            double r_out = std::numeric_limits<double>::infinity();
            for (PointId p : mem)
                for (std::size_t q = 0; q < n; ++q)
                    if (!inside[q]) r_out = std::min(r_out, D[p * n + q]);
            double sp = T.size(T.parent(v));
            if (r_out == 0.0) {
                if (sp != 0.0) return fail(5, "zero separation under a positive parent");
            } else if (!leq_tol(sp / r_out, dn)) {
                return fail(5, "parent size over separation exceeds dn at node " + std::to_string(v));
            }
        }
    }
    return {};
}

/// Highest ancestor v of `leaf` (inclusive) with s(v) + r_n <= theta. Sizes do not
/// decrease towards the root, so the admissible nodes form a prefix of the path.
inline std::optional<NodeId> lowest_admissible_node(const AggregationTree& T, NodeId leaf, double r_n, double theta) {
    if (!T.is_leaf(leaf)) throw std::invalid_argument("start node is not a leaf");
    auto path = T.path_to_root(leaf);
    auto it = std::partition_point(path.begin(), path.end(),
                                   [&](NodeId v) { return T.size(v) + r_n <= theta; });
    if (it == path.begin()) return std::nullopt;
    return *(it - 1);
}

}  // namespace rangeagg
