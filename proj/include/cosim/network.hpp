#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cosim/rng.hpp"
#include "cosim/util.hpp"

namespace cosim {

/// Undirected interaction graph with per-node sorted adjacency lists.
/// Immutable after construction.
class SocialGraph {
public:
    SocialGraph(size_t n, std::vector<std::pair<int, int>> edges) : n_(n), adjacency_(n) {
        std::set<std::pair<int, int>> seen;
        for (auto [a, b] : edges) {
            if (a == b) throw ConfigError("graph: self-loop");
            if (a > b) std::swap(a, b);
            if (a < 0 || static_cast<size_t>(b) >= n) throw ConfigError("graph: node out of range");
            if (!seen.insert({a, b}).second) throw ConfigError("graph: duplicate edge");
            adjacency_[static_cast<size_t>(a)].push_back(b);
            adjacency_[static_cast<size_t>(b)].push_back(a);
        }
        for (auto& neigh : adjacency_) std::sort(neigh.begin(), neigh.end());
        edge_count_ = seen.size();
    }

    size_t node_count() const { return n_; }
    size_t edge_count() const { return edge_count_; }

    /// Sorted, duplicate-free neighbor list of node i.
    const std::vector<int>& neighbors(int i) const {
        if (i < 0 || static_cast<size_t>(i) >= n_) throw ConfigError("graph: node id out of range");
        return adjacency_[static_cast<size_t>(i)];
    }

    bool connected() const {
        if (n_ == 0) return true;
        std::vector<char> visited(n_, 0);
        std::queue<int> frontier;
        frontier.push(0);
        visited[0] = 1;
        size_t reached = 1;
        while (!frontier.empty()) {
            const int v = frontier.front();
            frontier.pop();
            for (int w : adjacency_[static_cast<size_t>(v)]) {
                if (!visited[static_cast<size_t>(w)]) {
                    visited[static_cast<size_t>(w)] = 1;
                    ++reached;
                    frontier.push(w);
                }
            }
        }
        return reached == n_;
    }

    /// Edge list, one "i j" pair per line (i < j), for audit.
    std::string edge_list_text() const {
        std::ostringstream out;
        for (size_t i = 0; i < n_; ++i)
            for (int j : adjacency_[i])
                if (static_cast<size_t>(j) > i) out << i << ' ' << j << '\n';
        return out.str();
    }

private:
    size_t n_;
    size_t edge_count_ = 0;
    std::vector<std::vector<int>> adjacency_;
};

namespace detail {

inline SocialGraph watts_strogatz_once(size_t n, int k, double p, Rng& rng) {
    // ring lattice: each node linked to its k/2 nearest neighbors per side
    std::set<std::pair<int, int>> edge_set;
    auto key = [](int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; };
    for (size_t i = 0; i < n; ++i)
        for (int j = 1; j <= k / 2; ++j)
            edge_set.insert(key(static_cast<int>(i), static_cast<int>((i + static_cast<size_t>(j)) % n)));

    // rewire each lattice edge's far endpoint independently with probability p
    for (size_t i = 0; i < n; ++i) {
        for (int j = 1; j <= k / 2; ++j) {
            const int a = static_cast<int>(i);
            const int b = static_cast<int>((i + static_cast<size_t>(j)) % n);
            if (!rng.bernoulli(p)) continue;
            if (edge_set.count(key(a, b)) == 0) continue;  // already rewired away
            // pick a new endpoint avoiding self-loops and duplicates; if the
            // node is saturated, keep the original edge
            int target = -1;
            for (int attempt = 0; attempt < 1000; ++attempt) {
                const int cand = static_cast<int>(rng.uniform_below(n));
                if (cand == a || edge_set.count(key(a, cand))) continue;
                target = cand;
                break;
            }
            if (target < 0) continue;
            edge_set.erase(key(a, b));
            edge_set.insert(key(a, target));
        }
    }

    std::vector<std::pair<int, int>> edges(edge_set.begin(), edge_set.end());
    return SocialGraph(n, std::move(edges));
}

}  // namespace detail

/// Watts-Strogatz small-world graph: ring lattice of even degree k with each
/// lattice edge rewired independently with probability p. Regenerates with
/// the next derived seed if the result is disconnected, up to 100 attempts,
/// so every community interacts as a single component.
inline SocialGraph watts_strogatz(size_t n, int k, double p, std::uint64_t seed) {
    if (k < 2 || k % 2 != 0) throw ConfigError("watts_strogatz: k must be even and >= 2");
    if (n <= static_cast<size_t>(k)) throw ConfigError("watts_strogatz: need n > k");
    if (p < 0.0 || p > 1.0) throw ConfigError("watts_strogatz: p must be in [0,1]");

    for (int attempt = 0; attempt < 100; ++attempt) {
        Rng rng = derive_rng(seed, {"graph", std::to_string(attempt)});
        SocialGraph g = detail::watts_strogatz_once(n, k, p, rng);
        if (g.connected()) return g;
    }
    throw ConfigError("watts_strogatz: no connected graph in 100 attempts");
}

}  // namespace cosim
