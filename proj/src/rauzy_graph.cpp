#include "fiet/rauzy_graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

namespace fiet {

std::vector<Successor> successors(const SignedPermutation& p) {
    if (!is_irreducible(p)) throw InvalidArgument("successors of reducible permutation " + p.to_string());
    std::vector<Successor> out;
    // A single interval always ties.
    if (p.size() < 2) return out;
    for (Case c : {Case::A, Case::B}) {
        Transition t = transition(p, c);
        const bool hole = !is_irreducible(t.next);
        out.push_back(Successor{c, std::move(t.next), hole, t.winner, t.loser});
    }
    return out;
}

std::vector<GraphEdge> RauzyGraph::out_edges(std::size_t v) const {
    std::vector<GraphEdge> out;
    for (const auto& e : edges_)
        if (e.from == v) out.push_back(e);
    std::stable_sort(out.begin(), out.end(), [](const GraphEdge& a, const GraphEdge& b) { return a.which < b.which; });
    return out;
}

bool RauzyGraph::reaches_hole() const {
    return std::any_of(edges_.begin(), edges_.end(), [](const GraphEdge& e) { return e.to == kHole; });
}

std::optional<std::size_t> RauzyGraph::find(const SignedPermutation& p) const {
    auto it = index_.find(p.canonical_string());
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t RauzyGraph::add_vertex(const SignedPermutation& canonical) {
    auto key = canonical.to_string();
    auto [it, inserted] = index_.emplace(key, vertices_.size());
    if (inserted) vertices_.push_back(canonical);
    return it->second;
}

std::string RauzyGraph::to_json() const {
    nlohmann::ordered_json j;
    j["vertices"] = nlohmann::ordered_json::array();
    for (const auto& v : vertices_) j["vertices"].push_back(v.to_string());
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : edges_) {
        nlohmann::ordered_json r;
        r["from"] = vertices_[e.from].to_string();
        r["case"] = std::string(to_string(e.which));
        if (e.to == kHole)
            r["to"] = "HOLE";
        else
            r["to"] = vertices_[e.to].to_string();
        j["edges"].push_back(std::move(r));
    }
    return j.dump(2);
}

RauzyGraph RauzyGraph::from_json(const std::string& text) {
    RauzyGraph g;
    try {
        auto j = nlohmann::json::parse(text);
        for (const auto& v : j.at("vertices")) g.add_vertex(parse_permutation(v.get<std::string>()).canonical());
        for (const auto& e : j.at("edges")) {
            auto from = g.find(parse_permutation(e.at("from").get<std::string>()));
            if (!from) throw ParseError("edge from unknown vertex");
            GraphEdge edge{*from, parse_case(e.at("case").get<std::string>()), kHole};
            auto to = e.at("to").get<std::string>();
            if (to != "HOLE") {
                auto t = g.find(parse_permutation(to));
                if (!t) throw ParseError("edge to unknown vertex " + to);
                edge.to = *t;
            }
            g.add_edge(edge);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("graph cache: ") + e.what());
    }
    return g;
}

RauzyGraph build_graph(const SignedPermutation& seed, std::size_t limit) {
    RauzyGraph g;
    auto start = seed.canonical();
    if (!is_irreducible(start)) throw InvalidArgument("seed " + seed.to_string() + " is reducible");
    g.add_vertex(start);
    for (std::size_t v = 0; v < g.size(); ++v) {
        const SignedPermutation p = g.vertex(v);
        for (auto& s : successors(p)) {
            if (s.hole) {
                g.add_edge({v, s.which, RauzyGraph::kHole});
                continue;
            }
            auto c = s.target.canonical();
            if (!g.contains(c) && g.size() >= limit)
                throw LimitExceeded("graph exceeds " + std::to_string(limit) + " vertices", g);
            g.add_edge({v, s.which, g.add_vertex(c)});
        }
    }
    return g;
}

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
}

std::vector<RauzyGraph> components(const std::vector<SignedPermutation>& all) {
    RauzyGraph whole;
    for (const auto& p : all) whole.add_vertex(p);
    std::vector<std::size_t> parent(whole.size());
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t v = 0; v < whole.size(); ++v) {
        for (auto& s : successors(whole.vertex(v))) {
            if (s.hole) continue;
            auto t = whole.find(s.target);
            if (!t) continue;
            parent[find_root(parent, v)] = find_root(parent, *t);
        }
    }
    std::unordered_map<std::size_t, std::size_t> slot;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t v = 0; v < whole.size(); ++v) {
        auto r = find_root(parent, v);
        auto [it, fresh] = slot.emplace(r, members.size());
        if (fresh) members.emplace_back();
        members[it->second].push_back(v);
    }
    std::vector<RauzyGraph> out;
    for (const auto& m : members) {
        RauzyGraph g;
        for (auto v : m) g.add_vertex(whole.vertex(v));
        for (std::size_t i = 0; i < g.size(); ++i) {
            for (auto& s : successors(g.vertex(i))) {
                if (s.hole) {
                    g.add_edge({i, s.which, RauzyGraph::kHole});
                } else if (auto t = g.find(s.target)) {
                    g.add_edge({i, s.which, *t});
                }
            }
        }
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace

std::vector<RauzyGraph> rauzy_classes(std::size_t n, std::size_t limit) {
    if (n > limit) throw LimitExceeded("exhaustive enumeration bound is " + std::to_string(limit), RauzyGraph{});
    std::vector<SignedPermutation> all;
    for (auto& p : all_signed_permutations(n))
        if (is_irreducible(p)) all.push_back(std::move(p));
    return components(all);
}

ClassCounts class_counts(std::size_t n, std::size_t limit) {
    ClassCounts c;
    c.with_signs = rauzy_classes(n, limit).size();
    std::vector<SignedPermutation> plain;
    for (auto& p : all_signed_permutations(n))
        if (!p.has_flips() && is_irreducible(p)) plain.push_back(std::move(p));
    c.flip_free = components(plain).size();
    return c;
}

std::optional<RauzyPath> find_path(const RauzyGraph& g, const SignedPermutation& from, const SignedPermutation& to) {
    auto src = g.find(from), dst = g.find(to);
    if (!src || !dst) throw InvalidArgument("find_path endpoints must be vertices of the graph");
    std::vector<std::size_t> prev(g.size(), RauzyGraph::kHole);
    std::vector<Case> via(g.size(), Case::A);
    std::vector<bool> seen(g.size(), false);
    std::deque<std::size_t> queue{*src};
    seen[*src] = true;
    std::vector<std::vector<GraphEdge>> adj(g.size());
    for (const auto& e : g.edges())
        if (e.to != RauzyGraph::kHole) adj[e.from].push_back(e);
    while (!queue.empty() && !seen[*dst]) {
        auto v = queue.front();
        queue.pop_front();
        for (const auto& e : adj[v]) {
            if (seen[e.to]) continue;
            seen[e.to] = true;
            prev[e.to] = v;
            via[e.to] = e.which;
            queue.push_back(e.to);
        }
    }
    if (!seen[*dst]) return std::nullopt;
    std::vector<Case> cases;
    for (auto v = *dst; v != *src; v = prev[v]) cases.push_back(via[v]);
    std::reverse(cases.begin(), cases.end());
    return path_from_cases(from, cases);
}

std::optional<RauzyPath> find_positive_loop(const RauzyGraph& g, const SignedPermutation& at, std::size_t max_len,
                                            bool neat) {
    if (!g.contains(at)) throw InvalidArgument("vertex " + at.to_string() + " is not in the graph");
    const std::size_t n = at.size();
    if (n * n > 64) throw InvalidArgument("find_positive_loop supports n <= 8");
    const auto target = at.canonical();
    const std::uint64_t full = n * n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << (n * n)) - 1;

    struct Node {
        SignedPermutation perm;
        std::uint64_t pattern;  // bit r*n+c set iff R(r, c) != 0
        std::size_t parent;
        Case which;
        std::size_t depth;
    };
    std::vector<Node> nodes;
    std::uint64_t id = 0;
    for (std::size_t i = 0; i < n; ++i) id |= std::uint64_t{1} << (i * n + i);
    nodes.push_back({at, id, RauzyGraph::kHole, Case::A, 0});

    struct KeyHash {
        std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const noexcept {
            return std::hash<std::uint64_t>{}(k.first * 0x9e3779b97f4a7c15ULL ^ k.second);
        }
    };
    std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, KeyHash> seen;
    seen.insert({at.encode(), id});

    for (std::size_t head = 0; head < nodes.size(); ++head) {
        if (nodes[head].depth >= max_len) continue;
        const Node cur = nodes[head];
        for (auto& s : successors(cur.perm)) {
            if (s.hole) continue;
            // Column loser |= column winner.
            std::uint64_t pat = cur.pattern;
            for (std::size_t r = 0; r < n; ++r)
                if (pat >> (r * n + static_cast<std::size_t>(s.winner)) & 1)
                    pat |= std::uint64_t{1} << (r * n + static_cast<std::size_t>(s.loser));
            Node next{s.target, pat, head, s.which, cur.depth + 1};
            if (pat == full && s.target.canonical() == target) {
                std::vector<Case> cases{s.which};
                for (auto v = head; nodes[v].parent != RauzyGraph::kHole; v = nodes[v].parent)
                    cases.push_back(nodes[v].which);
                std::reverse(cases.begin(), cases.end());
                auto path = path_from_cases(at, cases);
                if (!neat || is_neat(path)) return path;
            }
            if (!seen.insert({s.target.encode(), pat}).second) continue;
            nodes.push_back(std::move(next));
        }
    }
    return std::nullopt;
}

}  // namespace fiet
