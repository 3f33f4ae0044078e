#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "suprep/cone.hpp"
#include "suprep/rational.hpp"

namespace suprep {

/// Finite Omega with probability weights. `support` lists the atoms with
/// positive weight, in atom order.
struct ProbabilitySpace
{
    std::vector<std::string> atoms;
    Vector weights;
    std::vector<std::size_t> support;

    std::size_t size() const { return atoms.size(); }

    static ProbabilitySpace make(std::vector<std::string> atoms, Vector weights)
    {
        if (atoms.empty())
            throw std::invalid_argument("probability space: empty atom list");
        if (atoms.size() != weights.size())
            throw std::invalid_argument("probability space: expected one weight per atom");
        Rational total = 0;
        ProbabilitySpace s{std::move(atoms), std::move(weights), {}};
        for (std::size_t i = 0; i < s.weights.size(); ++i) {
            if (s.weights[i] < 0)
                throw std::invalid_argument("probability space: negative weight");
            if (s.weights[i] > 0)
                s.support.push_back(i);
            total += s.weights[i];
        }
        if (total != 1)
            throw std::invalid_argument("weights sum ≠ 1 (sum is " + to_string(total) + ")");
        return s;
    }

    friend bool operator==(const ProbabilitySpace&, const ProbabilitySpace&) = default;
};

struct TreeNode
{
    std::string name;
    std::vector<std::size_t> children;  // node indices
    std::vector<std::size_t> atoms;     // atoms below this node, sorted
    std::size_t depth = 0;

    bool is_leaf() const { return children.empty(); }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Scenario tree. Node 0 is the root; leaves are the atoms. prices[node][i]
/// is the discounted price of asset i+1 at that node.
struct MarketModel
{
    ProbabilitySpace space;
    std::vector<TreeNode> nodes;
    std::vector<Vector> prices;
    std::size_t assets = 0;
    std::size_t periods = 0;

    std::size_t atom_count() const { return space.size(); }

    friend bool operator==(const MarketModel&, const MarketModel&) = default;
};

namespace detail {

inline std::vector<std::string> split_words(const std::string& s)
{
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w)
        out.push_back(w);
    return out;
}

inline Rational parse_at(const std::string& token, std::size_t line)
{
    try {
        return parse_rational(token);
    } catch (const ParseError& e) {
        throw ParseError(e.what(), line);
    }
}

} // namespace detail

/// Market file text:
///
///   atoms: up mid down
///   weights: 1/3 1/3 1/3
///   periods: 1
///   tree:
///     root -> up mid down
///   prices:
///     root 1 1
///     up 1 2
///
/// A section's content may start on the header line and continue on the
/// following lines. Price lines are "node asset value" with 1-based assets.
inline MarketModel load_market(const std::string& text)
{
    static const std::set<std::string> known{"atoms", "weights", "periods", "tree", "prices"};
    std::map<std::string, std::vector<std::pair<std::size_t, std::string>>> sections;
    std::map<std::string, std::size_t> header_line;
    std::istringstream in(text);
    std::string line, current;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto words = detail::split_words(line);
        if (words.empty())
            continue;
        if (words[0].back() == ':') {
            const std::string name = words[0].substr(0, words[0].size() - 1);
            if (!known.count(name))
                throw ParseError("unknown section '" + name + "'", lineno);
            if (sections.count(name))
                throw ParseError("duplicate section '" + name + "'", lineno);
            current = name;
            sections[name];
            header_line[name] = lineno;
            const auto rest = line.substr(line.find(':') + 1);
            if (!detail::split_words(rest).empty())
                sections[name].emplace_back(lineno, rest);
            continue;
        }
        if (current.empty())
            throw ParseError("content outside of any section", lineno);
        sections[current].emplace_back(lineno, line);
    }
    for (const auto& name : known)
        if (!sections.count(name))
            throw ParseError("missing section '" + name + "'", lineno);

    // atoms and weights
    std::vector<std::string> atoms;
    for (const auto& [l, s] : sections["atoms"])
        for (auto& w : detail::split_words(s))
            atoms.push_back(w);
    if (atoms.empty())
        throw ParseError("empty atom list", header_line["atoms"]);
    std::map<std::string, std::size_t> atom_index;
    for (std::size_t i = 0; i < atoms.size(); ++i)
        if (!atom_index.emplace(atoms[i], i).second)
            throw ParseError("duplicate atom '" + atoms[i] + "'", header_line["atoms"]);

    Vector weights;
    std::size_t last_weight_line = header_line["weights"];
    for (const auto& [l, s] : sections["weights"]) {
        for (auto& w : detail::split_words(s))
            weights.push_back(detail::parse_at(w, l));
        last_weight_line = l;
    }
    ProbabilitySpace space;
    try {
        space = ProbabilitySpace::make(atoms, weights);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), last_weight_line);
    }

    // periods
    const auto& ps = sections["periods"];
    if (ps.size() != 1 || detail::split_words(ps[0].second).size() != 1)
        throw ParseError("periods: expected a single positive integer", header_line["periods"]);
    std::size_t periods = 0;
    try {
        std::size_t used = 0;
        const std::string tok = detail::split_words(ps[0].second)[0];
        periods = std::stoul(tok, &used);
        if (used != tok.size() || periods == 0)
            throw std::invalid_argument("bad");
    } catch (const std::exception&) {
        throw ParseError("periods: expected a single positive integer", ps[0].first);
    }

    // tree
    MarketModel m;
    m.space = std::move(space);
    m.periods = periods;
    std::map<std::string, std::size_t> node_index;
    std::map<std::size_t, std::size_t> parent;
    auto node_of = [&](const std::string& name) {
        auto [it, fresh] = node_index.emplace(name, m.nodes.size());
        if (fresh)
            m.nodes.push_back(TreeNode{name, {}, {}, 0});
        return it->second;
    };
    std::vector<std::size_t> edge_line;
    for (const auto& [l, s] : sections["tree"]) {
        const auto words = detail::split_words(s);
        if (words.size() < 3 || words[1] != "->")
            throw ParseError("tree: expected 'parent -> child ...'", l);
        const std::size_t p = node_of(words[0]);
        if (!m.nodes[p].children.empty())
            throw ParseError("tree: node '" + words[0] + "' has two child lists", l);
        if (atom_index.count(words[0]))
            throw ParseError("tree: atom '" + words[0] + "' cannot have children", l);
        for (std::size_t k = 2; k < words.size(); ++k) {
            const std::size_t c = node_of(words[k]);
            if (c == p || parent.count(c))
                throw ParseError("tree: node '" + words[k] + "' has more than one parent", l);
            parent[c] = p;
            m.nodes[p].children.push_back(c);
        }
    }
    if (m.nodes.empty())
        throw ParseError("tree: no edges", header_line["tree"]);
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
        if (!parent.count(i))
            roots.push_back(i);
    if (roots.size() != 1)
        throw ParseError("tree: expected exactly one root, found " + std::to_string(roots.size()), header_line["tree"]);

    // Re-number breadth-first from the root so node 0 is the root and the
    // order is deterministic.
    std::vector<std::size_t> order{roots[0]};
    std::vector<std::size_t> depth(m.nodes.size(), 0);
    for (std::size_t k = 0; k < order.size(); ++k)
        for (auto c : m.nodes[order[k]].children) {
            depth[c] = depth[order[k]] + 1;
            order.push_back(c);
        }
    if (order.size() != m.nodes.size())
        throw ParseError("tree: not every node is reachable from the root", header_line["tree"]);
    std::vector<std::size_t> renum(m.nodes.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        renum[order[k]] = k;
    std::vector<TreeNode> nodes(m.nodes.size());
    for (std::size_t old = 0; old < m.nodes.size(); ++old) {
        TreeNode n = m.nodes[old];
        for (auto& c : n.children)
            c = renum[c];
        n.depth = depth[old];
        nodes[renum[old]] = std::move(n);
    }
    m.nodes = std::move(nodes);
    node_index.clear();
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
        node_index[m.nodes[i].name] = i;

    std::set<std::string> leaves_seen;
    for (auto& n : m.nodes) {
        if (!n.is_leaf())
            continue;
        const auto it = atom_index.find(n.name);
        if (it == atom_index.end())
            throw ParseError("tree: leaf '" + n.name + "' is not an atom", header_line["tree"]);
        if (n.depth != periods)
            throw ParseError("tree: leaf '" + n.name + "' is at depth " + std::to_string(n.depth) + ", expected " +
                                 std::to_string(periods),
                             header_line["tree"]);
        leaves_seen.insert(n.name);
    }
    for (const auto& a : atoms)
        if (!leaves_seen.count(a))
            throw ParseError("tree: atom '" + a + "' is not a leaf", header_line["tree"]);
    for (std::size_t k = m.nodes.size(); k-- > 0;) {
        auto& n = m.nodes[k];
        if (n.is_leaf())
            n.atoms = {atom_index[n.name]};
        else {
            for (auto c : n.children)
                n.atoms.insert(n.atoms.end(), m.nodes[c].atoms.begin(), m.nodes[c].atoms.end());
            std::sort(n.atoms.begin(), n.atoms.end());
        }
    }

    // prices
    std::map<std::pair<std::size_t, std::size_t>, Rational> raw;
    std::size_t assets = 0;
    for (const auto& [l, s] : sections["prices"]) {
        const auto words = detail::split_words(s);
        if (words.size() != 3)
            throw ParseError("prices: expected 'node asset value'", l);
        const auto it = node_index.find(words[0]);
        if (it == node_index.end())
            throw ParseError("prices: unknown node '" + words[0] + "'", l);
        std::size_t asset = 0;
        try {
            std::size_t used = 0;
            asset = std::stoul(words[1], &used);
            if (used != words[1].size() || asset == 0)
                throw std::invalid_argument("bad");
        } catch (const std::exception&) {
            throw ParseError("prices: asset index must be a positive integer", l);
        }
        if (!raw.emplace(std::pair{it->second, asset - 1}, detail::parse_at(words[2], l)).second)
            throw ParseError("prices: duplicate price for node '" + words[0] + "'", l);
        assets = std::max(assets, asset);
    }
    if (assets == 0)
        throw ParseError("prices: no prices given", header_line["prices"]);
    m.assets = assets;
    m.prices.assign(m.nodes.size(), zeros(assets));
    for (std::size_t n = 0; n < m.nodes.size(); ++n)
        for (std::size_t i = 0; i < assets; ++i) {
            const auto it = raw.find({n, i});
            if (it == raw.end())
                throw ParseError("prices: missing price of asset " + std::to_string(i + 1) + " at node '" +
                                     m.nodes[n].name + "'",
                                 header_line["prices"]);
            m.prices[n][i] = it->second;
        }
    return m;
}

inline std::string write_market(const MarketModel& m)
{
    std::ostringstream out;
    out << "atoms:";
    for (const auto& a : m.space.atoms)
        out << ' ' << a;
    out << "\nweights: " << to_string(m.space.weights) << "\nperiods: " << m.periods << "\ntree:\n";
    for (const auto& n : m.nodes) {
        if (n.is_leaf())
            continue;
        out << "  " << n.name << " ->";
        for (auto c : n.children)
            out << ' ' << m.nodes[c].name;
        out << '\n';
    }
    out << "prices:\n";
    for (std::size_t n = 0; n < m.nodes.size(); ++n)
        for (std::size_t i = 0; i < m.assets; ++i)
            out << "  " << m.nodes[n].name << ' ' << i + 1 << ' ' << to_string(m.prices[n][i]) << '\n';
    return out.str();
}

/// One-step, one-asset gains: for node n and asset i, the claim equal to
/// S_child - S_n on the atoms below each child and 0 elsewhere.
inline std::vector<Vector> one_step_gains(const MarketModel& m)
{
    std::vector<Vector> out;
    for (const auto& n : m.nodes) {
        if (n.is_leaf())
            continue;
        const std::size_t self = static_cast<std::size_t>(&n - m.nodes.data());
        for (std::size_t i = 0; i < m.assets; ++i) {
            Vector g = zeros(m.atom_count());
            for (auto c : n.children)
                for (auto a : m.nodes[c].atoms)
                    g[a] = m.prices[c][i] - m.prices[self][i];
            if (!is_zero(g))
                out.push_back(std::move(g));
        }
    }
    return out;
}

struct Admissible
{
};

/// K^adm (the span of one-step gains; every strategy on a finite tree is
/// admissible) or the wedge generated by user-supplied claims.
inline Cone gains_wedge(const MarketModel& m, Admissible)
{
    return linear_span_cone(one_step_gains(m), m.atom_count());
}

inline Cone gains_wedge(const MarketModel& m, const std::vector<Vector>& generators)
{
    return cone_from_generators(generators, m.atom_count());
}

} // namespace suprep
