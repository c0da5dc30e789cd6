#include "hfc/hierarchy.hpp"

#include "hfc/io.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace hfc {

Hierarchy Hierarchy::from_edges(const std::vector<Edge>& edges) {
    if (edges.empty()) throw InvalidInput("hierarchy: edge list is empty");

    std::set<Edge> seen_edges;
    std::map<std::string, std::string> parent_of;
    std::set<std::string> ids;
    for (const auto& edge : edges) {
        const auto& [parent, child] = edge;
        if (parent.empty() || child.empty()) throw InvalidInput("hierarchy: empty node id");
        if (parent == child) throw InvalidInput("hierarchy: cycle detected at '" + parent + "'");
        if (!seen_edges.insert(edge).second) {
            throw InvalidInput("hierarchy: duplicate edge " + parent + " -> " + child);
        }
        ids.insert(parent);
        ids.insert(child);
        auto [it, inserted] = parent_of.emplace(child, parent);
        if (!inserted) {
            throw InvalidInput("hierarchy: node '" + child + "' has two parents ('" + it->second + "', '" +
                               parent + "')");
        }
    }

    // Each node has at most one parent, so a cycle is a parent chain revisiting a node.
    for (const auto& id : ids) {
        std::set<std::string> path{id};
        auto it = parent_of.find(id);
        while (it != parent_of.end()) {
            if (!path.insert(it->second).second) {
                throw InvalidInput("hierarchy: cycle detected through '" + it->second + "'");
            }
            it = parent_of.find(it->second);
        }
    }

    std::vector<std::string> roots;
    for (const auto& id : ids) {
        if (!parent_of.count(id)) roots.push_back(id);
    }
    if (roots.size() != 1) {
        std::string list;
        for (const auto& r : roots) list += (list.empty() ? "" : ", ") + r;
        throw InvalidInput("hierarchy: multiple roots (" + list + ")");
    }

    std::map<std::string, int> level;
    for (const auto& id : ids) {
        int depth = 0;
        for (auto it = parent_of.find(id); it != parent_of.end(); it = parent_of.find(it->second)) ++depth;
        level[id] = depth;
    }
    std::set<std::string> has_child;
    for (const auto& [child, parent] : parent_of) has_child.insert(parent);
    int k = 0;
    for (const auto& [id, l] : level) k = std::max(k, l);
    for (const auto& id : ids) {
        if (!has_child.count(id) && level[id] != k) {
            throw InvalidInput("hierarchy: ragged leaf depths, leaf '" + id + "' at level " +
                               std::to_string(level[id]) + " but bottom level is " + std::to_string(k));
        }
    }

    std::vector<std::string> ordered(ids.begin(), ids.end());  // std::set is already lexicographic
    std::stable_sort(ordered.begin(), ordered.end(),
                     [&](const std::string& a, const std::string& b) { return level[a] < level[b]; });

    Hierarchy h;
    h.level_count_ = k + 1;
    h.levels_.resize(static_cast<std::size_t>(k) + 1);
    h.nodes_.reserve(ordered.size());
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        h.index_.emplace(ordered[i], i);
        h.nodes_.push_back(Node{ordered[i], level[ordered[i]], std::nullopt, {}});
        h.levels_[level[ordered[i]]].push_back(i);
    }
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        auto it = parent_of.find(ordered[i]);
        if (it == parent_of.end()) continue;
        std::size_t p = h.index_.at(it->second);
        h.nodes_[i].parent = p;
        h.nodes_[p].children.push_back(i);
    }
    return h;
}

std::size_t Hierarchy::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw InvalidInput("hierarchy: unknown node '" + id + "'");
    return it->second;
}

std::optional<std::size_t> Hierarchy::find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Hierarchy::bottom_position(std::size_t node_index) const {
    const auto& bottom = levels_.back();
    if (node_index < bottom.front() || node_index > bottom.back()) {
        throw InvalidInput("hierarchy: node '" + nodes_.at(node_index).id + "' is not a leaf");
    }
    return node_index - bottom.front();
}

std::vector<std::size_t> Hierarchy::leaves_under(std::size_t node_index) const {
    std::vector<std::size_t> out;
    std::vector<std::size_t> frontier{node_index};
    while (!frontier.empty()) {
        std::vector<std::size_t> next;
        for (auto i : frontier) {
            if (nodes_[i].children.empty()) {
                out.push_back(i);
            } else {
                next.insert(next.end(), nodes_[i].children.begin(), nodes_[i].children.end());
            }
        }
        frontier = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Edge> Hierarchy::edges() const {
    std::vector<Edge> out;
    for (const auto& n : nodes_) {
        for (auto c : n.children) out.emplace_back(n.id, nodes_[c].id);
    }
    return out;
}

std::vector<std::string> Hierarchy::ids() const {
    std::vector<std::string> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back(n.id);
    return out;
}

Hierarchy build_hierarchy(const std::vector<Edge>& edges) { return Hierarchy::from_edges(edges); }

Matrix summing_matrix(const Hierarchy& hierarchy) {
    const auto m = static_cast<Eigen::Index>(hierarchy.size());
    const auto mk = static_cast<Eigen::Index>(hierarchy.bottom_count());
    Matrix s = Matrix::Zero(m, mk);
    for (auto leaf : hierarchy.bottom_nodes()) {
        const auto col = static_cast<Eigen::Index>(hierarchy.bottom_position(leaf));
        std::optional<std::size_t> at = leaf;
        while (at) {
            s(static_cast<Eigen::Index>(*at), col) = 1.0;
            at = hierarchy.node(*at).parent;
        }
    }
    return s;
}

Matrix aggregate_panel(const Matrix& bottom, const Matrix& summing) {
    if (summing.cols() != bottom.rows()) {
        throw InvalidInput("aggregate_panel: S has " + std::to_string(summing.cols()) +
                           " columns but bottom block has " + std::to_string(bottom.rows()) + " rows");
    }
    return summing * bottom;
}

std::vector<Edge> read_edges_csv(const std::string& path) {
    auto table = read_csv(path, {"parent", "child"});
    std::vector<Edge> edges;
    edges.reserve(table.rows.size());
    for (auto& row : table.rows) edges.emplace_back(std::move(row[0]), std::move(row[1]));
    return edges;
}

void write_edges_csv(const std::string& path, const Hierarchy& hierarchy) {
    std::ostringstream out;
    out << "parent,child\n";
    for (const auto& [p, c] : hierarchy.edges()) out << p << ',' << c << '\n';
    write_file_atomic(path, out.str());
}

}  // namespace hfc
