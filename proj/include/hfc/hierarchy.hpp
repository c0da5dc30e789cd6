#pragma once

#include "hfc/common.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hfc {

struct Node {
    std::string id;
    int level = 0;
    std::optional<std::size_t> parent;  // index into Hierarchy::nodes()
    std::vector<std::size_t> children;  // indices, in node order
};

using Edge = std::pair<std::string, std::string>;  // (parent, child)

/**
 * A strictly nested hierarchy with uniform leaf depth.
 *
 * Nodes are stored level-major, then lexicographically by id; that order is
 * the row order of the summing matrix and of every panel. The bottom level
 * (level k) holds the m_k leaves, which are the columns of S.
 * Immutable after construction.
 */
class Hierarchy {
public:
    /// Validates and orders the tree. Throws InvalidInput on cycles, multiple
    /// roots, ragged leaf depths, duplicate edges or nodes with two parents.
    static Hierarchy from_edges(const std::vector<Edge>& edges);

    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(std::size_t index) const { return nodes_.at(index); }
    std::size_t size() const { return nodes_.size(); }

    /// k + 1: levels are numbered 0 (top) to k (bottom).
    int level_count() const { return level_count_; }
    int bottom_level() const { return level_count_ - 1; }

    /// Node indices at a level, in node order.
    const std::vector<std::size_t>& level_nodes(int level) const { return levels_.at(level); }
    const std::vector<std::size_t>& bottom_nodes() const { return levels_.back(); }
    std::size_t bottom_count() const { return levels_.back().size(); }

    std::size_t index_of(const std::string& id) const;
    std::optional<std::size_t> find(const std::string& id) const;

    /// Column of S (position within the bottom level) for a leaf node index.
    std::size_t bottom_position(std::size_t node_index) const;
    /// Leaf descendants of a node, in node order (a leaf returns itself).
    std::vector<std::size_t> leaves_under(std::size_t node_index) const;
    /// Edge list in node order; round-trips through from_edges.
    std::vector<Edge> edges() const;

    std::vector<std::string> ids() const;

private:
    std::vector<Node> nodes_;
    std::vector<std::vector<std::size_t>> levels_;
    std::unordered_map<std::string, std::size_t> index_;
    int level_count_ = 0;
};

/// Same as Hierarchy::from_edges.
Hierarchy build_hierarchy(const std::vector<Edge>& edges);

/// m x m_k 0/1 matrix: entry (i, j) is 1 iff leaf j lies under (or is) node i.
Matrix summing_matrix(const Hierarchy& hierarchy);

/// S * bottom (m_k x n) -> all-node block (m x n).
Matrix aggregate_panel(const Matrix& bottom, const Matrix& summing);

/// Reads a `parent,child` CSV.
std::vector<Edge> read_edges_csv(const std::string& path);
void write_edges_csv(const std::string& path, const Hierarchy& hierarchy);

}  // namespace hfc
