#pragma once

// Finite scenario trees: explicit histories as nodes, one solvency cone per
// node, and a finite family of transition kernels per interior node.  All
// quasi-sure logic reduces to the reachable-node mask computed here.

#include <string>
#include <vector>

#include "conehedge/cone.hpp"
#include "conehedge/errors.hpp"

namespace conehedge {

struct TreeNode {
    size_t id = 0;
    size_t t = 0;
    size_t parent = SIZE_MAX;
    std::vector<size_t> children;
    SolvencyCone cone;
    Mat kernels;  // rows are probability vectors over children
    std::string label;
    bool frictionless = false;
};

struct ScenarioTree {
    size_t T = 0;
    size_t d = 0;
    std::vector<TreeNode> nodes;
    std::vector<std::vector<size_t>> by_time;

    size_t root() const { return 0; }
    const TreeNode& node(size_t id) const { return nodes[id]; }
    bool is_terminal(size_t id) const { return nodes[id].t == T; }

    std::vector<size_t> path_from_root(size_t id) const {
        std::vector<size_t> p;
        for (size_t n = id; n != SIZE_MAX; n = nodes[n].parent) p.push_back(n);
        std::reverse(p.begin(), p.end());
        return p;
    }
};

class TreeBuilder {
  public:
    size_t add_root(SolvencyCone cone, std::string label = "0") {
        if (!tree_.nodes.empty()) throw SpecParseError("tree already has a root");
        return add_node(SIZE_MAX, std::move(cone), std::move(label));
    }

    size_t add_child(size_t parent, SolvencyCone cone, std::string label = {}) {
        if (parent >= tree_.nodes.size()) throw SpecParseError("unknown parent node");
        if (label.empty())
            label = tree_.nodes[parent].label + "." +
                    std::to_string(tree_.nodes[parent].children.size());
        size_t id = add_node(parent, std::move(cone), std::move(label));
        tree_.nodes[parent].children.push_back(id);
        return id;
    }

    void set_kernels(size_t node, Mat kernels) {
        if (node >= tree_.nodes.size()) throw SpecParseError("unknown node");
        tree_.nodes[node].kernels = std::move(kernels);
    }

    void set_frictionless(size_t node, bool value) { tree_.nodes[node].frictionless = value; }

    TreeNode& node(size_t id) { return tree_.nodes[id]; }

    ScenarioTree finish() {
        if (tree_.nodes.empty()) throw SpecParseError("empty tree");
        size_t T = 0;
        for (const auto& n : tree_.nodes) T = std::max(T, n.t);
        tree_.T = T;
        tree_.d = tree_.nodes[0].cone.d;
        tree_.by_time.assign(T + 1, {});
        for (const auto& n : tree_.nodes) tree_.by_time[n.t].push_back(n.id);
        validate();
        return std::move(tree_);
    }

  private:
    size_t add_node(size_t parent, SolvencyCone cone, std::string label) {
        TreeNode n;
        n.id = tree_.nodes.size();
        n.parent = parent;
        n.t = parent == SIZE_MAX ? 0 : tree_.nodes[parent].t + 1;
        n.cone = std::move(cone);
        n.label = std::move(label);
        tree_.nodes.push_back(std::move(n));
        return tree_.nodes.back().id;
    }

    void validate() const {
        if (tree_.T < 1) throw SpecParseError("horizon must be at least 1");
        for (const auto& n : tree_.nodes) {
            if (n.cone.d != tree_.d) throw DimensionMismatch("mixed asset counts in tree");
            if (n.t < tree_.T) {
                if (n.children.empty())
                    throw SpecParseError("node " + n.label + " at time " + std::to_string(n.t) +
                                         " has no children");
                if (n.kernels.empty())
                    throw SpecParseError("node " + n.label + " has no kernels");
                for (const auto& k : n.kernels) {
                    if (k.size() != n.children.size())
                        throw SpecParseError("kernel arity mismatch at node " + n.label);
                    Rational sum = 0;
                    for (const auto& p : k) {
                        if (p < 0) throw SpecParseError("negative kernel mass at node " + n.label);
                        sum += p;
                    }
                    if (sum != 1)
                        throw SpecParseError("kernel mass " + format_rational(sum) + " at node " +
                                             n.label);
                }
            } else if (!n.children.empty()) {
                throw SpecParseError("node " + n.label + " extends beyond the horizon");
            }
        }
    }

    ScenarioTree tree_;
};

using SupportMask = std::vector<bool>;

inline SupportMask polar_mask(const ScenarioTree& tree) {
    SupportMask reach(tree.nodes.size(), false);
    reach[tree.root()] = true;
    for (size_t t = 0; t < tree.T; ++t) {
        for (size_t id : tree.by_time[t]) {
            if (!reach[id]) continue;
            const TreeNode& n = tree.node(id);
            for (size_t c = 0; c < n.children.size(); ++c) {
                for (const auto& k : n.kernels) {
                    if (k[c] > 0) {
                        reach[n.children[c]] = true;
                        break;
                    }
                }
            }
        }
    }
    return reach;
}

// eta assigns one d-vector per node id; admissible iff the transfer lies in
// -K at every reachable node.
inline bool is_admissible(const ScenarioTree& tree, const std::vector<Vec>& eta) {
    if (eta.size() != tree.nodes.size()) throw DimensionMismatch("is_admissible: eta size");
    SupportMask reach = polar_mask(tree);
    for (const auto& n : tree.nodes) {
        if (!reach[n.id]) continue;
        if (!in_minus_cone(n.cone, eta[n.id])) return false;
    }
    return true;
}

}  // namespace conehedge
