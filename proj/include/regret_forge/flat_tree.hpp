#pragma once

#include <cstdint>
#include <vector>

#include "regret_forge/game.hpp"

namespace regret_forge {

/// Cache-friendly copy of a game tree for the solver hot loops. Nodes are
/// renumbered in depth-first preorder; each decision node carries the offset
/// of its infoset in the player's flat action-slot array.
struct FlatTree {
    struct FlatNode {
        NodeKind kind;
        PlayerId player;
        std::uint32_t first_child;
        std::uint32_t num_children;
        std::uint32_t slot;     // decision nodes: offset of the infoset's first action
        std::int32_t infoset;   // decision nodes: infoset id, else -1
        double payoff_p1;       // terminals only
    };

    std::vector<FlatNode> nodes;
    std::vector<std::uint32_t> children;
    std::vector<double> chance_probs;  // parallel to `children`; 0 for non-chance edges
    std::vector<NodeId> source;        // original node id of each flat node

    FlatTree() = default;

    FlatTree(const Game& game, const InfosetIndex& index) {
        nodes.reserve(game.size());
        source.reserve(game.size());
        build(game, index, game.root());
    }

  private:
    std::uint32_t build(const Game& game, const InfosetIndex& index, NodeId id) {
        const Node& node = game.node(id);
        const auto self = static_cast<std::uint32_t>(nodes.size());
        FlatNode flat{node.kind, node.player, 0, static_cast<std::uint32_t>(node.children.size()), 0, -1,
                      node.is_terminal() ? node.payoff[0] : 0.0};
        if (node.kind == NodeKind::decision) {
            flat.infoset = index.infoset_of(id);
            flat.slot = static_cast<std::uint32_t>(index.offset(node.player, flat.infoset));
        }
        nodes.push_back(flat);
        source.push_back(id);
        // children edges are contiguous; fill them after reserving the block
        const auto first = static_cast<std::uint32_t>(children.size());
        nodes[self].first_child = first;
        children.resize(children.size() + node.children.size());
        chance_probs.resize(children.size(), 0.0);
        for (std::size_t a = 0; a < node.children.size(); ++a) {
            if (node.kind == NodeKind::chance) chance_probs[first + a] = node.chance_probs[a];
            children[first + a] = build(game, index, node.children[a]);
        }
        return self;
    }
};

}  // namespace regret_forge
