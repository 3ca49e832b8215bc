#pragma once

#include <string>
#include <vector>

#include "duio/sim.hpp"
#include "duio/synthesis.hpp"

namespace duio {

// On-disk description of a networked system: plant matrices, per-node
// sensing and known-input columns, communication graph, input bound,
// good-region margin, and simulation settings. Stored as hand-editable
// structured text ('#' starts a comment; see serialize_system for layout).
struct NodeBlock {
    Mat C;                        // p_i x n output map
    std::vector<int> known_cols;  // indices into the global input vector
};

struct SystemDescription {
    int n = 0;  // state dimension
    int m = 0;  // global input dimension
    Mat A;
    Mat B;
    std::vector<NodeBlock> nodes;
    Mat adjacency;  // one row/column per node, 0/1 symmetric, zero diagonal
    double u_bar_max = 0.0;
    double alpha = 0.5;  // stability margin of the good region
    SimConfig sim;
    Vec x0;  // initial plant state; empty means zero

    // Throws ValidationError on any shape, graph, or index inconsistency.
    void validate() const;

    // Per-node specs with the B_known / B_unknown column splits filled in.
    std::vector<NodeSpec> node_specs() const;
    Graph graph() const;
};

bool operator==(const SystemDescription& a, const SystemDescription& b);
inline bool operator!=(const SystemDescription& a, const SystemDescription& b) {
    return !(a == b);
}

// Parse/serialize are exact inverses: numbers are written with enough digits
// to round-trip, so parse(serialize(d)) == d.
SystemDescription parse_system(const std::string& text);
SystemDescription load_system(const std::string& path);
std::string serialize_system(const SystemDescription& desc);

// The four-vehicle platoon case packaged as a description file.
SystemDescription platoon_description(const std::string& graph_kind = "path");

}  // namespace duio
