#pragma once

#include <vector>

#include "duio/geomctl.hpp"
#include "duio/netgraph.hpp"

namespace duio {

// Per-node sensing/input structure. known_cols are the indices of the global
// input columns this node can read; the rest form the unknown channel.
struct NodeSpec {
    int index = 0;
    Mat C;                        // p_i x n
    Mat B_known;                  // n x l_i
    Mat B_unknown;                // n x (m - l_i)
    std::vector<int> known_cols;  // into the global input vector
    std::vector<int> unknown_cols;
};

// Everything node i's observer needs: Wg, the orthonormal insertion/projection
// pair, the injection L and the split representations of A + L C.
struct NodeDesign {
    NodeSpec spec;
    Subspace Wg;
    Mat insertion;   // n x w_i
    Mat projection;  // (n - w_i) x n
    Mat L;           // n x p_i
    Mat A_L;         // n x n
    Mat restricted;  // w_i x w_i
    Mat induced;     // (n - w_i) x (n - w_i)
};

struct DuioDesign {
    Mat A;
    Mat B;  // global input map, n x m
    std::vector<NodeDesign> nodes;
    Graph graph;
    GoodRegion region;
    double chi = 0.0;
    double gamma = 0.0;
    double u_bar_max = 0.0;
    Mat Q;  // W_g' (L ⊗ I_n) W_g

    int n_states() const { return static_cast<int>(A.rows()); }
    int n_inputs() const { return static_cast<int>(B.cols()); }
    int n_nodes() const { return static_cast<int>(nodes.size()); }
};

struct Gains {
    double chi;
    double gamma;
    double chi_bound;    // Theorem-1 right-hand sides, for reporting
    double gamma_bound;
};

bool check_rank_condition(const NodeSpec& node, const Tolerances& tol = {});
bool check_joint_condition(const std::vector<NodeDesign>& designs,
                           const Tolerances& tol = {});

// Q = blockdiag(W_i)' (L ⊗ I_n) blockdiag(W_i). Throws NotPositiveDefinite
// when its smallest eigenvalue is not strictly positive.
Mat build_Q(const std::vector<NodeDesign>& designs, const Graph& graph,
            const Tolerances& tol = {});

// Coupling gains: the Theorem-1 lower bounds times a safety factor.
Gains compute_gains(const std::vector<NodeDesign>& designs, const Graph& graph,
                    double u_bar_max, double safety = 1.1,
                    const Tolerances& tol = {});

DuioDesign synthesize(const Mat& A, const Mat& B,
                      const std::vector<NodeSpec>& nodes, const Graph& graph,
                      const GoodRegion& region, double u_bar_max,
                      const Tolerances& tol = {});

// Block diagonal stack of all node insertions (nN x sum w_i).
Mat stacked_insertion(const std::vector<NodeDesign>& designs);
// Block diagonal stack of all node projection transposes (nN x sum (n - w_i)).
Mat stacked_complement(const std::vector<NodeDesign>& designs);

}  // namespace duio
