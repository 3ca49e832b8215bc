#include "duio/netgraph.hpp"

#include <vector>

namespace duio {

Graph::Graph(Mat adjacency) : adjacency_(std::move(adjacency)) {
    const Eigen::Index n = adjacency_.rows();
    if (adjacency_.cols() != n) throw ValidationError("adjacency matrix not square");
    if (n < 1) throw ValidationError("graph needs at least one node");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (adjacency_(i, i) != 0.0) throw ValidationError("adjacency diagonal must be zero");
        for (Eigen::Index j = 0; j < n; ++j) {
            const double a = adjacency_(i, j);
            if (a != 0.0 && a != 1.0)
                throw ValidationError("adjacency entries must be 0 or 1 (unweighted graph)");
            if (a != adjacency_(j, i))
                throw ValidationError("adjacency matrix must be symmetric");
        }
    }
}

Graph Graph::path(int n_nodes) {
    Mat a = Mat::Zero(n_nodes, n_nodes);
    for (int i = 0; i + 1 < n_nodes; ++i) a(i, i + 1) = a(i + 1, i) = 1.0;
    return Graph(a);
}

Graph Graph::complete(int n_nodes) {
    Mat a = Mat::Ones(n_nodes, n_nodes) - Mat::Identity(n_nodes, n_nodes);
    return Graph(a);
}

std::vector<int> Graph::neighbors(int i) const {
    std::vector<int> out;
    for (int j = 0; j < n_nodes(); ++j)
        if (adjacency_(i, j) != 0.0) out.push_back(j);
    return out;
}

Mat laplacian(const Graph& g) {
    const int n = g.n_nodes();
    Mat l = -g.adjacency();
    for (int i = 0; i < n; ++i) l(i, i) = g.adjacency().row(i).sum();
    return l;
}

bool is_connected(const Graph& g) {
    const int n = g.n_nodes();
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        for (int j : g.neighbors(i)) {
            if (!seen[j]) {
                seen[j] = true;
                ++count;
                stack.push_back(j);
            }
        }
    }
    return count == n;
}

}  // namespace duio
