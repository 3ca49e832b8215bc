#pragma once

#include "duio/matlin.hpp"

namespace duio {

// Undirected, unweighted communication graph. Adjacency entries are 0/1 with
// zero diagonal; anything else is rejected at construction.
class Graph {
public:
    Graph() = default;
    explicit Graph(Mat adjacency);

    static Graph path(int n_nodes);
    static Graph complete(int n_nodes);

    int n_nodes() const { return static_cast<int>(adjacency_.rows()); }
    const Mat& adjacency() const { return adjacency_; }
    std::vector<int> neighbors(int i) const;

private:
    Mat adjacency_;
};

Mat laplacian(const Graph& g);
bool is_connected(const Graph& g);

}  // namespace duio
