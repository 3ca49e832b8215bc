#include "duio/synthesis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace duio {

namespace {

void validate_node(const NodeSpec& node, int n, int m) {
    const int p = static_cast<int>(node.C.rows());
    const int l = static_cast<int>(node.B_known.cols());
    if (node.C.cols() != n) throw ValidationError("node C has wrong column count");
    if (node.B_known.rows() != n || node.B_unknown.rows() != n)
        throw ValidationError("node input channels have wrong row count");
    if (l + node.B_unknown.cols() != m)
        throw ValidationError("node input channels do not partition the global input");
    if (l > p)
        throw ValidationError("node " + std::to_string(node.index) +
                              ": known-input count exceeds output count (l_i <= p_i required)");
    if (p > n) throw ValidationError("node output count exceeds state dimension");
}

}  // namespace

bool check_rank_condition(const NodeSpec& node, const Tolerances& tol) {
    return rank(node.C * node.B_unknown, tol) == rank(node.B_unknown, tol);
}

bool check_joint_condition(const std::vector<NodeDesign>& designs, const Tolerances& tol) {
    if (designs.empty()) throw ValidationError("joint condition: no designs");
    Subspace acc = designs.front().Wg;
    for (std::size_t i = 1; i < designs.size() && acc.dim() > 0; ++i)
        acc = intersect(acc, designs[i].Wg, tol);
    return acc.dim() == 0;
}

Mat stacked_insertion(const std::vector<NodeDesign>& designs) {
    const int n = static_cast<int>(designs.front().A_L.rows());
    const int N = static_cast<int>(designs.size());
    int total = 0;
    for (const auto& d : designs) total += d.Wg.dim();
    Mat out = Mat::Zero(n * N, total);
    int col = 0;
    for (int i = 0; i < N; ++i) {
        out.block(i * n, col, n, designs[i].Wg.dim()) = designs[i].insertion;
        col += designs[i].Wg.dim();
    }
    return out;
}

Mat stacked_complement(const std::vector<NodeDesign>& designs) {
    const int n = static_cast<int>(designs.front().A_L.rows());
    const int N = static_cast<int>(designs.size());
    int total = 0;
    for (const auto& d : designs) total += n - d.Wg.dim();
    Mat out = Mat::Zero(n * N, total);
    int col = 0;
    for (int i = 0; i < N; ++i) {
        const int c = n - designs[i].Wg.dim();
        out.block(i * n, col, n, c) = designs[i].projection.transpose();
        col += c;
    }
    return out;
}

Mat build_Q(const std::vector<NodeDesign>& designs, const Graph& graph,
            const Tolerances& tol) {
    const int n = static_cast<int>(designs.front().A_L.rows());
    const Mat Wg = stacked_insertion(designs);
    const Mat lap_kron = kron(laplacian(graph), Mat::Identity(n, n));
    Mat Q = Wg.transpose() * lap_kron * Wg;
    Q = 0.5 * (Q + Q.transpose());

    if (Q.cols() > 0) {
        Eigen::SelfAdjointEigenSolver<Mat> es(Q);
        const double min_eig = es.eigenvalues().minCoeff();
        if (min_eig <= tol.rank * std::max(1.0, es.eigenvalues().maxCoeff()))
            throw NotPositiveDefinite(
                "coupling matrix Q is not positive definite (joint condition or "
                "connectivity violated)");
    }
    return Q;
}

Gains compute_gains(const std::vector<NodeDesign>& designs, const Graph& graph,
                    double u_bar_max, double safety, const Tolerances& tol) {
    const Mat Q = build_Q(designs, graph, tol);

    // ||Atilde||_2 of the ragged block diagonal = max over block 2-norms.
    double a_tilde_norm = 0.0;
    double b_one = 0.0;
    double w_inf = 0.0;
    for (const auto& d : designs) {
        if (d.restricted.size() > 0)
            a_tilde_norm = std::max(a_tilde_norm, norms(d.restricted).two);
        if (d.spec.B_unknown.size() > 0)
            b_one = std::max(b_one, norms(d.spec.B_unknown).one);
        if (d.insertion.size() > 0) w_inf = std::max(w_inf, norms(d.insertion).inf);
    }

    Gains out{};
    const double sigma_min_q = Q.size() > 0 ? norms(Q).sigma_min : 1.0;
    out.chi_bound = a_tilde_norm / sigma_min_q;
    out.gamma_bound = u_bar_max * b_one * w_inf;
    out.chi = safety * out.chi_bound;
    out.gamma = safety * out.gamma_bound;
    return out;
}

DuioDesign synthesize(const Mat& A, const Mat& B, const std::vector<NodeSpec>& nodes,
                      const Graph& graph, const GoodRegion& region, double u_bar_max,
                      const Tolerances& tol) {
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    if (A.cols() != n) throw ValidationError("synthesize: A not square");
    if (B.rows() != n) throw ValidationError("synthesize: B row count != n");
    if (nodes.empty()) throw ValidationError("synthesize: no nodes");
    if (static_cast<int>(nodes.size()) != graph.n_nodes())
        throw ValidationError("synthesize: node count != graph size");
    if (!is_connected(graph))
        throw ValidationError("synthesize: observer communication graph is not connected");
    for (const auto& node : nodes) validate_node(node, n, m);

    DuioDesign design;
    design.A = A;
    design.B = B;
    design.graph = graph;
    design.region = region;
    design.u_bar_max = u_bar_max;

    for (const auto& node : nodes) {
        const WstarResult ws = wstar_g(A, node.C, node.B_unknown, region, tol);
        const Mat L = stabilizing_injection(A, node.C, ws.Wg, region, {}, tol);
        const Mat A_L = A + L * node.C;
        const QuotientDecomposition qd = decompose(A_L, ws.Wg, tol);

        NodeDesign d;
        d.spec = node;
        d.Wg = ws.Wg;
        d.insertion = qd.insertion;
        d.projection = qd.projection;
        d.L = L;
        d.A_L = A_L;
        d.restricted = qd.restricted;
        d.induced = qd.induced;
        design.nodes.push_back(std::move(d));
    }

    if (!check_joint_condition(design.nodes, tol))
        throw JointConditionViolated(
            "intersection of the per-node subspaces is nonzero; the network "
            "cannot jointly recover the full state");

    design.Q = build_Q(design.nodes, graph, tol);
    const Gains g = compute_gains(design.nodes, graph, u_bar_max, 1.1, tol);
    design.chi = g.chi;
    design.gamma = g.gamma;
    return design;
}

}  // namespace duio
