#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "duio/cases.hpp"
#include "duio/errors.hpp"
#include "duio/synthesis.hpp"

using namespace duio;

namespace {

const PlatoonSystem& platoon() {
    static const PlatoonSystem sys = build_platoon(PlatoonParams{});
    return sys;
}

const DuioDesign& platoon_design() {
    static const DuioDesign design = synthesize(
        platoon().A, platoon().B, platoon().nodes, platoon().graph, GoodRegion{},
        kLeaderInputBound);
    return design;
}

bool multiset_eig_match(const Mat& A, const Mat& B1, const Mat& B2, double tol) {
    auto all = eigvals(B1);
    const auto more = eigvals(B2);
    all.insert(all.end(), more.begin(), more.end());
    auto want = eigvals(A);
    auto key = [](const std::complex<double>& a, const std::complex<double>& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    };
    std::sort(all.begin(), all.end(), key);
    std::sort(want.begin(), want.end(), key);
    if (all.size() != want.size()) return false;
    for (std::size_t k = 0; k < all.size(); ++k)
        if (std::abs(all[k] - want[k]) > tol) return false;
    return true;
}

}  // namespace

TEST_CASE("rank condition examples") {
    NodeSpec trivial;
    trivial.C = Mat::Identity(3, 3);
    trivial.B_unknown = Mat::Zero(3, 0);
    CHECK(check_rank_condition(trivial));

    NodeSpec full_output;
    full_output.C = Mat::Identity(3, 3);
    full_output.B_unknown = Mat::Identity(3, 3);
    CHECK(check_rank_condition(full_output));

    for (const auto& node : platoon().nodes) CHECK_FALSE(check_rank_condition(node));
}

TEST_CASE("joint condition on the platoon design") {
    CHECK(check_joint_condition(platoon_design().nodes));
}

TEST_CASE("joint condition fails for identical blind nodes") {
    // Two nodes with the same nonzero Wg: intersection cannot be zero.
    Mat A = Mat::Zero(2, 2);
    A(0, 0) = -1;
    A(1, 1) = -2;
    Mat Bbar(2, 1);
    Bbar << 1, 0;
    NodeSpec spec;
    spec.C = Mat::Zero(1, 2);
    spec.B_known = Mat::Zero(2, 0);
    spec.B_unknown = Bbar;
    spec.unknown_cols = {0};
    std::vector<NodeSpec> nodes{spec, spec};
    nodes[1].index = 1;
    CHECK_THROWS_AS(
        synthesize(A, Bbar, nodes, Graph::complete(2), GoodRegion{}, 1.0),
        JointConditionViolated);
}

TEST_CASE("build_Q rejects a single edgeless node") {
    // One node, no edges: the Laplacian is 0, so Q = 0 and cannot be
    // positive definite.
    NodeDesign node;
    node.Wg = Subspace::full(2);
    node.insertion = Mat::Identity(2, 2);
    node.projection = Mat::Zero(0, 2);
    CHECK_THROWS_AS(build_Q({node}, Graph(Mat::Zero(1, 1))), NotPositiveDefinite);
}

TEST_CASE("a lone node with unknown inputs violates the joint condition") {
    Mat A = Mat::Zero(2, 2);
    A(0, 0) = -1;
    A(1, 1) = -2;
    Mat Bbar(2, 1);
    Bbar << 1, 0;
    NodeSpec spec;
    spec.index = 0;
    spec.C = Mat::Zero(1, 2);
    spec.B_known = Mat::Zero(2, 0);
    spec.B_unknown = Bbar;
    spec.unknown_cols = {0};
    CHECK_THROWS_AS(
        synthesize(A, Bbar, {spec}, Graph(Mat::Zero(1, 1)), GoodRegion{}, 1.0),
        JointConditionViolated);
}

TEST_CASE("Q is symmetric positive definite for the platoon") {
    const Mat& Q = platoon_design().Q;
    CHECK((Q - Q.transpose()).norm() < 1e-9);
    CHECK(norms(Q).sigma_min > 0.0);
    Eigen::SelfAdjointEigenSolver<Mat> es(Q);
    CHECK(es.eigenvalues()(0) > 1e-9);
}

TEST_CASE("gains exceed the theorem bounds") {
    const auto gains = compute_gains(platoon_design().nodes, platoon().graph,
                                     kLeaderInputBound);
    CHECK(gains.chi > gains.chi_bound);
    CHECK(gains.gamma > gains.gamma_bound);

    // Independent recomputation of the bounds from the returned design.
    double max_restricted = 0.0, max_b1 = 0.0, max_winf = 0.0;
    for (const auto& node : platoon_design().nodes) {
        max_restricted = std::max(max_restricted, norms(node.restricted).two);
        max_b1 = std::max(max_b1, norms(node.spec.B_unknown).one);
        max_winf = std::max(max_winf, norms(node.insertion).inf);
    }
    const double sigma_min_Q = norms(platoon_design().Q).sigma_min;
    CHECK(gains.chi > max_restricted / sigma_min_Q);
    CHECK(gains.gamma > kLeaderInputBound * max_b1 * max_winf);
    CHECK(gains.chi_bound ==
          doctest::Approx(max_restricted / sigma_min_Q).epsilon(1e-9));
}

TEST_CASE("zero unknown-input bound gives zero gamma") {
    const auto gains = compute_gains(platoon_design().nodes, platoon().graph, 0.0);
    CHECK(gains.gamma == 0.0);
}

TEST_CASE("no unknown inputs reduces to a distributed Luenberger design") {
    // Observable nodes with every input known: all Wg = 0, gamma = 0.
    Mat A = Mat::Zero(2, 2);
    A(0, 1) = 1;
    Mat B(2, 1);
    B << 0, 1;
    std::vector<NodeSpec> nodes(2);
    for (int i = 0; i < 2; ++i) {
        nodes[i].index = i;
        nodes[i].C = Mat::Identity(2, 2);
        nodes[i].B_known = B;
        nodes[i].B_unknown = Mat::Zero(2, 0);
        nodes[i].known_cols = {0};
    }
    const DuioDesign d =
        synthesize(A, B, nodes, Graph::complete(2), GoodRegion{}, 0.0);
    for (const auto& node : d.nodes) CHECK(node.Wg.dim() == 0);
    CHECK(d.gamma == 0.0);
}

TEST_CASE("per-node designs satisfy the structural invariants") {
    const auto& design = platoon_design();
    const int n = design.n_states();
    for (const auto& node : design.nodes) {
        // Orthonormality of the transformation blocks.
        CHECK((node.insertion.transpose() * node.insertion -
               Mat::Identity(node.Wg.dim(), node.Wg.dim()))
                  .norm() < 1e-9);
        CHECK((node.projection * node.projection.transpose() -
               Mat::Identity(n - node.Wg.dim(), n - node.Wg.dim()))
                  .norm() < 1e-9);
        CHECK((node.insertion.transpose() * node.projection.transpose()).norm() <
              1e-9);

        // Unknown-input image inside Wg; invariance with and without L.
        CHECK(contains(node.Wg, image(node.spec.B_unknown), 1e-9));
        const Subspace hidden = intersect(node.Wg, kernel(node.spec.C));
        if (hidden.dim() > 0)
            CHECK(contains(node.Wg,
                           image(design.A * hidden.basis(), Tolerances{},
                                 norms(design.A).two),
                           1e-7));
        CHECK(contains(node.Wg,
                       image(node.A_L * node.Wg.basis(), Tolerances{},
                             norms(node.A_L).two),
                       1e-7));

        // Spectral split and stability margin.
        CHECK(multiset_eig_match(node.A_L, node.restricted, node.induced, 1e-6));
        CHECK(max_real_eig(node.induced) < -0.5);
    }
}

TEST_CASE("synthesis is deterministic") {
    const DuioDesign a = synthesize(platoon().A, platoon().B, platoon().nodes,
                                    platoon().graph, GoodRegion{}, kLeaderInputBound);
    const DuioDesign b = synthesize(platoon().A, platoon().B, platoon().nodes,
                                    platoon().graph, GoodRegion{}, kLeaderInputBound);
    CHECK(a.chi == b.chi);
    CHECK(a.gamma == b.gamma);
    CHECK((a.Q - b.Q).norm() == 0.0);
    for (int i = 0; i < a.n_nodes(); ++i) {
        CHECK((a.nodes[i].L - b.nodes[i].L).norm() == 0.0);
        CHECK((a.nodes[i].insertion - b.nodes[i].insertion).norm() == 0.0);
    }
}

TEST_CASE("platoon design regression values") {
    const auto& design = platoon_design();
    for (const auto& node : design.nodes) CHECK(node.Wg.dim() == 9);
    CHECK(design.chi == doctest::Approx(79.5343).epsilon(1e-4));
    CHECK(design.gamma == doctest::Approx(31.4286).epsilon(1e-4));
}
