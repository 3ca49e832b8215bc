#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "duio/cases.hpp"
#include "duio/matlin.hpp"

using namespace duio;

namespace {

Mat random_mat(std::mt19937& rng, int rows, int cols) {
    std::normal_distribution<double> dist;
    Mat M(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) M(r, c) = dist(rng);
    return M;
}

// Smallest degree d such that M^d is a combination of lower powers, found by
// exhaustive least squares over all degrees 1..n. Used as the minpoly oracle.
int minpoly_degree_bruteforce(const Mat& M, double tol) {
    const int n = static_cast<int>(M.rows());
    std::vector<Mat> powers{Mat::Identity(n, n)};
    for (int d = 1; d <= n; ++d) powers.push_back(powers.back() * M);
    const double scale = std::max(1.0, norms(M).two);
    for (int d = 1; d <= n; ++d) {
        Mat K(n * n, d);
        for (int k = 0; k < d; ++k)
            K.col(k) = Eigen::Map<const Vec>(powers[k].data(), n * n);
        const Vec target = -Eigen::Map<const Vec>(powers[d].data(), n * n);
        const Vec c = K.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(target);
        const double residual = (K * c - target).norm();
        if (residual <= tol * std::pow(scale, d)) return d;
    }
    return n;
}

}  // namespace

TEST_CASE("rank basics") {
    CHECK(rank(Mat::Identity(3, 3)) == 3);
    CHECK(rank(Mat::Zero(3, 3)) == 0);
}

TEST_CASE("rank of the platoon product C1 * Bbar1 is zero") {
    const PlatoonSystem sys = build_platoon(PlatoonParams{});
    CHECK(rank(sys.nodes[0].C * sys.nodes[0].B_unknown) == 0);
    CHECK(rank(sys.nodes[0].B_unknown) == 3);
}

TEST_CASE("image and kernel examples") {
    CHECK(kernel(Mat::Identity(2, 2)).dim() == 0);

    Mat col(2, 1);
    col << 1, 0;
    const Subspace img = image(col);
    CHECK(img.dim() == 1);
    CHECK(std::abs(std::abs(img.basis()(0, 0)) - 1.0) < 1e-12);

    Mat shift(2, 2);
    shift << 0, 1, 0, 0;
    const Subspace ker = kernel(shift);
    CHECK(ker.dim() == 1);
    CHECK(std::abs(std::abs(ker.basis()(0, 0)) - 1.0) < 1e-12);
}

TEST_CASE("sum and intersect examples") {
    const Subspace e1 = image((Mat(2, 1) << 1, 0).finished());
    const Subspace e2 = image((Mat(2, 1) << 0, 1).finished());
    CHECK(intersect(e1, e2).dim() == 0);
    CHECK(same_subspace(sum(e1, Subspace::zero(2)), e1));

    const Subspace e12 = image((Mat(3, 2) << 1, 0, 0, 1, 0, 0).finished());
    const Subspace e23 = image((Mat(3, 2) << 0, 0, 1, 0, 0, 1).finished());
    const Subspace mid = intersect(e12, e23);
    CHECK(mid.dim() == 1);
    CHECK(std::abs(std::abs(mid.basis()(1, 0)) - 1.0) < 1e-9);
}

TEST_CASE("preimage examples") {
    std::mt19937 rng(7);
    const Mat A = random_mat(rng, 3, 3);
    CHECK(preimage(A, Subspace::full(3)).dim() == 3);

    const Subspace S = image(random_mat(rng, 3, 2));
    CHECK(same_subspace(preimage(Mat::Identity(3, 3), S), S));

    Mat shift(2, 2);
    shift << 0, 1, 0, 0;
    const Subspace e1 = image((Mat(2, 1) << 1, 0).finished());
    CHECK(preimage(shift, e1).dim() == 2);
}

TEST_CASE("orthocomplement examples") {
    CHECK(orthocomplement(Subspace::zero(3)).dim() == 3);
    CHECK(orthocomplement(Subspace::full(3)).dim() == 0);

    const double s = 1.0 / std::sqrt(2.0);
    const Subspace diag = image((Mat(2, 1) << s, s).finished());
    const Subspace anti = orthocomplement(diag);
    CHECK(anti.dim() == 1);
    CHECK(std::abs(anti.basis()(0, 0) + anti.basis()(1, 0)) < 1e-12);
}

TEST_CASE("eigvals and norms examples") {
    Mat D = Mat::Zero(2, 2);
    D(0, 0) = 1;
    D(1, 1) = 2;
    auto eigs = eigvals(D);
    std::sort(eigs.begin(), eigs.end(),
              [](auto a, auto b) { return a.real() < b.real(); });
    CHECK(std::abs(eigs[0] - std::complex<double>(1, 0)) < 1e-12);
    CHECK(std::abs(eigs[1] - std::complex<double>(2, 0)) < 1e-12);

    CHECK(norms(Mat::Identity(3, 3)).sigma_min == doctest::Approx(1.0));

    Mat M(2, 2);
    M << 1, -2, 3, 4;
    CHECK(norms(M).one == doctest::Approx(6.0));
}

TEST_CASE("minpoly examples") {
    const Poly p_id = minpoly(Mat::Identity(3, 3));
    REQUIRE(p_id.size() == 2);
    CHECK(p_id[0] == doctest::Approx(-1.0));
    CHECK(p_id[1] == doctest::Approx(1.0));

    Mat nil = Mat::Zero(3, 3);
    nil(0, 1) = 1;
    nil(1, 2) = 1;
    const Poly p_nil = minpoly(nil);
    REQUIRE(p_nil.size() == 4);
    CHECK(std::abs(p_nil[0]) < 1e-9);
    CHECK(std::abs(p_nil[1]) < 1e-9);
    CHECK(std::abs(p_nil[2]) < 1e-9);
    CHECK(p_nil[3] == doctest::Approx(1.0));

    Mat D = Mat::Zero(3, 3);
    D(0, 0) = 1;
    D(1, 1) = 2;
    D(2, 2) = 2;
    const Poly p_d = minpoly(D);  // (x-1)(x-2) = 2 - 3x + x^2
    REQUIRE(p_d.size() == 3);
    CHECK(p_d[0] == doctest::Approx(2.0));
    CHECK(p_d[1] == doctest::Approx(-3.0));
    CHECK(p_d[2] == doctest::Approx(1.0));
}

TEST_CASE("pinv examples") {
    CHECK((pinv(Mat::Identity(2, 2)) - Mat::Identity(2, 2)).norm() < 1e-12);
    CHECK(pinv(Mat::Zero(2, 3)).rows() == 3);
    CHECK(pinv(Mat::Zero(2, 3)).norm() == 0.0);

    Mat M = Mat::Zero(2, 2);
    M(0, 0) = 2;
    const Mat Mp = pinv(M);
    CHECK(Mp(0, 0) == doctest::Approx(0.5));
    CHECK(std::abs(Mp(1, 1)) < 1e-12);
}

TEST_CASE("pinv satisfies the Moore-Penrose conditions on random matrices") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int r = 1 + trial % 4;
        const int c = 1 + (trial / 4) % 4;
        Mat M = random_mat(rng, r, c);
        if (trial % 3 == 0 && c > 1) M.col(c - 1) = M.col(0);  // rank deficient
        const Mat Mp = pinv(M);
        CHECK((M * Mp * M - M).norm() < 1e-9);
        CHECK((Mp * M * Mp - Mp).norm() < 1e-9);
        CHECK((M * Mp - (M * Mp).transpose()).norm() < 1e-9);
        CHECK((Mp * M - (Mp * M).transpose()).norm() < 1e-9);
    }
}

TEST_CASE("rank-nullity on random matrices") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int rows = 1 + trial % 5;
        const int cols = 1 + (trial * 7) % 5;
        Mat M = random_mat(rng, rows, cols);
        if (trial % 4 == 0) M.row(0).setZero();
        CHECK(image(M).dim() + kernel(M).dim() == cols);
    }
}

TEST_CASE("subspace complement properties on random subspaces") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 5;
        const Subspace S = image(random_mat(rng, n, 1 + trial % n));
        const Subspace Sc = orthocomplement(S);
        CHECK(S.dim() + Sc.dim() == n);
        CHECK(intersect(S, Sc).dim() == 0);
    }
}

TEST_CASE("De Morgan duality of sum and intersection") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3 + trial % 4;
        const Subspace S1 = image(random_mat(rng, n, 1 + trial % 3));
        const Subspace S2 = image(random_mat(rng, n, 1 + (trial / 3) % 3));
        CHECK(same_subspace(orthocomplement(sum(S1, S2)),
                            intersect(orthocomplement(S1), orthocomplement(S2))));
    }
}

TEST_CASE("eigenvalues of symmetric matrices are real") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 5;
        const Mat M = random_mat(rng, n, n);
        const Mat S = 0.5 * (M + M.transpose());
        for (const auto& z : eigvals(S)) CHECK(std::abs(z.imag()) < 1e-7);
    }
}

TEST_CASE("minpoly matches the brute-force minimal-degree oracle") {
    // 100 random matrices with n <= 5; a third get repeated eigenvalues or
    // nilpotent blocks so non-trivial minimal degrees show up.
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> size_dist(1, 5);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = size_dist(rng);
        Mat M;
        if (trial % 3 == 0) {
            M = Mat::Zero(n, n);
            std::uniform_int_distribution<int> val(-2, 2);
            for (int k = 0; k < n; ++k) M(k, k) = val(rng);
            for (int k = 0; k + 1 < n; ++k)
                if (M(k, k) == M(k + 1, k + 1) && trial % 2 == 0) M(k, k + 1) = 1;
        } else {
            M = random_mat(rng, n, n);
        }
        const Poly p = minpoly(M);
        const int degree = static_cast<int>(p.size()) - 1;
        CHECK(degree == minpoly_degree_bruteforce(M, 1e-8));
        const double scale = std::pow(std::max(1.0, norms(M).two), degree);
        CHECK(polyval(p, M).norm() <= 1e-8 * scale * n);
    }
}
