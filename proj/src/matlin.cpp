#include "duio/matlin.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace duio {

namespace {

void check_finite(const Mat& M) {
    if (!M.allFinite()) throw ValidationError("matrix has non-finite entries");
}

// Thin SVD wrapper; handles 0-sized matrices which Eigen's SVD does not like.
struct Svd {
    Mat U;       // m x k
    Mat V;       // n x k
    Vec sigma;   // k
};

Svd full_svd(const Mat& M) {
    Svd out;
    const Eigen::Index m = M.rows(), n = M.cols();
    if (m == 0 || n == 0) {
        out.U = Mat::Identity(m, m);
        out.V = Mat::Identity(n, n);
        out.sigma = Vec::Zero(std::min(m, n));
        return out;
    }
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.U = svd.matrixU();
    out.V = svd.matrixV();
    out.sigma = svd.singularValues();
    return out;
}

int numeric_rank(const Vec& sigma, double tol_rank, double scale_hint = 0.0) {
    if (sigma.size() == 0) return 0;
    const double cutoff = tol_rank * std::max(sigma(0), scale_hint);
    int r = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > cutoff && sigma(i) > 0.0) ++r;
    return r;
}

}  // namespace

Subspace::Subspace(int ambient_dim, Mat orthonormal_basis)
    : ambient_(ambient_dim), basis_(std::move(orthonormal_basis)) {
    if (basis_.rows() != ambient_)
        throw DimensionMismatch("subspace basis rows != ambient dimension");
    if (basis_.cols() > basis_.rows())
        throw DimensionMismatch("subspace dimension exceeds ambient dimension");
}

Subspace Subspace::zero(int ambient_dim) { return Subspace(ambient_dim, Mat(ambient_dim, 0)); }

Subspace Subspace::full(int ambient_dim) {
    return Subspace(ambient_dim, Mat::Identity(ambient_dim, ambient_dim));
}

int rank(const Mat& M, const Tolerances& tol, double scale_hint) {
    check_finite(M);
    return numeric_rank(full_svd(M).sigma, tol.rank, scale_hint);
}

Subspace image(const Mat& M, const Tolerances& tol, double scale_hint) {
    check_finite(M);
    const Svd svd = full_svd(M);
    const int r = numeric_rank(svd.sigma, tol.rank, scale_hint);
    return Subspace(static_cast<int>(M.rows()), svd.U.leftCols(r));
}

Subspace kernel(const Mat& M, const Tolerances& tol, double scale_hint) {
    check_finite(M);
    const Svd svd = full_svd(M);
    const int r = numeric_rank(svd.sigma, tol.rank, scale_hint);
    return Subspace(static_cast<int>(M.cols()), svd.V.rightCols(M.cols() - r));
}

Subspace sum(const Subspace& S1, const Subspace& S2, const Tolerances& tol) {
    if (S1.ambient() != S2.ambient())
        throw DimensionMismatch("subspace sum: ambient dimensions differ");
    Mat stacked(S1.ambient(), S1.dim() + S2.dim());
    stacked << S1.basis(), S2.basis();
    return image(stacked, tol);
}

Subspace intersect(const Subspace& S1, const Subspace& S2, const Tolerances& tol) {
    if (S1.ambient() != S2.ambient())
        throw DimensionMismatch("subspace intersect: ambient dimensions differ");
    return orthocomplement(
        sum(orthocomplement(S1, tol), orthocomplement(S2, tol), tol), tol);
}

Subspace preimage(const Mat& M, const Subspace& S, const Tolerances& tol) {
    if (M.rows() != S.ambient())
        throw DimensionMismatch("preimage: map codomain != subspace ambient");
    // {x : Mx in S} = Ker((I - QQ^T) M); the cutoff is judged against the
    // scale of M itself, since the defect can be numerically zero.
    const Mat defect = (Mat::Identity(M.rows(), M.rows()) - S.projector()) * M;
    return kernel(defect, tol, norms(M).two);
}

Subspace orthocomplement(const Subspace& S, const Tolerances& tol) {
    return kernel(S.basis().transpose(), tol);
}

bool contains(const Subspace& outer, const Subspace& inner, double tol) {
    if (outer.ambient() != inner.ambient()) return false;
    if (inner.dim() == 0) return true;
    const Mat defect =
        inner.basis() - outer.projector() * inner.basis();
    return defect.norm() <= tol * std::sqrt(static_cast<double>(inner.dim()));
}

bool same_subspace(const Subspace& S1, const Subspace& S2, double tol) {
    return contains(S1, S2, tol) && contains(S2, S1, tol);
}

std::vector<std::complex<double>> eigvals(const Mat& M) {
    if (M.rows() != M.cols()) throw DimensionMismatch("eigvals: matrix not square");
    check_finite(M);
    if (M.rows() == 0) return {};
    Eigen::EigenSolver<Mat> es(M, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> out(M.rows());
    for (Eigen::Index i = 0; i < M.rows(); ++i) out[i] = es.eigenvalues()(i);
    return out;
}

double max_real_eig(const Mat& M) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& ev : eigvals(M)) worst = std::max(worst, ev.real());
    return worst;
}

MatNorms norms(const Mat& M) {
    check_finite(M);
    MatNorms out{0.0, 0.0, 0.0, 0.0};
    if (M.size() == 0) return out;
    out.one = M.cwiseAbs().colwise().sum().maxCoeff();
    out.inf = M.cwiseAbs().rowwise().sum().maxCoeff();
    const Vec sigma = full_svd(M).sigma;
    out.two = sigma.size() ? sigma(0) : 0.0;
    out.sigma_min = sigma.size() ? sigma(sigma.size() - 1) : 0.0;
    return out;
}

Poly minpoly(const Mat& M, const Tolerances& tol) {
    if (M.rows() != M.cols()) throw DimensionMismatch("minpoly: matrix not square");
    check_finite(M);
    const int n = static_cast<int>(M.rows());
    if (n == 0) return {1.0};

    // Scale so Krylov powers stay O(1); coefficients are mapped back at the end.
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    const Mat Ms = M / scale;

    Mat krylov(n * n, n + 1);  // columns vec(Ms^k)
    Mat power = Mat::Identity(n, n);
    for (int k = 0; k <= n; ++k) {
        krylov.col(k) = Eigen::Map<const Vec>(power.data(), n * n);
        if (k < n) power = Ms * power;
    }

    for (int k = 1; k <= n; ++k) {
        const Mat basis = krylov.leftCols(k);
        const Vec target = krylov.col(k);
        const Vec c = basis.colPivHouseholderQr().solve(target);
        const double residual = (basis * c - target).norm();
        if (residual <= tol.rank * std::sqrt(static_cast<double>(n)) * 1e3 || k == n) {
            // Ms^k = sum_j c_j Ms^j  =>  p(x) = x^k - sum c_j x^j  (in scaled x)
            Poly p(k + 1, 0.0);
            p[k] = 1.0;
            for (int j = 0; j < k; ++j) p[j] = -c(j);
            // Unscale: q(x) = scale^k p(x / scale).
            for (int j = 0; j <= k; ++j) p[j] *= std::pow(scale, k - j);
            return p;
        }
    }
    throw std::logic_error("minpoly: unreachable");  // degree n always dependent
}

Mat pinv(const Mat& M, const Tolerances& tol, double scale_hint) {
    check_finite(M);
    if (M.size() == 0) return Mat::Zero(M.cols(), M.rows());
    const Svd svd = full_svd(M);
    const int r = numeric_rank(svd.sigma, tol.rank, scale_hint);
    Mat out = Mat::Zero(M.cols(), M.rows());
    for (int i = 0; i < r; ++i)
        out += svd.V.col(i) * svd.U.col(i).transpose() / svd.sigma(i);
    return out;
}

Mat polyval(const Poly& p, const Mat& M) {
    if (M.rows() != M.cols()) throw DimensionMismatch("polyval: matrix not square");
    const Eigen::Index n = M.rows();
    Mat acc = Mat::Zero(n, n);
    for (auto it = p.rbegin(); it != p.rend(); ++it)
        acc = acc * M + *it * Mat::Identity(n, n);
    return acc;
}

double polyval(const Poly& p, double x) {
    double acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Mat kron(const Mat& A, const Mat& B) {
    Mat out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

}  // namespace duio
