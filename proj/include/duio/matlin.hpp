#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "duio/errors.hpp"

namespace duio {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Real polynomial, coefficients in ascending order: p(x) = c[0] + c[1]x + ...
// Monic polynomials carry a trailing 1. The constant 1 is {1.0}.
using Poly = std::vector<double>;

struct Tolerances {
    double rank = 1e-9;  // relative singular-value cutoff
    double orth = 1e-9;
    double eig = 1e-7;
};

// Linear subspace of R^n held as an orthonormal column basis.
// dim() == 0 is legal everywhere and is stored as an n x 0 matrix.
class Subspace {
public:
    Subspace() = default;
    Subspace(int ambient_dim, Mat orthonormal_basis);

    static Subspace zero(int ambient_dim);
    static Subspace full(int ambient_dim);

    int ambient() const { return ambient_; }
    int dim() const { return static_cast<int>(basis_.cols()); }
    const Mat& basis() const { return basis_; }

    // Orthogonal projector onto the subspace (n x n).
    Mat projector() const { return basis_ * basis_.transpose(); }

private:
    int ambient_ = 0;
    Mat basis_;  // ambient_ x dim, orthonormal columns
};

// scale_hint anchors the singular-value cutoff when the matrix is a product
// whose natural scale exceeds its own largest singular value (e.g. the
// numerically-zero image of a subspace under a unit-scale map).
int rank(const Mat& M, const Tolerances& tol = {}, double scale_hint = 0.0);

Subspace image(const Mat& M, const Tolerances& tol = {}, double scale_hint = 0.0);
Subspace kernel(const Mat& M, const Tolerances& tol = {}, double scale_hint = 0.0);

Subspace sum(const Subspace& S1, const Subspace& S2, const Tolerances& tol = {});
Subspace intersect(const Subspace& S1, const Subspace& S2, const Tolerances& tol = {});

// {x : M x in S}. M may be rectangular (q x n) with S in R^q.
Subspace preimage(const Mat& M, const Subspace& S, const Tolerances& tol = {});

Subspace orthocomplement(const Subspace& S, const Tolerances& tol = {});

// ||(I - Q_outer Q_outer^T) Q_inner||_2 <= tol, i.e. inner lies in outer.
bool contains(const Subspace& outer, const Subspace& inner, double tol = 1e-9);
bool same_subspace(const Subspace& S1, const Subspace& S2, double tol = 1e-9);

std::vector<std::complex<double>> eigvals(const Mat& M);
double max_real_eig(const Mat& M);

struct MatNorms {
    double one;        // max column absolute sum
    double two;        // largest singular value
    double inf;        // max row absolute sum
    double sigma_min;  // smallest singular value
};
MatNorms norms(const Mat& M);

// Minimal polynomial (monic, ascending coefficients) via incremental rank
// tests on the flattened Krylov sequence {I, M, M^2, ...}.
Poly minpoly(const Mat& M, const Tolerances& tol = {});

Mat pinv(const Mat& M, const Tolerances& tol = {}, double scale_hint = 0.0);

// p(M) by Horner recurrence.
Mat polyval(const Poly& p, const Mat& M);
double polyval(const Poly& p, double x);

Poly poly_mul(const Poly& a, const Poly& b);

Mat kron(const Mat& A, const Mat& B);

}  // namespace duio
