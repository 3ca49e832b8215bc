#include "duio/geomctl.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>

namespace duio {

namespace {

double scale_of(const Mat& M) { return std::max(1.0, M.cwiseAbs().maxCoeff()); }

// Image of a subspace under a (possibly rectangular) map. The rank cutoff is
// anchored to ||M|| so a numerically-zero image comes out zero-dimensional.
Subspace map_image(const Mat& M, const Subspace& S, const Tolerances& tol) {
    if (S.dim() == 0) return Subspace::zero(static_cast<int>(M.rows()));
    return image(M * S.basis(), tol, norms(M).two);
}

std::vector<std::complex<double>> poly_roots(const Poly& p) {
    // Companion-matrix roots of a monic polynomial.
    const int deg = static_cast<int>(p.size()) - 1;
    if (deg <= 0) return {};
    Mat companion = Mat::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -p[i] / p[deg];
    return eigvals(companion);
}

// Rebuild a real monic polynomial from roots, pairing near-conjugates into
// real quadratic factors.
Poly poly_from_roots(std::vector<std::complex<double>> roots) {
    Poly out{1.0};
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const auto r = roots[i];
        if (std::abs(r.imag()) < 1e-9 * std::max(1.0, std::abs(r))) {
            out = poly_mul(out, Poly{-r.real(), 1.0});
            continue;
        }
        // find the closest unused conjugate partner
        std::size_t best = roots.size();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (used[j]) continue;
            const double dist = std::abs(roots[j] - std::conj(r));
            if (dist < best_dist) {
                best_dist = dist;
                best = j;
            }
        }
        if (best == roots.size())
            throw std::runtime_error("split_spectrum: unpaired complex root");
        used[best] = true;
        out = poly_mul(out, Poly{std::norm(r), -2.0 * r.real(), 1.0});
    }
    return out;
}

// Stabilizing state feedback K for the pair (A, B) via the continuous-time
// Riccati equation A'P + PA - PBB'P + I = 0, solved with the Hamiltonian
// eigenvector method. Returns false when no stabilizing solution exists.
bool care_feedback(const Mat& A, const Mat& B, Mat& K) {
    const int n = static_cast<int>(A.rows());
    if (n == 0) {
        K = Mat::Zero(B.cols(), 0);
        return true;
    }
    Mat H(2 * n, 2 * n);
    H << A, -B * B.transpose(), -Mat::Identity(n, n), -A.transpose();
    Eigen::ComplexEigenSolver<Mat> es(H);
    if (es.info() != Eigen::Success) return false;

    Eigen::MatrixXcd U(2 * n, n);
    int picked = 0;
    for (int i = 0; i < 2 * n; ++i) {
        if (es.eigenvalues()(i).real() < 0.0) {
            if (picked == n) return false;
            U.col(picked++) = es.eigenvectors().col(i);
        }
    }
    if (picked != n) return false;

    const Eigen::MatrixXcd U1 = U.topRows(n);
    const Eigen::MatrixXcd U2 = U.bottomRows(n);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(U1);
    if (!lu.isInvertible()) return false;
    Mat P = (U2 * lu.inverse()).real();
    P = 0.5 * (P + P.transpose());
    K = B.transpose() * P;
    return true;
}

}  // namespace

Subspace vstar(const Mat& A, const Subspace& B_img, const Subspace& K,
               const Tolerances& tol) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw DimensionMismatch("vstar: A not square");
    if (B_img.ambient() != n || K.ambient() != n)
        throw DimensionMismatch("vstar: ambient dimensions differ");

    Subspace v = K;
    for (int iter = 0; iter <= n; ++iter) {
        const Subspace next = intersect(K, preimage(A, sum(v, B_img, tol), tol), tol);
        if (next.dim() > v.dim())
            throw std::runtime_error("vstar: dimension increased (rank tolerance issue)");
        if (next.dim() == v.dim() && same_subspace(next, v, tol.orth * 1e3)) return next;
        v = next;
    }
    return v;
}

Subspace rstar(const Mat& A, const Subspace& B_img, const Subspace& vstar_K,
               const Tolerances& tol) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw DimensionMismatch("rstar: A not square");
    if (B_img.ambient() != n || vstar_K.ambient() != n)
        throw DimensionMismatch("rstar: ambient dimensions differ");

    Subspace r = Subspace::zero(n);
    for (int iter = 0; iter <= n; ++iter) {
        const Subspace next =
            intersect(vstar_K, sum(map_image(A, r, tol), B_img, tol), tol);
        if (next.dim() < r.dim())
            throw std::runtime_error("rstar: dimension decreased (rank tolerance issue)");
        if (next.dim() == r.dim() && same_subspace(next, r, tol.orth * 1e3)) return next;
        r = next;
    }
    return r;
}

Mat friend_of(const Mat& A, const Mat& B, const Subspace& V, const Tolerances& tol) {
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    if (A.cols() != n || B.rows() != n || V.ambient() != n)
        throw DimensionMismatch("friend_of: dimensions differ");
    if (V.dim() == 0) return Mat::Zero(m, n);

    // Off-V defect must be cancelled columnwise: Pc B f_j = -Pc A v_j.
    const Mat Pc = Mat::Identity(n, n) - V.projector();
    const Mat lhs = Pc * B;
    const Mat rhs = -Pc * A * V.basis();
    const Mat Fv = pinv(lhs, tol, norms(B).two) * rhs;  // m x dim(V), minimum norm

    const double defect = (lhs * Fv - rhs).norm();
    if (defect > 1e-7 * scale_of(A) * std::sqrt(static_cast<double>(V.dim())))
        throw NotInvariant("friend_of: subspace is not (A,B)-invariant");

    return Fv * V.basis().transpose();  // zero action outside V
}

QuotientDecomposition decompose(const Mat& A_L, const Subspace& W, const Tolerances& tol) {
    const int n = static_cast<int>(A_L.rows());
    if (A_L.cols() != n || W.ambient() != n)
        throw DimensionMismatch("decompose: dimensions differ");

    QuotientDecomposition out;
    out.W = W;
    out.insertion = W.basis();
    out.projection = orthocomplement(W, tol).basis().transpose();

    const Mat defect = out.projection * A_L * out.insertion;
    if (defect.size() > 0 && defect.norm() > 1e-7 * scale_of(A_L) * std::sqrt(std::max(1, W.dim())))
        throw NotInvariant("decompose: subspace is not invariant under the given map");

    out.restricted = out.insertion.transpose() * A_L * out.insertion;
    out.induced = out.projection * A_L * out.projection.transpose();
    return out;
}

SpectralSplit split_spectrum(const Poly& beta, const GoodRegion& region,
                             const Tolerances& tol) {
    (void)tol;
    if (beta.empty() || std::abs(beta.back() - 1.0) > 1e-9)
        throw ValidationError("split_spectrum: polynomial must be monic");

    std::vector<std::complex<double>> good, bad;
    for (const auto& root : poly_roots(beta)) {
        // keep conjugate pairs together: classify by the pair representative
        const std::complex<double> rep(root.real(), std::abs(root.imag()));
        (region.contains(rep) ? good : bad).push_back(root);
    }
    SpectralSplit out;
    out.beta_g = poly_from_roots(std::move(good));
    out.beta_b = poly_from_roots(std::move(bad));
    return out;
}

WstarResult wstar_g(const Mat& A, const Mat& C_i, const Mat& Bbar_i,
                    const GoodRegion& region, const Tolerances& tol,
                    const Mat* friend_override) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw DimensionMismatch("wstar_g: A not square");
    if (C_i.cols() != n || Bbar_i.rows() != n)
        throw DimensionMismatch("wstar_g: C/Bbar shapes not conformable with A");

    const Mat At = A.transpose();
    const Mat Ct = C_i.transpose();  // dual insertion of outputs

    WstarResult out;
    const Subspace img_Ct = image(Ct, tol);
    const Subspace ker_Bt = kernel(Bbar_i.transpose(), tol);
    out.Vp_star = vstar(At, img_Ct, ker_Bt, tol);
    out.Rp_star = rstar(At, img_Ct, out.Vp_star, tol);

    out.L0_dual = friend_override ? *friend_override
                                  : friend_of(At, Ct, out.Vp_star, tol);
    const Mat A0 = At + Ct * out.L0_dual;

    // Quotient X'/R'* (friends of V'* are friends of R'*).
    const QuotientDecomposition qr = decompose(A0, out.Rp_star, tol);
    const Subspace v_bar = map_image(qr.projection, out.Vp_star, tol);

    // Minimal polynomial of the induced map restricted to V'*/R'*.
    const QuotientDecomposition qv = decompose(qr.induced, v_bar, tol);
    const Poly beta = minpoly(qv.restricted, tol);
    out.beta_split = split_spectrum(beta, region, tol);

    const Mat beta_g_eval = polyval(out.beta_split.beta_g, qr.induced);
    const Subspace xg_bar = intersect(
        v_bar, kernel(beta_g_eval, tol, std::max(1.0, beta_g_eval.norm())), tol);
    const Subspace vg = preimage(qr.projection, xg_bar, tol);

    out.Wg = orthocomplement(vg, tol);
    out.Pg = vg.basis().transpose();
    return out;
}

Mat stabilizing_injection(const Mat& A, const Mat& C_i, const Subspace& Wg,
                          const GoodRegion& region,
                          const std::vector<double>& pole_targets,
                          const Tolerances& tol) {
    const int n = static_cast<int>(A.rows());
    const int p = static_cast<int>(C_i.rows());
    if (A.cols() != n || C_i.cols() != n || Wg.ambient() != n)
        throw DimensionMismatch("stabilizing_injection: dimensions differ");

    const Subspace vperp = orthocomplement(Wg, tol);
    const int q = vperp.dim();
    if (q == 0) return Mat::Zero(n, p);  // trivial quotient, nothing to stabilize

    // Dual problem on V' = Wg-perp: pick G = F'V with
    //   (I - VV')C' G = -(I - VV')A' V   (keeps V' invariant)
    //   X(G) = V'(A'V + C'G) placed in the good region.
    const Mat V = vperp.basis();
    const Mat Pc = Mat::Identity(n, n) - V * V.transpose();
    const Mat lhs = Pc * C_i.transpose();                   // n x p
    const Mat rhs = -Pc * A.transpose() * V;                // n x q
    const Mat G0 = pinv(lhs, tol, norms(C_i).two) * rhs;
    if ((lhs * G0 - rhs).norm() > 1e-7 * scale_of(A) * std::sqrt(static_cast<double>(q)))
        throw NotInvariant("stabilizing_injection: Wg is not (C,A)-invariant");

    const Mat Nc = kernel(lhs, tol).basis();                // p x k, free directions
    const Mat X0 = V.transpose() * (A.transpose() * V + C_i.transpose() * G0);
    const Mat B_red = V.transpose() * C_i.transpose() * Nc; // q x k

    // The reduced pair (X0, B_red) is stabilized with a shifted Riccati
    // feedback: shifting by s and solving an LQR places every movable mode
    // left of -s. Modes the pair cannot move are good by construction of Wg,
    // so s is capped below their margin (PBH test per eigenvalue).
    std::vector<double> targets = pole_targets;
    if (targets.empty()) {
        // n evenly spaced reals in [-2*alpha*n, -2*alpha], most negative first
        targets.resize(n);
        const double lo = -2.0 * region.alpha * n, hi = -2.0 * region.alpha;
        for (int k = 0; k < n; ++k)
            targets[k] = n > 1 ? lo + k * (hi - lo) / (n - 1) : lo;
    }
    double desired = region.alpha;
    for (int k = 0; k < std::min<int>(q, targets.size()); ++k)
        desired = std::max(desired, -targets[k]);

    double movable_cap = std::numeric_limits<double>::infinity();
    for (const auto& lam : eigvals(X0)) {
        Mat pbh(q, q + B_red.cols());
        const Mat shifted_re = X0 - lam.real() * Mat::Identity(q, q);
        pbh << shifted_re, B_red;
        // treat near-zero imaginary parts with the real-shift PBH test
        Mat pbh_full(2 * q, 2 * (q + B_red.cols()));
        if (std::abs(lam.imag()) > 1e-9) {
            // complex PBH via the real 2q-dimensional embedding
            Mat top(q, q + B_red.cols()), bot(q, q + B_red.cols());
            top << shifted_re, B_red;
            bot << Mat(lam.imag() * Mat::Identity(q, q)), Mat::Zero(q, B_red.cols());
            pbh_full << top, -bot, bot, top;
            if (rank(pbh_full, tol, scale_of(X0)) < 2 * q)
                movable_cap = std::min(movable_cap, -lam.real());
        } else {
            if (rank(pbh, tol, scale_of(X0)) < q)
                movable_cap = std::min(movable_cap, -lam.real());
        }
    }
    desired = std::min(desired, 0.98 * movable_cap);

    const std::vector<double> shifts = {desired, 0.5 * (desired + region.alpha),
                                        region.alpha, 0.999 * region.alpha};
    for (double shift : shifts) {
        Mat Z;
        if (!care_feedback(X0 + shift * Mat::Identity(q, q), B_red, Z)) continue;
        const Mat G = G0 - Nc * Z;
        const Mat L = V * G.transpose();  // n x p, zero action outside V'
        const Mat induced =
            (V.transpose() * (A + L * C_i).transpose() * V).transpose();
        if (max_real_eig(induced) < -region.alpha) return L;
    }
    throw StabilizationFailed(
        "stabilizing_injection: no injection met the spectral margin");
}

}  // namespace duio
