#pragma once

#include "duio/matlin.hpp"

namespace duio {

struct SystemMaps {
    Mat A;  // n x n
    Mat B;  // n x m
    Mat C;  // p x n
};

// Orthogonal splitting of the state space along an invariant subspace W:
// insertion holds W's basis, projection the complement basis (as rows), and
// restricted/induced are the matrix representations on W and X/W.
struct QuotientDecomposition {
    Subspace W;
    Mat insertion;   // n x d
    Mat projection;  // (n-d) x n
    Mat restricted;  // d x d
    Mat induced;     // (n-d) x (n-d)
};

// Region of "good" eigenvalues: open left half-plane with stability margin.
struct GoodRegion {
    double alpha = 0.5;
    bool contains(const std::complex<double>& z) const { return z.real() < -alpha; }
};

struct SpectralSplit {
    Poly beta_g;  // all roots in the good region
    Poly beta_b;  // no root in the good region
};

// Supremal (A,B)-invariant subspace contained in K: fixed point of
// V^{k+1} = K  ∩  A^{-1}(V^k + Im B).
Subspace vstar(const Mat& A, const Subspace& B_img, const Subspace& K,
               const Tolerances& tol = {});

// Supremal controllability subspace inside K: fixed point of
// R^{k+1} = V* ∩ (A R^k + Im B), given V* = vstar(A, B_img, K).
Subspace rstar(const Mat& A, const Subspace& B_img, const Subspace& vstar_K,
               const Tolerances& tol = {});

// Minimum-norm feedback F with (A + BF)V ⊆ V. Throws NotInvariant when V is
// not (A,B)-invariant.
Mat friend_of(const Mat& A, const Mat& B, const Subspace& V, const Tolerances& tol = {});

// Splits the state space along an A_L-invariant W. Throws NotInvariant.
QuotientDecomposition decompose(const Mat& A_L, const Subspace& W,
                                const Tolerances& tol = {});

// Factor a monic real polynomial into good/bad root factors; conjugate pairs
// never split, so both factors stay real.
SpectralSplit split_spectrum(const Poly& beta, const GoodRegion& region,
                             const Tolerances& tol = {});

struct WstarResult {
    Subspace Wg;  // the infimal stabilizably-quotiented (C,A)-invariant
                  // subspace containing Im Bbar
    Mat Pg;       // canonical projection, rows span Wg-perp

    // Dual-pipeline intermediates, kept for diagnostics and property tests.
    Subspace Vp_star;   // V'* = vstar(A', Im C', Ker Bbar')
    Subspace Rp_star;   // R'* inside V'*
    Mat L0_dual;        // the friend of V'* used
    SpectralSplit beta_split;
};

// Dual-pipeline construction of Wg for one node. When friend_override is
// given it is used in place of the minimum-norm friend of V'* (the result is
// canonical; the override exists so independence of the choice can be tested).
WstarResult wstar_g(const Mat& A, const Mat& C_i, const Mat& Bbar_i,
                    const GoodRegion& region, const Tolerances& tol = {},
                    const Mat* friend_override = nullptr);

// Output injection L with (A + L C_i) Wg ⊆ Wg and the induced map on X/Wg
// having all eigenvalues in the good region. pole_targets guides the desired
// decay of the assignable part; defaults to evenly spaced reals in
// [-2*alpha*n, -2*alpha] when empty.
Mat stabilizing_injection(const Mat& A, const Mat& C_i, const Subspace& Wg,
                          const GoodRegion& region,
                          const std::vector<double>& pole_targets = {},
                          const Tolerances& tol = {});

}  // namespace duio
