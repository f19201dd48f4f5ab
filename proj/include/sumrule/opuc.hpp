#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sumrule/measure.hpp"

namespace sumrule {

// Verblunsky coefficients alpha_0, alpha_1, ...; alpha_{-1} = -1 implicit.
//
// Orientation is pinned by the regression alpha(Pois(zeta)) = (zeta, 0, 0, ...):
// the Levinson recursion consumes the moments c_k = int e^{-ik theta} dnu
// directly, so extraction applied to a nonsymmetric measure yields the
// conjugates of the coefficients in the textbook normalization.  Symmetric
// measures have real coefficients and are unaffected.  See docs/conventions.md.
struct VerblunskyCoeffs {
    std::vector<complex> alpha;
    bool real_flag = false;
    std::optional<VerblunskyTailInfo> tail;

    complex at(int k) const;  // 0-based, tail-aware
    bool has(int k) const;
};

// Evaluation state of the Szego recursion at a point z.
struct OpucPolyState {
    int n = 0;
    complex z{0, 0};
    complex Phi{1, 0};       // monic Phi_n(z)
    complex PhiStar{1, 0};   // Phi_n^*(z)
    double kappa = 1.0;      // leading coefficient of the orthonormal phi_n
};

struct DeformedCoeffs {
    std::vector<complex> gamma;
    // carried over from the source coefficients when those were real, in
    // which case gamma_k = alpha_k for all k
    std::optional<VerblunskyTailInfo> tail;

    complex at(int k) const;
    bool has(int k) const;
};

// Levinson extraction of alpha_0..alpha_{N-1} from trigonometric moments.
VerblunskyCoeffs verblunsky_from_measure(const Measure& nu, int N);

// Same recursion run on a caller-provided moment array c_0..c_N.
std::vector<complex> levinson(const std::vector<complex>& c, int N);

OpucPolyState szego_evaluate(const VerblunskyCoeffs& alpha, complex z, int n);

struct CmvMatrices {
    Eigen::MatrixXcd C, L, M;
};
// Leading size x size section of the CMV matrix and its L/M factors.  The
// last Theta block sticking out of the section is replaced by a unimodular
// 1x1 entry; checks should ignore the last two rows.
CmvMatrices cmv_matrix(const VerblunskyCoeffs& alpha, int size);

DeformedCoeffs deformed_verblunsky(const VerblunskyCoeffs& alpha);

// gamma_k via the polynomial-ratio formula, for cross-checking.
complex deformed_gamma_via_phi(const VerblunskyCoeffs& alpha, int k);

}  // namespace sumrule
