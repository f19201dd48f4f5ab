#pragma once

#include <optional>
#include <vector>

#include "sumrule/measure.hpp"

namespace sumrule {

// Constant continuation (a_inf, b_inf) valid from 1-based index `start_k` on.
struct JacobiTail {
    double a_inf = 1.0;
    double b_inf = 0.0;
    int start_k = 1;
};

// Recursion coefficients of the orthonormal OPRL; b_[i] = b_{i+1}, a_[i] = a_{i+1}.
struct JacobiCoeffs {
    std::vector<double> b, a;
    std::optional<JacobiTail> tail;

    double b_k(int k) const;  // 1-based
    double a_k(int k) const;  // 1-based
    bool has_b(int k) const;
    bool has_a(int k) const;
};

// Canonical moments u_1..u_M of a measure on [-2,2]; u_0 = -1 implicit.
struct CanonicalMoments {
    std::vector<double> u;
    bool near_trivial = false;  // some |u_k| landed within 1e-10 of +-1

    double u_k(int k) const;  // 1-based; u_k(0) = -1
};

// Nonnegative coefficients z_1..z_{2N} of a measure on [0, inf); z_0 = 0.
struct ZCoeffs {
    std::vector<double> z;

    double z_k(int k) const;  // 1-based; z_k(0) = 0
};

// Stieltjes/Lanczos extraction of b_1..b_N, a_1..a_N from the measure.
JacobiCoeffs jacobi_from_measure(const Measure& mu, int N);

CanonicalMoments canonical_from_jacobi(const JacobiCoeffs& J);
JacobiCoeffs jacobi_from_canonical(const CanonicalMoments& u);

ZCoeffs z_from_jacobi(const JacobiCoeffs& J);
JacobiCoeffs jacobi_from_z(const ZCoeffs& z);

// n-point spectral measure of the order-n leading section.
Measure finite_jacobi_spectral_measure(const JacobiCoeffs& J, int n);

struct OprlValues {
    std::vector<double> p;  // orthonormal p_0..p_n
    std::vector<double> P;  // monic P_0..P_n
};
OprlValues evaluate_oprl(const JacobiCoeffs& J, double x, int n);

}  // namespace sumrule
