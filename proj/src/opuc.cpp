#include "sumrule/opuc.hpp"

#include <cmath>

#include "sumrule/families.hpp"

namespace sumrule {

complex VerblunskyCoeffs::at(int k) const {
    if (k == -1) return {-1.0, 0.0};
    if (k < 0) throw parameter_error("alpha index");
    if (k < static_cast<int>(alpha.size())) return alpha[k];
    if (tail && k >= tail->start) {
        switch (tail->kind) {
            case VerblunskyTailInfo::Kind::zero:
                return {0.0, 0.0};
            case VerblunskyTailInfo::Kind::constant:
                return tail->gamma;
            case VerblunskyTailInfo::Kind::gw:
                return {ref::gw_alpha(tail->g, k), 0.0};
        }
    }
    throw parameter_error("alpha index beyond stored coefficients");
}

bool VerblunskyCoeffs::has(int k) const {
    return k >= -1 && (k < static_cast<int>(alpha.size()) || (tail && k >= tail->start));
}

std::vector<complex> levinson(const std::vector<complex>& c, int N) {
    if (static_cast<int>(c.size()) < N + 1)
        throw parameter_error("levinson: need moments c_0..c_N");
    std::vector<complex> phi{1.0};  // monic coefficients, ascending powers
    std::vector<complex> alphas;
    double E = 1.0;
    for (int n = 0; n < N; ++n) {
        complex s = 0.0;
        for (int k = 0; k <= n; ++k) s += phi[k] * c[k + 1];
        complex abar = s / E;
        double mag = std::abs(abar);
        if (mag >= 1.0 - 1e-12) {
            throw moment_degeneracy_error(
                "levinson: |alpha_" + std::to_string(n) +
                "| >= 1; the measure has at most " + std::to_string(n + 1) +
                " support points");
        }
        alphas.push_back(std::conj(abar));
        std::vector<complex> next(n + 2);
        for (int j = 0; j <= n; ++j) {
            complex zphi = j >= 1 ? phi[j - 1] : complex(0.0);
            next[j] = zphi - abar * std::conj(phi[n - j]);
        }
        next[n + 1] = phi[n];  // = 1, monic
        phi = std::move(next);
        E *= (1.0 - mag * mag);
        if (E <= 0.0)
            throw moment_degeneracy_error("levinson: prediction error lost positivity");
    }
    return alphas;
}

namespace {

// Szego recursion against the discretized measure.  Works with node values of
// Phi_n and Phi_n^* and discrete inner products, the unitary analog of the
// Stieltjes/Lanczos procedure; unlike the raw-moment Levinson recursion this
// stays well conditioned on arc-supported measures.  The nodes are reflected
// (z_i = e^{-i theta_i}) to produce this library's coefficient orientation.
std::vector<complex> szego_extract(const DiscreteMeasure& d, int N) {
    const size_t M = d.x.size();
    std::vector<complex> z(M), P(M, 1.0), S(M, 1.0);
    for (size_t i = 0; i < M; ++i) z[i] = std::polar(1.0, -d.x[i]);
    std::vector<complex> alphas;
    alphas.reserve(N);
    for (int n = 0; n < N; ++n) {
        complex num = 0.0;
        double den = 0.0;
        for (size_t i = 0; i < M; ++i) {
            num += d.w[i] * std::conj(S[i]) * z[i] * P[i];
            den += d.w[i] * std::norm(S[i]);
        }
        if (den <= 1e-280)
            throw moment_degeneracy_error(
                "verblunsky_from_measure: norm collapse at index " + std::to_string(n));
        complex abar = num / den;
        double mag = std::abs(abar);
        if (mag >= 1.0 - 1e-12)
            throw moment_degeneracy_error(
                "verblunsky_from_measure: |alpha_" + std::to_string(n) +
                "| >= 1; the measure has at most " + std::to_string(n + 1) +
                " support points");
        alphas.push_back(std::conj(abar));
        for (size_t i = 0; i < M; ++i) {
            complex zP = z[i] * P[i];
            P[i] = zP - abar * S[i];
            S[i] = S[i] - std::conj(abar) * zP;
        }
    }
    return alphas;
}

std::optional<VerblunskyTailInfo> circle_tail_from_measure(const Measure& nu, int head) {
    if (const CircleCoeffProvenance* cc = nu.circle_coeffs()) {
        VerblunskyTailInfo t = cc->tail;
        t.start = std::min<int>(head, static_cast<int>(cc->alpha.size()));
        if (t.kind == VerblunskyTailInfo::Kind::zero)
            t.start = std::min<int>(head, static_cast<int>(cc->alpha.size()));
        return t;
    }
    const ReferenceTag* tag = nu.reference_tag();
    if (!tag) return std::nullopt;
    using F = ReferenceTag::Family;
    VerblunskyTailInfo t;
    switch (tag->family) {
        case F::unif:
            t.kind = VerblunskyTailInfo::Kind::zero;
            t.start = 0;
            return t;
        case F::pois:
            t.kind = VerblunskyTailInfo::Kind::zero;
            t.start = 1;
            return t;
        case F::hp:
            t.kind = VerblunskyTailInfo::Kind::constant;
            t.gamma = ref::hp_gamma(tag->d);
            t.start = 0;
            return t;
        case F::gw:
            t.kind = VerblunskyTailInfo::Kind::gw;
            t.g = tag->g;
            t.start = 0;
            return t;
        default:
            return std::nullopt;
    }
}

}  // namespace

VerblunskyCoeffs verblunsky_from_measure(const Measure& nu, int N) {
    if (nu.space() != Space::circle)
        throw space_mismatch_error("verblunsky_from_measure: circle measures only");
    if (N < 0) throw parameter_error("verblunsky_from_measure: N >= 0");

    VerblunskyCoeffs out;
    if (const CircleCoeffProvenance* cc = nu.circle_coeffs()) {
        // measure defined by its coefficients; read them off the provenance
        out.tail = cc->tail;
        for (int k = 0; k < N; ++k) {
            out.alpha.push_back(k < static_cast<int>(cc->alpha.size())
                                    ? cc->alpha[k]
                                    : (cc->tail.kind == VerblunskyTailInfo::Kind::constant
                                           ? cc->tail.gamma
                                           : complex(0.0)));
        }
    } else {
        int per_half = std::max(320, 3 * N + 64);
        for (int attempt = 0; attempt < 4; ++attempt) {
            DiscreteMeasure d = nu.discretize(per_half);
            if (attempt < 3) {
                double mass = 0.0;
                for (double w : d.w) mass += w;
                if (std::abs(mass - 1.0) > 1e-11) {
                    per_half *= 2;  // refine under narrow density peaks
                    continue;
                }
            }
            out.alpha = szego_extract(d, N);
            break;
        }
        out.tail = circle_tail_from_measure(nu, N);
        if (out.tail) out.tail->start = N;
    }
    out.real_flag = true;
    for (const complex& a : out.alpha)
        if (std::abs(a.imag()) > 1e-12) out.real_flag = false;
    if (out.real_flag)
        for (complex& a : out.alpha) a = complex(a.real(), 0.0);
    return out;
}

OpucPolyState szego_evaluate(const VerblunskyCoeffs& alpha, complex z, int n) {
    OpucPolyState st;
    st.z = z;
    complex Phi = 1.0, PhiStar = 1.0;
    double kappa2 = 1.0;  // kappa_n^{-2} accumulates prod (1-|alpha|^2)
    for (int k = 0; k < n; ++k) {
        complex ak = alpha.at(k);
        double m2 = std::norm(ak);
        if (m2 >= 1.0)
            throw support_violation_error("szego_evaluate: |alpha_k| < 1 required");
        complex PhiNext = z * Phi - std::conj(ak) * PhiStar;
        complex PhiStarNext = PhiStar - ak * z * Phi;
        Phi = PhiNext;
        PhiStar = PhiStarNext;
        kappa2 *= (1.0 - m2);
    }
    st.n = n;
    st.Phi = Phi;
    st.PhiStar = PhiStar;
    st.kappa = 1.0 / std::sqrt(kappa2);
    return st;
}

CmvMatrices cmv_matrix(const VerblunskyCoeffs& alpha, int size) {
    if (size < 2) throw parameter_error("cmv_matrix: size >= 2");
    for (int k = 0; k + 1 < size; ++k)
        if (!alpha.has(k)) throw parameter_error("cmv_matrix: not enough coefficients");

    CmvMatrices out;
    out.L = Eigen::MatrixXcd::Zero(size, size);
    out.M = Eigen::MatrixXcd::Zero(size, size);

    auto place_theta = [&](Eigen::MatrixXcd& target, int row, int k) {
        complex a = alpha.at(k);
        double rho = std::sqrt(std::max(0.0, 1.0 - std::norm(a)));
        target(row, row) = std::conj(a);
        target(row, row + 1) = rho;
        target(row + 1, row) = rho;
        target(row + 1, row + 1) = -a;
    };

    for (int row = 0; row < size;) {
        if (row + 1 < size) {
            place_theta(out.L, row, row);
            row += 2;
        } else {
            out.L(row, row) = 1.0;  // dummy unimodular completion
            row += 1;
        }
    }
    out.M(0, 0) = 1.0;
    for (int row = 1; row < size;) {
        if (row + 1 < size) {
            place_theta(out.M, row, row);
            row += 2;
        } else {
            out.M(row, row) = 1.0;
            row += 1;
        }
    }
    out.C = out.L * out.M;
    return out;
}

complex DeformedCoeffs::at(int k) const {
    if (k < static_cast<int>(gamma.size())) return gamma[k];
    if (tail && k >= tail->start) {
        switch (tail->kind) {
            case VerblunskyTailInfo::Kind::zero:
                return {0.0, 0.0};
            case VerblunskyTailInfo::Kind::constant:
                return tail->gamma;
            case VerblunskyTailInfo::Kind::gw:
                return {ref::gw_alpha(tail->g, k), 0.0};
        }
    }
    throw parameter_error("gamma index beyond stored coefficients");
}

bool DeformedCoeffs::has(int k) const {
    return k >= 0 && (k < static_cast<int>(gamma.size()) || (tail && k >= tail->start));
}

DeformedCoeffs deformed_verblunsky(const VerblunskyCoeffs& alpha) {
    DeformedCoeffs out;
    complex prod = 1.0;  // prod_{j<k} (1 - conj(gamma_j)) / (1 - gamma_j)
    for (int k = 0; k < static_cast<int>(alpha.alpha.size()); ++k) {
        complex g = std::conj(alpha.alpha[k]) * prod;
        out.gamma.push_back(g);
        complex den = 1.0 - g;
        if (std::abs(den) < 1e-12)
            throw degenerate_normalization_error(
                "deformed_verblunsky: gamma_k = 1 encountered");
        prod *= std::conj(den) / den;
    }
    if (alpha.real_flag && alpha.tail) out.tail = alpha.tail;
    return out;
}

complex deformed_gamma_via_phi(const VerblunskyCoeffs& alpha, int k) {
    OpucPolyState st = szego_evaluate(alpha, complex(1.0, 0.0), k);
    if (std::abs(st.Phi) < 1e-14)
        throw degenerate_normalization_error("deformed_gamma_via_phi: Phi_k(1) = 0");
    return std::conj(alpha.at(k)) * st.PhiStar / st.Phi;
}

}  // namespace sumrule
