#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sumrule/measure.hpp"
#include "sumrule/oprl.hpp"
#include "sumrule/opuc.hpp"
#include "sumrule/schur.hpp"

namespace sumrule {

enum class RuleKind {
    szego_verblunsky,
    killip_simon,
    mp,
    kmk,
    arcsine,
    arcsine_c0,
    gw,
    gw_modified,
    hp,
    poisson_np,
    poisson_bessonov,
    poisson_simon,
    new_gw,
    shifted_mp,
    gw_mixture_u,
    gw_mixture_a,
    ks_variant,
};

std::string rule_name(RuleKind kind);
RuleKind rule_from_name(const std::string& name);

struct RuleId {
    RuleKind kind = RuleKind::szego_verblunsky;
    double tau = 1.0;
    bool mp_legacy_edges = false;
    double kappa1 = 0.0, kappa2 = 0.0;
    double g = 0.0;
    double d = 0.0;
    complex zeta{0.0, 0.0};
};

void validate_rule(const RuleId& rule);
Measure rule_reference(const RuleId& rule);

struct VerifyOptions {
    int N = 200;                  // coefficient truncation order
    double tol_match = 1e-6;      // |lhs - rhs| acceptance threshold
    double quad_tol = 1e-9;       // quadrature tolerance for the spectral side
    double divergence_cap = 1e6;  // beyond this a side counts as infinite
};

// A numerically summed series with truncation diagnostics.
struct Series {
    double value = 0.0;    // partial at the full extension plus tail estimate
    double partial = 0.0;  // partial sum at the reported truncation
    double tail = 0.0;     // value - partial
    bool converged = true;
    bool infinite = false;
    std::string method;  // terminated | geometric | power | none | divergent
    std::vector<double> partial_sums;  // decimated, at the reported truncation
    int n_head = 0;
};

// Core engine: terms term(0), term(1), ...; generator valid through n_extend;
// the reported truncation is n_report <= n_extend.
Series sum_series(const std::function<double(std::int64_t)>& term, int n_report,
                  std::int64_t n_extend, double divergence_cap = 1e6);

struct SpectralSide {
    double kl_term = 0.0;
    double outlier_term = 0.0;
    double total = 0.0;
    bool infinite = false;
    std::string reason;
};

SpectralSide spectral_side(const RuleId& rule, const Measure& mu,
                           const VerifyOptions& opt = {});

// ---- coefficient sides -----------------------------------------------------
Series coeff_side_szego_verblunsky(const VerblunskyCoeffs& a, int N);
Series coeff_side_killip_simon(const JacobiCoeffs& J, int N);
Series coeff_side_mp(const ZCoeffs& z, double tau, int N);
Series coeff_side_kmk(const CanonicalMoments& u, double kappa1, double kappa2, int N);
Series coeff_side_arcsine(const CanonicalMoments& u, int N);
Series coeff_side_arcsine_c0(const JacobiCoeffs& J, int N);

enum class GwVariant { classical, modified };
Series coeff_side_gw(const VerblunskyCoeffs& a, double g, GwVariant variant, int N);

Series coeff_side_hp(const DeformedCoeffs& gamma, double d, int N);

enum class PoissonVariant { np, bessonov, simon };
Series coeff_side_poisson(const SchurState& f, complex zeta, PoissonVariant variant,
                          int N);

Series coeff_side_new_gw(const CanonicalMoments& u, double g, int N);
Series coeff_side_shifted_mp(const CanonicalMoments& u, int N);
Series coeff_side_gw_mixture_u(const CanonicalMoments& u, double g, int N);
Series coeff_side_gw_mixture_a(const JacobiCoeffs& J, double g, int N);
Series coeff_side_ks_variant(const JacobiCoeffs& J, int N);

// DVZ-image membership test: reconstruct alpha from the b's via the DVZ
// coefficient relations and check the a's match with |alpha_k| < 1.
bool in_dvz_image(const JacobiCoeffs& J, int N, double tol = 1e-8);

// ---- verification -----------------------------------------------------------
struct SumRuleReport {
    RuleId rule;
    double lhs = 0.0, rhs = 0.0;
    double kl_term = 0.0, outlier_term = 0.0;
    std::vector<double> rhs_partial_sums;
    int truncation_n = 0;
    double tail_estimate = 0.0;
    double diff = 0.0;
    double tol = 1e-6;
    enum class Verdict { match, both_infinite, mismatch, unconverged } verdict;
    std::string notes;
};

SumRuleReport verify(const RuleId& rule, const Measure& mu,
                     const VerifyOptions& opt = {});

// rhs evaluated directly on a coefficient stream (no measure needed)
Series coeff_side_for_rule(const RuleId& rule, const VerblunskyCoeffs& a, int N);

// ---- diagnostics --------------------------------------------------------------
struct GemPrediction {
    bool finite = true;
    std::string detail;
};

// Convergence prediction for the GW gems: sum |alpha_k|^2 for -1 < g <= 0,
// sum |alpha_k|^4 and sum |alpha_k - alpha_{k-1}|^2 for g = -1.
GemPrediction gem_diagnostic(const VerblunskyCoeffs& a, const RuleId& rule,
                             int probe = 4000);

// Partial sums of the Hua-Pickrell coefficient side evaluated two ways:
// directly through H_d and through the kappa_n / phi_n(1) identity.
std::pair<double, double> hp_partial_sum_check(const VerblunskyCoeffs& a, double d,
                                               int n);
std::pair<double, double> hp_partial_sum_check(const Measure& nu, double d, int n);

}  // namespace sumrule
