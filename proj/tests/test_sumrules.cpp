#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sumrule/families.hpp"
#include "sumrule/mappings.hpp"
#include "sumrule/sumrules.hpp"
#include "support.hpp"

using namespace sumrule;

namespace {
constexpr double kLn2 = std::numbers::ln2;

Measure tilted_hp(double d, double eps) {
    Measure hp = make_hp(d);
    double td = ref::hp_theta_d(d);
    double m1 = hp.integrate_ac([](double th) { return std::cos(th); });
    double c = 1.0 + eps * m1;
    return from_density(
        Space::circle,
        [hp, eps, c](double th) { return hp.density(th) * (1.0 + eps * std::cos(th)) / c; },
        {{td, 2.0 * std::numbers::pi - td}}, {}, true, false);
}
}  // namespace

TEST_CASE("outlier penalty functions") {
    CHECK(ref::f_sc(2.0) == doctest::Approx(0.0));
    CHECK(ref::f_sc(-2.0) == doctest::Approx(0.0));
    CHECK(ref::f_sc(2.5) == doctest::Approx(15.0 / 8.0 - 2.0 * kLn2).epsilon(1e-14));
    CHECK(std::isinf(ref::f_sc(1.0)));

    // strictly increasing in the distance from the band
    double prev = 0.0;
    for (double x : {2.1, 2.5, 3.0, 4.0}) {
        double v = ref::f_sc(x);
        CHECK(v > prev);
        prev = v;
    }
    prev = 0.0;
    for (double x : {2.8, 3.2, 4.0}) {
        double v = ref::f_mp(x, 0.4);
        CHECK(v > prev);
        prev = v;
    }
    prev = 0.0;
    auto [lo, hi] = ref::kmk_edges(0.8, 0.8);
    for (double x : {hi + 0.05, hi + 0.15, hi + 0.3}) {
        double v = ref::f_kmk(x, 0.8, 0.8);
        CHECK(v > prev);
        prev = v;
    }
    prev = 0.0;
    double td = ref::hp_theta_d(0.8);
    for (double th : {td - 0.05, td - 0.15, td - 0.3}) {
        double v = ref::f_hp(th, 0.8);
        CHECK(v > prev);
        prev = v;
    }
    // the same penalty on the mirrored side of the arc
    CHECK(ref::f_hp(2.0 * std::numbers::pi - (td - 0.2), 0.8) ==
          doctest::Approx(ref::f_hp(td - 0.2, 0.8)).epsilon(1e-12));
}

TEST_CASE("coefficient-side closed values") {
    // Arcsine J-coefficients give I_H = G(2) = 1 - log 2
    JacobiCoeffs arc;
    arc.a = {std::sqrt(2.0)};
    arc.b = {0.0};
    arc.tail = JacobiTail{1.0, 0.0, 2};
    Series s = coeff_side_killip_simon(arc, 50);
    CHECK(s.value == doctest::Approx(1.0 - kLn2).epsilon(1e-12));

    // a single diagonal perturbation contributes b^2 / 2
    JacobiCoeffs pert;
    pert.b = {0.3};
    pert.a = {1.0};
    pert.tail = JacobiTail{1.0, 0.0, 2};
    CHECK(coeff_side_killip_simon(pert, 50).value == doctest::Approx(0.045).epsilon(1e-14));

    // one perturbed even z: G(e) = e - 2
    ZCoeffs z;
    double tau = 0.5;
    z.z = {1.0, tau * std::numbers::e, 1.0, tau, 1.0, tau};
    CHECK(coeff_side_mp(z, tau, 10).value ==
          doctest::Approx(std::numbers::e - 2.0).epsilon(1e-12));

    // KMK at its own canonical moments vanishes
    CanonicalMoments u;
    for (int k = 1; k <= 40; ++k)
        u.u.push_back(k % 2 ? ref::kmk_uo(0.7, 0.3) : ref::kmk_ue(0.7, 0.3));
    CHECK(std::abs(coeff_side_kmk(u, 0.7, 0.3, 20).value) < 1e-14);

    // kappa = 0 reduction: the arcsine series telescopes to log 2 on the
    // semicircle moments u_{2k} = -1/(k+1)
    CanonicalMoments usc;
    for (int k = 1; k <= 20000; ++k)
        usc.u.push_back(k % 2 ? 0.0 : -1.0 / (k / 2 + 1));
    Series arcs = coeff_side_arcsine(usc, 10000);
    CHECK(arcs.partial + std::log((10000.0 + 2.0) / (10000.0 + 1.0)) ==
          doctest::Approx(kLn2).epsilon(1e-10));  // exact telescoped tail

    // C0 form needs no tail at all for the semicircle
    JacobiCoeffs sc;
    sc.b = {0.0};
    sc.a = {1.0};
    sc.tail = JacobiTail{1.0, 0.0, 1};
    CHECK(coeff_side_arcsine_c0(sc, 100).value == doctest::Approx(kLn2).epsilon(1e-14));
}

TEST_CASE("H(g) and C_g against quadrature oracles") {
    // H(g) = K(GW(g) | UNIF); H(-1) = 1 - log 2
    CHECK(ref::gw_H(-1.0) == doctest::Approx(1.0 - kLn2).epsilon(1e-14));
    for (double g : {-1.0, -0.55, -0.2}) {
        double oracle = kl(make_gw(g), make_unif());
        CHECK(ref::gw_H(g) == doctest::Approx(oracle).epsilon(1e-9));
    }
    // C_g = (1-|g|) log 2 - |g| K(SC | rho_g) - (1-|g|) K(Arcsine | rho_g)
    CHECK(ref::gw_C(-1.0) == doctest::Approx(0.0));
    CHECK(ref::gw_C(0.0) == doctest::Approx(kLn2));
    for (double g : {-0.3, -0.7}) {
        Measure rho = mix(-g, make_semicircle(), make_arcsine());
        double oracle = (1.0 + g) * kLn2 + g * kl(make_semicircle(), rho) +
                        g * 0.0 - (1.0 + g) * kl(make_arcsine(), rho);
        // note: |g| = -g here
        oracle = (1.0 + g) * kLn2 - (-g) * kl(make_semicircle(), rho) -
                 (1.0 + g) * kl(make_arcsine(), rho);
        CHECK(ref::gw_C(g) == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("verification at the reference measures") {
    struct Row {
        RuleId rule;
        Measure m;
    };
    std::vector<Row> rows;
    rows.push_back({RuleId{RuleKind::killip_simon}, make_semicircle()});
    rows.push_back({RuleId{.kind = RuleKind::mp, .tau = 0.37}, make_mp(0.37)});
    rows.push_back({RuleId{.kind = RuleKind::kmk, .kappa1 = 0.6, .kappa2 = 0.3},
                    make_kmk(0.6, 0.3)});
    rows.push_back({RuleId{.kind = RuleKind::gw, .g = -0.5}, make_gw(-0.5)});
    rows.push_back({RuleId{.kind = RuleKind::gw, .g = -1.0}, make_gw(-1.0)});
    rows.push_back({RuleId{.kind = RuleKind::hp, .d = 0.4}, make_hp(0.4)});
    rows.push_back({RuleId{.kind = RuleKind::shifted_mp}, make_d(2.0, -2.0)});
    for (auto& row : rows) {
        SumRuleReport r = verify(row.rule, row.m);
        CHECK(r.verdict == SumRuleReport::Verdict::match);
        CHECK(std::abs(r.lhs) < 1e-8);
        CHECK(std::abs(r.rhs) < 1e-6);
    }
    for (RuleKind k : {RuleKind::new_gw, RuleKind::gw_mixture_u, RuleKind::gw_mixture_a}) {
        RuleId rule{.kind = k, .g = -0.5};
        SumRuleReport r = verify(rule, rule_reference(rule));
        CHECK(r.verdict == SumRuleReport::Verdict::match);
        CHECK(std::abs(r.rhs) < 1e-6);
    }
    SumRuleReport r = verify(RuleId{.kind = RuleKind::ks_variant},
                             rule_reference(RuleId{.kind = RuleKind::ks_variant}));
    CHECK(r.verdict == SumRuleReport::Verdict::match);
}

TEST_CASE("szego-verblunsky rule on mixed inputs") {
    VerifyOptions opt;
    for (double g : {-1.0, -0.5, -0.1}) {
        SumRuleReport r = verify(RuleId{.kind = RuleKind::szego_verblunsky}, make_gw(g), opt);
        CHECK(r.verdict == SumRuleReport::Verdict::match);
        CHECK(r.diff < 1e-6);
    }
    SumRuleReport r =
        verify(RuleId{.kind = RuleKind::szego_verblunsky}, make_pois({0.3, 0.2}), opt);
    CHECK(r.verdict == SumRuleReport::Verdict::match);
    // K(UNIF | GW(-1)) = log 2 via the telescoping coefficient stream
    r = verify(RuleId{.kind = RuleKind::szego_verblunsky}, make_gw(-1.0), opt);
    CHECK(r.lhs == doctest::Approx(kLn2).epsilon(1e-9));
}

TEST_CASE("killip-simon on perturbed measures with outliers") {
    Measure ac = from_jacobi_coeffs({0.25, -0.12, 0.05}, {1.08, 0.95, 1.0});
    Measure mu = with_atoms(ac, {{2.4, 0.02}, {-2.2, 0.015}, {2.9, 0.01}});
    VerifyOptions opt;
    opt.N = 240;
    opt.tol_match = 1e-5;
    SumRuleReport r = verify(RuleId{RuleKind::killip_simon}, mu, opt);
    CHECK(r.verdict == SumRuleReport::Verdict::match);
    CHECK(r.outlier_term ==
          doctest::Approx(ref::f_sc(2.4) + ref::f_sc(-2.2) + ref::f_sc(2.9)).epsilon(1e-12));
    CHECK(r.diff < 1e-7);
}

TEST_CASE("both sides blow up together outside the band") {
    // a.c. mass beyond [-2,2]: scaled semicircle
    Measure wide = affine_image(make_semicircle(), 1.5, 0.0);
    SumRuleReport r = verify(RuleId{RuleKind::killip_simon}, wide);
    CHECK(r.verdict == SumRuleReport::Verdict::both_infinite);

    // K(UNIF | HP) diverges and so does the coefficient series
    r = verify(RuleId{.kind = RuleKind::szego_verblunsky}, make_hp(0.5));
    CHECK(r.verdict == SumRuleReport::Verdict::both_infinite);

    // Bernstein-Szego measure against the HP rule: gamma_k -> 0 so the
    // coefficient side diverges, and the support leaves the reference arc
    std::mt19937 rng(7);
    Measure bs = testsupport::random_symmetric_bs(rng, 4);
    r = verify(RuleId{.kind = RuleKind::hp, .d = 0.6}, bs);
    CHECK(r.verdict == SumRuleReport::Verdict::both_infinite);
}

TEST_CASE("MP and KMK rules on coefficient perturbations") {
    double tau = 0.4;
    Measure mp = from_jacobi_coeffs({1.05, 1.0 + tau + 0.03},
                                    {std::sqrt(tau) * 1.02, std::sqrt(tau)},
                                    std::sqrt(tau), 1.0 + tau);
    VerifyOptions opt;
    opt.tol_match = 1e-5;
    SumRuleReport r = verify(RuleId{.kind = RuleKind::mp, .tau = tau}, mp, opt);
    CHECK(r.verdict == SumRuleReport::Verdict::match);
    CHECK(r.diff < 1e-9);

    double ue = ref::kmk_ue(0.8, 0.8);
    double ainf = std::sqrt(1.0 - ue * ue);
    Measure kmk = from_jacobi_coeffs({0.04, 0.0}, {std::sqrt(2.0 * (1.0 + ue)) * 1.01,
                                                   ainf * 0.99}, ainf, 0.0);
    r = verify(RuleId{.kind = RuleKind::kmk, .kappa1 = 0.8, .kappa2 = 0.8}, kmk, opt);
    CHECK(r.verdict == SumRuleReport::Verdict::match);
    CHECK(r.diff < 1e-9);
}

TEST_CASE("hua-pickrell rule and its gateways") {
    double d = 0.4;
    Measure nu = tilted_hp(d, 0.35);
    VerifyOptions opt;
    opt.N = 64;
    opt.tol_match = 1e-5;
    SumRuleReport r = verify(RuleId{.kind = RuleKind::hp, .d = d}, nu, opt);
    CHECK(r.verdict == SumRuleReport::Verdict::match);
    CHECK(r.diff < 1e-8);

    // the szego pullback of the perturbed KMK(2d, 0) image reproduces it
    Measure pull = szego_pull(szego_push(nu));
    SumRuleReport r2 = verify(RuleId{.kind = RuleKind::hp, .d = d}, pull, opt);
    CHECK(r2.verdict == SumRuleReport::Verdict::match);
    CHECK(r2.diff < 1e-8);

    // outliers transported by Sz: F_KMK(2d,0)(x) = 2 F_HP(arccos(x/2))
    for (double x : {ref::hp_xd(d) + 0.1, ref::hp_xd(d) + 0.3}) {
        double via_circle = 2.0 * ref::f_hp(std::acos(0.5 * x), d);
        CHECK(ref::f_kmk(x, 2.0 * d, 0.0) == doctest::Approx(via_circle).epsilon(1e-9));
    }
}

TEST_CASE("gateway identities between the rule families") {
    std::mt19937 rng(77);
    std::vector<complex> al = testsupport::random_real_alphas(rng, 8, 0.5);
    VerblunskyCoeffs a;
    a.alpha = al;
    a.real_flag = true;
    a.tail = VerblunskyTailInfo{VerblunskyTailInfo::Kind::zero,
                                static_cast<int>(al.size()), {0.0, 0.0}, 0.0};

    // (a) arcsine rule term-by-term under the Geronimus relation
    Measure nu = from_verblunsky(al, 0.0);
    CanonicalMoments u = canonical_from_jacobi(jacobi_from_measure(szego_push(nu), 16));
    for (int k = 1; k <= 16; ++k) {
        double ua = u.u_k(k);
        double av = k - 1 < static_cast<int>(al.size()) ? al[k - 1].real() : 0.0;
        CHECK(std::abs(-std::log1p(-ua * ua) - (-std::log1p(-av * av))) < 1e-8);
    }

    // (b) the two groupings of the transported HP series agree and match
    // the KMK(2d, 0) coefficient side
    double d = 0.45, gd = ref::hp_gamma(d);
    CanonicalMoments ug;
    for (int k = 1; k <= 40; ++k) ug.u.push_back(gd + 0.2 * std::pow(0.6, k));
    double grouping1 = 0.0, grouping2 = 0.0;
    for (int k = 1; k <= 40; ++k) {
        double uk = ug.u_k(k);
        grouping1 += -std::log((1.0 - uk * uk) / (1.0 - gd * gd)) -
                     2.0 * d * std::log((1.0 - uk) / (1.0 - gd));
        grouping2 += -(1.0 + 2.0 * d) * std::log((1.0 - uk) / (1.0 - gd)) -
                     std::log((1.0 + uk) / (1.0 + gd));
    }
    CHECK(grouping1 == doctest::Approx(grouping2).epsilon(1e-12));
    CHECK(coeff_side_kmk(ug, 2.0 * d, 0.0, 20).value ==
          doctest::Approx(grouping1).epsilon(1e-10));

    // (c) H_d equals the even-index KMK term function pointwise
    for (double x : {-0.6, -0.2, 0.1, 0.5})
        CHECK(ref::Hd_term({x, 0.0}, d) ==
              doctest::Approx(ref::He_term(x, d, d)).epsilon(1e-13));

    // (d) the [-2,2] form of the GW rule equals the circle form under
    // u_k = alpha_{k-1}
    double g = -0.6;
    CanonicalMoments ushift;  // u_k = alpha_{k-1}
    for (int k = 1; k <= 60; ++k)
        ushift.u.push_back(k - 1 < static_cast<int>(al.size()) ? al[k - 1].real() : 0.0);
    Series lhs = coeff_side_new_gw(ushift, g, 60);
    Series rhs = coeff_side_gw(a, g, GwVariant::classical, 60);
    CHECK(lhs.value == doctest::Approx(rhs.value).epsilon(1e-10));

    // (e) partial sums of the shifted-MP series obey the two-line split
    std::uniform_real_distribution<double> U(-0.6, 0.6);
    CanonicalMoments ur;
    for (int k = 0; k < 30; ++k) ur.u.push_back(U(rng));
    for (int N : {5, 12, 28}) {
        double SN = 0.0;
        for (int k = 1; k <= N; ++k) {
            double zk = (1.0 - ur.u_k(k - 1)) * (1.0 + ur.u_k(k));
            SN += zk - std::log(zk) - 1.0;
        }
        double uN = ur.u_k(N);
        double line1 = 0.5 - kLn2 + uN - std::log1p(uN) - 0.5 * uN * uN;
        double line2 = 0.0;
        for (int k = 1; k <= N; ++k) {
            double diff = ur.u_k(k) - ur.u_k(k - 1);
            line2 += 0.5 * diff * diff;
        }
        for (int k = 1; k <= N - 1; ++k)
            line2 += -std::log1p(-ur.u_k(k) * ur.u_k(k)) - ur.u_k(k) * ur.u_k(k);
        CHECK(SN == doctest::Approx(line1 + line2).epsilon(1e-11));
    }

    // (f) the DVZ image of the circle rule is Killip-Simon plus 1/2 - log 2
    Series ks = coeff_side_ks_variant(jacobi_from_measure(dvz_push(nu, +1), 40), 40);
    Series gw1 = coeff_side_gw(a, -1.0, GwVariant::classical, 40);
    CHECK(ks.value == doctest::Approx(gw1.value).epsilon(1e-8));

    // the mixture forms agree with each other on symmetric measures
    Measure sym = dg_push(nu, 1.0, +1);
    JacobiCoeffs J = jacobi_from_measure(sym, 60);
    Series mixU = coeff_side_gw_mixture_u(canonical_from_jacobi(J), g, 60);
    Series mixA = coeff_side_gw_mixture_a(J, g, 60);
    CHECK(mixU.value == doctest::Approx(mixA.value).epsilon(1e-8));
    CHECK(mixU.value == doctest::Approx(kl(rule_reference(RuleId{.kind = RuleKind::gw_mixture_u, .g = g}), sym)).epsilon(1e-7));
}

TEST_CASE("poisson rules match the relative entropy") {
    std::vector<Measure> set;
    set.push_back(make_unif());
    set.push_back(make_gw(-0.5));
    set.push_back(make_pois({0.0, 0.4}));
    std::vector<complex> ar{{0.35, 0.1}, {-0.15, 0.2}, {0.1, 0.0}};
    set.push_back(from_verblunsky(ar, 0.0));
    for (complex zeta : {complex(0.5, 0.0), complex(0.3, 0.2)}) {
        for (const Measure& nu : set) {
            double K = kl(make_pois(zeta), nu);
            SchurState f = SchurState::from_measure(nu);
            for (PoissonVariant v :
                 {PoissonVariant::np, PoissonVariant::bessonov, PoissonVariant::simon}) {
                Series s = coeff_side_poisson(f, zeta, v, 200);
                CHECK(std::abs(s.value - K) < 1e-6);
            }
            // every NP and Bessonov series term is nonnegative
            NpIterates it = nevanlinna_pick_iterates(f, zeta, 40);
            for (const complex& val : it.values) CHECK(std::norm(val) < 1.0);
        }
    }
}

TEST_CASE("poisson rules at the reference vanish") {
    complex zeta{0.3, 0.2};
    SchurState f = SchurState::from_measure(make_pois(zeta));
    for (PoissonVariant v :
         {PoissonVariant::np, PoissonVariant::bessonov, PoissonVariant::simon}) {
        Series s = coeff_side_poisson(f, zeta, v, 100);
        CHECK(std::abs(s.value) < 1e-10);
    }
    // at nu = UNIF all variants equal -log(1 - |zeta|^2); log(4/3) at 1/2
    SchurState f0 = SchurState::from_measure(make_unif());
    Series s = coeff_side_poisson(f0, complex(0.5, 0.0), PoissonVariant::np, 50);
    CHECK(s.value == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("gem diagnostics agree with the series verdicts") {
    RuleId rule{.kind = RuleKind::gw, .g = -1.0};
    auto stream = [](auto fn, int n) {
        VerblunskyCoeffs v;
        for (int k = 0; k < n; ++k) v.alpha.push_back({fn(k), 0.0});
        return v;
    };
    struct Case {
        VerblunskyCoeffs v;
        bool finite;
    };
    std::vector<Case> cases;
    cases.push_back({stream([](int k) { return -1.0 / (k + 2); }, 4000), true});
    cases.push_back({stream([](int) { return 0.0; }, 4000), true});
    cases.push_back({stream([](int k) { return 0.4 * std::pow(0.9, k); }, 4000), true});
    cases.push_back(
        {stream([](int k) { return (k % 2 ? 1.0 : -1.0) / std::sqrt(k + 2.0); }, 4000),
         false});
    cases.push_back({stream([](int k) { return (k % 2 ? 1.0 : -1.0) * 0.3; }, 4000), false});
    cases.push_back(
        {stream([](int k) { return 0.5 / std::pow(k + 2.0, 0.2); }, 4000), false});
    for (const Case& c : cases) {
        GemPrediction p = gem_diagnostic(c.v, rule);
        CHECK(p.finite == c.finite);
        Series s = coeff_side_gw(c.v, -1.0, GwVariant::classical, 4000);
        CHECK(s.infinite == !c.finite);
    }
}

TEST_CASE("hp partial-sum identity") {
    // reference: both evaluations vanish
    VerblunskyCoeffs ref_stream;
    double d = 0.6, gd = ref::hp_gamma(d);
    for (int k = 0; k < 60; ++k) ref_stream.alpha.push_back({gd, 0.0});
    auto [r1, r2] = hp_partial_sum_check(ref_stream, d, 50);
    CHECK(std::abs(r1) < 1e-12);
    CHECK(std::abs(r2) < 1e-10);

    // perturbed coefficient stream: the two evaluations agree for all n
    VerblunskyCoeffs pert = ref_stream;
    pert.alpha[2] = {gd + 0.15, 0.0};
    pert.alpha[7] = {gd - 0.1, 0.0};
    for (int n : {5, 20, 50}) {
        auto [s1, s2] = hp_partial_sum_check(pert, d, n);
        CHECK(s1 == doctest::Approx(s2).epsilon(1e-8));
    }

    // complex stream through the deformed coefficients
    std::mt19937 rng(5);
    VerblunskyCoeffs cplx;
    cplx.alpha = testsupport::random_complex_alphas(rng, 50, 0.4);
    auto [c1, c2] = hp_partial_sum_check(cplx, 0.8, 40);
    CHECK(c1 == doctest::Approx(c2).epsilon(1e-8));
}

TEST_CASE("the hp term function reduces to the szego-verblunsky term at d = 0") {
    for (double x : {-0.5, 0.2, 0.7}) {
        complex g{x, 0.15};
        CHECK(ref::Hd_term(g, 0.0) ==
              doctest::Approx(-std::log1p(-std::norm(g))).epsilon(1e-13));
    }
}

TEST_CASE("dvz image membership detection") {
    std::mt19937 rng(19);
    Measure nu = testsupport::random_symmetric_bs(rng, 5);
    JacobiCoeffs inside = jacobi_from_measure(dvz_push(nu, +1), 20);
    CHECK(in_dvz_image(inside, 18));
    JacobiCoeffs outside = jacobi_from_measure(make_semicircle(), 20);
    CHECK_FALSE(in_dvz_image(outside, 18));  // b_1 = 0 forces alpha_0 = -1
}

TEST_CASE("gw modified variant vanishes identically at the reference stream") {
    for (double g : {-1.0, -0.45}) {
        VerblunskyCoeffs a;
        for (int k = 0; k < 300; ++k) a.alpha.push_back({ref::gw_alpha(g, k), 0.0});
        a.tail = VerblunskyTailInfo{VerblunskyTailInfo::Kind::gw, 300, {0, 0}, g};
        Series s = coeff_side_gw(a, g, GwVariant::modified, 300);
        CHECK(std::abs(s.value) < 1e-12);
    }
}
