#pragma once

#include <complex>
#include <string>

namespace sumrule::ref {

using complex = std::complex<double>;

// ---- semicircle on [-2,2] -------------------------------------------------
double sc_density(double x);

// ---- Marchenko-Pastur, tau in (0,1] ---------------------------------------
// Band edges.  The standard convention is (1 +- sqrt(tau))^2, which is the one
// that normalizes the density; the legacy square-root convention
// sqrt(1 +- tau) is selectable and the density is renormalized under it.
std::pair<double, double> mp_edges(double tau, bool legacy_edges = false);
double mp_density(double x, double tau, bool legacy_edges = false);
// numerically computed total mass of the unnormalized density form
double mp_raw_mass(double tau, bool legacy_edges);

// ---- Kesten-McKay ----------------------------------------------------------
std::pair<double, double> kmk_edges(double kappa1, double kappa2);
double kmk_density(double x, double kappa1, double kappa2);
double kmk_ue(double kappa1, double kappa2);  // even canonical moment
double kmk_uo(double kappa1, double kappa2);  // odd canonical moment

// ---- arcsine on [-2,2] ------------------------------------------------------
double arcsine_density(double x);

// ---- Chebyshev-III/IV type D(p,q) ------------------------------------------
// Supported between p and q; density ~ sqrt(|x-p| / |q-x|).
double d_density(double x, double p, double q);

// ---- Gross-Witten -----------------------------------------------------------
double gw_theta_g(double g);  // band half-angle for |g| >= 1
double gw_q(double g);        // Zhedanov ratio for g < -1
// Verblunsky coefficients of GW(g); valid for all real g, n >= 0.
double gw_alpha(double g, int n);
// circle density with respect to dtheta/2pi
double gw_density(double theta, double g);
// relative entropy K(GW(g) | UNIF) for |g| <= 1
double gw_H(double g);
// constant C_g of the mixture-form sum rule, -1 <= g <= 0
double gw_C(double g);

// ---- Hua-Pickrell -----------------------------------------------------------
double hp_gamma(double d);    // constant Verblunsky coefficient -d/(1+d)
double hp_theta_d(double d);  // band edge angle, sin(theta_d/2) = d/(1+d)
double hp_xd(double d);       // Szego image upper band edge
double hp_xhat(double d);     // DG image band half-width
double hp_density(double theta, double d);

// ---- Poisson kernel ----------------------------------------------------------
double pois_density(double theta, complex zeta);

// ---- outlier functionals ------------------------------------------------------
// F_SC has the closed form; the others integrate the defining integrand.
double f_sc(double x);
double f_mp(double x, double tau, bool legacy_edges = false);
double f_kmk(double x, double kappa1, double kappa2);
double f_hp(double theta, double d);

// ---- sum-rule term functions ----------------------------------------------
double G_term(double x);                                   // x - 1 - log x
double He_term(double u, double kappa1, double kappa2);    // even-index H
double Ho_term(double u, double kappa1, double kappa2);    // odd-index H
double Hd_term(complex gamma, double d);                   // Hua-Pickrell H_d

}  // namespace sumrule::ref
