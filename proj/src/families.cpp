#include "sumrule/families.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sumrule/errors.hpp"
#include "sumrule/quadrature.hpp"

namespace sumrule::ref {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double sc_density(double x) {
    if (std::abs(x) >= 2.0) return 0.0;
    return std::sqrt(4.0 - x * x) / (2.0 * kPi);
}

std::pair<double, double> mp_edges(double tau, bool legacy_edges) {
    if (!(tau > 0.0 && tau <= 1.0)) throw parameter_error("MP: tau must be in (0,1]");
    if (legacy_edges) return {std::sqrt(1.0 - tau), std::sqrt(1.0 + tau)};
    double s = std::sqrt(tau);
    return {(1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s)};
}

double mp_raw_mass(double tau, bool legacy_edges) {
    auto [lo, hi] = mp_edges(tau, legacy_edges);
    return quad::integrate_with_substitution(
        [&](double x) {
            return std::sqrt((x - lo) * (hi - x)) / (2.0 * kPi * tau * x);
        },
        lo, hi, true, true);
}

double mp_density(double x, double tau, bool legacy_edges) {
    auto [lo, hi] = mp_edges(tau, legacy_edges);
    if (x <= lo || x >= hi) return 0.0;
    double v = std::sqrt((x - lo) * (hi - x)) / (2.0 * kPi * tau * x);
    if (legacy_edges) v /= mp_raw_mass(tau, true);
    return v;
}

std::pair<double, double> kmk_edges(double kappa1, double kappa2) {
    if (kappa1 < 0.0 || kappa2 < 0.0) throw parameter_error("KMK: kappas must be >= 0");
    double s = 2.0 + kappa1 + kappa2;
    double root = 4.0 * std::sqrt((1.0 + kappa1) * (1.0 + kappa2) * (1.0 + kappa1 + kappa2));
    double diff = kappa2 * kappa2 - kappa1 * kappa1;
    return {2.0 * (diff - root) / (s * s), 2.0 * (diff + root) / (s * s)};
}

double kmk_density(double x, double kappa1, double kappa2) {
    auto [lo, hi] = kmk_edges(kappa1, kappa2);
    if (x <= lo || x >= hi) return 0.0;
    double s = 2.0 + kappa1 + kappa2;
    return s / (2.0 * kPi) * std::sqrt((x - lo) * (hi - x)) / (4.0 - x * x);
}

double kmk_ue(double kappa1, double kappa2) {
    return -(kappa1 + kappa2) / (2.0 + kappa1 + kappa2);
}

double kmk_uo(double kappa1, double kappa2) {
    return (kappa2 - kappa1) / (2.0 + kappa1 + kappa2);
}

double arcsine_density(double x) {
    if (std::abs(x) >= 2.0) return 0.0;
    return 1.0 / (kPi * std::sqrt(4.0 - x * x));
}

double d_density(double x, double p, double q) {
    if (p == q) throw parameter_error("D(p,q): endpoints must differ");
    double lo = std::min(p, q), hi = std::max(p, q);
    if (x <= lo || x >= hi) return 0.0;
    return 2.0 / (kPi * std::abs(q - p)) * std::sqrt(std::abs(x - p) / std::abs(q - x));
}

double gw_theta_g(double g) {
    double ag = std::abs(g);
    if (ag < 1.0) throw parameter_error("theta_g defined for |g| >= 1");
    return 2.0 * std::asin(1.0 / std::sqrt(ag));
}

double gw_q(double g) {
    double ag = std::abs(g);
    if (ag <= 1.0) throw parameter_error("q defined for |g| > 1");
    double r = std::sqrt(ag) - std::sqrt(ag - 1.0);
    return r * r;
}

double gw_alpha(double g, int n) {
    if (n < 0) throw parameter_error("gw_alpha: n >= 0");
    if (g == 0.0) return 0.0;
    if (g > 0.0) {
        // rotation by pi flips the sign of g and multiplies alpha_k by (-1)^{k+1}
        double a = gw_alpha(-g, n);
        return (n % 2 == 0) ? -a : a;
    }
    if (g == -1.0) return -1.0 / (n + 2);
    if (g > -1.0) {
        // x_+ x_- = 1; written in terms of xp^{-1} to stay finite for large n
        double xp = -1.0 / g + std::sqrt(1.0 / (g * g) - 1.0);
        double gap = xp - 1.0 / xp;
        double xpinv = 1.0 / xp;
        double num = gap * std::pow(xpinv, n + 2);
        double den = 1.0 - std::pow(xpinv, 2 * (n + 2));
        return -num / den;
    }
    // g < -1; the closed form indexes alpha_{n-1}
    double q = gw_q(g);
    return 1.0 - 2.0 / (1.0 + q) * (1.0 - std::pow(q, n + 3)) / (1.0 - std::pow(q, n + 2));
}

double gw_density(double theta, double g) {
    if (std::abs(g) <= 1.0) {
        // 1 + g cos(theta) written without cancellation at the density zero
        double s2 = std::sin(theta / 2.0), c2 = std::cos(theta / 2.0);
        double v = g <= 0.0 ? (1.0 + g) + 2.0 * (-g) * s2 * s2
                            : (1.0 - g) + 2.0 * g * c2 * c2;
        return v > 0.0 ? v : 0.0;
    }
    double tg = gw_theta_g(g);
    if (g < -1.0) {
        // supported on [pi - theta_g, pi + theta_g]
        double s2 = std::sin(theta / 2.0), c2 = std::cos(theta / 2.0);
        double rad = s2 * s2 - std::cos(tg / 2.0) * std::cos(tg / 2.0);
        if (rad <= 0.0) return 0.0;
        (void)c2;
        return 2.0 * std::abs(g) * std::abs(s2) * std::sqrt(rad);
    }
    // g > 1: supported on [-theta_g, theta_g]
    double t = std::remainder(theta, 2.0 * kPi);  // (-pi, pi]
    double s2 = std::sin(t / 2.0), c2 = std::cos(t / 2.0);
    double rad = std::sin(tg / 2.0) * std::sin(tg / 2.0) - s2 * s2;
    if (rad <= 0.0) return 0.0;
    return 2.0 * g * std::abs(c2) * std::sqrt(rad);
}

double gw_H(double g) {
    if (std::abs(g) > 1.0) throw parameter_error("H(g) defined for |g| <= 1");
    double r = std::sqrt(1.0 - g * g);
    return 1.0 - r + std::log((1.0 + r) / 2.0);
}

double gw_C(double g) {
    if (g < -1.0 || g > 0.0) throw parameter_error("C_g defined for -1 <= g <= 0");
    // C_g = -|g| K(SC | rho_g) - (1-|g|) K(Arcsine | rho_g) + (1-|g|) log 2,
    // evaluated in closed form; equals log 2 at g = 0 and 0 at g = -1
    double r = std::sqrt(1.0 - g * g);
    return 1.0 - std::abs(g) - r + std::log(1.0 + r);
}

double hp_gamma(double d) { return -d / (1.0 + d); }

double hp_theta_d(double d) {
    if (d < 0.0) throw parameter_error("HP: d must be >= 0");
    return 2.0 * std::asin(d / (1.0 + d));
}

double hp_xd(double d) {
    double p = 1.0 + d;
    return 2.0 * (1.0 + 2.0 * d - d * d) / (p * p);
}

double hp_xhat(double d) { return 2.0 * std::sqrt(1.0 + 2.0 * d) / (1.0 + d); }

double hp_density(double theta, double d) {
    if (d == 0.0) return 1.0;
    double sd = d / (1.0 + d);
    double s2 = std::sin(theta / 2.0);
    double rad = s2 * s2 - sd * sd;
    if (rad <= 0.0 || s2 <= 0.0) return 0.0;
    return (1.0 + d) * std::sqrt(rad) / s2;
}

double pois_density(double theta, complex zeta) {
    double r2 = std::norm(zeta);
    if (r2 >= 1.0) throw parameter_error("Pois: |zeta| must be < 1");
    complex z = std::polar(1.0, theta);
    return (1.0 - r2) / std::norm(z - zeta);
}

double f_sc(double x) {
    double ax = std::abs(x);
    if (ax < 2.0) return kInf;
    double rad = std::sqrt(x * x - 4.0);
    return 0.5 * ax * rad - 2.0 * std::log(0.5 * (ax + rad));
}

double f_mp(double x, double tau, bool legacy_edges) {
    auto [lo, hi] = mp_edges(tau, legacy_edges);
    double norm = legacy_edges ? mp_raw_mass(tau, true) : 1.0;
    if (x > lo && x < hi) return kInf;
    if (x <= 0.0) return kInf;
    auto integrand = [&](double t) {
        return std::sqrt(std::abs((t - hi) * (t - lo))) / (tau * t) / norm;
    };
    if (x >= hi)
        return quad::integrate_with_substitution(integrand, hi, x, true, false);
    return quad::integrate_with_substitution(integrand, x, lo, false, true);
}

double f_kmk(double x, double kappa1, double kappa2) {
    auto [lo, hi] = kmk_edges(kappa1, kappa2);
    if (x > lo && x < hi) return kInf;
    if (std::abs(x) >= 2.0) return kInf;
    double s = 2.0 + kappa1 + kappa2;
    auto integrand = [&](double t) {
        return s * std::sqrt(std::abs((t - hi) * (t - lo))) / (4.0 - t * t);
    };
    if (x >= hi)
        return quad::integrate_with_substitution(integrand, hi, x, true, false);
    return quad::integrate_with_substitution(integrand, x, lo, false, true);
}

double f_hp(double theta, double d) {
    double td = hp_theta_d(d);
    double t = std::fmod(theta, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    if (t > kPi) t = 2.0 * kPi - t;  // symmetric in theta <-> 2pi - theta
    if (t >= td) return d == 0.0 ? 0.0 : kInf;  // inside the band
    if (t <= 0.0) return kInf;
    double sd = d / (1.0 + d);
    auto integrand = [&](double phi) {
        double s2 = std::sin(phi / 2.0);
        return (1.0 + d) * std::sqrt(std::abs(sd * sd - s2 * s2)) / s2;
    };
    return quad::integrate_with_substitution(integrand, t, td, false, true);
}

double G_term(double x) {
    if (x <= 0.0) return kInf;
    return x - 1.0 - std::log(x);
}

double He_term(double u, double kappa1, double kappa2) {
    if (std::abs(u) >= 1.0) return kInf;
    double ue = kmk_ue(kappa1, kappa2);
    return -(1.0 + kappa1 + kappa2) * std::log((1.0 - u) / (1.0 - ue)) -
           std::log((1.0 + u) / (1.0 + ue));
}

double Ho_term(double u, double kappa1, double kappa2) {
    if (std::abs(u) >= 1.0) return kInf;
    double uo = kmk_uo(kappa1, kappa2);
    return -(1.0 + kappa1) * std::log((1.0 - u) / (1.0 - uo)) -
           (1.0 + kappa2) * std::log((1.0 + u) / (1.0 + uo));
}

double Hd_term(complex gamma, double d) {
    double a2 = std::norm(gamma);
    if (a2 >= 1.0) return kInf;
    double gd = hp_gamma(d);
    return -std::log((1.0 - a2) / (1.0 - gd * gd)) -
           2.0 * d * std::log(std::abs(1.0 - gamma) / (1.0 - gd));
}

}  // namespace sumrule::ref
