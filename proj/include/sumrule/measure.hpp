#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sumrule/errors.hpp"

namespace sumrule {

using complex = std::complex<double>;

enum class Space { real_line, circle };

struct Atom {
    double location;  // point on the line, or angle in [0, 2pi)
    double mass;      // > 0
};

struct Interval {
    double lo, hi;  // lo < hi; for circle measures these are angles, possibly
                    // shifted outside [0, 2pi) to keep an arc contiguous
};

// Identifies a measure built directly from a reference family.
struct ReferenceTag {
    enum class Family { sc, mp, kmk, arcsine, d, unif, gw, hp, pois };
    Family family;
    double tau = 1.0;
    bool mp_legacy_edges = false;
    double kappa1 = 0.0, kappa2 = 0.0;
    double g = 0.0;
    double d = 0.0;
    double p = 0.0, q = 0.0;
    complex zeta{0.0, 0.0};
};

struct VerblunskyTailInfo {
    enum class Kind { zero, constant, gw };
    Kind kind = Kind::zero;
    int start = 0;       // first index the tail formula applies to
    complex gamma{0, 0}; // constant tail value
    double g = 0.0;      // Gross-Witten parameter
};

// Defining data of a coefficient-built circle measure.
struct CircleCoeffProvenance {
    std::vector<complex> alpha;
    VerblunskyTailInfo tail;
};

// Defining data of a coefficient-built real measure: head (b_1..b_n, a_1..a_n)
// followed by the constant pair (a_inf, b_inf).
struct RealCoeffProvenance {
    std::vector<double> b, a;
    double a_inf = 1.0, b_inf = 0.0;
};

struct DiscreteMeasure {
    std::vector<double> x, w;
};

namespace detail {
class MeasureNode;
}

class Measure {
public:
    Measure() = default;
    explicit Measure(std::shared_ptr<const detail::MeasureNode> node);

    bool valid() const { return node_ != nullptr; }
    Space space() const;

    // density of the absolutely continuous part, including all mixture
    // weights: with respect to dx on the line, dtheta/2pi on the circle.
    double density(double x) const;
    const std::vector<Atom>& atoms() const;
    const std::vector<Interval>& support() const;
    std::vector<double> interior_breakpoints() const;
    bool symmetric() const;
    bool smooth_full_circle() const;
    double ac_mass() const;

    // integral of f against the a.c. part of the measure
    double integrate_ac(const std::function<double(double)>& f,
                        double tol = 1e-11) const;

    // node/weight discretization for coefficient extraction; atoms appended
    DiscreteMeasure discretize(int nodes_per_half_piece) const;

    const ReferenceTag* reference_tag() const;
    const CircleCoeffProvenance* circle_coeffs() const;
    const RealCoeffProvenance* real_coeffs() const;

    const detail::MeasureNode& node() const { return *node_; }
    std::shared_ptr<const detail::MeasureNode> node_ptr() const { return node_; }

private:
    std::shared_ptr<const detail::MeasureNode> node_;
};

// ---- reference constructors -------------------------------------------------
Measure make_semicircle();
Measure make_arcsine();
Measure make_mp(double tau, bool legacy_edges = false);
Measure make_kmk(double kappa1, double kappa2);
Measure make_kmk(double kappa);  // symmetric variant
Measure make_d(double p, double q);
Measure make_unif();
Measure make_gw(double g);
Measure make_hp(double d);
Measure make_pois(complex zeta);

// ---- combinators -------------------------------------------------------------
// convex combination tau1*m1 + (1-tau1)*m2, tau1 strictly inside (0,1)
Measure mix(double tau1, const Measure& m1, const Measure& m2);

// a.c. part scaled by (1 - sum of atom masses) plus the given atoms
Measure with_atoms(const Measure& ac_part, std::vector<Atom> atoms);
Measure atoms_only(Space space, std::vector<Atom> atoms);

// affine image x -> scale*x + shift of a real measure
Measure affine_image(const Measure& m, double scale, double shift);

// ---- coefficient-defined measures -------------------------------------------
// Real line: head (b_1..b_n, a_1..a_n) then constant (a_inf, b_inf).  The
// density comes from the boundary values of the m-function; construction
// fails if the head creates point spectrum (mass escaping the band).
Measure from_jacobi_coeffs(std::vector<double> b_head, std::vector<double> a_head,
                           double a_inf = 1.0, double b_inf = 0.0);

// Circle: head alpha_0..alpha_{n-1} then a tail that is either zero or a real
// constant gamma in (-1,1).  Density from the boundary Caratheodory function.
Measure from_verblunsky(std::vector<complex> alpha_head, double tail_gamma = 0.0);

// Generic density node (used internally and by tests).
Measure from_density(Space space, std::function<double(double)> density,
                     std::vector<Interval> support,
                     std::vector<double> breakpoints = {}, bool symmetric = false,
                     bool smooth_full_circle = false, double known_mass = -1.0);

// ---- operations ---------------------------------------------------------------
struct KlOptions {
    double quad_tol = 1e-11;
    double divergence_cap = 1e6;
    double density_floor = 1e-300;
};

// Kullback-Leibler divergence K(nu | mu) = int log(dnu/dmu) dnu, +infinity when
// absolute continuity fails or the integral exceeds the cap.
double kl(const Measure& nu, const Measure& mu, const KlOptions& opt = {});

// Both sides of the mixture identity for K(tau1 mu1 + tau2 mu2 | mu):
// lhs directly, rhs = tau1 K(mu1|mu) + tau2 K(mu2|mu)
//                     - tau1 K(mu1|mix) - tau2 K(mu2|mix).
std::pair<double, double> mixture_kl_decompose(double tau1, const Measure& m1,
                                               const Measure& m2,
                                               const Measure& mu,
                                               const KlOptions& opt = {});

// trigonometric moments c_k = int e^{-ik theta} dnu, k = 0..K
std::vector<complex> trig_moments(const Measure& nu, int K);

struct SupportClassification {
    bool inside_band;            // no a.c. mass detected outside the band
    std::vector<Atom> outliers;  // atoms outside, sorted by distance from band
};

// Band is [c_lo, c_hi] on the line, or the arc [c_lo, c_hi] in angle
// coordinates on the circle.
SupportClassification support_classify(const Measure& m, double c_lo, double c_hi,
                                       double mass_tol = 1e-10);

double wrap_angle(double theta);  // into [0, 2pi)

}  // namespace sumrule
