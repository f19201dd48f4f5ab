#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace sumrule::quad {

// Gauss-Legendre nodes/weights on [-1,1], cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n);

struct Options {
    double abs_tol = 1e-11;
    double rel_tol = 1e-11;
    int max_depth = 52;
};

// Adaptive Gauss-Legendre on [a,b].  Error estimate compares GL(15) against
// GL(30) on each interval; intervals are bisected until the estimate passes.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt = {});

// Same, but substitutes x = a + t^2 (resp. x = b - t^2) at the flagged
// endpoints before integrating.  Removes +-1/2 power edge singularities and
// tames integrable log blow-ups.
double integrate_with_substitution(const std::function<double(double)>& f,
                                   double a, double b, bool subst_left,
                                   bool subst_right, const Options& opt = {});

// Periodic trapezoid rule on [0, 2pi), doubling the node count until two
// consecutive refinements agree.  Spectrally accurate for smooth periodic
// integrands.  Returns the mean of f, i.e. (1/2pi) * integral f dtheta.
double trapezoid_mean(const std::function<double(double)>& f,
                      double tol = 1e-12, int n0 = 512, int n_max = 1 << 18);

// Fixed nodes of the composite rule used to discretize a measure piece:
// Gauss-Legendre of order n on each half of [a,b] with the edge substitution
// applied at the outer ends.  Returns (x_i, w_i) with sum w_i = b - a exactly
// for smooth f == 1.
void edge_substituted_nodes(double a, double b, int n_per_half,
                            std::vector<double>& xs, std::vector<double>& ws);

}  // namespace sumrule::quad
