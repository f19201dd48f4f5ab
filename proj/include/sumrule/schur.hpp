#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sumrule/measure.hpp"

namespace sumrule {

// Caratheodory function F(z) = int (e^{i theta} + z)/(e^{i theta} - z) dnu.
complex caratheodory(const Measure& nu, complex z);

// f = (F - 1) / (z (F + 1)); the removable singularity at z = 0 is evaluated
// by a Richardson-extrapolated difference quotient.
complex schur_from_caratheodory(const std::function<complex(complex)>& F, complex z);

// Schur function evaluated by the backward recursion through the standard
// Schur parameters beta_0..beta_{n-1} followed by a real constant tail.
complex schur_backward_eval(std::span<const complex> beta, double tail_gamma,
                            complex z);

// An evaluable Schur function.  The evaluator is in the standard textbook
// normalization: for the Poisson kernel Pois(zeta) it returns the constant
// conj(zeta), the mate of the coefficient orientation alpha_0 = zeta.
class SchurState {
public:
    enum class Provenance { measure, coefficients, closed_form };

    complex operator()(complex z) const;
    Provenance provenance() const { return prov_; }
    const std::vector<complex>* std_coefficients() const;
    double tail_gamma() const { return tail_gamma_; }
    double truncation_residual() const { return truncation_residual_; }

    // moment-based construction: Levinson coefficients until they fall below
    // coeff_floor (or max_order), then the backward recursion
    static SchurState from_measure(const Measure& nu, int max_order = 420,
                                   double coeff_floor = 1e-13);
    // coefficients in this library's orientation (alpha), zero or constant tail
    static SchurState from_artifact_coefficients(std::vector<complex> alpha,
                                                 double tail_gamma = 0.0);
    static SchurState from_std_coefficients(std::vector<complex> beta,
                                            double tail_gamma = 0.0);
    static SchurState constant(complex c);
    // direct quadrature through the Caratheodory transform (slower; used for
    // cross-checks of the moment-based route)
    static SchurState from_caratheodory_quadrature(const Measure& nu);

private:
    Provenance prov_ = Provenance::closed_form;
    std::function<complex(complex)> eval_;
    std::optional<std::vector<complex>> beta_;
    double tail_gamma_ = 0.0;
    double truncation_residual_ = 0.0;
};

struct SchurIterates {
    std::vector<complex> alpha;     // coefficient orientation, conj(s_values)
    std::vector<complex> s_values;  // S^{[k]} f (0), standard normalization
    bool terminated = false;
};

// Iterated Schur algorithm at the origin; alpha_k = conj(S^{[k]} f (0)).
SchurIterates schur_iterates(const SchurState& f, int N);

// Nevanlinna-Pick iterate values S_zeta^{[k]}(f)(zeta), k = 0..N.  For
// zeta = 0 this is the plain Schur algorithm.  The removable singularity at
// z = zeta uses a central difference quotient with step 1e-6 (1 - |zeta|),
// Richardson extrapolated.
struct NpIterates {
    std::vector<complex> values;
    bool terminated = false;
};
NpIterates nevanlinna_pick_iterates(const SchurState& f, complex zeta, int N,
                                    bool omega_prefactor = true);

// Shared engine: iterate values at rho plus tracked values at extra points
// (extra_values[k][j] = S_rho^{[k]}(f)(extra_points[j])).
NpIterates schur_algorithm_values(const SchurState& f, complex rho, int N,
                                  bool omega_prefactor,
                                  const std::vector<complex>& extra_points = {},
                                  std::vector<std::vector<complex>>* extra_values = nullptr);

}  // namespace sumrule
