#pragma once

// Shared helpers for the test suites: deterministic random measures and a few
// numeric utilities.

#include <random>
#include <vector>

#include "sumrule/measure.hpp"

namespace testsupport {

using sumrule::complex;
using sumrule::Measure;

inline std::vector<complex> random_real_alphas(std::mt19937& rng, int n,
                                               double bound = 0.6) {
    std::uniform_real_distribution<double> U(-bound, bound);
    std::vector<complex> a;
    a.reserve(n);
    for (int i = 0; i < n; ++i) a.push_back({U(rng), 0.0});
    return a;
}

inline std::vector<complex> random_complex_alphas(std::mt19937& rng, int n,
                                                  double bound = 0.6) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<complex> a;
    a.reserve(n);
    while (static_cast<int>(a.size()) < n) {
        complex z{U(rng), U(rng)};
        if (std::abs(z) < 1.0) a.push_back(bound * z);
    }
    return a;
}

inline Measure random_symmetric_bs(std::mt19937& rng, int max_degree = 8,
                                   double bound = 0.6) {
    std::uniform_int_distribution<int> D(2, max_degree);
    return sumrule::from_verblunsky(random_real_alphas(rng, D(rng), bound), 0.0);
}

inline double total_mass(const Measure& m) {
    double mass = m.ac_mass() > 0.0
                      ? m.integrate_ac([](double) { return 1.0; }, 1e-11)
                      : 0.0;
    for (const sumrule::Atom& a : m.atoms()) mass += a.mass;
    return mass;
}

}  // namespace testsupport
