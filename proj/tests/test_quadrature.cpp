#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sumrule/quadrature.hpp"

using namespace sumrule;
namespace q = sumrule::quad;

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
    for (int n : {5, 15, 30}) {
        const auto& [x, w] = q::gauss_legendre(n);
        double s0 = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            s0 += w[i];
            s2 += w[i] * x[i] * x[i];
        }
        CHECK(s0 == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(s2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    }
}

TEST_CASE("adaptive integration handles smooth and peaked integrands") {
    double v = q::integrate([](double x) { return std::exp(-x * x); }, -6.0, 6.0);
    CHECK(v == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));

    // narrow Lorentzian peak
    double w = 1e-3;
    double v2 = q::integrate([&](double x) { return w / (x * x + w * w); }, -1.0, 1.0);
    CHECK(v2 == doctest::Approx(2.0 * std::atan(1.0 / w)).epsilon(1e-10));
}

TEST_CASE("edge substitution integrates inverse square-root singularities") {
    // arcsine mass and first moments
    auto arc = [](double x) { return 1.0 / (std::numbers::pi * std::sqrt(4.0 - x * x)); };
    double mass = q::integrate_with_substitution(arc, -2.0, 2.0, true, true);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    double m2 = q::integrate_with_substitution([&](double x) { return x * x * arc(x); },
                                               -2.0, 2.0, true, true);
    CHECK(m2 == doctest::Approx(2.0).epsilon(1e-11));

    // integrable logarithmic endpoint blow-up
    double lg = q::integrate_with_substitution([](double x) { return std::log(x); },
                                               0.0, 1.0, true, false);
    CHECK(lg == doctest::Approx(-1.0).epsilon(1e-11));
}

TEST_CASE("periodic trapezoid mean is spectrally accurate") {
    double v = q::trapezoid_mean([](double t) { return std::cos(t) * std::cos(t); });
    CHECK(v == doctest::Approx(0.5).epsilon(1e-14));
}
