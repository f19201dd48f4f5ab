#include "sumrule/schur.hpp"

#include <cmath>
#include <numbers>

#include "sumrule/families.hpp"
#include "sumrule/opuc.hpp"

namespace sumrule {

complex caratheodory(const Measure& nu, complex z) {
    if (nu.space() != Space::circle)
        throw space_mismatch_error("caratheodory: circle measures only");
    if (std::abs(z) >= 1.0 - 1e-12)
        throw domain_error("caratheodory: z must lie strictly inside the unit disk");
    auto kernel = [&](double theta) {
        complex e = std::polar(1.0, theta);
        return (e + z) / (e - z);
    };
    double re = nu.integrate_ac([&](double t) { return kernel(t).real(); });
    double im = nu.integrate_ac([&](double t) { return kernel(t).imag(); });
    complex F(re, im);
    for (const Atom& a : nu.atoms()) F += a.mass * kernel(a.location);
    return F;
}

complex schur_from_caratheodory(const std::function<complex(complex)>& F, complex z) {
    if (std::abs(z) >= 1.0 - 1e-12)
        throw domain_error("schur_from_caratheodory: |z| < 1 required");
    if (std::abs(z) > 1e-9) {
        complex Fz = F(z);
        return (Fz - 1.0) / (z * (Fz + 1.0));
    }
    // f(0) = F'(0)/2 via Richardson-extrapolated central differences
    auto d = [&](double h) { return (F(complex(h, 0)) - F(complex(-h, 0))) / (2.0 * h); };
    complex d1 = d(1e-5), d2 = d(5e-6);
    return (4.0 * d2 - d1) / 3.0 / 2.0;
}

complex schur_backward_eval(std::span<const complex> beta, double tail_gamma,
                            complex z) {
    complex f;
    if (tail_gamma == 0.0) {
        f = 0.0;
    } else if (std::abs(z) < 1e-14) {
        f = tail_gamma;
    } else {
        // analytic root of  g z f^2 + (1-z) f - g = 0  with f(0) = g
        complex one_minus = 1.0 - z;
        complex u = 4.0 * tail_gamma * tail_gamma * z / (one_minus * one_minus);
        f = one_minus * (std::sqrt(1.0 + u) - 1.0) / (2.0 * tail_gamma * z);
    }
    for (size_t k = beta.size(); k-- > 0;) {
        f = (beta[k] + z * f) / (1.0 + std::conj(beta[k]) * z * f);
    }
    return f;
}

complex SchurState::operator()(complex z) const { return eval_(z); }

const std::vector<complex>* SchurState::std_coefficients() const {
    return beta_ ? &*beta_ : nullptr;
}

SchurState SchurState::from_std_coefficients(std::vector<complex> beta,
                                             double tail_gamma) {
    SchurState s;
    s.prov_ = Provenance::coefficients;
    s.beta_ = std::move(beta);
    s.tail_gamma_ = tail_gamma;
    auto b = *s.beta_;
    s.eval_ = [b, tail_gamma](complex z) {
        return schur_backward_eval(b, tail_gamma, z);
    };
    return s;
}

SchurState SchurState::from_artifact_coefficients(std::vector<complex> alpha,
                                                  double tail_gamma) {
    for (complex& a : alpha) a = std::conj(a);
    return from_std_coefficients(std::move(alpha), tail_gamma);
}

SchurState SchurState::constant(complex c) {
    SchurState s = from_std_coefficients({c}, 0.0);
    s.prov_ = Provenance::closed_form;
    return s;
}

SchurState SchurState::from_measure(const Measure& nu, int max_order,
                                    double coeff_floor) {
    if (nu.space() != Space::circle)
        throw space_mismatch_error("SchurState::from_measure: circle measures only");

    if (const CircleCoeffProvenance* cc = nu.circle_coeffs()) {
        std::vector<complex> beta;
        beta.reserve(cc->alpha.size());
        for (const complex& a : cc->alpha) beta.push_back(std::conj(a));
        double g = 0.0;
        if (cc->tail.kind == VerblunskyTailInfo::Kind::constant)
            g = cc->tail.gamma.real();
        SchurState s = from_std_coefficients(std::move(beta), g);
        s.prov_ = Provenance::measure;
        return s;
    }
    if (const ReferenceTag* tag = nu.reference_tag()) {
        using F = ReferenceTag::Family;
        SchurState s;
        switch (tag->family) {
            case F::unif:
                s = from_std_coefficients({}, 0.0);
                s.prov_ = Provenance::measure;
                return s;
            case F::pois:
                s = from_std_coefficients({std::conj(tag->zeta)}, 0.0);
                s.prov_ = Provenance::measure;
                return s;
            case F::hp:
                s = from_std_coefficients({}, ref::hp_gamma(tag->d));
                s.prov_ = Provenance::measure;
                return s;
            case F::gw: {
                std::vector<complex> beta;
                double resid = 0.0;
                for (int k = 0; k < max_order; ++k) {
                    double a = ref::gw_alpha(tag->g, k);
                    resid = std::abs(a);
                    if (resid < coeff_floor) break;
                    beta.emplace_back(a, 0.0);
                }
                s = from_std_coefficients(std::move(beta), 0.0);
                s.prov_ = Provenance::measure;
                s.truncation_residual_ = resid;
                return s;
            }
            default:
                break;
        }
    }
    // generic route: Levinson coefficients until they die out
    int N = 64;
    std::vector<complex> alpha;
    double resid = 1.0;
    while (true) {
        alpha = verblunsky_from_measure(nu, N).alpha;
        resid = 0.0;
        for (int k = N - 8; k < N; ++k) resid = std::max(resid, std::abs(alpha[k]));
        if (resid < coeff_floor || N >= max_order) break;
        N = std::min(2 * N, max_order);
    }
    while (!alpha.empty() && std::abs(alpha.back()) < coeff_floor) alpha.pop_back();
    SchurState s = from_artifact_coefficients(std::move(alpha), 0.0);
    s.prov_ = Provenance::measure;
    s.truncation_residual_ = resid;
    return s;
}

SchurState SchurState::from_caratheodory_quadrature(const Measure& nu) {
    SchurState s;
    s.prov_ = Provenance::measure;
    Measure copy = nu;
    s.eval_ = [copy](complex z) {
        return schur_from_caratheodory(
            [&copy](complex w) { return caratheodory(copy, w); }, z);
    };
    return s;
}

NpIterates schur_algorithm_values(const SchurState& f, complex rho, int N,
                                  bool omega_prefactor,
                                  const std::vector<complex>& extra_points,
                                  std::vector<std::vector<complex>>* extra_values) {
    if (std::abs(rho) >= 1.0 - 1e-12)
        throw domain_error("schur iterates: evaluation point must lie inside the disk");
    NpIterates out;
    const bool at_origin = std::abs(rho) < 1e-14;
    const complex omega =
        (!at_origin && omega_prefactor) ? -rho / std::abs(rho) : complex(1.0, 0.0);

    if (extra_values) extra_values->assign(N + 1, {});

    // Coefficient-backed states at the origin iterate exactly: the values are
    // the standard Schur parameters and the k-th iterate is the Schur function
    // of the shifted parameter list.
    const std::vector<complex>* beta = f.std_coefficients();
    if (at_origin && beta) {
        for (int k = 0; k <= N; ++k) {
            complex v = k < static_cast<int>(beta->size()) ? (*beta)[k]
                                                           : complex(f.tail_gamma(), 0.0);
            out.values.push_back(v);
            if (extra_values) {
                std::vector<complex>& row = (*extra_values)[k];
                std::span<const complex> shifted(
                    beta->data() + std::min<size_t>(k, beta->size()),
                    beta->size() - std::min<size_t>(k, beta->size()));
                for (complex p : extra_points)
                    row.push_back(schur_backward_eval(shifted, f.tail_gamma(), p));
            }
            if (std::abs(v) >= 1.0 - 1e-13) {
                out.terminated = true;
                break;
            }
        }
        return out;
    }

    // Contour chain: iterate values are carried on a circle around rho where
    // the removable singularity of the step is harmless, and the value at rho
    // is recovered as the contour mean.  Difference quotients at rho +- h are
    // unusable here: each step divides the accumulated error by h.
    const int M = 64;
    const double r = 0.5 * (1.0 - std::abs(rho));
    std::vector<complex> zc(M), w(M);
    for (int j = 0; j < M; ++j) {
        zc[j] = rho + std::polar(r, 2.0 * std::numbers::pi * j / M);
        w[j] = f(zc[j]);
    }
    std::vector<complex> wx(extra_points.size());
    for (size_t j = 0; j < extra_points.size(); ++j) wx[j] = f(extra_points[j]);

    auto mean = [&](const std::vector<complex>& vals) {
        complex s = 0.0;
        for (const complex& v : vals) s += v;
        return s / static_cast<double>(M);
    };
    auto prefactor = [&](complex p) -> complex {
        if (at_origin) return 1.0 / p;
        complex m = (p - rho) / (1.0 - std::conj(rho) * p);
        return omega / m;
    };

    double min_mag = 2.0;
    for (int k = 0; k <= N; ++k) {
        complex v = mean(w);
        double mag = std::abs(v);
        // noise takeover: once the iterates have decayed into roundoff the
        // chain amplifies garbage; stop before it pollutes the series
        if (k > 0 && (mag < 1e-12 || (min_mag < 1e-5 && mag > 50.0 * min_mag))) {
            out.terminated = false;
            break;
        }
        out.values.push_back(v);
        if (extra_values) (*extra_values)[k].assign(wx.begin(), wx.end());
        if (mag >= 1.0 - 1e-13) {
            out.terminated = true;
            break;
        }
        if (k == N) break;
        for (int j = 0; j < M; ++j)
            w[j] = prefactor(zc[j]) * (w[j] - v) / (1.0 - std::conj(v) * w[j]);
        for (size_t j = 0; j < extra_points.size(); ++j)
            wx[j] = prefactor(extra_points[j]) * (wx[j] - v) /
                    (1.0 - std::conj(v) * wx[j]);
        min_mag = std::min(min_mag, mag);
    }
    return out;
}

SchurIterates schur_iterates(const SchurState& f, int N) {
    SchurIterates out;
    NpIterates chain = schur_algorithm_values(f, complex(0.0, 0.0), N - 1, false);
    out.terminated = chain.terminated;
    out.s_values = chain.values;
    for (const complex& v : chain.values) out.alpha.push_back(std::conj(v));
    return out;
}

NpIterates nevanlinna_pick_iterates(const SchurState& f, complex zeta, int N,
                                    bool omega_prefactor) {
    return schur_algorithm_values(f, zeta, N, omega_prefactor);
}

}  // namespace sumrule
