#include "sumrule/oprl.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "sumrule/families.hpp"

namespace sumrule {

double JacobiCoeffs::b_k(int k) const {
    if (k < 1) throw parameter_error("b_k: k >= 1");
    if (k <= static_cast<int>(b.size())) return b[k - 1];
    if (tail && k >= tail->start_k) return tail->b_inf;
    throw parameter_error("b_k: index beyond stored coefficients");
}

double JacobiCoeffs::a_k(int k) const {
    if (k < 1) throw parameter_error("a_k: k >= 1");
    if (k <= static_cast<int>(a.size())) return a[k - 1];
    if (tail && k >= tail->start_k) return tail->a_inf;
    throw parameter_error("a_k: index beyond stored coefficients");
}

bool JacobiCoeffs::has_b(int k) const {
    return k >= 1 && (k <= static_cast<int>(b.size()) || (tail && k >= tail->start_k));
}
bool JacobiCoeffs::has_a(int k) const {
    return k >= 1 && (k <= static_cast<int>(a.size()) || (tail && k >= tail->start_k));
}

double CanonicalMoments::u_k(int k) const {
    if (k == 0) return -1.0;
    if (k < 1 || k > static_cast<int>(u.size()))
        throw parameter_error("u_k: index out of range");
    return u[k - 1];
}

double ZCoeffs::z_k(int k) const {
    if (k == 0) return 0.0;
    if (k < 1 || k > static_cast<int>(z.size()))
        throw parameter_error("z_k: index out of range");
    return z[k - 1];
}

namespace {

struct LanczosResult {
    std::vector<double> b, a;
    double ortho_residual;
    int valid_order;  // number of completed steps before breakdown
};

LanczosResult lanczos(const DiscreteMeasure& d, int N) {
    const int M = static_cast<int>(d.x.size());
    LanczosResult res;
    res.ortho_residual = 0.0;
    res.valid_order = 0;

    double total = 0.0;
    for (double w : d.w) total += w;
    if (total <= 0.0) throw numeric_error("lanczos: empty discretization");

    std::vector<std::vector<double>> q;
    std::vector<double> q0(M);
    for (int i = 0; i < M; ++i) q0[i] = std::sqrt(std::max(d.w[i], 0.0) / total);
    q.push_back(std::move(q0));

    auto dot = [M](const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (int i = 0; i < M; ++i) s += u[i] * v[i];
        return s;
    };

    double a_prev = 0.0;
    for (int k = 0; k < N; ++k) {
        const std::vector<double>& qk = q.back();
        std::vector<double> r(M);
        for (int i = 0; i < M; ++i) r[i] = d.x[i] * qk[i];
        double bk = dot(qk, r);
        res.b.push_back(bk);
        for (int i = 0; i < M; ++i) {
            r[i] -= bk * qk[i];
            if (k > 0) r[i] -= a_prev * q[k - 1][i];
        }
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& qj : q) {
                double c = dot(qj, r);
                for (int i = 0; i < M; ++i) r[i] -= c * qj[i];
            }
        }
        double ak = std::sqrt(dot(r, r));
        res.a.push_back(ak);
        res.valid_order = k + 1;
        if (ak < 1e-12) {
            // measure supported on <= k+1 points; no further coefficients
            return res;
        }
        std::vector<double> qn(M);
        for (int i = 0; i < M; ++i) qn[i] = r[i] / ak;
        double worst = 0.0;
        for (const auto& qj : q) worst = std::max(worst, std::abs(dot(qj, qn)));
        res.ortho_residual = std::max(res.ortho_residual, worst);
        q.push_back(std::move(qn));
        a_prev = ak;
    }
    return res;
}

std::optional<JacobiTail> tail_from_measure(const Measure& mu, int start_k) {
    if (const RealCoeffProvenance* rc = mu.real_coeffs()) {
        return JacobiTail{rc->a_inf, rc->b_inf,
                          std::min<int>(start_k, static_cast<int>(rc->b.size()) + 1)};
    }
    const ReferenceTag* t = mu.reference_tag();
    if (!t) return std::nullopt;
    using F = ReferenceTag::Family;
    switch (t->family) {
        case F::sc:
        case F::arcsine:
            return JacobiTail{1.0, 0.0, start_k};
        case F::mp: {
            return JacobiTail{std::sqrt(t->tau), 1.0 + t->tau, std::max(start_k, 2)};
        }
        case F::kmk: {
            double ue = ref::kmk_ue(t->kappa1, t->kappa2);
            double uo = ref::kmk_uo(t->kappa1, t->kappa2);
            double a_inf = std::sqrt((1.0 - ue * ue) * (1.0 - uo * uo));
            return JacobiTail{a_inf, -2.0 * ue * uo, std::max(start_k, 2)};
        }
        case F::d: {
            double a_inf = std::abs(t->q - t->p) / 4.0;
            return JacobiTail{a_inf, (t->p + t->q) / 2.0, std::max(start_k, 2)};
        }
        default:
            return std::nullopt;
    }
}

}  // namespace

JacobiCoeffs jacobi_from_measure(const Measure& mu, int N) {
    if (mu.space() != Space::real_line)
        throw space_mismatch_error("jacobi_from_measure: real-line measures only");
    if (N < 1) throw parameter_error("jacobi_from_measure: N >= 1");

    if (const RealCoeffProvenance* rc = mu.real_coeffs()) {
        // measure defined by its coefficients; read them off
        JacobiCoeffs J;
        JacobiTail tail{rc->a_inf, rc->b_inf, static_cast<int>(rc->b.size()) + 1};
        for (int k = 1; k <= N; ++k) {
            J.b.push_back(k <= static_cast<int>(rc->b.size()) ? rc->b[k - 1] : tail.b_inf);
            J.a.push_back(k <= static_cast<int>(rc->a.size()) ? rc->a[k - 1] : tail.a_inf);
        }
        J.tail = tail;
        return J;
    }

    int per_half = std::max(320, 2 * N + 60);
    for (int attempt = 0; attempt < 4; ++attempt) {
        DiscreteMeasure d = mu.discretize(per_half);
        if (static_cast<int>(d.x.size()) < N && mu.ac_mass() <= 0.0) {
            throw trivial_measure_error(
                "jacobi_from_measure: measure has fewer than N support points",
                static_cast<int>(d.x.size()));
        }
        if (mu.ac_mass() > 0.0 && attempt < 3) {
            double mass = 0.0;
            for (double w : d.w) mass += w;
            if (std::abs(mass - 1.0) > 1e-11) {
                per_half *= 2;  // narrow density peaks: refine the node set
                continue;
            }
        }
        LanczosResult r = lanczos(d, N);
        if (r.valid_order < N) {
            if (mu.ac_mass() <= 0.0)
                throw trivial_measure_error(
                    "jacobi_from_measure: measure supported on too few points",
                    r.valid_order);
            throw numeric_error("jacobi_from_measure: Lanczos breakdown");
        }
        if (r.ortho_residual <= 1e-10 || attempt == 3) {
            JacobiCoeffs J;
            J.b = std::move(r.b);
            J.a = std::move(r.a);
            if (!J.a.empty() && J.a.back() < 1e-12) J.a.pop_back();  // trivial at N
            else J.tail = tail_from_measure(mu, N + 1);
            return J;
        }
        per_half *= 2;  // loss of orthogonality: refine the discretization
    }
    throw numeric_error("jacobi_from_measure: discretization did not stabilize");
}

CanonicalMoments canonical_from_jacobi(const JacobiCoeffs& J) {
    const int nb = static_cast<int>(J.b.size());
    const int na = static_cast<int>(J.a.size());
    CanonicalMoments out;
    // u_{2k-1} from b_k, u_{2k} from a_k
    auto push_checked = [&](double v) {
        double av = std::abs(v);
        if (av > 1.0 + 1e-8)
            throw support_violation_error(
                "canonical_from_jacobi: |u_k| > 1; measure not supported on [-2,2]");
        if (av >= 1.0 - 1e-10) {
            out.near_trivial = true;
            v = std::clamp(v, -1.0 + 1e-12, 1.0 - 1e-12);
        }
        out.u.push_back(v);
    };
    auto u_at = [&](int k) -> double {
        if (k <= 0) return k == 0 ? -1.0 : 0.0;
        return out.u[k - 1];
    };
    for (int k = 1; k <= nb; ++k) {
        double den = 1.0 - u_at(2 * k - 2);
        push_checked((J.b[k - 1] + (1.0 + u_at(2 * k - 2)) * u_at(2 * k - 3)) / den);
        if (k > na) break;
        double u_odd = u_at(2 * k - 1);
        double den2 = (1.0 - u_at(2 * k - 2)) * (1.0 - u_odd * u_odd);
        push_checked(J.a[k - 1] * J.a[k - 1] / den2 - 1.0);
    }
    return out;
}

JacobiCoeffs jacobi_from_canonical(const CanonicalMoments& u) {
    JacobiCoeffs J;
    const int M = static_cast<int>(u.u.size());
    auto u_at = [&](int k) -> double {
        if (k == 0) return -1.0;
        if (k < 0) return 0.0;
        return u.u_k(k);
    };
    for (int k = 1; 2 * k - 1 <= M; ++k)
        J.b.push_back((1.0 - u_at(2 * k - 2)) * u_at(2 * k - 1) -
                      (1.0 + u_at(2 * k - 2)) * u_at(2 * k - 3));
    for (int k = 1; 2 * k <= M; ++k) {
        double uo = u_at(2 * k - 1);
        double a2 = (1.0 - u_at(2 * k - 2)) * (1.0 - uo * uo) * (1.0 + u_at(2 * k));
        if (a2 <= 0.0)
            throw support_violation_error("jacobi_from_canonical: a_k^2 <= 0");
        J.a.push_back(std::sqrt(a2));
    }
    return J;
}

ZCoeffs z_from_jacobi(const JacobiCoeffs& J) {
    ZCoeffs out;
    const int nb = static_cast<int>(J.b.size());
    const int na = static_cast<int>(J.a.size());
    double z_prev = 0.0;  // z_0
    for (int k = 1; k <= nb; ++k) {
        double z_odd = J.b[k - 1] - z_prev;  // z_{2k-1}
        if (z_odd < -1e-10)
            throw support_violation_error(
                "z_from_jacobi: negative z; measure not supported on [0,inf)");
        z_odd = std::max(z_odd, 0.0);
        out.z.push_back(z_odd);
        if (k > na) break;
        double ak2 = J.a[k - 1] * J.a[k - 1];
        if (z_odd == 0.0) {
            if (ak2 > 1e-20)
                throw support_violation_error("z_from_jacobi: division by zero z");
            out.z.push_back(0.0);
            z_prev = 0.0;
            continue;
        }
        double z_even = ak2 / z_odd;  // z_{2k}
        out.z.push_back(z_even);
        z_prev = z_even;
    }
    return out;
}

JacobiCoeffs jacobi_from_z(const ZCoeffs& z) {
    JacobiCoeffs J;
    const int M = static_cast<int>(z.z.size());
    for (int k = 1; 2 * k - 1 <= M; ++k) {
        if (z.z_k(2 * k - 1) < 0.0 || (2 * k <= M && z.z_k(2 * k) < 0.0))
            throw support_violation_error("jacobi_from_z: z_k >= 0 required");
        J.b.push_back(z.z_k(2 * k - 2) + z.z_k(2 * k - 1));
        if (2 * k <= M) J.a.push_back(std::sqrt(z.z_k(2 * k - 1) * z.z_k(2 * k)));
    }
    return J;
}

Measure finite_jacobi_spectral_measure(const JacobiCoeffs& J, int n) {
    if (n < 1) throw parameter_error("finite_jacobi_spectral_measure: n >= 1");
    if (static_cast<int>(J.b.size()) < n && !J.tail)
        throw parameter_error("finite_jacobi_spectral_measure: need b_1..b_n");
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        T(i, i) = J.b_k(i + 1);
        if (i + 1 < n) {
            double ai = J.a_k(i + 1);
            T(i, i + 1) = ai;
            T(i + 1, i) = ai;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    if (es.info() != Eigen::Success)
        throw numeric_error("finite_jacobi_spectral_measure: eigensolver failure");
    std::vector<Atom> atoms;
    for (int i = 0; i < n; ++i) {
        double m = es.eigenvectors()(0, i);
        atoms.push_back({es.eigenvalues()(i), m * m});
    }
    // coalesce numerically equal eigenvalues
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.location < b.location; });
    std::vector<Atom> merged;
    for (const Atom& a : atoms) {
        if (!merged.empty() && std::abs(a.location - merged.back().location) < 1e-13)
            merged.back().mass += a.mass;
        else
            merged.push_back(a);
    }
    double total = 0.0;
    for (auto& a : merged) total += a.mass;
    for (auto& a : merged) a.mass /= total;
    return atoms_only(Space::real_line, std::move(merged));
}

OprlValues evaluate_oprl(const JacobiCoeffs& J, double x, int n) {
    OprlValues v;
    v.p.resize(n + 1);
    v.P.resize(n + 1);
    v.p[0] = 1.0;
    v.P[0] = 1.0;
    if (n == 0) return v;
    v.P[1] = x - J.b_k(1);
    v.p[1] = (x - J.b_k(1)) / J.a_k(1);
    for (int k = 1; k < n; ++k) {
        double bk1 = J.b_k(k + 1), ak = J.a_k(k), ak1 = J.a_k(k + 1);
        v.p[k + 1] = ((x - bk1) * v.p[k] - ak * v.p[k - 1]) / ak1;
        v.P[k + 1] = (x - bk1) * v.P[k] - ak * ak * v.P[k - 1];
    }
    return v;
}

}  // namespace sumrule
