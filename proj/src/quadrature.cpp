#include "sumrule/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "sumrule/errors.hpp"

namespace sumrule::quad {

namespace {

std::pair<std::vector<double>, std::vector<double>> compute_gl(int n) {
    // Newton iteration on P_n with the usual Chebyshev initial guess.
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p0 = 0.0, p1 = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0;
            p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        // recompute derivative at the converged node
        p0 = 1.0;
        p1 = t;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[i] = -t;
        x[n - 1 - i] = t;
        double wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
    return {std::move(x), std::move(w)};
}

double gl_sum(const std::function<double(double)>& f, double a, double b, int n,
              double* abs_sum = nullptr) {
    const auto& [x, w] = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0, sa = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = w[i] * f(c + h * x[i]);
        s += v;
        sa += std::abs(v);
    }
    if (abs_sum) *abs_sum = sa * h;
    return s * h;
}

struct Seg {
    double a, b;
    int depth;
};

}  // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mu;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gl(n)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt) {
    if (!(a < b)) return 0.0;
    std::vector<Seg> stack{{a, b, 0}};
    double total = 0.0;
    long segments = 0;
    // first coarse pass for the scale of the relative test
    double scale = std::abs(gl_sum(f, a, b, 30));
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        double coarse = gl_sum(f, s.a, s.b, 15);
        double abs_fine = 0.0;
        double fine = gl_sum(f, s.a, s.b, 30, &abs_fine);
        double err = std::abs(fine - coarse);
        double tol = std::max(opt.abs_tol, opt.rel_tol * std::max(scale, std::abs(total)));
        // per-segment budget proportional to length, floored at the level of
        // evaluation noise on this segment
        double budget = std::max(tol * (s.b - s.a) / (b - a), 1e-13 * abs_fine);
        if (err <= std::max(budget, 1e-300) || s.depth >= opt.max_depth ||
            ++segments > 50000 || (s.b - s.a) < 1e-15 * (b - a)) {
            total += fine;
        } else {
            double m = 0.5 * (s.a + s.b);
            stack.push_back({s.a, m, s.depth + 1});
            stack.push_back({m, s.b, s.depth + 1});
        }
    }
    return total;
}

namespace {

// Graded dyadic composite Gauss-Legendre on [0, T] for integrands with an
// integrable endpoint singularity at 0 (after the x = edge +- t^2 substitution
// these behave like powers of t times powers of log t).  Fixed panels keep the
// rule immune to evaluation noise near the singular edge.  Below t_stop the
// reconstruction edge + t^2 loses all relative accuracy in t^2, so the final
// sliver is integrated from a local model A + B log t + C t^2 fitted in the
// safe zone instead of being sampled.
double graded_dyadic(const std::function<double(double)>& f, double T,
                     double edge_scale, const Options& opt) {
    if (T <= 0.0) return 0.0;
    const double t_stop = std::min(T / 64.0, 1e-4 * std::sqrt(1.0 + edge_scale));
    double total = 0.0;
    double hi = T;
    while (hi > t_stop * 1.000001) {
        double lo = std::max(hi * 0.5, t_stop);
        Options panel = opt;
        panel.abs_tol = std::max(opt.abs_tol * (hi - lo) / T, 1e-16);
        total += integrate(f, lo, hi, panel);
        hi = lo;
    }
    // Fit y = A + B log t + C t + D t log t + E t^2 at t_stop * {1,2,4,8,16}
    // and integrate the model over [0, t_stop].  This covers the local
    // behavior of substituted integrands at both +-1/2-power edges, including
    // logarithmic factors from entropy integrands.
    constexpr int nfit = 5;
    double M[nfit][nfit + 1];
    for (int i = 0; i < nfit; ++i) {
        double t = t_stop * static_cast<double>(1 << i);
        double l = std::log(t);
        M[i][0] = 1.0;
        M[i][1] = l;
        M[i][2] = t;
        M[i][3] = t * l;
        M[i][4] = t * t;
        M[i][5] = f(t);
    }
    // Gaussian elimination with partial pivoting
    bool ok = true;
    for (int c = 0; c < nfit && ok; ++c) {
        int p = c;
        for (int r = c + 1; r < nfit; ++r)
            if (std::abs(M[r][c]) > std::abs(M[p][c])) p = r;
        if (std::abs(M[p][c]) < 1e-300) { ok = false; break; }
        if (p != c)
            for (int j = 0; j <= nfit; ++j) std::swap(M[p][j], M[c][j]);
        for (int r = 0; r < nfit; ++r) {
            if (r == c) continue;
            double fac = M[r][c] / M[c][c];
            for (int j = c; j <= nfit; ++j) M[r][j] -= fac * M[c][j];
        }
    }
    if (ok) {
        double coef[nfit];
        for (int i = 0; i < nfit; ++i) coef[i] = M[i][nfit] / M[i][i];
        const double s = t_stop, ls = std::log(t_stop);
        total += coef[0] * s + coef[1] * s * (ls - 1.0) + coef[2] * s * s / 2.0 +
                 coef[3] * s * s * (0.5 * ls - 0.25) + coef[4] * s * s * s / 3.0;
    }
    return total;
}

}  // namespace

double integrate_with_substitution(const std::function<double(double)>& f,
                                   double a, double b, bool subst_left,
                                   bool subst_right, const Options& opt) {
    if (!(a < b)) return 0.0;
    const double m = 0.5 * (a + b);
    double left, right;
    if (subst_left) {
        const double tmax = std::sqrt(m - a);
        left = graded_dyadic([&](double t) { return 2.0 * t * f(a + t * t); }, tmax,
                             std::abs(a), opt);
    } else {
        left = integrate(f, a, m, opt);
    }
    if (subst_right) {
        const double tmax = std::sqrt(b - m);
        right = graded_dyadic([&](double t) { return 2.0 * t * f(b - t * t); }, tmax,
                              std::abs(b), opt);
    } else {
        right = integrate(f, m, b, opt);
    }
    return left + right;
}

double trapezoid_mean(const std::function<double(double)>& f, double tol,
                      int n0, int n_max) {
    const double two_pi = 2.0 * std::numbers::pi;
    int n = n0;
    double prev = 0.0;
    bool have_prev = false;
    while (n <= n_max) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += f(two_pi * j / n);
        double cur = s / n;
        if (have_prev && std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur)))
            return cur;
        prev = cur;
        have_prev = true;
        n *= 2;
    }
    return prev;
}

void edge_substituted_nodes(double a, double b, int n_per_half,
                            std::vector<double>& xs, std::vector<double>& ws) {
    const auto& [t, w] = gauss_legendre(n_per_half);
    const double m = 0.5 * (a + b);
    const double tl = std::sqrt(m - a), tr = std::sqrt(b - m);
    xs.reserve(xs.size() + 2 * n_per_half);
    ws.reserve(ws.size() + 2 * n_per_half);
    for (int i = 0; i < n_per_half; ++i) {
        // left half: x = a + s^2, s in [0, tl]
        double s = 0.5 * tl * (t[i] + 1.0);
        double jw = 0.5 * tl * w[i] * 2.0 * s;
        xs.push_back(a + s * s);
        ws.push_back(jw);
    }
    for (int i = 0; i < n_per_half; ++i) {
        // right half: x = b - s^2, s in [0, tr]
        double s = 0.5 * tr * (t[i] + 1.0);
        double jw = 0.5 * tr * w[i] * 2.0 * s;
        xs.push_back(b - s * s);
        ws.push_back(jw);
    }
}

}  // namespace sumrule::quad
