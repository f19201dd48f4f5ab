#include "sumrule/measure.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sumrule/families.hpp"
#include "sumrule/measure_node.hpp"
#include "sumrule/quadrature.hpp"
#include "sumrule/schur.hpp"

namespace sumrule {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Interval> merge_intervals(std::vector<Interval> v) {
    if (v.empty()) return v;
    std::sort(v.begin(), v.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    out.push_back(v[0]);
    for (size_t i = 1; i < v.size(); ++i) {
        if (v[i].lo <= out.back().hi + 1e-13)
            out.back().hi = std::max(out.back().hi, v[i].hi);
        else
            out.push_back(v[i]);
    }
    return out;
}

// split support pieces at interior cut points
std::vector<Interval> split_pieces(const std::vector<Interval>& pieces,
                                   std::vector<double> cuts, bool on_circle) {
    std::vector<Interval> out;
    for (const auto& p : pieces) {
        std::vector<double> inner;
        for (double c : cuts) {
            double cc = c;
            if (on_circle) {
                // bring the cut into the piece's coordinate window
                while (cc > p.lo + kTwoPi) cc -= kTwoPi;
                while (cc < p.lo) cc += kTwoPi;
            }
            if (cc > p.lo + 1e-12 && cc < p.hi - 1e-12) inner.push_back(cc);
        }
        std::sort(inner.begin(), inner.end());
        double lo = p.lo;
        for (double c : inner) {
            out.push_back({lo, c});
            lo = c;
        }
        out.push_back({lo, p.hi});
    }
    return out;
}

struct AbsContinuityBreak {
    double where;
};

}  // namespace

const std::vector<Atom> detail::MeasureNode::no_atoms_{};

double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t;
}

// ===========================================================================
// nodes
// ===========================================================================

namespace detail {

class RealReferenceNode final : public MeasureNode {
public:
    explicit RealReferenceNode(ReferenceTag tag) : tag_(tag) {
        using F = ReferenceTag::Family;
        switch (tag_.family) {
            case F::sc:
            case F::arcsine:
                support_ = {{-2.0, 2.0}};
                break;
            case F::mp: {
                auto [lo, hi] = ref::mp_edges(tag_.tau, tag_.mp_legacy_edges);
                support_ = {{lo, hi}};
                if (tag_.mp_legacy_edges)
                    norm_ = 1.0 / ref::mp_raw_mass(tag_.tau, true);
                break;
            }
            case F::kmk: {
                auto [lo, hi] = ref::kmk_edges(tag_.kappa1, tag_.kappa2);
                support_ = {{lo, hi}};
                break;
            }
            case F::d: {
                if (tag_.p == tag_.q) throw parameter_error("D(p,q): p != q required");
                support_ = {{std::min(tag_.p, tag_.q), std::max(tag_.p, tag_.q)}};
                break;
            }
            default:
                throw parameter_error("not a real-line family");
        }
    }

    Space space() const override { return Space::real_line; }

    double density(double x) const override {
        using F = ReferenceTag::Family;
        switch (tag_.family) {
            case F::sc:
                return ref::sc_density(x);
            case F::arcsine:
                return ref::arcsine_density(x);
            case F::mp: {
                const auto& s = support_[0];
                if (x <= s.lo || x >= s.hi) return 0.0;
                return norm_ * std::sqrt((x - s.lo) * (s.hi - x)) /
                       (2.0 * kPi * tag_.tau * x);
            }
            case F::kmk:
                return ref::kmk_density(x, tag_.kappa1, tag_.kappa2);
            case F::d:
                return ref::d_density(x, tag_.p, tag_.q);
            default:
                return 0.0;
        }
    }

    const std::vector<Interval>& support() const override { return support_; }

    bool symmetric() const override {
        using F = ReferenceTag::Family;
        return tag_.family == F::sc || tag_.family == F::arcsine ||
               (tag_.family == F::kmk && tag_.kappa1 == tag_.kappa2);
    }

    const ReferenceTag* reference_tag() const override { return &tag_; }

private:
    ReferenceTag tag_;
    std::vector<Interval> support_;
    double norm_ = 1.0;
};

class CircleReferenceNode final : public MeasureNode {
public:
    explicit CircleReferenceNode(ReferenceTag tag) : tag_(tag) {
        using F = ReferenceTag::Family;
        switch (tag_.family) {
            case F::unif:
                support_ = {{0.0, kTwoPi}};
                smooth_ = true;
                break;
            case F::gw: {
                double g = tag_.g;
                if (std::abs(g) < 1.0) {
                    support_ = {{0.0, kTwoPi}};
                    smooth_ = true;
                } else if (g <= -1.0) {
                    double tg = ref::gw_theta_g(g);
                    support_ = {{kPi - tg, kPi + tg}};
                } else {  // g >= 1
                    double tg = ref::gw_theta_g(g);
                    support_ = {{-tg, tg}};
                }
                break;
            }
            case F::hp: {
                if (tag_.d < 0.0) throw parameter_error("HP: d >= 0 required");
                if (tag_.d == 0.0) {
                    support_ = {{0.0, kTwoPi}};
                    smooth_ = true;
                } else {
                    double td = ref::hp_theta_d(tag_.d);
                    support_ = {{td, kTwoPi - td}};
                }
                break;
            }
            case F::pois: {
                if (std::abs(tag_.zeta) >= 1.0)
                    throw parameter_error("Pois: |zeta| < 1 required");
                support_ = {{0.0, kTwoPi}};
                smooth_ = true;
                break;
            }
            default:
                throw parameter_error("not a circle family");
        }
    }

    Space space() const override { return Space::circle; }

    double density(double theta) const override {
        using F = ReferenceTag::Family;
        switch (tag_.family) {
            case F::unif:
                return 1.0;
            case F::gw:
                return ref::gw_density(theta, tag_.g);
            case F::hp:
                return ref::hp_density(wrap_angle(theta), tag_.d);
            case F::pois:
                return ref::pois_density(theta, tag_.zeta);
            default:
                return 0.0;
        }
    }

    const std::vector<Interval>& support() const override { return support_; }

    bool symmetric() const override {
        using F = ReferenceTag::Family;
        if (tag_.family == F::pois) return std::abs(tag_.zeta.imag()) < 1e-15;
        return true;
    }

    bool smooth_full_circle() const override { return smooth_; }

    const ReferenceTag* reference_tag() const override { return &tag_; }

private:
    ReferenceTag tag_;
    std::vector<Interval> support_;
    bool smooth_ = false;
};

class MixtureNode final : public MeasureNode {
public:
    MixtureNode(double tau, Measure a, Measure b)
        : tau_(tau), a_(std::move(a)), b_(std::move(b)) {
        if (!(tau > 0.0 && tau < 1.0))
            throw parameter_error("mix: tau1 must be strictly inside (0,1)");
        if (a_.space() != b_.space())
            throw space_mismatch_error("mix: measures live on different spaces");
        std::vector<Interval> sup = a_.support();
        for (const auto& s : b_.support()) sup.push_back(s);
        if (space() == Space::circle) {
            // normalize windows before merging
            for (auto& s : sup) {
                if (s.hi - s.lo >= kTwoPi - 1e-12) { s = {0.0, kTwoPi}; continue; }
                double lo = wrap_angle(s.lo);
                s = {lo, lo + (s.hi - s.lo)};
            }
        }
        support_ = merge_intervals(std::move(sup));
        for (const Atom& at : a_.atoms()) add_atom({at.location, tau_ * at.mass});
        for (const Atom& at : b_.atoms())
            add_atom({at.location, (1.0 - tau_) * at.mass});
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& x, const Atom& y) { return x.location < y.location; });
    }

    Space space() const override { return a_.space(); }

    double density(double x) const override {
        return tau_ * a_.density(x) + (1.0 - tau_) * b_.density(x);
    }

    const std::vector<Atom>& atoms() const override { return atoms_; }
    const std::vector<Interval>& support() const override { return support_; }

    std::vector<double> interior_breakpoints() const override {
        std::vector<double> cuts = a_.interior_breakpoints();
        for (double c : b_.interior_breakpoints()) cuts.push_back(c);
        // component band edges are kinks of the mixture density
        for (const auto& s : a_.support()) { cuts.push_back(s.lo); cuts.push_back(s.hi); }
        for (const auto& s : b_.support()) { cuts.push_back(s.lo); cuts.push_back(s.hi); }
        return cuts;
    }

    bool symmetric() const override { return a_.symmetric() && b_.symmetric(); }
    bool smooth_full_circle() const override {
        return a_.smooth_full_circle() && b_.smooth_full_circle();
    }
    double ac_mass() const override {
        return tau_ * a_.ac_mass() + (1.0 - tau_) * b_.ac_mass();
    }

private:
    void add_atom(Atom at) {
        for (auto& e : atoms_) {
            if (std::abs(e.location - at.location) < 1e-13) {
                e.mass += at.mass;
                return;
            }
        }
        atoms_.push_back(at);
    }

    double tau_;
    Measure a_, b_;
    std::vector<Interval> support_;
    std::vector<Atom> atoms_;
};

class CompositeNode final : public MeasureNode {
public:
    CompositeNode(Measure ac, double ac_weight, std::vector<Atom> atoms, Space space)
        : ac_(std::move(ac)), w_(ac_weight), atoms_(std::move(atoms)), space_(space) {
        double total = w_;
        for (const Atom& a : atoms_) {
            if (!(a.mass > 0.0)) throw validation_error("atom masses must be > 0");
            total += a.mass;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw validation_error("composite masses must sum to 1");
        for (size_t i = 0; i < atoms_.size(); ++i)
            for (size_t j = i + 1; j < atoms_.size(); ++j)
                if (std::abs(atoms_[i].location - atoms_[j].location) < 1e-13)
                    throw validation_error("atom locations must be pairwise distinct");
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& x, const Atom& y) { return x.location < y.location; });
        if (ac_.valid()) support_ = ac_.support();
    }

    Space space() const override { return space_; }
    double density(double x) const override {
        return ac_.valid() ? w_ * ac_.density(x) : 0.0;
    }
    const std::vector<Atom>& atoms() const override { return atoms_; }
    const std::vector<Interval>& support() const override { return support_; }
    std::vector<double> interior_breakpoints() const override {
        return ac_.valid() ? ac_.interior_breakpoints() : std::vector<double>{};
    }
    bool symmetric() const override {
        if (ac_.valid() && !ac_.symmetric()) return false;
        for (const Atom& a : atoms_) {
            bool matched = false;
            double want = space_ == Space::circle ? wrap_angle(-a.location) : -a.location;
            for (const Atom& b : atoms_)
                if (std::abs(b.location - want) < 1e-12 &&
                    std::abs(b.mass - a.mass) < 1e-12) {
                    matched = true;
                    break;
                }
            if (!matched) return false;
        }
        return true;
    }
    bool smooth_full_circle() const override { return false; }
    double ac_mass() const override { return ac_.valid() ? w_ : 0.0; }

private:
    Measure ac_;
    double w_;
    std::vector<Atom> atoms_;
    Space space_;
    std::vector<Interval> support_;
};

class DensityNode final : public MeasureNode {
public:
    DensityNode(Space space, std::function<double(double)> f,
                std::vector<Interval> support, std::vector<double> cuts,
                bool symmetric, bool smooth)
        : space_(space), f_(std::move(f)), support_(std::move(support)),
          cuts_(std::move(cuts)), symmetric_(symmetric), smooth_(smooth) {}

    Space space() const override { return space_; }
    double density(double x) const override { return f_(x); }
    const std::vector<Interval>& support() const override { return support_; }
    std::vector<double> interior_breakpoints() const override { return cuts_; }
    bool symmetric() const override { return symmetric_; }
    bool smooth_full_circle() const override { return smooth_; }

private:
    Space space_;
    std::function<double(double)> f_;
    std::vector<Interval> support_;
    std::vector<double> cuts_;
    bool symmetric_, smooth_;
};

class AffineNode final : public MeasureNode {
public:
    AffineNode(Measure inner, double scale, double shift)
        : inner_(std::move(inner)), s_(scale), t_(shift) {
        if (inner_.space() != Space::real_line)
            throw space_mismatch_error("affine_image: real-line measures only");
        if (s_ == 0.0) throw parameter_error("affine_image: scale must be nonzero");
        for (const auto& p : inner_.support()) {
            double a = s_ * p.lo + t_, b = s_ * p.hi + t_;
            support_.push_back({std::min(a, b), std::max(a, b)});
        }
        support_ = merge_intervals(support_);
        for (const Atom& at : inner_.atoms()) atoms_.push_back({s_ * at.location + t_, at.mass});
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& x, const Atom& y) { return x.location < y.location; });
    }

    Space space() const override { return Space::real_line; }
    double density(double x) const override {
        return inner_.density((x - t_) / s_) / std::abs(s_);
    }
    const std::vector<Atom>& atoms() const override { return atoms_; }
    const std::vector<Interval>& support() const override { return support_; }
    std::vector<double> interior_breakpoints() const override {
        std::vector<double> cuts;
        for (double c : inner_.interior_breakpoints()) cuts.push_back(s_ * c + t_);
        return cuts;
    }
    double ac_mass() const override { return inner_.ac_mass(); }

private:
    Measure inner_;
    double s_, t_;
    std::vector<Interval> support_;
    std::vector<Atom> atoms_;
};

// Real measure defined by Jacobi coefficients: head then constant tail.
class JacobiCoeffNode final : public MeasureNode {
public:
    JacobiCoeffNode(std::vector<double> b, std::vector<double> a, double a_inf,
                    double b_inf) {
        prov_.b = std::move(b);
        prov_.a = std::move(a);
        prov_.a_inf = a_inf;
        prov_.b_inf = b_inf;
        if (prov_.a.size() != prov_.b.size())
            throw parameter_error("from_jacobi_coeffs: head arrays must have equal length");
        for (double ak : prov_.a)
            if (!(ak > 0.0)) throw support_violation_error("jacobi: a_k must be > 0");
        if (!(a_inf > 0.0)) throw support_violation_error("jacobi: a_inf must be > 0");
        support_ = {{b_inf - 2.0 * a_inf, b_inf + 2.0 * a_inf}};
        symmetric_ = b_inf == 0.0;
        for (double bk : prov_.b)
            if (std::abs(bk) > 1e-14) symmetric_ = false;
        // resonances of the head show up as narrow density peaks near the
        // eigenvalues of a finite section; split quadrature panels there
        const int n = static_cast<int>(prov_.b.size());
        if (n > 0) {
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n + 2, n + 2);
            for (int i = 0; i < n + 2; ++i) {
                T(i, i) = i < n ? prov_.b[i] : b_inf;
                if (i + 1 < n + 2) {
                    double ai = i < n ? prov_.a[i] : a_inf;
                    T(i, i + 1) = ai;
                    T(i + 1, i) = ai;
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            for (int i = 0; i < n + 2; ++i) {
                double lam = es.eigenvalues()(i);
                if (lam > support_[0].lo + 1e-9 && lam < support_[0].hi - 1e-9)
                    peaks_.push_back(lam);
            }
        }
    }

    Space space() const override { return Space::real_line; }

    std::vector<double> interior_breakpoints() const override { return peaks_; }

    double density(double x) const override {
        const auto& s = support_[0];
        if (x <= s.lo || x >= s.hi) return 0.0;
        const double ai = prov_.a_inf, bi = prov_.b_inf;
        double rad = 4.0 * ai * ai - (x - bi) * (x - bi);
        complex m((bi - x) / (2.0 * ai * ai), std::sqrt(std::max(rad, 0.0)) / (2.0 * ai * ai));
        for (size_t k = prov_.b.size(); k-- > 0;) {
            m = 1.0 / (prov_.b[k] - x - prov_.a[k] * prov_.a[k] * m);
        }
        return std::max(m.imag(), 0.0) / kPi;
    }

    const std::vector<Interval>& support() const override { return support_; }
    bool symmetric() const override { return symmetric_; }
    const RealCoeffProvenance* real_coeffs() const override { return &prov_; }

private:
    RealCoeffProvenance prov_;
    std::vector<Interval> support_;
    std::vector<double> peaks_;
    bool symmetric_ = false;
};

// Circle measure defined by Verblunsky coefficients: head then zero or real
// constant tail.  Density from boundary values of the Caratheodory function.
class VerblunskyCoeffNode final : public MeasureNode {
public:
    VerblunskyCoeffNode(std::vector<complex> alpha, double tail_gamma) {
        prov_.alpha = std::move(alpha);
        prov_.tail.start = static_cast<int>(prov_.alpha.size());
        prov_.tail.gamma = tail_gamma;
        prov_.tail.kind = tail_gamma == 0.0 ? VerblunskyTailInfo::Kind::zero
                                            : VerblunskyTailInfo::Kind::constant;
        if (std::abs(tail_gamma) >= 1.0)
            throw parameter_error("from_verblunsky: |tail gamma| < 1 required");
        for (const complex& a : prov_.alpha) {
            if (std::abs(a) >= 1.0)
                throw support_violation_error("from_verblunsky: |alpha_k| < 1 required");
            beta_.push_back(std::conj(a));
        }
        gamma_ = tail_gamma;
        if (gamma_ == 0.0) {
            support_ = {{0.0, kTwoPi}};
            smooth_ = true;
        } else {
            double ts = 2.0 * std::asin(std::abs(gamma_));
            support_ = {{ts, kTwoPi - ts}};
        }
        symmetric_ = true;
        for (const complex& a : prov_.alpha)
            if (std::abs(a.imag()) > 1e-14) symmetric_ = false;
        locate_peaks();
    }

    Space space() const override { return Space::circle; }

    double density(double theta) const override {
        complex z = std::polar(1.0, theta);
        complex f = schur_backward_eval(beta_, gamma_, z);
        complex F = (1.0 + z * f) / (1.0 - z * f);
        return std::max(F.real(), 0.0);
    }

    const std::vector<Interval>& support() const override { return support_; }
    bool symmetric() const override { return symmetric_; }
    bool smooth_full_circle() const override { return smooth_; }
    std::vector<double> interior_breakpoints() const override { return peaks_; }
    const CircleCoeffProvenance* circle_coeffs() const override { return &prov_; }

private:
    // Density peaks sit at the angles of the orthogonal-polynomial roots
    // close to the unit circle; quadrature panels split there so the
    // adaptive rules cannot step over a narrow peak.
    void locate_peaks() {
        const size_t n = prov_.alpha.size();
        if (n == 0) return;
        // Phi_{k+1} = z Phi_k - alpha_k Phi_k^* in the orientation whose
        // boundary magnitude at e^{-i theta} carries the density
        std::vector<complex> P{1.0}, S{1.0};
        for (size_t k = 0; k < n; ++k) {
            std::vector<complex> Pn(k + 2, complex(0.0)), Sn(k + 2, complex(0.0));
            for (size_t j = 0; j <= k; ++j) {
                Pn[j + 1] += P[j];
                Pn[j] -= prov_.alpha[k] * S[j];
                Sn[j] += S[j];
                Sn[j + 1] -= std::conj(prov_.alpha[k]) * P[j];
            }
            P = std::move(Pn);
            S = std::move(Sn);
        }
        Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
        for (size_t i = 0; i + 1 < n; ++i) C(i + 1, i) = 1.0;
        for (size_t i = 0; i < n; ++i) C(i, n - 1) = -P[i];  // monic
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
        for (int i = 0; i < static_cast<int>(n); ++i) {
            complex r = es.eigenvalues()(i);
            if (std::abs(r) > 0.3) peaks_.push_back(wrap_angle(-std::arg(r)));
        }
    }

    CircleCoeffProvenance prov_;
    std::vector<complex> beta_;  // standard parameters, conj of the stored head
    std::vector<double> peaks_;
    double gamma_ = 0.0;
    std::vector<Interval> support_;
    bool symmetric_ = false, smooth_ = false;
};

}  // namespace detail

// ===========================================================================
// Measure wrapper
// ===========================================================================

Measure::Measure(std::shared_ptr<const detail::MeasureNode> node)
    : node_(std::move(node)) {}

Space Measure::space() const { return node_->space(); }
double Measure::density(double x) const { return node_->density(x); }
const std::vector<Atom>& Measure::atoms() const { return node_->atoms(); }
const std::vector<Interval>& Measure::support() const { return node_->support(); }
std::vector<double> Measure::interior_breakpoints() const {
    return node_->interior_breakpoints();
}
bool Measure::symmetric() const { return node_->symmetric(); }
bool Measure::smooth_full_circle() const { return node_->smooth_full_circle(); }
double Measure::ac_mass() const { return node_->ac_mass(); }
const ReferenceTag* Measure::reference_tag() const { return node_->reference_tag(); }
const CircleCoeffProvenance* Measure::circle_coeffs() const {
    return node_->circle_coeffs();
}
const RealCoeffProvenance* Measure::real_coeffs() const {
    return node_->real_coeffs();
}

double Measure::integrate_ac(const std::function<double(double)>& f,
                             double tol) const {
    if (ac_mass() <= 0.0) return 0.0;
    quad::Options opt;
    opt.abs_tol = opt.rel_tol = tol;
    if (space() == Space::circle && smooth_full_circle()) {
        return quad::trapezoid_mean(
            [&](double th) { return f(th) * density(th); }, tol);
    }
    auto pieces = split_pieces(support(), interior_breakpoints(),
                               space() == Space::circle);
    double total = 0.0;
    for (const auto& p : pieces) {
        total += quad::integrate_with_substitution(
            [&](double x) {
                double g = density(x);
                return g > 0.0 ? f(x) * g : 0.0;
            },
            p.lo, p.hi, true, true, opt);
    }
    if (space() == Space::circle) total /= kTwoPi;
    return total;
}

DiscreteMeasure Measure::discretize(int nodes_per_half_piece) const {
    DiscreteMeasure d;
    if (ac_mass() > 0.0) {
        if (space() == Space::circle && smooth_full_circle()) {
            int m = std::max(4096, 8 * nodes_per_half_piece);
            d.x.reserve(m);
            d.w.reserve(m);
            for (int j = 0; j < m; ++j) {
                double th = kTwoPi * j / m;
                d.x.push_back(th);
                d.w.push_back(density(th) / m);
            }
        } else {
            auto pieces = split_pieces(support(), interior_breakpoints(),
                                       space() == Space::circle);
            // each half of a piece is substituted at its outer edge and split
            // into four panels so narrow density peaks stay resolved
            const auto& [gx, gw] = quad::gauss_legendre(nodes_per_half_piece);
            auto add_half = [&](double edge, double T, double sgn) {
                for (int panel = 0; panel < 4; ++panel) {
                    double t0 = T * panel / 4.0, t1 = T * (panel + 1) / 4.0;
                    double c = 0.5 * (t0 + t1), h = 0.5 * (t1 - t0);
                    for (int i = 0; i < nodes_per_half_piece; ++i) {
                        double t = c + h * gx[i];
                        double x = edge + sgn * t * t;
                        double g = density(x);
                        if (g <= 0.0) continue;
                        double w = h * gw[i] * 2.0 * t * g;
                        if (space() == Space::circle) w /= kTwoPi;
                        d.x.push_back(x);
                        d.w.push_back(w);
                    }
                }
            };
            for (const auto& p : pieces) {
                double m = 0.5 * (p.lo + p.hi);
                add_half(p.lo, std::sqrt(m - p.lo), +1.0);
                add_half(p.hi, std::sqrt(p.hi - m), -1.0);
            }
        }
    }
    for (const Atom& a : atoms()) {
        d.x.push_back(a.location);
        d.w.push_back(a.mass);
    }
    return d;
}

// ===========================================================================
// constructors
// ===========================================================================

namespace {
Measure wrap(std::shared_ptr<const detail::MeasureNode> n) {
    return Measure(std::move(n));
}

void check_coeff_measure_mass(const Measure& m, const char* what) {
    double mass = m.integrate_ac([](double) { return 1.0; }, 1e-10);
    if (std::abs(mass - 1.0) > 1e-7)
        throw validation_error(std::string(what) +
                               ": a.c. mass != 1; the coefficient head creates point "
                               "spectrum outside the band, which this representation "
                               "does not carry");
}
}  // namespace

Measure make_semicircle() {
    ReferenceTag t{};
    t.family = ReferenceTag::Family::sc;
    return wrap(std::make_shared<detail::RealReferenceNode>(t));
}

Measure make_arcsine() {
    ReferenceTag t{};
    t.family = ReferenceTag::Family::arcsine;
    return wrap(std::make_shared<detail::RealReferenceNode>(t));
}

Measure make_mp(double tau, bool legacy_edges) {
    ReferenceTag t{};
    t.family = ReferenceTag::Family::mp;
    t.tau = tau;
    t.mp_legacy_edges = legacy_edges;
    return wrap(std::make_shared<detail::RealReferenceNode>(t));
}

Measure make_kmk(double kappa1, double kappa2) {
    ReferenceTag t{};
    t.family = ReferenceTag::Family::kmk;
    t.kappa1 = kappa1;
    t.kappa2 = kappa2;
    return wrap(std::make_shared<detail::RealReferenceNode>(t));
}

Measure make_kmk(double kappa) { return make_kmk(kappa, kappa); }

Measure make_d(double p, double q) {
    ReferenceTag t{};
    t.family = ReferenceTag::Family::d;
    t.p = p;
    t.q = q;
    return wrap(std::make_shared<detail::RealReferenceNode>(t));
}

Measure make_unif() {
    ReferenceTag t{};
    t.family = ReferenceTag::Family::unif;
    return wrap(std::make_shared<detail::CircleReferenceNode>(t));
}

Measure make_gw(double g) {
    ReferenceTag t{};
    t.family = ReferenceTag::Family::gw;
    t.g = g;
    return wrap(std::make_shared<detail::CircleReferenceNode>(t));
}

Measure make_hp(double d) {
    ReferenceTag t{};
    t.family = ReferenceTag::Family::hp;
    t.d = d;
    return wrap(std::make_shared<detail::CircleReferenceNode>(t));
}

Measure make_pois(complex zeta) {
    ReferenceTag t{};
    t.family = ReferenceTag::Family::pois;
    t.zeta = zeta;
    return wrap(std::make_shared<detail::CircleReferenceNode>(t));
}

Measure mix(double tau1, const Measure& m1, const Measure& m2) {
    return wrap(std::make_shared<detail::MixtureNode>(tau1, m1, m2));
}

Measure with_atoms(const Measure& ac_part, std::vector<Atom> atoms) {
    double mass = 0.0;
    for (const Atom& a : atoms) mass += a.mass;
    if (mass >= 1.0) throw validation_error("with_atoms: atom masses must sum to < 1");
    return wrap(std::make_shared<detail::CompositeNode>(ac_part, 1.0 - mass,
                                                        std::move(atoms),
                                                        ac_part.space()));
}

Measure atoms_only(Space space, std::vector<Atom> atoms) {
    return wrap(std::make_shared<detail::CompositeNode>(Measure(), 0.0,
                                                        std::move(atoms), space));
}

Measure affine_image(const Measure& m, double scale, double shift) {
    return wrap(std::make_shared<detail::AffineNode>(m, scale, shift));
}

Measure from_jacobi_coeffs(std::vector<double> b_head, std::vector<double> a_head,
                           double a_inf, double b_inf) {
    auto m = wrap(std::make_shared<detail::JacobiCoeffNode>(
        std::move(b_head), std::move(a_head), a_inf, b_inf));
    check_coeff_measure_mass(m, "from_jacobi_coeffs");
    return m;
}

Measure from_verblunsky(std::vector<complex> alpha_head, double tail_gamma) {
    auto m = wrap(std::make_shared<detail::VerblunskyCoeffNode>(std::move(alpha_head),
                                                                tail_gamma));
    check_coeff_measure_mass(m, "from_verblunsky");
    return m;
}

Measure from_density(Space space, std::function<double(double)> density,
                     std::vector<Interval> support, std::vector<double> breakpoints,
                     bool symmetric, bool smooth_full_circle, double known_mass) {
    auto m = wrap(std::make_shared<detail::DensityNode>(
        space, std::move(density), std::move(support), std::move(breakpoints),
        symmetric, smooth_full_circle));
    if (known_mass < 0.0) {
        double mass = m.integrate_ac([](double) { return 1.0; }, 1e-10);
        if (std::abs(mass - 1.0) > 1e-8)
            throw validation_error("from_density: density does not integrate to 1");
    }
    return m;
}

// ===========================================================================
// operations
// ===========================================================================

double kl(const Measure& nu, const Measure& mu, const KlOptions& opt) {
    if (nu.space() != mu.space())
        throw space_mismatch_error("kl: measures live on different spaces");
    const bool circle = nu.space() == Space::circle;

    double total = 0.0;
    // atom part of nu requires matching atoms of mu
    for (const Atom& a : nu.atoms()) {
        const Atom* match = nullptr;
        for (const Atom& b : mu.atoms()) {
            double dist = circle ? std::abs(std::remainder(a.location - b.location, kTwoPi))
                                 : std::abs(a.location - b.location);
            if (dist < 1e-12) {
                match = &b;
                break;
            }
        }
        if (!match) return kInf;
        total += a.mass * std::log(a.mass / match->mass);
    }

    if (nu.ac_mass() > 0.0) {
        quad::Options qopt;
        qopt.abs_tol = qopt.rel_tol = opt.quad_tol;
        std::vector<double> cuts = nu.interior_breakpoints();
        for (double c : mu.interior_breakpoints()) cuts.push_back(c);
        for (const auto& s : mu.support()) {
            cuts.push_back(s.lo);
            cuts.push_back(s.hi);
        }
        auto pieces = split_pieces(nu.support(), cuts, circle);
        auto integrand = [&](double x) -> double {
            double gn = nu.density(x);
            if (gn <= opt.density_floor) return 0.0;
            double gm = mu.density(x);
            if (gm < opt.density_floor) throw AbsContinuityBreak{x};
            return gn * (std::log(gn) - std::log(gm));
        };
        try {
            double ac = 0.0;
            if (circle && nu.smooth_full_circle() && mu.smooth_full_circle()) {
                ac = quad::trapezoid_mean(integrand, opt.quad_tol);
            } else {
                for (const auto& p : pieces)
                    ac += quad::integrate_with_substitution(integrand, p.lo, p.hi, true,
                                                            true, qopt);
                if (circle) ac /= kTwoPi;
            }
            total += ac;
        } catch (const AbsContinuityBreak&) {
            return kInf;
        }
    }
    if (total > opt.divergence_cap) return kInf;
    return total;
}

std::pair<double, double> mixture_kl_decompose(double tau1, const Measure& m1,
                                               const Measure& m2, const Measure& mu,
                                               const KlOptions& opt) {
    if (!(tau1 > 0.0 && tau1 < 1.0))
        throw parameter_error("mixture_kl_decompose: tau1 in (0,1) required");
    Measure mixed = mix(tau1, m1, m2);
    double lhs = kl(mixed, mu, opt);
    double tau2 = 1.0 - tau1;
    double rhs = tau1 * kl(m1, mu, opt) + tau2 * kl(m2, mu, opt) -
                 tau1 * kl(m1, mixed, opt) - tau2 * kl(m2, mixed, opt);
    return {lhs, rhs};
}

std::vector<complex> trig_moments(const Measure& nu, int K) {
    if (nu.space() != Space::circle)
        throw space_mismatch_error("trig_moments: circle measures only");
    if (K < 0) throw parameter_error("trig_moments: K >= 0");
    // shared node set accurate for oscillations up to order K
    int per_half = std::max(256, 3 * K + 64);
    DiscreteMeasure d = nu.discretize(per_half);
    std::vector<complex> c(K + 1, complex(0.0, 0.0));
    for (size_t i = 0; i < d.x.size(); ++i) {
        complex rot = std::polar(1.0, -d.x[i]);
        complex cur(d.w[i], 0.0);
        for (int k = 0; k <= K; ++k) {
            c[k] += cur;
            cur *= rot;
        }
    }
    // the measure is normalized; pin c_0 exactly
    c[0] = complex(1.0, 0.0);
    return c;
}

SupportClassification support_classify(const Measure& m, double c_lo, double c_hi,
                                       double mass_tol) {
    if (!(c_lo < c_hi)) throw parameter_error("support_classify: c_lo < c_hi required");
    const bool circle = m.space() == Space::circle;
    SupportClassification out;
    out.inside_band = true;

    auto distance_from_band = [&](double x) -> double {
        if (circle) {
            double t = c_lo + std::fmod(x - c_lo, kTwoPi);
            if (t < c_lo) t += kTwoPi;
            if (t <= c_hi) return 0.0;
            return std::min(t - c_hi, c_lo + kTwoPi - t);
        }
        if (x < c_lo) return c_lo - x;
        if (x > c_hi) return x - c_hi;
        return 0.0;
    };

    for (const Atom& a : m.atoms())
        if (distance_from_band(a.location) > 1e-12) out.outliers.push_back(a);
    std::sort(out.outliers.begin(), out.outliers.end(), [&](const Atom& x, const Atom& y) {
        return distance_from_band(x.location) < distance_from_band(y.location);
    });

    if (m.ac_mass() > 0.0) {
        double outside = m.integrate_ac(
            [&](double x) { return distance_from_band(x) > 1e-12 ? 1.0 : 0.0; }, 1e-9);
        if (outside > mass_tol) out.inside_band = false;
    }
    return out;
}

}  // namespace sumrule
