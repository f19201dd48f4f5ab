#include "sumrule/mappings.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sumrule/measure_node.hpp"
#include "sumrule/quadrature.hpp"

namespace sumrule {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_circle(const Measure& m, const char* who) {
    if (m.space() != Space::circle)
        throw space_mismatch_error(std::string(who) + ": circle measure required");
}

void require_symmetric_circle(const Measure& nu, const char* who) {
    require_circle(nu, who);
    if (!nu.symmetric())
        throw symmetry_error(std::string(who) + ": symmetric measure required");
    // spot check the declared symmetry on a few nodes
    for (double th : {0.37, 1.1, 2.2, 2.9}) {
        double a = nu.density(th), b = nu.density(kTwoPi - th);
        if (std::abs(a - b) > 1e-10 * std::max(1.0, std::abs(a)))
            throw symmetry_error(std::string(who) + ": density fails symmetry check");
    }
}

std::vector<Interval> merge_sorted(std::vector<Interval> v) {
    std::sort(v.begin(), v.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const auto& s : v) {
        if (!out.empty() && s.lo <= out.back().hi + 1e-13)
            out.back().hi = std::max(out.back().hi, s.hi);
        else
            out.push_back(s);
    }
    return out;
}

// split circle arcs at multiples of pi so a monotone map can be applied
std::vector<Interval> split_at_multiples_of_pi(const std::vector<Interval>& arcs) {
    std::vector<Interval> out;
    for (const auto& a : arcs) {
        double lo = a.lo;
        double cut = std::ceil(lo / kPi) * kPi;
        while (cut < a.hi - 1e-14) {
            if (cut > lo + 1e-14) {
                out.push_back({lo, cut});
                lo = cut;
            }
            cut += kPi;
        }
        out.push_back({lo, a.hi});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Szego pushforward: x = 2 cos(theta), symmetric nu
// ---------------------------------------------------------------------------
class SzPushNode final : public detail::MeasureNode {
public:
    explicit SzPushNode(Measure nu) : nu_(std::move(nu)) {
        for (const auto& arc : split_at_multiples_of_pi(nu_.support())) {
            double x1 = 2.0 * std::cos(arc.hi), x2 = 2.0 * std::cos(arc.lo);
            support_.push_back({std::min(x1, x2), std::max(x1, x2)});
        }
        support_ = merge_sorted(std::move(support_));
        // conjugate atom pairs merge; theta = 0 -> x = 2, theta = pi -> x = -2
        std::vector<bool> used(nu_.atoms().size(), false);
        const auto& atoms = nu_.atoms();
        for (size_t i = 0; i < atoms.size(); ++i) {
            if (used[i]) continue;
            double th = wrap_angle(atoms[i].location);
            double mass = atoms[i].mass;
            if (th > 1e-12 && th < kPi - 1e-12) {
                for (size_t j = i + 1; j < atoms.size(); ++j) {
                    if (used[j]) continue;
                    if (std::abs(wrap_angle(atoms[j].location) - (kTwoPi - th)) < 1e-12) {
                        mass += atoms[j].mass;
                        used[j] = true;
                        break;
                    }
                }
            } else if (th >= kPi - 1e-12 && th < kPi + 1e-12) {
                th = kPi;
            } else if (!(th <= 1e-12)) {
                // theta in (pi, 2pi): mirror partner handles it
                double mirror = kTwoPi - th;
                bool has_partner = false;
                for (size_t j = 0; j < atoms.size(); ++j)
                    if (j != i && std::abs(wrap_angle(atoms[j].location) - mirror) < 1e-12)
                        has_partner = true;
                if (has_partner) continue;  // merged when the partner is visited
                th = mirror;                // lone atom below the axis of symmetry
            }
            atoms_.push_back({2.0 * std::cos(std::min(th, kPi)), mass});
            used[i] = true;
        }
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& a, const Atom& b) { return a.location < b.location; });
    }

    Space space() const override { return Space::real_line; }
    double density(double x) const override {
        if (std::abs(x) >= 2.0) return 0.0;
        double theta = std::acos(0.5 * x);
        return nu_.density(theta) / (kPi * std::sqrt(4.0 - x * x));
    }
    const std::vector<Atom>& atoms() const override { return atoms_; }
    const std::vector<Interval>& support() const override { return support_; }
    std::vector<double> interior_breakpoints() const override {
        std::vector<double> cuts;
        for (double c : nu_.interior_breakpoints()) cuts.push_back(2.0 * std::cos(c));
        return cuts;
    }
    double ac_mass() const override {
        double m = 1.0;
        for (const Atom& a : atoms_) m -= a.mass;
        return m;
    }

private:
    Measure nu_;
    std::vector<Interval> support_;
    std::vector<Atom> atoms_;
};

// ---------------------------------------------------------------------------
// Szego pullback: symmetric preimage of mu on [-2,2]
// ---------------------------------------------------------------------------
class SzPullNode final : public detail::MeasureNode {
public:
    explicit SzPullNode(Measure mu) : mu_(std::move(mu)) {
        for (const auto& p : mu_.support()) {
            if (p.lo < -2.0 - 1e-10 || p.hi > 2.0 + 1e-10)
                throw support_violation_error("szego_pull: support must lie in [-2,2]");
            double t1 = std::acos(std::clamp(0.5 * p.hi, -1.0, 1.0));
            double t2 = std::acos(std::clamp(0.5 * p.lo, -1.0, 1.0));
            support_.push_back({t1, t2});
            support_.push_back({kTwoPi - t2, kTwoPi - t1});
        }
        support_ = merge_sorted(std::move(support_));
        for (const Atom& a : mu_.atoms()) {
            if (std::abs(a.location) > 2.0 + 1e-12)
                throw support_violation_error("szego_pull: atom outside [-2,2]");
            double th = std::acos(std::clamp(0.5 * a.location, -1.0, 1.0));
            if (th < 1e-12 || th > kPi - 1e-12) {
                atoms_.push_back({th < 1e-12 ? 0.0 : kPi, a.mass});
            } else {
                atoms_.push_back({th, 0.5 * a.mass});
                atoms_.push_back({kTwoPi - th, 0.5 * a.mass});
            }
        }
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& x, const Atom& y) { return x.location < y.location; });
    }

    Space space() const override { return Space::circle; }
    double density(double theta) const override {
        double th = wrap_angle(theta);
        if (th > kPi) th = kTwoPi - th;
        double s = std::sin(th);
        if (s <= 0.0) return 0.0;
        return kTwoPi * s * mu_.density(2.0 * std::cos(th));
    }
    const std::vector<Atom>& atoms() const override { return atoms_; }
    const std::vector<Interval>& support() const override { return support_; }
    std::vector<double> interior_breakpoints() const override {
        std::vector<double> cuts;
        for (double c : mu_.interior_breakpoints()) {
            double th = std::acos(std::clamp(0.5 * c, -1.0, 1.0));
            cuts.push_back(th);
            cuts.push_back(kTwoPi - th);
        }
        return cuts;
    }
    bool symmetric() const override { return true; }
    double ac_mass() const override { return mu_.ac_mass(); }

private:
    Measure mu_;
    std::vector<Interval> support_;
    std::vector<Atom> atoms_;
};

// ---------------------------------------------------------------------------
// Delsarte-Genin pushforward
//   sign +: x = 2 d cos(theta/2), theta in [0, 2pi], mass at z=1 split
//   sign -: x = 2 d sin(theta/2), theta in [-pi, pi], mass at z=-1 split
// ---------------------------------------------------------------------------
class DgPushNode final : public detail::MeasureNode {
public:
    DgPushNode(Measure nu, double d, int sign) : nu_(std::move(nu)), d_(d), sign_(sign) {
        if (!(d > 0.0)) throw parameter_error("DG: scale d must be > 0");
        for (const auto& arcIn : nu_.support()) {
            // normalize arc into the window of the chosen branch
            double window_lo = sign_ > 0 ? 0.0 : -kPi;
            double lo = arcIn.lo, len = arcIn.hi - arcIn.lo;
            if (len >= kTwoPi - 1e-12) {
                support_.push_back({-2.0 * d_, 2.0 * d_});
                continue;
            }
            lo = window_lo + std::fmod(lo - window_lo, kTwoPi);
            if (lo < window_lo) lo += kTwoPi;
            double hi = lo + len;
            std::vector<Interval> parts;
            if (hi <= window_lo + kTwoPi + 1e-14) {
                parts.push_back({lo, std::min(hi, window_lo + kTwoPi)});
                if (hi > window_lo + kTwoPi)
                    parts.push_back({window_lo, hi - kTwoPi});
            }
            for (const auto& p : parts) support_.push_back(map_arc(p));
        }
        support_ = merge_sorted(std::move(support_));
        for (const Atom& a : nu_.atoms()) {
            double th = wrap_angle(a.location);
            bool at_split = sign_ > 0 ? (th < 1e-12 || th > kTwoPi - 1e-12)
                                      : (std::abs(th - kPi) < 1e-12);
            if (at_split) {
                add_atom({2.0 * d_, 0.5 * a.mass});
                add_atom({-2.0 * d_, 0.5 * a.mass});
            } else {
                add_atom({forward(th), a.mass});
            }
        }
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& x, const Atom& y) { return x.location < y.location; });
    }

    Space space() const override { return Space::real_line; }
    double density(double x) const override {
        if (std::abs(x) >= 2.0 * d_) return 0.0;
        return nu_.density(inverse(x)) / (kPi * std::sqrt(4.0 * d_ * d_ - x * x));
    }
    const std::vector<Atom>& atoms() const override { return atoms_; }
    const std::vector<Interval>& support() const override { return support_; }
    std::vector<double> interior_breakpoints() const override {
        std::vector<double> cuts;
        for (double c : nu_.interior_breakpoints()) cuts.push_back(forward_wrapped(c));
        return cuts;
    }
    bool symmetric() const override { return nu_.symmetric(); }
    double ac_mass() const override {
        double m = 1.0;
        for (const Atom& a : atoms_) m -= a.mass;
        return m;
    }

private:
    double forward(double theta) const {
        return sign_ > 0 ? 2.0 * d_ * std::cos(0.5 * theta)
                         : 2.0 * d_ * std::sin(0.5 * theta);
    }
    double forward_wrapped(double theta) const {
        double window_lo = sign_ > 0 ? 0.0 : -kPi;
        double t = window_lo + std::fmod(theta - window_lo, kTwoPi);
        if (t < window_lo) t += kTwoPi;
        return forward(t);
    }
    double inverse(double x) const {
        double c = std::clamp(x / (2.0 * d_), -1.0, 1.0);
        return sign_ > 0 ? 2.0 * std::acos(c) : 2.0 * std::asin(c);
    }
    Interval map_arc(const Interval& a) const {
        double x1 = forward(a.lo), x2 = forward(a.hi);
        return {std::min(x1, x2), std::max(x1, x2)};
    }
    void add_atom(Atom a) {
        for (auto& e : atoms_)
            if (std::abs(e.location - a.location) < 1e-13) {
                e.mass += a.mass;
                return;
            }
        atoms_.push_back(a);
    }

    Measure nu_;
    double d_;
    int sign_;
    std::vector<Interval> support_;
    std::vector<Atom> atoms_;
};

// ---------------------------------------------------------------------------
// DG pullback (+ branch): theta = 2 arccos(x / 2d)
// ---------------------------------------------------------------------------
class DgPullNode final : public detail::MeasureNode {
public:
    DgPullNode(Measure mu, double d) : mu_(std::move(mu)), d_(d) {
        if (!(d > 0.0)) throw parameter_error("DG pull: d > 0 required");
        for (const auto& p : mu_.support()) {
            if (p.lo < -2.0 * d_ - 1e-10 || p.hi > 2.0 * d_ + 1e-10)
                throw support_violation_error("dg_pull: support must lie in [-2d, 2d]");
            support_.push_back({inverse(p.hi), inverse(p.lo)});
        }
        support_ = merge_sorted(std::move(support_));
        double edge_mass = 0.0;
        for (const Atom& a : mu_.atoms()) {
            if (std::abs(std::abs(a.location) - 2.0 * d_) < 1e-12) {
                edge_mass += a.mass;  // +-2d recombine at z = 1
            } else {
                atoms_.push_back({inverse(a.location), a.mass});
            }
        }
        if (edge_mass > 0.0) atoms_.push_back({0.0, edge_mass});
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& x, const Atom& y) { return x.location < y.location; });
    }

    Space space() const override { return Space::circle; }
    double density(double theta) const override {
        double th = wrap_angle(theta);
        double s = std::sin(0.5 * th);
        return kTwoPi * d_ * s * mu_.density(2.0 * d_ * std::cos(0.5 * th));
    }
    const std::vector<Atom>& atoms() const override { return atoms_; }
    const std::vector<Interval>& support() const override { return support_; }
    std::vector<double> interior_breakpoints() const override {
        std::vector<double> cuts;
        for (double c : mu_.interior_breakpoints()) cuts.push_back(inverse(c));
        return cuts;
    }
    bool symmetric() const override { return mu_.symmetric(); }
    double ac_mass() const override { return mu_.ac_mass(); }

private:
    double inverse(double x) const {
        return 2.0 * std::acos(std::clamp(x / (2.0 * d_), -1.0, 1.0));
    }

    Measure mu_;
    double d_;
    std::vector<Interval> support_;
    std::vector<Atom> atoms_;
};

// ---------------------------------------------------------------------------
// DVZ: reweight DG_1(nu) by (2 +- x)/2
// ---------------------------------------------------------------------------
class DvzNode final : public detail::MeasureNode {
public:
    DvzNode(Measure dg_image, int sign) : dg_(std::move(dg_image)), sign_(sign) {
        support_ = dg_.support();
        // total mass stays 1 by the symmetry of DG_1(nu)
        for (const Atom& a : dg_.atoms()) {
            double w = weight(a.location);
            if (w * a.mass > 1e-300) atoms_.push_back({a.location, w * a.mass});
        }
    }

    Space space() const override { return Space::real_line; }
    double density(double x) const override { return weight(x) * dg_.density(x); }
    const std::vector<Atom>& atoms() const override { return atoms_; }
    const std::vector<Interval>& support() const override { return support_; }
    std::vector<double> interior_breakpoints() const override {
        return dg_.interior_breakpoints();
    }
    double ac_mass() const override {
        double m = 1.0;
        for (const Atom& a : atoms_) m -= a.mass;
        return m;
    }

private:
    double weight(double x) const {
        return 0.5 * (2.0 + sign_ * x);
    }

    Measure dg_;
    int sign_;
    std::vector<Interval> support_;
    std::vector<Atom> atoms_;
};

// ---------------------------------------------------------------------------
// Mobius pushforward on the circle
// ---------------------------------------------------------------------------
class MobiusNode final : public detail::MeasureNode {
public:
    MobiusNode(Measure nu, complex z0) : nu_(std::move(nu)), z0_(z0) {
        if (std::abs(z0) >= 1.0) throw parameter_error("Mobius: |z0| < 1 required");
        for (const auto& arc : nu_.support()) {
            if (arc.hi - arc.lo >= kTwoPi - 1e-12) {
                support_.push_back({0.0, kTwoPi});
                continue;
            }
            double lo = forward_angle(arc.lo);
            double hi = forward_angle(arc.hi);
            while (hi <= lo + 1e-14) hi += kTwoPi;
            support_.push_back({lo, hi});
        }
        for (const Atom& a : nu_.atoms())
            atoms_.push_back({wrap_angle(forward_angle(a.location)), a.mass});
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& x, const Atom& y) { return x.location < y.location; });
    }

    Space space() const override { return Space::circle; }
    double density(double eta) const override {
        complex e = std::polar(1.0, eta);
        complex pre = (e + z0_) / (1.0 + std::conj(z0_) * e);  // m_{-z0}(e)
        double theta = std::arg(pre);
        double jac = std::norm(pre - z0_) / (1.0 - std::norm(z0_));  // d theta / d eta inverse
        return nu_.density(theta) * jac;
    }
    const std::vector<Atom>& atoms() const override { return atoms_; }
    const std::vector<Interval>& support() const override { return support_; }
    std::vector<double> interior_breakpoints() const override {
        std::vector<double> cuts;
        for (double c : nu_.interior_breakpoints()) cuts.push_back(forward_angle(c));
        return cuts;
    }
    bool symmetric() const override {
        return nu_.symmetric() && std::abs(z0_.imag()) < 1e-15;
    }
    bool smooth_full_circle() const override { return nu_.smooth_full_circle(); }
    double ac_mass() const override { return nu_.ac_mass(); }

private:
    double forward_angle(double theta) const {
        complex e = std::polar(1.0, theta);
        return std::arg((e - z0_) / (1.0 - std::conj(z0_) * e));
    }

    Measure nu_;
    complex z0_;
    std::vector<Interval> support_;
    std::vector<Atom> atoms_;
};

// ---------------------------------------------------------------------------
// rotation by pi
// ---------------------------------------------------------------------------
class RotatePiNode final : public detail::MeasureNode {
public:
    explicit RotatePiNode(Measure nu) : nu_(std::move(nu)) {
        for (const auto& arc : nu_.support()) support_.push_back({arc.lo + kPi, arc.hi + kPi});
        for (const Atom& a : nu_.atoms())
            atoms_.push_back({wrap_angle(a.location + kPi), a.mass});
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& x, const Atom& y) { return x.location < y.location; });
    }

    Space space() const override { return Space::circle; }
    double density(double theta) const override { return nu_.density(theta - kPi); }
    const std::vector<Atom>& atoms() const override { return atoms_; }
    const std::vector<Interval>& support() const override { return support_; }
    std::vector<double> interior_breakpoints() const override {
        std::vector<double> cuts;
        for (double c : nu_.interior_breakpoints()) cuts.push_back(c + kPi);
        return cuts;
    }
    bool symmetric() const override { return nu_.symmetric(); }
    bool smooth_full_circle() const override { return nu_.smooth_full_circle(); }
    double ac_mass() const override { return nu_.ac_mass(); }

private:
    Measure nu_;
    std::vector<Interval> support_;
    std::vector<Atom> atoms_;
};

}  // namespace

Measure szego_push(const Measure& nu) {
    require_symmetric_circle(nu, "szego_push");
    return Measure(std::make_shared<SzPushNode>(nu));
}

Measure szego_pull(const Measure& mu) {
    if (mu.space() != Space::real_line)
        throw space_mismatch_error("szego_pull: real-line measure required");
    return Measure(std::make_shared<SzPullNode>(mu));
}

Measure dg_push(const Measure& nu, double d, int sign) {
    require_symmetric_circle(nu, "dg_push");
    return Measure(std::make_shared<DgPushNode>(nu, d, sign));
}

Measure dg_pull(const Measure& mu, double d) {
    if (mu.space() != Space::real_line)
        throw space_mismatch_error("dg_pull: real-line measure required");
    if (!mu.symmetric()) throw symmetry_error("dg_pull: symmetric measure required");
    return Measure(std::make_shared<DgPullNode>(mu, d));
}

Measure dvz_push(const Measure& nu, int sign) {
    if (sign != +1 && sign != -1) throw parameter_error("dvz_push: sign must be +-1");
    Measure dg = dg_push(nu, 1.0, +1);
    Measure out(std::make_shared<DvzNode>(dg, sign));
    double mass = out.ac_mass() > 0.0
                      ? out.integrate_ac([](double) { return 1.0; }, 1e-10)
                      : 0.0;
    for (const Atom& a : out.atoms()) mass += a.mass;
    if (std::abs(mass - 1.0) > 1e-9)
        throw numeric_error("dvz_push: result failed the normalization check");
    return out;
}

Measure mobius_push(const Measure& nu, complex z0) {
    require_circle(nu, "mobius_push");
    return Measure(std::make_shared<MobiusNode>(nu, z0));
}

Measure rotate_pi(const Measure& nu) {
    require_circle(nu, "rotate_pi");
    return Measure(std::make_shared<RotatePiNode>(nu));
}

Measure apply_map(const MapId& map, const Measure& m) {
    switch (map.kind) {
        case MapId::Kind::sz:
            return szego_push(m);
        case MapId::Kind::dg:
            return dg_push(m, map.d, map.sign);
        case MapId::Kind::dvz:
            return dvz_push(m, map.sign);
        case MapId::Kind::mobius:
            return mobius_push(m, map.z0);
        case MapId::Kind::rotate_pi:
            return rotate_pi(m);
    }
    throw parameter_error("apply_map: unknown map");
}

Measure apply_maps(std::span<const MapId> maps, Measure m) {
    for (const MapId& id : maps) m = apply_map(id, m);
    return m;
}

}  // namespace sumrule
