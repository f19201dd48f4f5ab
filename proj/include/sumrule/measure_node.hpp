#pragma once

// Internal node interface behind sumrule::Measure.  Mapping pushforwards in
// mappings.cpp implement their own nodes against this interface.

#include <memory>
#include <vector>

#include "sumrule/measure.hpp"

namespace sumrule::detail {

class MeasureNode {
public:
    virtual ~MeasureNode() = default;

    virtual Space space() const = 0;
    virtual double density(double x) const = 0;
    virtual const std::vector<Atom>& atoms() const { return no_atoms_; }
    virtual const std::vector<Interval>& support() const = 0;
    virtual std::vector<double> interior_breakpoints() const { return {}; }
    virtual bool symmetric() const { return false; }
    virtual bool smooth_full_circle() const { return false; }
    virtual double ac_mass() const { return 1.0; }

    virtual const ReferenceTag* reference_tag() const { return nullptr; }
    virtual const CircleCoeffProvenance* circle_coeffs() const { return nullptr; }
    virtual const RealCoeffProvenance* real_coeffs() const { return nullptr; }

protected:
    static const std::vector<Atom> no_atoms_;
};

}  // namespace sumrule::detail
