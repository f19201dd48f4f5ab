#pragma once

#include <span>
#include <vector>

#include "sumrule/measure.hpp"

namespace sumrule {

// The measure mappings; all pushforwards except Mobius and RotatePi go from
// the circle to the real line.
struct MapId {
    enum class Kind { sz, dg, dvz, mobius, rotate_pi };
    Kind kind = Kind::sz;
    double d = 1.0;       // DG scale, > 0
    int sign = +1;        // DG / DVZ sign
    complex z0{0.0, 0.0}; // Mobius parameter, |z0| < 1
};

// x = 2 cos(theta); defined for symmetric circle measures.
Measure szego_push(const Measure& nu);
// unique symmetric preimage of a measure supported on [-2,2]
Measure szego_pull(const Measure& mu);

// x = 2 d cos(theta/2) (sign +) or x = 2 d sin(theta/2) (sign -)
Measure dg_push(const Measure& nu, double d, int sign = +1);
// inverse of the + branch for symmetric measures on [-2d, 2d]
Measure dg_pull(const Measure& mu, double d);

// dmu = 1/2 (2 +- x) dDG_1(nu)
Measure dvz_push(const Measure& nu, int sign = +1);

Measure mobius_push(const Measure& nu, complex z0);

Measure rotate_pi(const Measure& nu);

Measure apply_map(const MapId& map, const Measure& m);
Measure apply_maps(std::span<const MapId> maps, Measure m);

}  // namespace sumrule
