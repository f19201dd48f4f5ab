#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "sumrule/mappings.hpp"
#include "sumrule/measure.hpp"
#include "sumrule/oprl.hpp"
#include "sumrule/opuc.hpp"
#include "sumrule/sumrules.hpp"

namespace sumrule::dsl {

using json = nlohmann::json;

// Measure documents:
//   {"space":"real"|"circle", "kind":"reference"|"mixture"|"composite"|"coeffs",
//    "family":"SC"|"MP"|"KMK"|"Arcsine"|"UNIF"|"GW"|"HP"|"Pois"|"D",
//    "params":{...}, "atoms":[[loc,mass],...], "components":[...]}
// plus the pushforward extension {"kind":"pushforward","map":[...],"measure":{...}}.
Measure measure_from_json(const json& doc);
Measure measure_from_json_string(const std::string& text);

// Map documents: {"map":"Sz"|"DG"|"DVZ"|"Mobius"|"RotPi","params":{...}},
// composable as a JSON array applied left to right.
MapId map_from_json(const json& doc);
std::vector<MapId> maps_from_json(const json& doc);

RuleId rule_from_json(const std::string& name, const json& params);

json report_to_json(const SumRuleReport& rep);

json verblunsky_to_json(const VerblunskyCoeffs& a);
json jacobi_to_json(const JacobiCoeffs& J);
json canonical_to_json(const CanonicalMoments& u);
json z_to_json(const ZCoeffs& z);
json moments_to_json(const std::vector<complex>& c);

}  // namespace sumrule::dsl
