#include "sumrule/dsl.hpp"

#include <cmath>

namespace sumrule::dsl {

namespace {

complex complex_from_json(const json& v) {
    if (v.is_number()) return complex(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2)
        return complex(v[0].get<double>(), v[1].get<double>());
    throw validation_error("expected a number or [re, im] pair");
}

json complex_to_json(complex z) { return json::array({z.real(), z.imag()}); }

json finite_or_tag(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

std::vector<Atom> atoms_from_json(const json& doc) {
    std::vector<Atom> atoms;
    if (!doc.contains("atoms")) return atoms;
    for (const auto& entry : doc.at("atoms")) {
        if (!entry.is_array() || entry.size() != 2)
            throw validation_error("atoms must be [location, mass] pairs");
        atoms.push_back({entry[0].get<double>(), entry[1].get<double>()});
    }
    return atoms;
}

Measure reference_from_json(const json& doc) {
    std::string family = doc.at("family").get<std::string>();
    json params = doc.value("params", json::object());
    if (family == "SC") return make_semicircle();
    if (family == "Arcsine") return make_arcsine();
    if (family == "UNIF") return make_unif();
    if (family == "MP")
        return make_mp(params.at("tau").get<double>(),
                       params.value("legacy_edges", false));
    if (family == "KMK") {
        if (params.contains("kappa"))
            return make_kmk(params.at("kappa").get<double>());
        return make_kmk(params.at("kappa1").get<double>(),
                        params.at("kappa2").get<double>());
    }
    if (family == "GW") return make_gw(params.at("g").get<double>());
    if (family == "HP") return make_hp(params.at("d").get<double>());
    if (family == "Pois") return make_pois(complex_from_json(params.at("zeta")));
    if (family == "D")
        return make_d(params.at("a").get<double>(), params.at("b").get<double>());
    throw validation_error("unknown reference family: " + family);
}

Measure coeffs_from_json(const json& doc) {
    std::string space = doc.value("space", "");
    json params = doc.value("params", json::object());
    if (space == "circle" || params.contains("alpha")) {
        std::vector<complex> alpha;
        for (const auto& v : params.at("alpha")) alpha.push_back(complex_from_json(v));
        double gamma = 0.0;
        if (params.contains("tail") && !params.at("tail").is_null()) {
            const json& tail = params.at("tail");
            std::string kind = tail.value("kind", "zero");
            if (kind == "constant")
                gamma = tail.value("gamma", 0.0);
            else if (kind == "gw")
                throw validation_error(
                    "coeffs measure: a gw tail has no closed density; use the GW "
                    "reference family instead");
            else if (kind != "zero")
                throw validation_error("coeffs measure: unknown tail kind " + kind);
        }
        return from_verblunsky(std::move(alpha), gamma);
    }
    // real line: {"b": [...], "a": [...], "tail": {"a":..., "b":...} | null}
    std::vector<double> b = params.at("b").get<std::vector<double>>();
    std::vector<double> a = params.at("a").get<std::vector<double>>();
    double a_inf = 1.0, b_inf = 0.0;
    if (params.contains("tail") && params.at("tail").is_object()) {
        a_inf = params.at("tail").value("a", 1.0);
        b_inf = params.at("tail").value("b", 0.0);
    }
    return from_jacobi_coeffs(std::move(b), std::move(a), a_inf, b_inf);
}

}  // namespace

Measure measure_from_json(const json& doc) {
    if (!doc.is_object()) throw validation_error("measure document must be an object");
    std::string kind = doc.value("kind", doc.contains("family") ? "reference" : "");
    if (kind == "reference") return reference_from_json(doc);
    if (kind == "mixture") {
        const json& comps = doc.at("components");
        if (!comps.is_array() || comps.size() < 2)
            throw validation_error("mixture needs at least two components");
        std::vector<std::pair<double, Measure>> parts;
        double wsum = 0.0;
        for (const auto& c : comps) {
            double w = c.at("weight").get<double>();
            wsum += w;
            parts.emplace_back(w, measure_from_json(
                                      c.contains("measure") ? c.at("measure") : c));
        }
        if (std::abs(wsum - 1.0) > 1e-12)
            throw validation_error("mixture weights must sum to 1");
        // fold left: mix(w1/(w1+w2), m1, m2), then mix((w1+w2)/(w1+w2+w3), ..)
        Measure acc = parts[0].second;
        double wacc = parts[0].first;
        for (size_t i = 1; i < parts.size(); ++i) {
            double wnew = wacc + parts[i].first;
            acc = mix(wacc / wnew, acc, parts[i].second);
            wacc = wnew;
        }
        return acc;
    }
    if (kind == "composite") {
        std::vector<Atom> atoms = atoms_from_json(doc);
        const json& comps = doc.value("components", json::array());
        if (comps.empty()) {
            std::string space = doc.value("space", "real");
            return atoms_only(space == "circle" ? Space::circle : Space::real_line,
                              std::move(atoms));
        }
        Measure ac = measure_from_json(comps.at(0));
        return with_atoms(ac, std::move(atoms));
    }
    if (kind == "coeffs") return coeffs_from_json(doc);
    if (kind == "pushforward") {
        Measure inner = measure_from_json(doc.at("measure"));
        std::vector<MapId> maps = maps_from_json(doc.at("map"));
        return apply_maps(maps, inner);
    }
    throw validation_error("measure document needs a known kind or a family");
}

Measure measure_from_json_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw validation_error(std::string("measure DSL parse error: ") + e.what());
    }
    return measure_from_json(doc);
}

MapId map_from_json(const json& doc) {
    MapId id;
    std::string name = doc.at("map").get<std::string>();
    json params = doc.value("params", json::object());
    int sign = +1;
    if (params.contains("sign")) {
        const json& s = params.at("sign");
        if (s.is_string())
            sign = s.get<std::string>() == "-" ? -1 : +1;
        else
            sign = s.get<int>() >= 0 ? +1 : -1;
    }
    if (name == "Sz") {
        id.kind = MapId::Kind::sz;
    } else if (name == "DG") {
        id.kind = MapId::Kind::dg;
        id.d = params.value("d", 1.0);
        id.sign = sign;
    } else if (name == "DVZ") {
        id.kind = MapId::Kind::dvz;
        id.sign = sign;
    } else if (name == "Mobius") {
        id.kind = MapId::Kind::mobius;
        id.z0 = complex_from_json(params.at("z0"));
    } else if (name == "RotPi") {
        id.kind = MapId::Kind::rotate_pi;
    } else {
        throw validation_error("unknown map: " + name);
    }
    return id;
}

std::vector<MapId> maps_from_json(const json& doc) {
    std::vector<MapId> out;
    if (doc.is_object()) {
        out.push_back(map_from_json(doc));
        return out;
    }
    for (const auto& m : doc) out.push_back(map_from_json(m));
    return out;
}

RuleId rule_from_json(const std::string& name, const json& params) {
    RuleId rule;
    rule.kind = rule_from_name(name);
    if (params.contains("tau")) rule.tau = params.at("tau").get<double>();
    if (params.contains("legacy_edges"))
        rule.mp_legacy_edges = params.at("legacy_edges").get<bool>();
    if (params.contains("kappa")) {
        rule.kappa1 = rule.kappa2 = params.at("kappa").get<double>();
    }
    if (params.contains("kappa1")) rule.kappa1 = params.at("kappa1").get<double>();
    if (params.contains("kappa2")) rule.kappa2 = params.at("kappa2").get<double>();
    if (params.contains("g")) rule.g = params.at("g").get<double>();
    if (params.contains("d")) rule.d = params.at("d").get<double>();
    if (params.contains("zeta")) rule.zeta = complex_from_json(params.at("zeta"));
    validate_rule(rule);
    return rule;
}

json report_to_json(const SumRuleReport& rep) {
    json params = json::object();
    switch (rep.rule.kind) {
        case RuleKind::mp:
            params["tau"] = rep.rule.tau;
            if (rep.rule.mp_legacy_edges) params["legacy_edges"] = true;
            break;
        case RuleKind::kmk:
            params["kappa1"] = rep.rule.kappa1;
            params["kappa2"] = rep.rule.kappa2;
            break;
        case RuleKind::gw:
        case RuleKind::gw_modified:
        case RuleKind::new_gw:
        case RuleKind::gw_mixture_u:
        case RuleKind::gw_mixture_a:
            params["g"] = rep.rule.g;
            break;
        case RuleKind::hp:
            params["d"] = rep.rule.d;
            break;
        case RuleKind::poisson_np:
        case RuleKind::poisson_bessonov:
        case RuleKind::poisson_simon:
            params["zeta"] = complex_to_json(rep.rule.zeta);
            break;
        default:
            break;
    }
    const char* verdict = "mismatch";
    switch (rep.verdict) {
        case SumRuleReport::Verdict::match: verdict = "match"; break;
        case SumRuleReport::Verdict::both_infinite: verdict = "both_infinite"; break;
        case SumRuleReport::Verdict::mismatch: verdict = "mismatch"; break;
        case SumRuleReport::Verdict::unconverged: verdict = "unconverged"; break;
    }
    json out{{"rule", rule_name(rep.rule.kind)},
             {"params", params},
             {"lhs", finite_or_tag(rep.lhs)},
             {"rhs", finite_or_tag(rep.rhs)},
             {"kl", finite_or_tag(rep.kl_term)},
             {"outliers", finite_or_tag(rep.outlier_term)},
             {"N", rep.truncation_n},
             {"tail", finite_or_tag(rep.tail_estimate)},
             {"verdict", verdict},
             {"diff", finite_or_tag(rep.diff)}};
    if (!rep.notes.empty()) out["notes"] = rep.notes;
    return out;
}

json verblunsky_to_json(const VerblunskyCoeffs& a) {
    json alpha = json::array();
    for (const complex& v : a.alpha) alpha.push_back(complex_to_json(v));
    json tail;
    if (a.tail) {
        switch (a.tail->kind) {
            case VerblunskyTailInfo::Kind::zero:
                tail = {{"kind", "zero"}};
                break;
            case VerblunskyTailInfo::Kind::constant:
                tail = {{"kind", "constant"},
                        {"params", {{"gamma", complex_to_json(a.tail->gamma)}}}};
                break;
            case VerblunskyTailInfo::Kind::gw:
                tail = {{"kind", "gw"}, {"params", {{"g", a.tail->g}}}};
                break;
        }
    }
    return json{{"alpha", alpha}, {"tail", tail}};
}

json jacobi_to_json(const JacobiCoeffs& J) {
    return json{{"b", J.b},
                {"a", J.a},
                {"tail", J.tail ? json("constant") : json(nullptr)}};
}

json canonical_to_json(const CanonicalMoments& u) { return json{{"u", u.u}}; }

json z_to_json(const ZCoeffs& z) { return json{{"z", z.z}}; }

json moments_to_json(const std::vector<complex>& c) {
    json arr = json::array();
    for (const complex& v : c) arr.push_back(complex_to_json(v));
    return json{{"c", arr}};
}

}  // namespace sumrule::dsl
