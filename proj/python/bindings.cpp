#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sumrule/dsl.hpp"
#include "sumrule/schur.hpp"

namespace py = pybind11;
using namespace sumrule;

namespace {

Measure measure_from_text(const std::string& text) {
    return dsl::measure_from_json_string(text);
}

py::object json_to_py(const nlohmann::json& j) {
    py::module_ pyjson = py::module_::import("json");
    return pyjson.attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "numerical sum-rule verification: measures, recursion coefficients, "
              "measure mappings and rule checks";

    py::register_exception<sumrule::error>(m, "SumruleError");

    py::class_<Measure>(m, "Measure")
        .def("density", &Measure::density, py::arg("x"))
        .def("ac_mass", &Measure::ac_mass)
        .def("symmetric", &Measure::symmetric)
        .def("space",
             [](const Measure& me) {
                 return me.space() == Space::circle ? "circle" : "real";
             })
        .def("atoms",
             [](const Measure& me) {
                 std::vector<std::pair<double, double>> out;
                 for (const Atom& a : me.atoms()) out.emplace_back(a.location, a.mass);
                 return out;
             })
        .def("support", [](const Measure& me) {
            std::vector<std::pair<double, double>> out;
            for (const Interval& s : me.support()) out.emplace_back(s.lo, s.hi);
            return out;
        });

    m.def("measure", &measure_from_text, py::arg("dsl"),
          "build a measure from its JSON DSL document");

    m.def("kl", [](const Measure& nu, const Measure& mu) { return kl(nu, mu); },
          py::arg("nu"), py::arg("mu"), "relative entropy K(nu | mu)");

    m.def("mixture_kl_decompose",
          [](double tau1, const Measure& m1, const Measure& m2, const Measure& mu) {
              return mixture_kl_decompose(tau1, m1, m2, mu);
          });

    m.def("trig_moments",
          [](const Measure& nu, int K) { return trig_moments(nu, K); });

    m.def("verblunsky", [](const Measure& nu, int n) {
        return verblunsky_from_measure(nu, n).alpha;
    });

    m.def("jacobi", [](const Measure& mu, int n) {
        JacobiCoeffs J = jacobi_from_measure(mu, n);
        return std::make_pair(J.b, J.a);
    });

    m.def("canonical_moments", [](const Measure& mu, int n) {
        JacobiCoeffs J = jacobi_from_measure(mu, n);
        return canonical_from_jacobi(J).u;
    });

    m.def("canonical_from_jacobi",
          [](std::vector<double> b, std::vector<double> a) {
              JacobiCoeffs J;
              J.b = std::move(b);
              J.a = std::move(a);
              return canonical_from_jacobi(J).u;
          });

    m.def("jacobi_from_canonical", [](std::vector<double> u) {
        CanonicalMoments cm;
        cm.u = std::move(u);
        JacobiCoeffs J = jacobi_from_canonical(cm);
        return std::make_pair(J.b, J.a);
    });

    m.def("z_from_jacobi", [](std::vector<double> b, std::vector<double> a) {
        JacobiCoeffs J;
        J.b = std::move(b);
        J.a = std::move(a);
        return z_from_jacobi(J).z;
    });

    m.def("deformed_verblunsky", [](std::vector<complex> alpha) {
        VerblunskyCoeffs a;
        a.alpha = std::move(alpha);
        return deformed_verblunsky(a).gamma;
    });

    m.def("schur_coefficients", [](const Measure& nu, int n) {
        return schur_iterates(SchurState::from_measure(nu), n).alpha;
    });

    m.def("nevanlinna_pick", [](const Measure& nu, complex zeta, int n) {
        return nevanlinna_pick_iterates(SchurState::from_measure(nu), zeta, n).values;
    });

    m.def("apply_maps", [](const std::string& maps_json, const Measure& mm) {
        auto maps = dsl::maps_from_json(nlohmann::json::parse(maps_json));
        return apply_maps(maps, mm);
    });

    m.def("szego_pull", &szego_pull);
    m.def("dg_pull", &dg_pull, py::arg("mu"), py::arg("d") = 1.0);

    m.def("verify",
          [](const std::string& rule, const Measure& mu,
             const std::string& rule_params, int N, double tol) {
              RuleId id = dsl::rule_from_json(rule, nlohmann::json::parse(rule_params));
              VerifyOptions opt;
              opt.N = N;
              opt.tol_match = tol;
              return json_to_py(dsl::report_to_json(verify(id, mu, opt)));
          },
          py::arg("rule"), py::arg("measure"), py::arg("rule_params") = "{}",
          py::arg("N") = 200, py::arg("tol") = 1e-6);
}
