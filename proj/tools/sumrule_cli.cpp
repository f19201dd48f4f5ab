// sumrule: verify spectral-theory sum rules from the command line.
//
// Subcommands
//   verify  --rule <name> [--rule-params J] --measure J [--N --tol --format --out]
//   coeffs  --kind verblunsky|jacobi|canonical|z|deformed|moments --n K --measure J
//   map     --apply J --measure J --emit density|atoms|support|mass [--at x]
//   kl      --nu J --mu J
//   batch   --manifest FILE
//
// Exit codes: 0 match/both_infinite, 1 usage or validation error, 2 mismatch,
// 3 unconverged.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <atomic>
#include <thread>

#include "sumrule/dsl.hpp"
#include "sumrule/schur.hpp"

namespace {

using nlohmann::json;
using namespace sumrule;

int verdict_exit_code(SumRuleReport::Verdict v) {
    switch (v) {
        case SumRuleReport::Verdict::match:
        case SumRuleReport::Verdict::both_infinite:
            return 0;
        case SumRuleReport::Verdict::mismatch:
            return 2;
        case SumRuleReport::Verdict::unconverged:
            return 3;
    }
    return 1;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text << std::endl;
    } else {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot open output file: " + out_path);
        f << text << std::endl;
    }
}

std::string report_csv_header() {
    return "rule,lhs,rhs,kl,outliers,N,tail,verdict,diff";
}

std::string report_csv_row(const json& r) {
    auto cell = [&](const char* key) -> std::string {
        const json& v = r.at(key);
        if (v.is_null()) return "";
        if (v.is_string()) return v.get<std::string>();
        std::ostringstream os;
        os.precision(17);
        os << v.get<double>();
        return os.str();
    };
    std::ostringstream os;
    os << r.at("rule").get<std::string>() << ',' << cell("lhs") << ',' << cell("rhs")
       << ',' << cell("kl") << ',' << cell("outliers") << ','
       << r.at("N").get<int>() << ',' << cell("tail") << ','
       << r.at("verdict").get<std::string>() << ',' << cell("diff");
    return os.str();
}

std::string report_text(const json& r) {
    std::ostringstream os;
    os << r.at("rule").get<std::string>() << ": verdict=" <<
        r.at("verdict").get<std::string>();
    os << "  lhs=" << r.at("lhs").dump() << "  rhs=" << r.at("rhs").dump()
       << "  diff=" << r.at("diff").dump() << "  N=" << r.at("N").get<int>();
    return os.str();
}

std::string format_report(const json& r, const std::string& format) {
    if (format == "csv") return report_csv_header() + "\n" + report_csv_row(r);
    if (format == "text") return report_text(r);
    return r.dump(2);
}

struct BatchEntry {
    json report;
    int code = 1;
    std::string error;
};

BatchEntry run_batch_entry(const json& entry) {
    BatchEntry out;
    try {
        RuleId rule = dsl::rule_from_json(entry.at("rule").get<std::string>(),
                                          entry.value("params", json::object()));
        Measure mu = dsl::measure_from_json(entry.at("measure"));
        VerifyOptions opt;
        json options = entry.value("options", json::object());
        opt.N = options.value("N", opt.N);
        opt.tol_match = options.value("tolMatch", opt.tol_match);
        opt.quad_tol = options.value("quadTol", opt.quad_tol);
        opt.divergence_cap = options.value("divergenceCap", opt.divergence_cap);
        SumRuleReport rep = verify(rule, mu, opt);
        out.report = dsl::report_to_json(rep);
        out.code = verdict_exit_code(rep.verdict);
    } catch (const std::exception& e) {
        out.error = e.what();
        out.report = json{{"error", e.what()}};
        out.code = 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical verification of sum rules for measures on the real "
                 "line and the unit circle"};
    app.require_subcommand(1);

    std::string measure_json, rule_name_arg, rule_params_json = "{}";
    std::string out_path, format = "json";
    int N = 200;
    double tol_match = 1e-6, quad_tol = 1e-9, divergence_cap = 1e6;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "write the report to a file");
        cmd->add_option("--format", format, "json|csv|text")->default_str("json");
    };

    // verify ---------------------------------------------------------------
    CLI::App* cmd_verify = app.add_subcommand("verify", "verify one sum rule");
    cmd_verify->add_option("--rule", rule_name_arg, "rule name")->required();
    cmd_verify->add_option("--rule-params", rule_params_json, "rule parameters JSON");
    cmd_verify->add_option("--measure", measure_json, "measure DSL JSON")->required();
    cmd_verify->add_option("--N", N, "series truncation order");
    cmd_verify->add_option("--tol", tol_match, "match tolerance");
    cmd_verify->add_option("--quad-tol", quad_tol, "quadrature tolerance");
    cmd_verify->add_option("--divergence-cap", divergence_cap, "infinity threshold");
    add_common(cmd_verify);

    // coeffs ---------------------------------------------------------------
    std::string coeff_kind = "verblunsky";
    int coeff_n = 10;
    CLI::App* cmd_coeffs = app.add_subcommand("coeffs", "extract coefficients");
    cmd_coeffs->add_option("--kind", coeff_kind,
                           "verblunsky|jacobi|canonical|z|deformed|moments");
    cmd_coeffs->add_option("--n", coeff_n, "number of coefficients")->required();
    cmd_coeffs->add_option("--measure", measure_json, "measure DSL JSON")->required();
    add_common(cmd_coeffs);

    // map ------------------------------------------------------------------
    std::string maps_json, emit_what = "density";
    double at_x = 0.0;
    CLI::App* cmd_map = app.add_subcommand("map", "apply measure mappings");
    cmd_map->add_option("--apply", maps_json, "JSON list of maps")->required();
    cmd_map->add_option("--measure", measure_json, "measure DSL JSON")->required();
    cmd_map->add_option("--emit", emit_what, "density|atoms|support|mass");
    cmd_map->add_option("--at", at_x, "evaluation point for --emit density");
    add_common(cmd_map);

    // kl ---------------------------------------------------------------------
    std::string nu_json, mu_json;
    CLI::App* cmd_kl = app.add_subcommand("kl", "relative entropy K(nu | mu)");
    cmd_kl->add_option("--nu", nu_json, "measure DSL JSON")->required();
    cmd_kl->add_option("--mu", mu_json, "measure DSL JSON")->required();
    add_common(cmd_kl);

    // batch -------------------------------------------------------------------
    std::string manifest_path;
    CLI::App* cmd_batch = app.add_subcommand("batch", "run a manifest of checks");
    cmd_batch->add_option("--manifest", manifest_path, "manifest JSON file")
        ->required();
    add_common(cmd_batch);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_verify->parsed()) {
            RuleId rule =
                dsl::rule_from_json(rule_name_arg, json::parse(rule_params_json));
            Measure mu = dsl::measure_from_json_string(measure_json);
            VerifyOptions opt{N, tol_match, quad_tol, divergence_cap};
            SumRuleReport rep = verify(rule, mu, opt);
            emit(out_path, format_report(dsl::report_to_json(rep), format));
            return verdict_exit_code(rep.verdict);
        }

        if (cmd_coeffs->parsed()) {
            Measure m = dsl::measure_from_json_string(measure_json);
            json out;
            if (coeff_kind == "verblunsky") {
                out = dsl::verblunsky_to_json(verblunsky_from_measure(m, coeff_n));
            } else if (coeff_kind == "jacobi") {
                out = dsl::jacobi_to_json(jacobi_from_measure(m, coeff_n));
            } else if (coeff_kind == "canonical") {
                out = dsl::canonical_to_json(
                    canonical_from_jacobi(jacobi_from_measure(m, (coeff_n + 1) / 2)));
                out["u"].get_ref<json::array_t&>().resize(coeff_n);
            } else if (coeff_kind == "z") {
                out = dsl::z_to_json(
                    z_from_jacobi(jacobi_from_measure(m, (coeff_n + 1) / 2)));
                out["z"].get_ref<json::array_t&>().resize(coeff_n);
            } else if (coeff_kind == "deformed") {
                DeformedCoeffs g =
                    deformed_verblunsky(verblunsky_from_measure(m, coeff_n));
                json arr = json::array();
                for (const complex& v : g.gamma)
                    arr.push_back(json::array({v.real(), v.imag()}));
                out = json{{"gamma", arr}};
            } else if (coeff_kind == "moments") {
                out = dsl::moments_to_json(trig_moments(m, coeff_n));
            } else {
                throw validation_error("unknown coefficient kind: " + coeff_kind);
            }
            emit(out_path, out.dump(2));
            return 0;
        }

        if (cmd_map->parsed()) {
            Measure m = dsl::measure_from_json_string(measure_json);
            std::vector<MapId> maps = dsl::maps_from_json(json::parse(maps_json));
            Measure image = apply_maps(maps, m);
            json out;
            if (emit_what == "density") {
                out = json{{"x", at_x}, {"density", image.density(at_x)}};
            } else if (emit_what == "atoms") {
                json arr = json::array();
                for (const Atom& a : image.atoms())
                    arr.push_back(json::array({a.location, a.mass}));
                out = json{{"atoms", arr}};
            } else if (emit_what == "support") {
                json arr = json::array();
                for (const Interval& s : image.support())
                    arr.push_back(json::array({s.lo, s.hi}));
                out = json{{"support", arr}};
            } else if (emit_what == "mass") {
                double mass = image.integrate_ac([](double) { return 1.0; });
                for (const Atom& a : image.atoms()) mass += a.mass;
                out = json{{"mass", mass}};
            } else {
                throw validation_error("unknown emit target: " + emit_what);
            }
            emit(out_path, out.dump(2));
            return 0;
        }

        if (cmd_kl->parsed()) {
            Measure nu = dsl::measure_from_json_string(nu_json);
            Measure mu = dsl::measure_from_json_string(mu_json);
            double v = kl(nu, mu);
            json out{{"kl", std::isinf(v) ? json("inf") : json(v)}};
            emit(out_path, out.dump(2));
            return 0;
        }

        if (cmd_batch->parsed()) {
            std::ifstream f(manifest_path);
            if (!f) throw validation_error("cannot open manifest: " + manifest_path);
            json manifest = json::parse(f);
            if (!manifest.is_array())
                throw validation_error("manifest must be a JSON array");

            int threads = 1;
            if (const char* env = std::getenv("SUMRULE_LAB_THREADS"))
                threads = std::max(1, std::atoi(env));
            std::vector<BatchEntry> results(manifest.size());
            if (threads <= 1 || manifest.size() <= 1) {
                for (size_t i = 0; i < manifest.size(); ++i)
                    results[i] = run_batch_entry(manifest[i]);
            } else {
                std::vector<std::thread> pool;
                std::atomic<size_t> next{0};
                for (int t = 0; t < threads; ++t)
                    pool.emplace_back([&] {
                        for (size_t i = next++; i < manifest.size(); i = next++)
                            results[i] = run_batch_entry(manifest[i]);
                    });
                for (auto& th : pool) th.join();
            }

            json out = json::array();
            int worst = 0;
            int matches = 0, errors = 0;
            for (const BatchEntry& r : results) {
                out.push_back(r.report);
                worst = std::max(worst, r.code);
                if (r.code == 0) ++matches;
                if (!r.error.empty()) ++errors;
            }
            json summary{{"entries", manifest.size()},
                         {"passed", matches},
                         {"errors", errors},
                         {"exit", worst}};
            json doc{{"reports", out}, {"summary", summary}};
            emit(out_path, doc.dump(2));
            return worst;
        }
    } catch (const sumrule::error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 1;
}
