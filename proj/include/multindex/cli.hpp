#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "multindex/csv.hpp"
#include "multindex/dad_solver.hpp"
#include "multindex/dataset.hpp"
#include "multindex/errors.hpp"
#include "multindex/method.hpp"
#include "multindex/neary_solver.hpp"
#include "multindex/solve.hpp"
#include "multindex/solution.hpp"

namespace multindex {

/// Exit codes of the batch front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 1,
    kExitDisconnected = 2,
    kExitNoConvergence = 3,
};

/// Batch run configuration, mirroring the command-line flags.
struct RunConfig {
    std::string prices_path;
    std::string quantities_path;
    std::string beta_path;
    std::string share_params_path;
    std::string method; // one method name; empty with --all-methods/--check-only
    bool all_methods = false;
    bool check_only = false;
    std::optional<double> rho;
    std::string preference; // leontief | cobb-douglas | ces
    std::optional<double> sigma;
    std::string normalize = "first"; // first | geomean
    std::optional<double> tol;
    std::optional<int> max_iter;
    int probe_starts = 0; // 0 disables the uniqueness probe
    std::uint64_t seed = kDefaultProbeSeed;
    std::string out_path;
    std::string format = "json"; // json | csv
};

/// Reads and validates the two matrix CSVs into a Dataset. Labels come from
/// the prices file; both files must agree on row and column counts.
inline Dataset ingest(const std::string& prices_path, const std::string& quantities_path) {
    const LabeledMatrix prices = read_matrix_csv(prices_path);
    const LabeledMatrix quantities = read_matrix_csv(quantities_path);
    if (prices.values.rows() != quantities.values.rows() ||
        prices.values.cols() != quantities.values.cols())
        throw ValidationError(ValidationError::Kind::DimensionMismatch, 0, 0,
                              "prices are " + std::to_string(prices.values.rows()) + "x" +
                                  std::to_string(prices.values.cols()) +
                                  " but quantities are " +
                                  std::to_string(quantities.values.rows()) + "x" +
                                  std::to_string(quantities.values.cols()));
    return validate_dataset(prices.values, quantities.values, prices.row_labels,
                            prices.col_labels);
}

namespace detail {

inline std::string format_double_17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Serializer with a fixed numeric format: floats are written with 17
/// significant digits so reports are bit-identical across runs and doubles
/// round-trip exactly.
inline void dump_json_17(const nlohmann::ordered_json& v, std::string& out, int depth) {
    const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
    const std::string pad_in(2 * static_cast<std::size_t>(depth + 1), ' ');
    using value_t = nlohmann::ordered_json::value_t;
    switch (v.type()) {
        case value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            std::size_t k = 0;
            for (auto it = v.begin(); it != v.end(); ++it, ++k) {
                out += pad_in + nlohmann::json(it.key()).dump() + ": ";
                dump_json_17(it.value(), out, depth + 1);
                if (k + 1 < v.size()) out += ",";
                out += "\n";
            }
            out += pad + "}";
            return;
        }
        case value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t k = 0; k < v.size(); ++k) {
                out += pad_in;
                dump_json_17(v[k], out, depth + 1);
                if (k + 1 < v.size()) out += ",";
                out += "\n";
            }
            out += pad + "]";
            return;
        }
        case value_t::string: out += nlohmann::json(v.get<std::string>()).dump(); return;
        case value_t::boolean: out += v.get<bool>() ? "true" : "false"; return;
        case value_t::number_integer: out += std::to_string(v.get<std::int64_t>()); return;
        case value_t::number_unsigned: out += std::to_string(v.get<std::uint64_t>()); return;
        case value_t::number_float: out += format_double_17(v.get<double>()); return;
        default: out += "null"; return;
    }
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += "\"";
    return out;
}

/// CSV rendering of a report: one `path,value` row per JSON leaf, with
/// dotted paths. Deterministic like the JSON form.
inline void dump_csv_rows(const nlohmann::ordered_json& v, const std::string& path,
                          std::string& out) {
    using value_t = nlohmann::ordered_json::value_t;
    switch (v.type()) {
        case value_t::object:
            for (auto it = v.begin(); it != v.end(); ++it)
                dump_csv_rows(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
            return;
        case value_t::array:
            for (std::size_t k = 0; k < v.size(); ++k)
                dump_csv_rows(v[k], path + "." + std::to_string(k), out);
            return;
        case value_t::string:
            out += csv_escape(path) + "," + csv_escape(v.get<std::string>()) + "\n";
            return;
        case value_t::boolean:
            out += csv_escape(path) + "," + (v.get<bool>() ? "true" : "false") + "\n";
            return;
        case value_t::number_integer:
            out += csv_escape(path) + "," + std::to_string(v.get<std::int64_t>()) + "\n";
            return;
        case value_t::number_unsigned:
            out += csv_escape(path) + "," + std::to_string(v.get<std::uint64_t>()) + "\n";
            return;
        case value_t::number_float:
            out += csv_escape(path) + "," + format_double_17(v.get<double>()) + "\n";
            return;
        default: out += csv_escape(path) + ",null\n"; return;
    }
}

inline nlohmann::ordered_json labels_json(const std::vector<std::string>& labels,
                                          const std::vector<std::size_t>& idx) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t k : idx) arr.push_back(labels[k]);
    return arr;
}

inline nlohmann::ordered_json connectivity_json(const Dataset& d,
                                                const ConnectivityReport& rep) {
    nlohmann::ordered_json out;
    out["connected"] = rep.connected;
    nlohmann::ordered_json comps = nlohmann::ordered_json::array();
    for (const auto& comp : rep.country_components)
        comps.push_back(labels_json(d.country_labels, comp));
    out["country_components"] = comps;
    nlohmann::ordered_json ccomps = nlohmann::ordered_json::array();
    for (const auto& comp : rep.commodity_components)
        ccomps.push_back(labels_json(d.commodity_labels, comp));
    out["commodity_components"] = ccomps;
    if (rep.witness) out["witness"] = labels_json(d.country_labels, *rep.witness);
    return out;
}

inline nlohmann::ordered_json compatibility_json(const Dataset& d,
                                                 const CompatibilityReport& rep) {
    nlohmann::ordered_json out;
    out["compatible"] = rep.compatible;
    out["strict"] = rep.strict;
    out["flow_value"] = rep.flow_value;
    if (rep.violating_sets) {
        out["violating_commodities"] = labels_json(d.commodity_labels, rep.violating_sets->first);
        out["violating_countries"] = labels_json(d.country_labels, rep.violating_sets->second);
    }
    return out;
}

inline nlohmann::ordered_json vector_json(const std::vector<double>& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (double x : v) arr.push_back(x);
    return arr;
}

inline nlohmann::ordered_json solution_json(const Solution& s) {
    nlohmann::ordered_json out;
    out["normalization"] = s.normalization == Normalization::FIRST_COUNTRY_ONE
                               ? "first-country-one"
                               : "geomean-one";
    out["ppp"] = vector_json(s.ppp);
    out["p_int"] = vector_json(s.p_int);
    const ParityMatrix parity = binary_parities(s);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < parity.parities.rows(); ++j) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t k = 0; k < parity.parities.cols(); ++k)
            row.push_back(parity.parities(j, k));
        rows.push_back(row);
    }
    out["parity"] = rows;
    out["residual"] = s.residual_norm;
    out["lambda"] = s.lambda_estimate;
    out["iterations"] = s.iterations;
    return out;
}

} // namespace detail

/// Builds the MethodSpec for one method from the shared configuration.
/// Throws when a required parameter is missing or an inapplicable one was
/// supplied (single-method mode is strict about that).
inline MethodSpec make_method_spec(const RunConfig& config, Method m, const Dataset& d,
                                   bool strict_params) {
    MethodSpec spec;
    spec.method = m;
    spec.normalization = config.normalize == "geomean" ? Normalization::GEOMEAN_ONE
                                                       : Normalization::FIRST_COUNTRY_ONE;
    if (config.tol) {
        if (!(*config.tol > 0.0)) throw Error("--tol must be positive");
        spec.tol = *config.tol;
    }
    if (config.max_iter) {
        if (*config.max_iter < 1) throw Error("--max-iter must be at least 1");
        spec.max_iter = *config.max_iter;
    }

    const bool needs_rho = m == Method::GK_MEAN || m == Method::GEN_MEAN;
    const bool needs_beta = m == Method::GGK || m == Method::GK_MEAN;
    const bool needs_pref = is_demand_method(m);

    if (needs_rho) {
        if (!config.rho) throw Error(method_name(m) + " requires --rho");
        spec.rho = *config.rho;
    } else if (strict_params && config.rho) {
        throw Error("--rho is only valid for gk-mean and gen-mean");
    }

    if (needs_beta) {
        if (config.beta_path.empty()) throw Error(method_name(m) + " requires --beta FILE");
        spec.beta = read_vector_file(config.beta_path);
        if (spec.beta.size() != d.n_countries)
            throw Error("beta file has " + std::to_string(spec.beta.size()) +
                        " entries, expected " + std::to_string(d.n_countries));
    } else if (strict_params && !config.beta_path.empty()) {
        throw Error("--beta is only valid for ggk and gk-mean");
    }

    if (needs_pref) {
        if (config.preference.empty())
            throw Error(method_name(m) + " requires --preference");
        PreferenceSpec pref;
        if (config.preference == "leontief") {
            pref.family = PreferenceFamily::LEONTIEF;
        } else if (config.preference == "cobb-douglas" || config.preference == "cobb_douglas") {
            pref.family = PreferenceFamily::COBB_DOUGLAS;
        } else if (config.preference == "ces") {
            pref.family = PreferenceFamily::CES;
        } else {
            throw Error("unknown preference family: " + config.preference);
        }
        if (pref.family != PreferenceFamily::LEONTIEF) {
            if (config.share_params_path.empty())
                throw Error(config.preference + " preferences require --share-params FILE");
            pref.share_params = read_vector_file(config.share_params_path);
            if (pref.share_params.size() != d.n_commodities)
                throw Error("share-params file has " + std::to_string(pref.share_params.size()) +
                            " entries, expected " + std::to_string(d.n_commodities));
        }
        if (pref.family == PreferenceFamily::CES) {
            if (!config.sigma) throw Error("ces preferences require --sigma");
            pref.sigma = *config.sigma;
        }
        spec.preference = pref;
    } else if (strict_params && !config.preference.empty()) {
        throw Error("--preference is only valid for neary and rao76");
    }

    validate_method_spec(spec);
    return spec;
}

/// Methods to run for this configuration. Under --all-methods, methods whose
/// parameters were not supplied are skipped.
inline std::vector<Method> select_methods(const RunConfig& config) {
    if (!config.all_methods) {
        if (config.method.empty()) {
            if (config.check_only) return {};
            throw Error("either --method or --all-methods is required");
        }
        const std::optional<Method> m = method_from_name(config.method);
        if (!m) throw Error("unknown method: " + config.method);
        return {*m};
    }
    std::vector<Method> out = {Method::GK, Method::EWGK, Method::RAO, Method::IDB,
                               Method::ARITH};
    if (!config.beta_path.empty()) out.push_back(Method::GGK);
    if (!config.beta_path.empty() && config.rho) out.push_back(Method::GK_MEAN);
    if (config.rho) out.push_back(Method::GEN_MEAN);
    if (!config.preference.empty()) {
        out.push_back(Method::NEARY);
        out.push_back(Method::RAO76);
    }
    return out;
}

/// Runs the configured batch job and writes the report file. Returns the
/// process exit code: 0 ok, 1 input error, 2 disconnected, 3 no convergence.
inline int run(const RunConfig& config) {
    nlohmann::ordered_json root;
    root["schema"] = "multindex/1";
    root["seed"] = config.seed;

    Dataset d;
    std::vector<Method> methods;
    try {
        if (config.out_path.empty()) throw Error("--out FILE is required");
        if (config.format != "json" && config.format != "csv")
            throw Error("unknown format: " + config.format);
        d = ingest(config.prices_path, config.quantities_path);
        methods = select_methods(config);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    nlohmann::ordered_json dataset_block;
    dataset_block["n_commodities"] = static_cast<std::uint64_t>(d.n_commodities);
    dataset_block["n_countries"] = static_cast<std::uint64_t>(d.n_countries);
    dataset_block["commodities"] = d.commodity_labels;
    dataset_block["countries"] = d.country_labels;
    root["dataset"] = dataset_block;

    const ConnectivityReport conn = is_connected(d.quantities);
    root["connectivity"] = detail::connectivity_json(d, conn);

    auto write_report = [&]() -> bool {
        std::string text;
        if (config.format == "json") {
            detail::dump_json_17(root, text, 0);
            text += "\n";
        } else {
            text = "path,value\n";
            detail::dump_csv_rows(root, "", text);
        }
        std::ofstream out(config.out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << config.out_path << "\n";
            return false;
        }
        out << text;
        return true;
    };

    bool had_input_error = false;
    bool had_no_convergence = false;

    if (!conn.connected) {
        if (!write_report()) return kExitInputError;
        std::cerr << "error: quantity matrix is disconnected; see " << config.out_path << "\n";
        return kExitDisconnected;
    }

    nlohmann::ordered_json reports = nlohmann::ordered_json::array();
    std::vector<double> rao_ppp_geo; // for the gen-mean rho->0 cross note

    for (Method m : methods) {
        nlohmann::ordered_json report;
        report["method"] = method_name(m);
        try {
            const MethodSpec spec = make_method_spec(config, m, d, !config.all_methods);

            if (is_share_method(m)) {
                const DadTriplet t = build_dad(d, spec);
                report["compatibility"] =
                    detail::compatibility_json(d, compatibility_check(t.a, t.c, t.d));
            }

            if (config.check_only) {
                report["status"] = "checked";
                reports.push_back(report);
                continue;
            }

            if (m == Method::RAO76) {
                const Rao76Result r = solve_rao76(d, *spec.preference, spec);
                report["status"] = "ok";
                report["lambda"] = r.lambda;
                report["iterations"] = r.iterations;
                report["solution_emitted"] = r.solution.has_value();
                report["p_eigenvector"] = detail::vector_json(r.p_eigenvector);
                if (r.solution) report["solution"] = detail::solution_json(*r.solution);
            } else {
                const Solution sol = solve(d, spec);
                report["status"] = "ok";
                report["solution"] = detail::solution_json(sol);
                if (m == Method::RAO)
                    rao_ppp_geo = normalize_solution(sol, Normalization::GEOMEAN_ONE).ppp;
            }

            if (config.probe_starts > 0 && (is_linear_method(m) || is_share_method(m))) {
                const UniquenessProbe probe =
                    uniqueness_probe(d, spec, config.probe_starts, config.seed);
                nlohmann::ordered_json pr;
                pr["starts"] = config.probe_starts;
                pr["seed"] = probe.seed;
                pr["spread"] = probe.spread;
                pr["unique"] = probe.unique;
                report["uniqueness_probe"] = pr;
            }
        } catch (const NoConvergenceError& e) {
            report["status"] = "no-convergence";
            report["error"] = std::string(e.what());
            had_no_convergence = true;
        } catch (const Error& e) {
            report["status"] = "error";
            report["error"] = std::string(e.what());
            had_input_error = true;
        }
        reports.push_back(report);
    }

    // With every method requested, note how close RAO is to the rho -> 0
    // limit of the generalized-mean family.
    if (config.all_methods && !config.check_only && !rao_ppp_geo.empty()) {
        try {
            MethodSpec spec;
            spec.method = Method::GEN_MEAN;
            spec.rho = 1e-6;
            spec.normalization = Normalization::GEOMEAN_ONE;
            const Solution near_zero = solve(d, spec);
            double dev = 0.0;
            for (std::size_t j = 0; j < rao_ppp_geo.size(); ++j)
                dev = std::max(dev, std::abs(near_zero.ppp[j] - rao_ppp_geo[j]) /
                                        rao_ppp_geo[j]);
            nlohmann::ordered_json note;
            note["rho"] = 1e-6;
            note["max_rel_dev_from_rao"] = dev;
            for (auto& rep : reports)
                if (rep["method"] == "rao") rep["gen_mean_rho_limit"] = note;
        } catch (const Error&) {
            // the cross-check is advisory; ignore failures
        }
    }

    root["reports"] = reports;
    if (!write_report()) return kExitInputError;
    if (had_input_error) return kExitInputError;
    if (had_no_convergence) return kExitNoConvergence;
    return kExitOk;
}

} // namespace multindex
