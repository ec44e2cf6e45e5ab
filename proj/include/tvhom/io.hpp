#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvhom/constants.hpp"
#include "tvhom/errors.hpp"
#include "tvhom/harness.hpp"
#include "tvhom/measure.hpp"
#include "tvhom/pmf.hpp"
#include "tvhom/search.hpp"

namespace tvhom {

/// 17 significant digits: enough to round-trip any IEEE-754 double exactly.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// JSON numeric literal; non-finite values (budget-skipped quantities,
/// mismatch sentinels) become null.
inline std::string json_number(double x) {
    return std::isfinite(x) ? format_double(x) : "null";
}

namespace detail {

inline std::string json_array(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            out += ",";
        }
        out += items[i];
    }
    out += "]";
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instance schema: {"m": int, "n": int, "P": [[...] x n], "Q": [[...] x n]}
// ---------------------------------------------------------------------------

/// Parse an instance, optionally smoothing every marginal by
/// (1 - delta) p + delta / m first so that files with zero entries load.
inline ProductInstance parse_instance_json(const std::string& text,
                                           double smooth_delta = 0.0) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputParseError(std::string("instance JSON: ") + e.what());
    }
    for (const char* field : {"m", "n", "P", "Q"}) {
        if (!doc.contains(field)) {
            throw InputParseError(std::string("instance JSON: missing field \"") + field +
                                  "\"");
        }
    }
    if (!doc["m"].is_number_integer() || !doc["n"].is_number_integer()) {
        throw InputParseError("instance JSON: \"m\" and \"n\" must be integers");
    }
    const auto m = doc["m"].get<std::int64_t>();
    const auto n = doc["n"].get<std::int64_t>();
    if (m < 2 || n < 1) {
        throw InputParseError("instance JSON: need m >= 2 and n >= 1");
    }

    const auto read_side = [&](const char* field) {
        const nlohmann::json& rows = doc[field];
        if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n)) {
            throw InputParseError(std::string("instance JSON: \"") + field +
                                  "\" must be an array of n rows");
        }
        std::vector<Pmf> side;
        side.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const nlohmann::json& row = rows[i];
            if (!row.is_array() || row.size() != static_cast<std::size_t>(m)) {
                throw InputParseError(std::string("instance JSON: \"") + field + "\" row " +
                                      std::to_string(i) + " must have m entries");
            }
            std::vector<double> probs;
            probs.reserve(row.size());
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (!row[j].is_number()) {
                    throw InputParseError(std::string("instance JSON: \"") + field + "\"[" +
                                          std::to_string(i) + "][" + std::to_string(j) +
                                          "] is not a number");
                }
                probs.push_back(row[j].get<double>());
            }
            try {
                if (smooth_delta > 0.0) {
                    side.push_back(smooth(probs, smooth_delta));
                } else {
                    side.push_back(Pmf::from_probs(std::move(probs), 1e-9));
                }
            } catch (const Error& e) {
                throw InputParseError(std::string("instance JSON: \"") + field + "\" row " +
                                      std::to_string(i) + ": " + e.what());
            }
        }
        return side;
    };

    try {
        return ProductInstance::make(read_side("P"), read_side("Q"));
    } catch (const InputParseError&) {
        throw;
    } catch (const Error& e) {
        throw InputParseError(std::string("instance JSON: ") + e.what());
    }
}

inline ProductInstance load_instance(const std::string& path, double smooth_delta = 0.0) {
    std::ifstream in(path);
    if (!in) {
        throw InputParseError("cannot open instance file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance_json(buf.str(), smooth_delta);
}

inline std::string instance_to_json(const ProductInstance& inst) {
    const auto side = [](const std::vector<Pmf>& pmfs) {
        std::vector<std::string> rows;
        rows.reserve(pmfs.size());
        for (const Pmf& p : pmfs) {
            std::vector<std::string> entries;
            entries.reserve(p.alphabet_size());
            for (double v : p.probs()) {
                entries.push_back(format_double(v));
            }
            rows.push_back(detail::json_array(entries));
        }
        return detail::json_array(rows);
    };
    std::string out = "{\"m\":" + std::to_string(inst.m()) +
                      ",\"n\":" + std::to_string(inst.n()) + ",\"P\":" + side(inst.ps) +
                      ",\"Q\":" + side(inst.qs) + "}";
    return out;
}

// ---------------------------------------------------------------------------
// Measure schema: array of [position, weight] pairs.
// ---------------------------------------------------------------------------

inline std::string measure_to_json(const AtomicMeasure& eta) {
    std::vector<std::string> entries;
    entries.reserve(eta.size());
    for (const Atom& a : eta.atoms()) {
        entries.push_back("[" + format_double(a.position) + "," + format_double(a.weight) +
                          "]");
    }
    return detail::json_array(entries);
}

inline AtomicMeasure parse_measure_json(const std::string& text,
                                        double merge_tol = kDefaultMergeTol) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputParseError(std::string("measure JSON: ") + e.what());
    }
    if (!doc.is_array()) {
        throw InputParseError("measure JSON: expected an array of [position, weight] pairs");
    }
    std::vector<Atom> atoms;
    atoms.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const nlohmann::json& pair = doc[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
            !pair[1].is_number()) {
            throw InputParseError("measure JSON: entry " + std::to_string(i) +
                                  " is not a [position, weight] pair");
        }
        atoms.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    return AtomicMeasure::from_atoms(std::move(atoms), merge_tol);
}

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

inline std::string constants_to_json(const ConstantsReport& r) {
    return "{\"eps_star\":" + format_double(r.eps_star) +
           ",\"delta_eps\":" + format_double(r.delta_eps_star) +
           ",\"c_eps\":" + format_double(r.c_eps_star) +
           ",\"c0_upper\":" + format_double(r.c0_upper) +
           ",\"c_lower\":" + format_double(r.c_lower) + "}";
}

inline std::string check_to_json(const CheckRecord& c) {
    if (c.skipped) {
        return "{\"name\":\"" + c.name + "\",\"status\":\"skip\",\"reason\":\"" +
               c.skip_reason + "\"}";
    }
    return "{\"name\":\"" + c.name + "\",\"status\":\"" + (c.pass ? "pass" : "fail") +
           "\",\"lhs\":" + json_number(c.lhs) + ",\"rhs\":" + json_number(c.rhs) +
           ",\"margin\":" + json_number(c.margin) + "}";
}

inline std::string lemma_report_to_json(const LemmaReport& r) {
    std::vector<std::string> checks;
    checks.reserve(r.checks.size());
    for (const CheckRecord& c : r.checks) {
        checks.push_back(check_to_json(c));
    }
    return "{\"instance_id\":" + std::to_string(r.instance_id) +
           ",\"tv_vec\":" + json_number(r.tv_vec) +
           ",\"tv_hom\":" + json_number(r.tv_hom) +
           ",\"hom_vec_ratio\":" + json_number(r.hom_vec_ratio) +
           ",\"checks\":" + detail::json_array(checks) + "}";
}

inline std::string suite_to_json(const SuiteResult& result) {
    std::vector<std::string> reports;
    reports.reserve(result.reports.size());
    for (const LemmaReport& r : result.reports) {
        reports.push_back(lemma_report_to_json(r));
    }
    std::vector<std::string> aggregates;
    aggregates.reserve(result.summary.per_check.size());
    for (const CheckAggregate& a : result.summary.per_check) {
        aggregates.push_back(
            "{\"check\":\"" + a.name + "\",\"runs\":" + std::to_string(a.runs) +
            ",\"failures\":" + std::to_string(a.failures) +
            ",\"skips\":" + std::to_string(a.skips) +
            ",\"min_margin\":" + (a.runs > 0 ? json_number(a.min_margin) : "null") + "}");
    }
    const SuiteSummary& s = result.summary;
    return "{\"config\":{\"seed\":" + std::to_string(result.config.seed) +
           ",\"count\":" + std::to_string(result.config.count) +
           ",\"n_range\":[" + std::to_string(result.config.n_min) + "," +
           std::to_string(result.config.n_max) + "]" +
           ",\"m_range\":[" + std::to_string(result.config.m_min) + "," +
           std::to_string(result.config.m_max) + "]" +
           ",\"concentration\":" + format_double(result.config.concentration) +
           ",\"tol\":" + format_double(result.tol) + "}" +
           ",\"summary\":{\"instances\":" + std::to_string(s.instance_count) +
           ",\"failed_instances\":" + std::to_string(s.failed_instances) +
           ",\"failed_checks\":" + std::to_string(s.failed_checks) +
           ",\"skipped_checks\":" + std::to_string(s.skipped_checks) +
           ",\"max_hom_vec_ratio\":" + format_double(s.max_hom_vec_ratio) +
           ",\"max_ratio_instance\":" + std::to_string(s.max_ratio_instance) +
           ",\"per_check\":" + detail::json_array(aggregates) + "}" +
           ",\"instances\":" + detail::json_array(reports) + "}";
}

/// One row per check: instance_id, check, lhs, rhs, margin, status.
inline std::string suite_to_csv(const SuiteResult& result) {
    std::string out = "instance_id,check,lhs,rhs,margin,status\n";
    for (const LemmaReport& r : result.reports) {
        for (const CheckRecord& c : r.checks) {
            out += std::to_string(r.instance_id);
            out += ',';
            out += c.name;
            out += ',';
            if (c.skipped) {
                out += ",,,skip\n";
            } else {
                out += format_double(c.lhs);
                out += ',';
                out += format_double(c.rhs);
                out += ',';
                out += format_double(c.margin);
                out += ',';
                out += c.pass ? "pass\n" : "fail\n";
            }
        }
    }
    return out;
}

inline std::string search_to_json(const SearchReport& r) {
    return "{\"best_ratio\":" + format_double(r.best_ratio) +
           ",\"evaluations\":" + std::to_string(r.evaluations) +
           ",\"seed\":" + std::to_string(r.seed) +
           ",\"witness\":" + instance_to_json(r.witness) + "}";
}

}  // namespace tvhom
