#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tvhom/constants.hpp"
#include "tvhom/errors.hpp"
#include "tvhom/generator.hpp"
#include "tvhom/measure.hpp"
#include "tvhom/pmf.hpp"
#include "tvhom/product_tv.hpp"
#include "tvhom/score.hpp"

namespace tvhom {

/// One verified inequality or identity. `margin = rhs - lhs`; the check passes
/// when the margin is no more negative than its tolerance. Checks whose
/// enumeration cost exceeds the budget are marked skipped, never silently
/// passed.
struct CheckRecord {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool pass = false;
    bool skipped = false;
    std::string skip_reason;
};

struct LemmaReport {
    std::size_t instance_id = 0;
    // NaN when the computation exceeded its budget (serialized as null).
    double tv_vec = std::numeric_limits<double>::quiet_NaN();
    double tv_hom = std::numeric_limits<double>::quiet_NaN();
    double hom_vec_ratio = 0.0;  // 0 when both vanish or either is unavailable
    std::vector<CheckRecord> checks;

    bool all_pass() const {
        for (const CheckRecord& c : checks) {
            if (!c.skipped && !c.pass) {
                return false;
            }
        }
        return true;
    }
};

struct VerifyOptions {
    double tol = 1e-9;        // slack for the analytic-inequality checks
    double equality_tol = 1e-10;   // oracle-equality checks (encoding, multinomial)
    double atomwise_tol = 1e-12;   // lift atom comparison and exact-arithmetic checks
    double hom_upper = 6.7129;     // pinned sandwich constants
    double hom_lower = 0.1489;
    double c0_upper = 0.0;         // 0 -> resolved once via optimize_c0()
    std::vector<double> lambda_grid = {0.01, 0.1, 1.0, 10.0, 100.0};
    std::size_t enumeration_budget = 10'000'000;
    std::size_t atom_budget = kDefaultAtomBudget;
    double merge_tol = kDefaultMergeTol;

    VerifyOptions resolved() const {
        VerifyOptions out = *this;
        if (out.c0_upper == 0.0) {
            out.c0_upper = optimize_c0().c0_upper;
        }
        return out;
    }
};

namespace detail {

inline CheckRecord make_check(std::string name, double lhs, double rhs, double tol) {
    CheckRecord c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.margin = rhs - lhs;
    c.pass = c.margin >= -tol;
    return c;
}

inline CheckRecord make_skip(std::string name, std::string reason) {
    CheckRecord c;
    c.name = std::move(name);
    c.skipped = true;
    c.skip_reason = std::move(reason);
    return c;
}

inline bool outcome_space_within(std::size_t m, std::size_t n, std::size_t budget) {
    std::size_t outcomes = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (outcomes > budget / m) {
            return false;
        }
        outcomes *= m;
    }
    return true;
}

// Largest deviation of the two exponential integrals from 1.
inline double admissibility_defect(const AtomicMeasure& eta) {
    const AdmissibilityReport r = check_admissible(eta);
    return std::max(std::abs(r.integral_plus - 1.0), std::abs(r.integral_minus - 1.0));
}

// max(|position diff|, |weight diff|) over aligned atoms; infinity on size mismatch.
inline double atomwise_distance(const AtomicMeasure& a, const AtomicMeasure& b) {
    if (a.size() != b.size()) {
        return std::numeric_limits<double>::infinity();
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.atoms()[i].position - b.atoms()[i].position));
        worst = std::max(worst, std::abs(a.atoms()[i].weight - b.atoms()[i].weight));
    }
    return worst;
}

}  // namespace detail

/// Run the full lemma/theorem check battery on one instance. Failures are
/// recorded as data; checks whose enumeration or atom budget is exceeded are
/// marked "skipped: budget" so oversized instances still exercise whatever
/// fits. Only malformed instances throw.
inline LemmaReport verify_instance(const ProductInstance& inst, std::size_t instance_id,
                                   const VerifyOptions& options) {
    const VerifyOptions opt = options.resolved();
    const std::size_t n = inst.n();
    const std::size_t m = inst.m();
    LemmaReport report;
    report.instance_id = instance_id;
    auto& checks = report.checks;

    const auto within_budget = [](auto&& compute) {
        using Result = std::decay_t<decltype(compute())>;
        try {
            return std::optional<Result>(compute());
        } catch (const EnumerationBudgetExceeded&) {
            return std::optional<Result>();
        } catch (const AtomBudgetExceeded&) {
            return std::optional<Result>();
        }
    };

    // Shared encodings.
    std::vector<AtomicMeasure> etas;
    etas.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        etas.push_back(encode_pair(inst.ps[i], inst.qs[i], opt.merge_tol));
    }
    const std::optional<AtomicMeasure> conv =
        within_budget([&] { return convolve_family(etas, opt.merge_tol, opt.atom_budget); });
    std::optional<double> t_vec;
    if (conv) {
        t_vec = t_functional(*conv);
    }
    const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
    const AtomicMeasure eta_bar = mixture(etas, uniform, opt.merge_tol);
    const std::optional<AtomicMeasure> eta_bar_n = within_budget([&] {
        return power_convolve(eta_bar, static_cast<int>(n), opt.merge_tol, opt.atom_budget);
    });
    std::optional<double> t_hom_conv;
    if (eta_bar_n) {
        t_hom_conv = t_functional(*eta_bar_n);
    }

    const Pmf pbar = homogenize(inst.ps);
    const Pmf qbar = homogenize(inst.qs);
    const std::optional<double> tv_hom = within_budget([&] {
        return tv_homogenized_multinomial(pbar, qbar, static_cast<int>(n),
                                          opt.enumeration_budget);
    });
    if (t_vec) {
        report.tv_vec = *t_vec;
    }
    if (tv_hom) {
        report.tv_hom = *tv_hom;
    }
    report.hom_vec_ratio =
        t_vec && tv_hom && *t_vec > opt.atomwise_tol ? *tv_hom / *t_vec : 0.0;

    // Admissibility closure.
    double defect = 0.0;
    for (const AtomicMeasure& eta : etas) {
        defect = std::max(defect, detail::admissibility_defect(eta));
    }
    checks.push_back(detail::make_check("admissible_coordinates", defect, 0.0, opt.tol));
    if (conv) {
        checks.push_back(detail::make_check(
            "admissible_convolution", detail::admissibility_defect(*conv), 0.0, opt.tol));
    } else {
        checks.push_back(detail::make_skip("admissible_convolution", "budget"));
    }
    checks.push_back(detail::make_check("admissible_mixture",
                                        detail::admissibility_defect(eta_bar), 0.0, opt.tol));

    // Encoding equals the brute-force oracle.
    if (t_vec && detail::outcome_space_within(m, n, opt.enumeration_budget)) {
        const double brute = tv_product_bruteforce(inst, opt.enumeration_budget);
        checks.push_back(detail::make_check("encoding_vs_bruteforce",
                                            std::abs(*t_vec - brute), 0.0, opt.equality_tol));
    } else {
        checks.push_back(detail::make_skip("encoding_vs_bruteforce", "budget"));
    }

    // Lifted-pair encoding coincides with the mixture, atom by atom.
    const LiftedPair lifted = lift(inst);
    const AtomicMeasure eta_lift = encode_pair(lifted.lambda_p, lifted.lambda_q,
                                               opt.merge_tol);
    checks.push_back(detail::make_check("lift_mixture_atomwise",
                                        detail::atomwise_distance(eta_lift, eta_bar), 0.0,
                                        opt.atomwise_tol));

    // Score laws and signal statistics.
    std::vector<ScoreLaw> laws;
    laws.reserve(n);
    double worst_mean = 0.0;
    for (const AtomicMeasure& eta : etas) {
        laws.push_back(score_law(eta, opt.tol, opt.merge_tol));
        worst_mean = std::max(worst_mean, std::abs(laws.back().mean()));
    }
    checks.push_back(detail::make_check("score_zero_mean", worst_mean, 0.0, opt.tol));

    const SignalStats stats = signal_stats(etas, opt.tol, opt.merge_tol);
    checks.push_back(detail::make_check("signal_alpha_le_nu", stats.alpha, stats.nu, opt.tol));
    checks.push_back(
        detail::make_check("signal_nu_le_two_alpha", stats.nu, 2.0 * stats.alpha, opt.tol));

    // Linearization: rho is the total score variance.
    const double rho = stats.nu;
    std::vector<double> second_moments;
    second_moments.reserve(n);
    for (const ScoreLaw& law : laws) {
        second_moments.push_back(law.second_moment());
    }
    const double r_l2 = remainder_l2(second_moments);
    checks.push_back(detail::make_check("linearization_a_l2", r_l2,
                                        std::sinh(rho) - rho, opt.atomwise_tol));

    std::size_t support_product = 1;
    bool enumerable = true;
    for (const ScoreLaw& law : laws) {
        if (support_product > opt.enumeration_budget / law.size()) {
            enumerable = false;
            break;
        }
        support_product *= law.size();
    }

    const std::optional<double> e_abs_s = within_budget(
        [&] { return sum_abs_mean(laws, opt.merge_tol, opt.enumeration_budget); });
    if (e_abs_s) {
        checks.push_back(detail::make_check("linearization_b",
                                            rho / std::sqrt(1.0 + 3.0 * rho), *e_abs_s,
                                            opt.tol));
    } else {
        checks.push_back(detail::make_skip("linearization_b", "budget"));
    }

    // E|Psi| falls back to the score-representation identity when the support
    // is too large to enumerate; the identity check itself is then skipped.
    std::optional<double> e_abs_psi = t_vec;
    if (enumerable && t_vec) {
        e_abs_psi = mean_abs_psi(laws, opt.enumeration_budget);
        checks.push_back(detail::make_check("score_identity", std::abs(*e_abs_psi - *t_vec),
                                            0.0, opt.tol));
        const double e_abs_r = mean_abs_remainder(laws, opt.enumeration_budget);
        checks.push_back(detail::make_check("linearization_a_abs", e_abs_r * e_abs_r, r_l2,
                                            opt.tol));
    } else {
        checks.push_back(detail::make_skip("score_identity", "budget"));
        checks.push_back(detail::make_skip("linearization_a_abs", "budget"));
    }
    if (e_abs_psi && e_abs_s) {
        checks.push_back(detail::make_check("linearization_c", std::abs(*e_abs_psi - *e_abs_s),
                                            d_rho(rho) * *e_abs_s, opt.tol));
    } else {
        checks.push_back(detail::make_skip("linearization_c", "budget"));
    }

    // Khintchine-type two-sided bound.
    const std::optional<double> e_sqrt_v = within_budget(
        [&] { return sqrt_quadratic_mean(laws, opt.merge_tol, opt.enumeration_budget); });
    if (e_sqrt_v && e_abs_s) {
        checks.push_back(detail::make_check(
            "khintchine_lower", *e_sqrt_v / (2.0 * std::sqrt(2.0)), *e_abs_s, opt.tol));
        checks.push_back(
            detail::make_check("khintchine_upper", *e_abs_s, 2.0 * *e_sqrt_v, opt.tol));
    } else {
        checks.push_back(detail::make_skip("khintchine_lower", "budget"));
        checks.push_back(detail::make_skip("khintchine_upper", "budget"));
    }

    // Homogenized score law: Laplace-transform ordering and E sqrt(V) ordering.
    const ScoreLaw law_bar = mixture_law(laws, opt.merge_tol);
    const std::vector<ScoreLaw> hom_laws(n, law_bar);
    double worst_laplace_gap = -std::numeric_limits<double>::infinity();
    for (double lambda : opt.lambda_grid) {
        const double het = laplace_v(laws, lambda);
        const double hom = laplace_v(hom_laws, lambda);
        worst_laplace_gap = std::max(worst_laplace_gap, het - hom);
    }
    checks.push_back(detail::make_check("laplace_ordering", worst_laplace_gap, 0.0,
                                        opt.atomwise_tol));
    const std::optional<double> e_sqrt_v_hom = within_budget(
        [&] { return sqrt_quadratic_mean(hom_laws, opt.merge_tol, opt.enumeration_budget); });
    if (e_sqrt_v_hom && e_sqrt_v) {
        checks.push_back(
            detail::make_check("sqrt_v_ordering", *e_sqrt_v_hom, *e_sqrt_v, opt.tol));
    } else {
        checks.push_back(detail::make_skip("sqrt_v_ordering", "budget"));
    }

    // Mass control on every admissible measure in play.
    double worst_lower = -std::numeric_limits<double>::infinity();
    double worst_upper = -std::numeric_limits<double>::infinity();
    const auto mass_control = [&](const AtomicMeasure& mu, double t_mu) {
        const double mass = total_mass(mu);
        worst_lower = std::max(worst_lower, (1.0 - mass) - t_mu);
        worst_upper = std::max(worst_upper,
                               t_mu - std::sqrt(std::max(0.0, 1.0 - mass * mass)));
    };
    for (const AtomicMeasure& eta : etas) {
        mass_control(eta, t_functional(eta));
    }
    if (conv && t_vec) {
        mass_control(*conv, *t_vec);
    }
    if (eta_bar_n && t_hom_conv) {
        mass_control(*eta_bar_n, *t_hom_conv);
    }
    checks.push_back(
        detail::make_check("mass_control_lower", worst_lower, 0.0, opt.atomwise_tol));
    checks.push_back(
        detail::make_check("mass_control_upper", worst_upper, 0.0, opt.atomwise_tol));

    // Convolution inequality with the computed constant.
    if (t_hom_conv && t_vec) {
        checks.push_back(detail::make_check("main_conv_ratio", *t_hom_conv,
                                            opt.c0_upper * *t_vec, opt.tol));
    } else {
        checks.push_back(detail::make_skip("main_conv_ratio", "budget"));
    }

    // Homogenization sandwich with the pinned constants.
    if (tv_hom && t_vec) {
        checks.push_back(detail::make_check("main_hom_lower", opt.hom_lower * *tv_hom,
                                            *t_vec, opt.atomwise_tol));
        checks.push_back(detail::make_check("main_hom_upper", *tv_hom,
                                            opt.hom_upper * *t_vec, opt.atomwise_tol));
    } else {
        checks.push_back(detail::make_skip("main_hom_lower", "budget"));
        checks.push_back(detail::make_skip("main_hom_upper", "budget"));
    }

    // Multinomial reduction against the brute-force oracle on the homogenized
    // instance.
    if (tv_hom && detail::outcome_space_within(m, n, opt.enumeration_budget)) {
        const ProductInstance hom_inst = ProductInstance::make(
            std::vector<Pmf>(n, pbar), std::vector<Pmf>(n, qbar));
        const double brute = tv_product_bruteforce(hom_inst, opt.enumeration_budget);
        checks.push_back(detail::make_check("multinomial_vs_bruteforce",
                                            std::abs(*tv_hom - brute), 0.0,
                                            opt.equality_tol));
    } else {
        checks.push_back(detail::make_skip("multinomial_vs_bruteforce", "budget"));
    }

    // Data processing: projecting the lifted coordinates onto the alphabet can
    // only lose total variation. The lifted product TV equals t_hom_conv by the
    // atomwise identification certified above.
    if (tv_hom && t_hom_conv) {
        checks.push_back(
            detail::make_check("data_processing", *tv_hom, *t_hom_conv, opt.equality_tol));
    } else {
        checks.push_back(detail::make_skip("data_processing", "budget"));
    }

    return report;
}

struct CheckAggregate {
    std::string name;
    double min_margin = std::numeric_limits<double>::infinity();
    std::size_t failures = 0;
    std::size_t skips = 0;
    std::size_t runs = 0;
};

struct SuiteSummary {
    std::size_t instance_count = 0;
    std::size_t failed_instances = 0;
    std::size_t failed_checks = 0;
    std::size_t skipped_checks = 0;
    double max_hom_vec_ratio = 0.0;
    std::size_t max_ratio_instance = 0;
    std::vector<CheckAggregate> per_check;
};

struct SuiteResult {
    GeneratorConfig config;
    double tol = 0.0;
    std::vector<LemmaReport> reports;
    SuiteSummary summary;

    bool all_pass() const { return summary.failed_checks == 0; }
};

/// Verify `cfg.count` generated instances. Instances may be checked on several
/// threads; per-instance seeds derive from (seed, index), and aggregation is
/// fixed in index order, so the result does not depend on scheduling.
inline SuiteResult run_suite(const GeneratorConfig& cfg, const VerifyOptions& options,
                             unsigned jobs = 1) {
    cfg.validate();
    const VerifyOptions opt = options.resolved();
    SuiteResult result;
    result.config = cfg;
    result.tol = opt.tol;
    result.reports.resize(cfg.count);

    const auto worker = [&](std::atomic<std::size_t>& cursor) {
        while (true) {
            const std::size_t index = cursor.fetch_add(1);
            if (index >= cfg.count) {
                return;
            }
            result.reports[index] = verify_instance(gen_instance(cfg, index), index, opt);
        }
    };
    std::atomic<std::size_t> cursor{0};
    if (jobs <= 1 || cfg.count < 2) {
        worker(cursor);
    } else {
        std::vector<std::thread> threads;
        const unsigned hw = std::thread::hardware_concurrency();
        const unsigned thread_count = std::min(jobs, hw > 0 ? hw : jobs);
        threads.reserve(thread_count);
        for (unsigned t = 0; t < thread_count; ++t) {
            threads.emplace_back(worker, std::ref(cursor));
        }
        for (std::thread& t : threads) {
            t.join();
        }
    }

    SuiteSummary& summary = result.summary;
    summary.instance_count = cfg.count;
    for (const LemmaReport& report : result.reports) {
        if (!report.all_pass()) {
            ++summary.failed_instances;
        }
        if (report.hom_vec_ratio > summary.max_hom_vec_ratio) {
            summary.max_hom_vec_ratio = report.hom_vec_ratio;
            summary.max_ratio_instance = report.instance_id;
        }
        for (const CheckRecord& check : report.checks) {
            CheckAggregate* agg = nullptr;
            for (CheckAggregate& a : summary.per_check) {
                if (a.name == check.name) {
                    agg = &a;
                    break;
                }
            }
            if (agg == nullptr) {
                summary.per_check.push_back(CheckAggregate{check.name});
                agg = &summary.per_check.back();
            }
            if (check.skipped) {
                ++agg->skips;
                ++summary.skipped_checks;
            } else {
                ++agg->runs;
                agg->min_margin = std::min(agg->min_margin, check.margin);
                if (!check.pass) {
                    ++agg->failures;
                    ++summary.failed_checks;
                }
            }
        }
    }
    return result;
}

}  // namespace tvhom
