// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code is the number of failed
// criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tvhom/tvhom.hpp"

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::duration<double>>(
               std::chrono::steady_clock::now() - start)
        .count();
}

void report(int id, const char* title, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", id, title,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) {
        ++failures;
    }
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

void criterion_constants() {
    const auto start = std::chrono::steady_clock::now();
    const double delta = tvhom::delta_eps(0.04439);
    const double c = tvhom::c_eps(0.04439);
    const tvhom::ConstantsReport opt = tvhom::optimize_c0();
    const double elapsed = seconds_since(start);

    const bool pass = std::abs(delta - 0.13691) <= 1e-4 && std::abs(c - 6.71287) <= 1e-3 &&
                      opt.c0_upper <= 6.7129 && opt.c_lower >= 0.1489 && elapsed < 1.0;
    report(1, "constants reproduction", pass,
           fmt("Delta(0.04439)=%.6f C(0.04439)=%.6f c0_upper=%.6f c_lower=%.6f "
               "eps*=%.6f (%.3f s)",
               delta, c, opt.c0_upper, opt.c_lower, opt.eps_star, elapsed));
}

void criterion_encoding_exactness() {
    const auto start = std::chrono::steady_clock::now();
    tvhom::GeneratorConfig cfg;
    cfg.seed = 42;
    cfg.n_min = 1;
    cfg.n_max = 6;
    cfg.m_min = 2;
    cfg.m_max = 4;
    cfg.count = 10'000;
    double worst = 0.0;
    std::size_t worst_index = 0;
    for (std::size_t index = 0; index < cfg.count; ++index) {
        const tvhom::ProductInstance inst = tvhom::gen_instance(cfg, index);
        const double diff =
            std::abs(tvhom::tv_product_exact(inst) - tvhom::tv_product_bruteforce(inst));
        if (diff > worst) {
            worst = diff;
            worst_index = index;
        }
    }
    const double elapsed = seconds_since(start);
    const bool pass = worst <= 1e-10 && elapsed < 120.0;
    report(2, "encoding equals brute force on 10^4 instances", pass,
           fmt("max |exact - brute| = %.3e (instance %zu) over %zu instances (%.1f s)",
               worst, worst_index, cfg.count, elapsed));
}

void criterion_multinomial_identity() {
    tvhom::GeneratorConfig cfg;
    cfg.seed = 42;
    cfg.n_min = 1;
    cfg.n_max = 6;
    cfg.m_min = 2;
    cfg.m_max = 3;
    cfg.count = 1'000;
    double worst = 0.0;
    for (std::size_t index = 0; index < cfg.count; ++index) {
        const tvhom::ProductInstance inst = tvhom::gen_instance(cfg, index);
        const tvhom::Pmf pbar = tvhom::homogenize(inst.ps);
        const tvhom::Pmf qbar = tvhom::homogenize(inst.qs);
        const int n = static_cast<int>(inst.n());
        const tvhom::ProductInstance hom = tvhom::ProductInstance::make(
            std::vector<tvhom::Pmf>(inst.n(), pbar), std::vector<tvhom::Pmf>(inst.n(), qbar));
        const double diff = std::abs(tvhom::tv_homogenized_multinomial(pbar, qbar, n) -
                                     tvhom::tv_product_bruteforce(hom));
        worst = std::max(worst, diff);
    }
    report(3, "multinomial reduction equals brute force on 10^3 triples", worst <= 1e-10,
           fmt("max |multinomial - brute| = %.3e", worst));
}

void criterion_lift_identity() {
    tvhom::GeneratorConfig cfg;
    cfg.seed = 42;
    cfg.count = 1'000;
    double worst_atom = 0.0;
    double worst_t = 0.0;
    for (std::size_t index = 0; index < cfg.count; ++index) {
        const tvhom::ProductInstance inst = tvhom::gen_instance(cfg, index);
        const std::size_t n = inst.n();

        std::vector<tvhom::AtomicMeasure> etas;
        for (std::size_t i = 0; i < n; ++i) {
            etas.push_back(tvhom::encode_pair(inst.ps[i], inst.qs[i]));
        }
        const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
        const tvhom::AtomicMeasure mixed = tvhom::mixture(etas, uniform);

        const tvhom::LiftedPair lifted = tvhom::lift(inst);
        const tvhom::AtomicMeasure encoded = tvhom::encode_pair(lifted.lambda_p,
                                                                lifted.lambda_q);
        if (encoded.size() != mixed.size()) {
            worst_atom = std::numeric_limits<double>::infinity();
        } else {
            for (std::size_t i = 0; i < encoded.size(); ++i) {
                worst_atom = std::max(worst_atom,
                                      std::abs(encoded.atoms()[i].position -
                                               mixed.atoms()[i].position));
                worst_atom = std::max(worst_atom, std::abs(encoded.atoms()[i].weight -
                                                           mixed.atoms()[i].weight));
            }
        }

        // T of the n-fold mixture convolution vs the exact TV of n copies of
        // the lifted pair.
        const double t_bar = tvhom::t_functional(
            tvhom::power_convolve(mixed, static_cast<int>(n)));
        const tvhom::ProductInstance lifted_product = tvhom::ProductInstance::make(
            std::vector<tvhom::Pmf>(n, lifted.lambda_p),
            std::vector<tvhom::Pmf>(n, lifted.lambda_q));
        worst_t = std::max(worst_t,
                           std::abs(t_bar - tvhom::tv_product_exact(lifted_product)));
    }
    const bool pass = worst_atom <= 1e-12 && worst_t <= 1e-9;
    report(4, "lifted-pair identity on 10^3 instances", pass,
           fmt("max atomwise gap = %.3e, max T gap = %.3e", worst_atom, worst_t));
}

void criterion_full_suite() {
    const auto start = std::chrono::steady_clock::now();
    tvhom::GeneratorConfig cfg;
    cfg.seed = 42;
    cfg.n_min = 1;
    cfg.n_max = 6;
    cfg.m_min = 2;
    cfg.m_max = 4;
    cfg.count = 10'000;
    const tvhom::VerifyOptions opt;
    const tvhom::SuiteResult result = tvhom::run_suite(cfg, opt);
    const double elapsed = seconds_since(start);
    const bool pass = result.summary.failed_checks == 0 && elapsed < 600.0;
    report(5, "full lemma suite on 10^4 seeded instances", pass,
           fmt("%zu failed checks, %zu skipped, max hom/vec ratio %.6f (%.1f s)",
               result.summary.failed_checks, result.summary.skipped_checks,
               result.summary.max_hom_vec_ratio, elapsed));
}

void criterion_hand_fixtures() {
    const tvhom::Pmf p = tvhom::Pmf::from_probs({0.5, 0.5});
    const tvhom::Pmf q = tvhom::Pmf::from_probs({0.75, 0.25});
    const tvhom::AtomicMeasure eta = tvhom::encode_pair(p, q);
    const double t1 = tvhom::t_functional(eta);
    const double t2 = tvhom::t_functional(tvhom::convolve(eta, eta));
    const double mass = tvhom::total_mass(eta);
    const std::vector<tvhom::AtomicMeasure> etas{eta};
    const tvhom::SignalStats stats = tvhom::signal_stats(etas);

    const std::vector<tvhom::Pmf> wps(2, p);
    const std::vector<tvhom::Pmf> wqs{tvhom::Pmf::from_probs({0.7, 0.3}),
                                      tvhom::Pmf::from_probs({0.3, 0.7})};
    const tvhom::ProductInstance witness = tvhom::ProductInstance::make(wps, wqs);
    const double w_vec = tvhom::tv_product_exact(witness);
    const double w_hom = tvhom::tv_homogenized_multinomial(
        tvhom::homogenize(witness.ps), tvhom::homogenize(witness.qs), 2);

    const bool pass = std::abs(t1 - 0.25) <= 1e-12 && std::abs(t2 - 0.3125) <= 1e-12 &&
                      std::abs(mass - 0.9659258263) <= 1e-9 &&
                      std::abs(stats.alpha - 0.0340742) <= 1e-6 &&
                      std::abs(stats.nu - 0.0666667) <= 1e-6 &&
                      std::abs(w_vec - 0.24) <= 1e-12 && w_hom <= 1e-15;
    report(6, "hand-value fixtures", pass,
           fmt("T=%.12f T*2=%.12f mass=%.12f alpha=%.7f nu=%.7f witness vec=%.12f hom=%.1e",
               t1, t2, mass, stats.alpha, stats.nu, w_vec, w_hom));
}

void criterion_worst_ratio_search() {
    try {
        tvhom::SearchOptions opt;
        opt.seed = 42;
        opt.restarts = 50;
        opt.steps = 200;
        opt.family = tvhom::SearchFamily::bernoulli;
        opt.n_max = 16;
        const tvhom::SearchReport search = tvhom::search_worst_ratio(opt);

        const double replay = tvhom::hom_vec_ratio(search.witness);
        const bool reproducible = std::abs(replay - search.best_ratio) <= 1e-12;

        // independent cross-validation: exhaustive structured grids
        const tvhom::GridSearchResult grid2 = tvhom::bernoulli_grid_search(2, 0.05);
        const tvhom::GridSearchResult grid3 = tvhom::bernoulli_grid_search(3, 0.10);
        const double grid_best = std::max(grid2.best_ratio, grid3.best_ratio);

        const bool soft_target = search.best_ratio > 1.0 && grid_best > 1.0;
        const bool hard_bound = search.best_ratio <= 6.7129 && grid_best <= 6.7129;
        const bool pass = hard_bound && reproducible;
        report(7, "worst-ratio search (soft target: ratio > 1)", pass,
               fmt("search best=%.6f (witness n=%zu, reproducible=%s), grid best=%.6f "
                   "(n=2: %.6f, n=3: %.6f), soft target %s",
                   search.best_ratio, search.witness.n(), reproducible ? "yes" : "no",
                   grid_best, grid2.best_ratio, grid3.best_ratio,
                   soft_target ? "met" : "NOT met"));
    } catch (const tvhom::TheoremViolation& e) {
        report(7, "worst-ratio search (soft target: ratio > 1)", false,
               std::string("theorem violation: ") + e.what());
    }
}

}  // namespace

int main() {
    criterion_constants();
    criterion_encoding_exactness();
    criterion_multinomial_identity();
    criterion_lift_identity();
    criterion_full_suite();
    criterion_hand_fixtures();
    criterion_worst_ratio_search();
    std::printf("%s: %d of 7 criteria failed\n", failures == 0 ? "PASS" : "FAIL", failures);
    return failures;
}
