// tvhom: exact total variation between heterogeneous product distributions,
// its homogenized counterpart, explicit constants, and the verification and
// extremal-search harnesses. Exit codes: 0 success / all checks pass,
// 1 check failure or theorem violation, 2 usage or input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tvhom/tvhom.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) {
        throw tvhom::InputParseError("cannot open output file: " + out_path);
    }
    out << text << "\n";
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("TVH_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring non-numeric TVH_SEED\n";
        }
    }
    return 42;
}

void warn_if_deep(const tvhom::ProductInstance& inst) {
    if (inst.n() > 40) {
        std::cerr << "warning: n = " << inst.n()
                  << " coordinates; linear-domain atom weights may underflow beyond ~40\n";
    }
}

struct InstanceFlags {
    std::string input_path;
    double smooth_delta = 0.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--input", input_path, "instance JSON file")->required();
        cmd->add_option("--smooth", smooth_delta,
                        "smooth every marginal by (1-d)p + d/m before computing "
                        "(allows zero entries)")
            ->check(CLI::Range(0.0, 1.0));
    }

    tvhom::ProductInstance load() const {
        tvhom::ProductInstance inst = tvhom::load_instance(input_path, smooth_delta);
        warn_if_deep(inst);
        return inst;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"total variation of product distributions: exact, homogenized, verified"};
    app.require_subcommand(1);
    std::string out_path;
    app.add_option("--out", out_path, "output file (default stdout)");

    // encode
    auto* encode_cmd = app.add_subcommand(
        "encode", "emit the per-coordinate atomic encodings and their convolution");
    InstanceFlags encode_flags;
    encode_flags.attach(encode_cmd);

    // tv-product
    auto* product_cmd =
        app.add_subcommand("tv-product", "exact TV between the two product distributions");
    InstanceFlags product_flags;
    product_flags.attach(product_cmd);

    // tv-homog
    auto* homog_cmd = app.add_subcommand(
        "tv-homog", "TV between the homogenized products via the multinomial law");
    InstanceFlags homog_flags;
    homog_flags.attach(homog_cmd);

    // oracle
    auto* oracle_cmd = app.add_subcommand(
        "oracle", "brute-force product TV and comparison against the exact path");
    InstanceFlags oracle_flags;
    oracle_flags.attach(oracle_cmd);
    std::size_t oracle_budget = 10'000'000;
    oracle_cmd->add_option("--budget", oracle_budget, "outcome enumeration cap");

    // constants
    auto* constants_cmd =
        app.add_subcommand("constants", "optimize the explicit homogenization constants");
    double grid_lo = 1e-4;
    double grid_hi = 0.5;
    int grid_steps = 1000;
    double refine_tol = 1e-10;
    constants_cmd->add_option("--grid-lo", grid_lo, "grid lower end");
    constants_cmd->add_option("--grid-hi", grid_hi, "grid upper end");
    constants_cmd->add_option("--grid-steps", grid_steps, "grid steps");
    constants_cmd->add_option("--refine-tol", refine_tol, "golden-section tolerance");

    // verify
    auto* verify_cmd = app.add_subcommand(
        "verify", "run the full inequality suite on seeded random instances");
    tvhom::GeneratorConfig gen;
    gen.seed = default_seed();
    tvhom::VerifyOptions verify_opt;
    unsigned jobs = 1;
    std::string format = "json";
    verify_cmd->add_option("--seed", gen.seed, "corpus seed (default TVH_SEED or 42)");
    verify_cmd->add_option("--count", gen.count, "number of instances");
    verify_cmd->add_option("--n-min", gen.n_min, "min coordinates")->check(CLI::Range(1, 64));
    verify_cmd->add_option("--n-max", gen.n_max, "max coordinates")->check(CLI::Range(1, 64));
    verify_cmd->add_option("--m-min", gen.m_min, "min alphabet size")
        ->check(CLI::Range(2, 4096));
    verify_cmd->add_option("--m-max", gen.m_max, "max alphabet size")
        ->check(CLI::Range(2, 4096));
    verify_cmd->add_option("--concentration", gen.concentration, "Dirichlet concentration")
        ->check(CLI::PositiveNumber);
    verify_cmd->add_option("--tol", verify_opt.tol, "slack for analytic inequality checks")
        ->check(CLI::PositiveNumber);
    verify_cmd->add_option("--budget", verify_opt.enumeration_budget,
                           "enumeration cap for oracle checks");
    verify_cmd->add_option("--lambda", verify_opt.lambda_grid,
                           "Laplace-transform check grid");
    verify_cmd->add_option("--jobs", jobs, "worker threads (output is order-independent)")
        ->check(CLI::PositiveNumber);
    verify_cmd->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    // search
    auto* search_cmd = app.add_subcommand(
        "search", "hill-climb for the largest homogenized/heterogeneous TV ratio");
    tvhom::SearchOptions search_opt;
    search_opt.seed = default_seed();
    std::string family = "bernoulli";
    search_cmd->add_option("--seed", search_opt.seed, "search seed");
    search_cmd->add_option("--restarts", search_opt.restarts, "random restarts")
        ->check(CLI::PositiveNumber);
    search_cmd->add_option("--steps", search_opt.steps, "hill-climb steps per restart");
    search_cmd->add_option("--family", family, "bernoulli or general")
        ->check(CLI::IsMember({"bernoulli", "general"}));
    search_cmd->add_option("--n-max", search_opt.n_max, "max coordinates");
    search_cmd->add_option("--m-max", search_opt.m_max, "max alphabet (general family)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (encode_cmd->parsed()) {
            const tvhom::ProductInstance inst = encode_flags.load();
            std::string etas = "[";
            std::string reports = "[";
            std::vector<tvhom::AtomicMeasure> encoded;
            for (std::size_t i = 0; i < inst.n(); ++i) {
                encoded.push_back(tvhom::encode_pair(inst.ps[i], inst.qs[i]));
                const tvhom::AdmissibilityReport adm = tvhom::check_admissible(encoded.back());
                if (i > 0) {
                    etas += ",";
                    reports += ",";
                }
                etas += tvhom::measure_to_json(encoded.back());
                reports += "{\"integral_plus\":" + tvhom::format_double(adm.integral_plus) +
                           ",\"integral_minus\":" + tvhom::format_double(adm.integral_minus) +
                           ",\"admissible\":" + (adm.admissible ? "true" : "false") +
                           ",\"t\":" + tvhom::format_double(tvhom::t_functional(encoded.back())) +
                           "}";
            }
            etas += "]";
            reports += "]";
            const tvhom::AtomicMeasure conv = tvhom::convolve_family(encoded);
            write_output(out_path,
                         "{\"n\":" + std::to_string(inst.n()) +
                             ",\"m\":" + std::to_string(inst.m()) + ",\"etas\":" + etas +
                             ",\"admissibility\":" + reports +
                             ",\"convolution\":" + tvhom::measure_to_json(conv) +
                             ",\"t_convolution\":" +
                             tvhom::format_double(tvhom::t_functional(conv)) + "}");
            return kExitOk;
        }

        if (product_cmd->parsed()) {
            const tvhom::ProductInstance inst = product_flags.load();
            const double tv = tvhom::tv_product_exact(inst);
            write_output(out_path, "{\"n\":" + std::to_string(inst.n()) +
                                       ",\"m\":" + std::to_string(inst.m()) +
                                       ",\"tv_product\":" + tvhom::format_double(tv) + "}");
            return kExitOk;
        }

        if (homog_cmd->parsed()) {
            const tvhom::ProductInstance inst = homog_flags.load();
            const double tv = tvhom::tv_homogenized_multinomial(
                tvhom::homogenize(inst.ps), tvhom::homogenize(inst.qs),
                static_cast<int>(inst.n()));
            write_output(out_path, "{\"n\":" + std::to_string(inst.n()) +
                                       ",\"m\":" + std::to_string(inst.m()) +
                                       ",\"tv_homogenized\":" + tvhom::format_double(tv) +
                                       "}");
            return kExitOk;
        }

        if (oracle_cmd->parsed()) {
            const tvhom::ProductInstance inst = oracle_flags.load();
            const double brute = tvhom::tv_product_bruteforce(inst, oracle_budget);
            const double exact = tvhom::tv_product_exact(inst);
            const double diff = std::abs(brute - exact);
            const bool match = diff <= 1e-10;
            write_output(out_path,
                         "{\"tv_bruteforce\":" + tvhom::format_double(brute) +
                             ",\"tv_product\":" + tvhom::format_double(exact) +
                             ",\"abs_diff\":" + tvhom::format_double(diff) +
                             ",\"match\":" + (match ? "true" : "false") + "}");
            return match ? kExitOk : kExitCheckFailure;
        }

        if (constants_cmd->parsed()) {
            const tvhom::ConstantsReport report =
                tvhom::optimize_c0(grid_lo, grid_hi, grid_steps, refine_tol);
            write_output(out_path, tvhom::constants_to_json(report));
            return kExitOk;
        }

        if (verify_cmd->parsed()) {
            const tvhom::SuiteResult result = tvhom::run_suite(gen, verify_opt, jobs);
            write_output(out_path, format == "csv" ? tvhom::suite_to_csv(result)
                                                   : tvhom::suite_to_json(result));
            std::cerr << "verify: " << result.summary.instance_count << " instances, "
                      << result.summary.failed_checks << " failed checks, "
                      << result.summary.skipped_checks << " skipped, max hom/vec ratio "
                      << result.summary.max_hom_vec_ratio << "\n";
            return result.all_pass() ? kExitOk : kExitCheckFailure;
        }

        if (search_cmd->parsed()) {
            search_opt.family = family == "bernoulli" ? tvhom::SearchFamily::bernoulli
                                                      : tvhom::SearchFamily::general;
            const tvhom::SearchReport report = tvhom::search_worst_ratio(search_opt);
            write_output(out_path, tvhom::search_to_json(report));
            return kExitOk;
        }
    } catch (const tvhom::InputParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tvhom::TheoremViolation& e) {
        std::cerr << "theorem violation: " << e.what() << "\n";
        return kExitCheckFailure;
    } catch (const tvhom::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailure;
    }
    return kExitUsage;
}
