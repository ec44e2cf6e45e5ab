#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tvhom/generator.hpp"
#include "tvhom/measure.hpp"
#include "tvhom/pmf.hpp"
#include "tvhom/product_tv.hpp"

using namespace tvhom;

namespace {

// The worked two-point pair used throughout: P = (1/2, 1/2), Q = (3/4, 1/4).
AtomicMeasure eta_a() {
    return encode_pair(Pmf::from_probs({0.5, 0.5}), Pmf::from_probs({0.75, 0.25}));
}

std::vector<AtomicMeasure> random_admissible_family(std::uint64_t seed, std::size_t index) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.n_min = 1;
    cfg.n_max = 5;
    cfg.m_min = 2;
    cfg.m_max = 4;
    cfg.count = index + 1;
    const ProductInstance inst = gen_instance(cfg, index);
    std::vector<AtomicMeasure> etas;
    for (std::size_t i = 0; i < inst.n(); ++i) {
        etas.push_back(encode_pair(inst.ps[i], inst.qs[i]));
    }
    return etas;
}

}  // namespace

TEST_CASE("make_measure merges exact duplicates") {
    const AtomicMeasure eta = make_measure({{0.0, 0.5}, {0.0, 0.5}});
    REQUIRE(eta.size() == 1);
    CHECK(eta.atoms()[0].position == 0.0);
    CHECK(eta.atoms()[0].weight == 1.0);
}

TEST_CASE("make_measure sorts atoms by position") {
    const AtomicMeasure eta =
        make_measure({{0.3465735903, 0.3535533906}, {-0.2027325541, 0.6123724357}});
    REQUIRE(eta.size() == 2);
    CHECK(eta.atoms()[0].position == Catch::Approx(-0.2027325541).margin(1e-12));
    CHECK(eta.atoms()[1].position == Catch::Approx(0.3465735903).margin(1e-12));
}

TEST_CASE("make_measure rejects bad input") {
    CHECK_THROWS_AS(make_measure({{1.0, 0.0}}), EmptyMeasure);
    CHECK_THROWS_AS(make_measure({{std::nan(""), 1.0}}), NonFiniteInput);
    CHECK_THROWS_AS(make_measure({{0.0, std::numeric_limits<double>::infinity()}}),
                    NonFiniteInput);
    CHECK_THROWS_AS(make_measure({{0.0, -1.0}}), Error);
}

TEST_CASE("canonical form merges near-equal positions weight first") {
    // two atoms 1e-13 apart merge to the weight-averaged position
    const AtomicMeasure eta = make_measure({{0.0, 1.0}, {1e-13, 3.0}});
    REQUIRE(eta.size() == 1);
    CHECK(eta.atoms()[0].position == Catch::Approx(0.75e-13).margin(1e-20));
    CHECK(eta.atoms()[0].weight == 4.0);
}

TEST_CASE("canonicalization is idempotent") {
    const AtomicMeasure eta = eta_a();
    const AtomicMeasure again = AtomicMeasure::from_atoms(eta.atoms());
    CHECK(eta == again);
}

TEST_CASE("encode_pair reproduces the worked pair") {
    const AtomicMeasure eta = eta_a();
    REQUIRE(eta.size() == 2);
    CHECK(eta.atoms()[0].position == Catch::Approx(-0.2027325541).margin(1e-10));
    CHECK(eta.atoms()[0].weight == Catch::Approx(0.6123724357).margin(1e-10));
    CHECK(eta.atoms()[1].position == Catch::Approx(0.3465735903).margin(1e-10));
    CHECK(eta.atoms()[1].weight == Catch::Approx(0.3535533906).margin(1e-10));
}

TEST_CASE("encode_pair collapses equal distributions to a unit point mass") {
    const Pmf p = Pmf::from_probs({0.5, 0.5});
    const AtomicMeasure eta = encode_pair(p, p);
    REQUIRE(eta.size() == 1);
    CHECK(eta.atoms()[0].position == 0.0);
    CHECK(eta.atoms()[0].weight == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("encode_pair rejects mismatched or degenerate pmfs") {
    CHECK_THROWS_AS(Pmf::from_probs({0.5, 0.5, 0.0}), ZeroProbability);
    CHECK_THROWS_AS(encode_pair(Pmf::from_probs({0.5, 0.5}),
                                Pmf::from_probs({0.5, 0.25, 0.25})),
                    AlphabetMismatch);
}

TEST_CASE("check_admissible") {
    SECTION("unit point mass at zero") {
        const AdmissibilityReport r = check_admissible(dirac(0.0));
        CHECK(r.integral_plus == Catch::Approx(1.0).margin(1e-15));
        CHECK(r.integral_minus == Catch::Approx(1.0).margin(1e-15));
        CHECK(r.admissible);
    }
    SECTION("encoded pairs are admissible") {
        const AdmissibilityReport r = check_admissible(eta_a());
        CHECK(r.integral_plus == Catch::Approx(1.0).margin(1e-14));
        CHECK(r.integral_minus == Catch::Approx(1.0).margin(1e-14));
        CHECK(r.admissible);
    }
    SECTION("shifted point mass is not admissible") {
        const AdmissibilityReport r = check_admissible(dirac(0.5));
        CHECK(r.integral_plus == Catch::Approx(std::exp(0.5)).margin(1e-12));
        CHECK(r.integral_minus == Catch::Approx(std::exp(-0.5)).margin(1e-12));
        CHECK_FALSE(r.admissible);
    }
}

TEST_CASE("convolve point masses") {
    const AtomicMeasure c = convolve(dirac(1.0, 0.5), dirac(2.0, 0.25));
    REQUIRE(c.size() == 1);
    CHECK(c.atoms()[0].position == 3.0);
    CHECK(c.atoms()[0].weight == 0.125);
}

TEST_CASE("convolve the worked pair with itself") {
    const AtomicMeasure c = convolve(eta_a(), eta_a());
    REQUIRE(c.size() == 3);
    CHECK(c.atoms()[0].position == Catch::Approx(-0.4054651).margin(1e-7));
    CHECK(c.atoms()[0].weight == Catch::Approx(0.375).margin(1e-10));
    CHECK(c.atoms()[1].position == Catch::Approx(0.1438410).margin(1e-7));
    CHECK(c.atoms()[1].weight == Catch::Approx(0.4330127).margin(1e-7));
    CHECK(c.atoms()[2].position == Catch::Approx(0.6931472).margin(1e-7));
    CHECK(c.atoms()[2].weight == Catch::Approx(0.125).margin(1e-10));
}

TEST_CASE("unit mass at zero is the convolution identity") {
    const AtomicMeasure eta = eta_a();
    const AtomicMeasure c = convolve(eta, dirac(0.0));
    REQUIRE(c.size() == eta.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(c.atoms()[i].position == Catch::Approx(eta.atoms()[i].position).margin(1e-15));
        CHECK(c.atoms()[i].weight == Catch::Approx(eta.atoms()[i].weight).margin(1e-15));
    }
}

TEST_CASE("convolve enforces the atom budget") {
    std::vector<Atom> many;
    for (int i = 0; i < 4000; ++i) {
        many.push_back({static_cast<double>(i), 1.0});
    }
    const AtomicMeasure big = AtomicMeasure::from_atoms(many);
    CHECK_THROWS_AS(convolve(big, big, kDefaultMergeTol, 10'000'000), AtomBudgetExceeded);
}

TEST_CASE("convolve_family basics") {
    const AtomicMeasure eta = eta_a();
    SECTION("single element") {
        const std::vector<AtomicMeasure> fam{eta};
        CHECK(convolve_family(fam) == eta);
    }
    SECTION("two elements match convolve") {
        const std::vector<AtomicMeasure> fam{eta, eta};
        CHECK(convolve_family(fam) == convolve(eta, eta));
    }
    SECTION("point masses add positions") {
        const std::vector<AtomicMeasure> fam{dirac(1.0), dirac(1.0), dirac(1.0)};
        const AtomicMeasure c = convolve_family(fam);
        REQUIRE(c.size() == 1);
        CHECK(c.atoms()[0].position == 3.0);
        CHECK(c.atoms()[0].weight == 1.0);
    }
}

TEST_CASE("power_convolve") {
    const AtomicMeasure eta = eta_a();
    CHECK(power_convolve(eta, 1) == eta);

    const AtomicMeasure d3 = power_convolve(dirac(0.5), 3);
    REQUIRE(d3.size() == 1);
    CHECK(d3.atoms()[0].position == 1.5);
    CHECK(d3.atoms()[0].weight == 1.0);

    const AtomicMeasure p2 = power_convolve(eta, 2);
    const AtomicMeasure c2 = convolve(eta, eta);
    REQUIRE(p2.size() == c2.size());
    for (std::size_t i = 0; i < p2.size(); ++i) {
        CHECK(p2.atoms()[i].position == Catch::Approx(c2.atoms()[i].position).margin(1e-12));
        CHECK(p2.atoms()[i].weight == Catch::Approx(c2.atoms()[i].weight).margin(1e-12));
    }
    CHECK_THROWS_AS(power_convolve(eta, 0), Error);
}

TEST_CASE("mixture basics") {
    const AtomicMeasure eta = eta_a();
    SECTION("mixture of identical measures is the measure") {
        const std::vector<AtomicMeasure> fam{eta, eta};
        const std::vector<double> w{0.5, 0.5};
        const AtomicMeasure mix = mixture(fam, w);
        REQUIRE(mix.size() == eta.size());
        for (std::size_t i = 0; i < mix.size(); ++i) {
            CHECK(mix.atoms()[i].weight ==
                  Catch::Approx(eta.atoms()[i].weight).margin(1e-15));
        }
    }
    SECTION("mixtures of encodings stay admissible") {
        const AtomicMeasure a =
            encode_pair(Pmf::from_probs({0.5, 0.5}), Pmf::from_probs({0.7, 0.3}));
        const AtomicMeasure b =
            encode_pair(Pmf::from_probs({0.5, 0.5}), Pmf::from_probs({0.3, 0.7}));
        const std::vector<AtomicMeasure> fam{a, b};
        const std::vector<double> w{0.5, 0.5};
        CHECK(check_admissible(mixture(fam, w), 1e-9).admissible);
    }
    SECTION("weights must sum to one") {
        const std::vector<AtomicMeasure> fam{eta};
        const std::vector<double> w{0.9};
        CHECK_THROWS_AS(mixture(fam, w), WeightMismatch);
        const std::vector<double> w2{0.5, 0.5};
        CHECK_THROWS_AS(mixture(fam, w2), WeightMismatch);
    }
}

TEST_CASE("t_functional fixtures") {
    CHECK(t_functional(dirac(0.0)) == 0.0);
    CHECK(t_functional(eta_a()) == Catch::Approx(0.25).margin(1e-12));
    CHECK(t_functional(convolve(eta_a(), eta_a())) == Catch::Approx(0.3125).margin(1e-12));
}

TEST_CASE("total_mass fixtures") {
    CHECK(total_mass(dirac(0.0)) == 1.0);
    CHECK(total_mass(eta_a()) == Catch::Approx(0.9659258263).margin(1e-9));
    CHECK(total_mass(convolve(eta_a(), eta_a())) ==
          Catch::Approx(0.9659258263 * 0.9659258263).margin(1e-9));
}

TEST_CASE("admissibility is closed under convolution and mixture") {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        const auto etas = random_admissible_family(1000 + trial, trial);
        for (const AtomicMeasure& eta : etas) {
            CAPTURE(trial);
            REQUIRE(check_admissible(eta, 1e-9).admissible);
        }
        REQUIRE(check_admissible(convolve_family(etas), 1e-9).admissible);
        const std::vector<double> uniform(etas.size(), 1.0 / etas.size());
        REQUIRE(check_admissible(mixture(etas, uniform), 1e-9).admissible);
    }
}

TEST_CASE("total mass is multiplicative under convolution") {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        const auto etas = random_admissible_family(2000 + trial, trial);
        if (etas.size() < 2) {
            continue;
        }
        const double lhs = total_mass(convolve(etas[0], etas[1]));
        const double rhs = total_mass(etas[0]) * total_mass(etas[1]);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
    }
}

TEST_CASE("mass control bounds T for admissible measures") {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        const auto etas = random_admissible_family(3000 + trial, trial);
        auto check_bounds = [](const AtomicMeasure& mu) {
            const double m = total_mass(mu);
            const double t = t_functional(mu);
            CHECK(1.0 - m <= t + 1e-12);
            CHECK(t <= std::sqrt(std::max(0.0, 1.0 - m * m)) + 1e-12);
        };
        for (const AtomicMeasure& eta : etas) {
            check_bounds(eta);
        }
        check_bounds(convolve_family(etas));
    }
}

TEST_CASE("encoding mass identity") {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        GeneratorConfig cfg;
        cfg.seed = 4000 + trial;
        cfg.count = 1;
        const ProductInstance inst = gen_instance(cfg, 0);
        for (std::size_t i = 0; i < inst.n(); ++i) {
            double affinity = 0.0;
            for (std::size_t w = 0; w < inst.m(); ++w) {
                affinity += std::sqrt(inst.ps[i](w) * inst.qs[i](w));
            }
            const double mass = total_mass(encode_pair(inst.ps[i], inst.qs[i]));
            CHECK(mass == Catch::Approx(affinity).margin(1e-12));
            CHECK(mass > 0.0);
            CHECK(mass <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("convolution commutes and associates up to canonical form") {
    const auto etas = random_admissible_family(77, 3);
    if (etas.size() >= 2) {
        const AtomicMeasure ab = convolve(etas[0], etas[1]);
        const AtomicMeasure ba = convolve(etas[1], etas[0]);
        REQUIRE(ab.size() == ba.size());
        for (std::size_t i = 0; i < ab.size(); ++i) {
            CHECK(ab.atoms()[i].weight ==
                  Catch::Approx(ba.atoms()[i].weight).margin(1e-12));
        }
    }
    if (etas.size() >= 3) {
        const AtomicMeasure left = convolve(convolve(etas[0], etas[1]), etas[2]);
        const AtomicMeasure right = convolve(etas[0], convolve(etas[1], etas[2]));
        REQUIRE(left.size() == right.size());
        for (std::size_t i = 0; i < left.size(); ++i) {
            CHECK(left.atoms()[i].weight ==
                  Catch::Approx(right.atoms()[i].weight).margin(1e-12));
        }
    }
}
