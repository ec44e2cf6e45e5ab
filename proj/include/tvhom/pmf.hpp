#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tvhom/errors.hpp"
#include "tvhom/numeric.hpp"

namespace tvhom {

/// Strictly positive probability mass function on a finite alphabet.
/// Zeros are rejected at construction; use smooth() to lift a pmf with zeros
/// into the strictly positive interior first.
class Pmf {
public:
    static Pmf from_probs(std::vector<double> probs, double sum_tol = 1e-12) {
        if (probs.empty()) {
            throw ZeroProbability("pmf needs a non-empty alphabet");
        }
        KahanSum sum;
        for (double p : probs) {
            if (!std::isfinite(p)) {
                throw NonFiniteInput("pmf entries must be finite");
            }
            if (p <= 0.0) {
                throw ZeroProbability("pmf entries must be strictly positive, got " +
                                      std::to_string(p));
            }
            sum.add(p);
        }
        if (std::abs(sum.value() - 1.0) > sum_tol) {
            throw Error("pmf sums to " + std::to_string(sum.value()) + ", expected 1");
        }
        return Pmf(std::move(probs));
    }

    std::size_t alphabet_size() const { return probs_.size(); }
    const std::vector<double>& probs() const { return probs_; }
    double operator()(std::size_t symbol) const { return probs_[symbol]; }

    bool operator==(const Pmf& other) const = default;

private:
    explicit Pmf(std::vector<double> probs) : probs_(std::move(probs)) {}

    std::vector<double> probs_;
};

inline Pmf uniform_pmf(std::size_t m) {
    return Pmf::from_probs(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

/// Total variation between two pmfs on the same alphabet: half the L1 distance.
inline double tv_pmf(const Pmf& p, const Pmf& q) {
    if (p.alphabet_size() != q.alphabet_size()) {
        throw AlphabetMismatch("tv_pmf: alphabets of size " +
                               std::to_string(p.alphabet_size()) + " and " +
                               std::to_string(q.alphabet_size()));
    }
    KahanSum sum;
    for (std::size_t w = 0; w < p.alphabet_size(); ++w) {
        sum.add(std::abs(p(w) - q(w)));
    }
    return 0.5 * sum.value();
}

/// Coordinatewise arithmetic mean of a family of pmfs on a common alphabet.
inline Pmf homogenize(std::span<const Pmf> pmfs) {
    if (pmfs.empty()) {
        throw Error("homogenize requires a non-empty family");
    }
    const std::size_t m = pmfs[0].alphabet_size();
    std::vector<double> mean(m, 0.0);
    const double inv_n = 1.0 / static_cast<double>(pmfs.size());
    for (const Pmf& p : pmfs) {
        if (p.alphabet_size() != m) {
            throw AlphabetMismatch("homogenize: mixed alphabet sizes");
        }
        for (std::size_t w = 0; w < m; ++w) {
            mean[w] += inv_n * p(w);
        }
    }
    return Pmf::from_probs(std::move(mean), 1e-9);
}

/// (1 - delta) * p + delta / m. Takes a raw probability vector so that inputs
/// with zeros are allowed; the output is strictly positive for delta in (0,1).
inline Pmf smooth(std::span<const double> probs, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw BadDelta("smoothing parameter must lie in (0, 1), got " + std::to_string(delta));
    }
    if (probs.empty()) {
        throw ZeroProbability("smooth needs a non-empty alphabet");
    }
    KahanSum sum;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0) {
            throw NonFiniteInput("smooth input entries must be finite and nonnegative");
        }
        sum.add(p);
    }
    if (std::abs(sum.value() - 1.0) > 1e-12) {
        throw Error("smooth input sums to " + std::to_string(sum.value()) + ", expected 1");
    }
    const double floor = delta / static_cast<double>(probs.size());
    std::vector<double> out;
    out.reserve(probs.size());
    for (double p : probs) {
        out.push_back((1.0 - delta) * p + floor);
    }
    return Pmf::from_probs(std::move(out), 1e-9);
}

inline Pmf smooth(std::initializer_list<double> probs, double delta) {
    return smooth(std::span<const double>(probs.begin(), probs.size()), delta);
}

/// A heterogeneous product testing problem: coordinates i = 1..n with
/// marginals P_i vs Q_i, all on one alphabet of size m.
struct ProductInstance {
    std::vector<Pmf> ps;
    std::vector<Pmf> qs;

    static ProductInstance make(std::vector<Pmf> ps, std::vector<Pmf> qs) {
        if (ps.empty() || ps.size() != qs.size()) {
            throw AlphabetMismatch("instance needs matching non-empty P and Q lists");
        }
        const std::size_t m = ps[0].alphabet_size();
        for (const Pmf& p : ps) {
            if (p.alphabet_size() != m) {
                throw AlphabetMismatch("instance P marginals on mixed alphabets");
            }
        }
        for (const Pmf& q : qs) {
            if (q.alphabet_size() != m) {
                throw AlphabetMismatch("instance Q marginals on mixed alphabets");
            }
        }
        return ProductInstance{std::move(ps), std::move(qs)};
    }

    std::size_t n() const { return ps.size(); }
    std::size_t m() const { return ps[0].alphabet_size(); }
};

/// The pair of mass functions on [n] x Omega that represents homogenization:
/// lambda_p(i, w) = P_i(w) / n and likewise for Q. Flat index convention:
/// (i, w) -> i * m + w with both indices 0-based.
struct LiftedPair {
    Pmf lambda_p;
    Pmf lambda_q;
    std::size_t n = 0;
    std::size_t m = 0;

    std::size_t flat_index(std::size_t i, std::size_t w) const { return i * m + w; }
};

inline LiftedPair lift(const ProductInstance& inst) {
    const std::size_t n = inst.n();
    const std::size_t m = inst.m();
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> lp;
    std::vector<double> lq;
    lp.reserve(n * m);
    lq.reserve(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t w = 0; w < m; ++w) {
            lp.push_back(inst.ps[i](w) * inv_n);
            lq.push_back(inst.qs[i](w) * inv_n);
        }
    }
    return LiftedPair{Pmf::from_probs(std::move(lp), 1e-9),
                      Pmf::from_probs(std::move(lq), 1e-9), n, m};
}

}  // namespace tvhom
