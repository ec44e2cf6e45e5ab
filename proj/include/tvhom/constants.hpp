#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "tvhom/errors.hpp"

namespace tvhom {

namespace detail {

// (sinh t - t) / t^2. The closed form cancels catastrophically for small t,
// so below 1e-2 it is evaluated by six terms of the series
// sum_{j>=1} t^{2j-1} / (2j+1)!.
inline double sinh_defect_ratio(double t) {
    if (t == 0.0) {
        return 0.0;
    }
    if (t < 1e-2) {
        double term = t / 6.0;  // j = 1
        double sum = term;
        const double t2 = t * t;
        for (int j = 2; j <= 6; ++j) {
            term *= t2 / static_cast<double>((2 * j) * (2 * j + 1));
            sum += term;
        }
        return sum;
    }
    return (std::sinh(t) - t) / (t * t);
}

}  // namespace detail

/// D(rho) = sqrt((1 + 3 rho) (sinh rho - rho) / rho^2), with D(0) = 0.
/// Increasing on [0, inf); bounds the relative size of the cubic remainder of
/// the multilinear form against the expected absolute sum.
inline double d_rho(double rho) {
    if (rho < 0.0) {
        throw Error("d_rho requires rho >= 0");
    }
    if (rho == 0.0) {
        return 0.0;
    }
    return std::sqrt((1.0 + 3.0 * rho) * detail::sinh_defect_ratio(rho));
}

/// Delta(eps) = sqrt((1 + 6 eps) (sinh 2eps - 2eps) / (2eps)^2) = D(2 eps).
inline double delta_eps(double eps) {
    if (eps <= 0.0) {
        throw Error("delta_eps requires eps > 0");
    }
    return std::sqrt((1.0 + 6.0 * eps) * detail::sinh_defect_ratio(2.0 * eps));
}

/// C(eps) = max{ (4 sqrt(2) + Delta)/(1 - Delta), sqrt((1 + e^-eps)/(1 - e^-eps)) }.
/// The first branch covers families with small total mass defect, the second
/// the defect-dominated regime. Requires Delta(eps) < 1.
inline double c_eps(double eps) {
    const double delta = delta_eps(eps);
    if (delta >= 1.0) {
        throw DeltaTooLarge("Delta(eps) = " + std::to_string(delta) + " >= 1 at eps = " +
                            std::to_string(eps));
    }
    const double small_defect = (4.0 * std::sqrt(2.0) + delta) / (1.0 - delta);
    const double e = std::exp(-eps);
    const double large_defect = std::sqrt((1.0 + e) / (1.0 - e));
    return std::max(small_defect, large_defect);
}

/// The explicit-constant pipeline: the minimizing threshold eps*, the values
/// Delta(eps*) and C(eps*), the resulting upper bound on the homogenization
/// constant, and its reciprocal lower bound.
struct ConstantsReport {
    double eps_star = 0.0;
    double delta_eps_star = 0.0;
    double c_eps_star = 0.0;
    double c0_upper = 0.0;
    double c_lower = 0.0;  // 1 / c0_upper
};

/// Minimize C(eps) over the feasible region {Delta(eps) < 1}: a coarse grid
/// scan bracketing the minimum followed by golden-section refinement (C is the
/// max of an increasing and a decreasing branch, hence quasiconvex). Fully
/// deterministic; ties break toward smaller eps.
inline ConstantsReport optimize_c0(double grid_lo = 1e-4, double grid_hi = 0.5,
                                   int grid_steps = 1000, double refine_tol = 1e-10) {
    if (!(grid_lo > 0.0) || grid_hi < grid_lo) {
        throw Error("optimize_c0 requires 0 < grid_lo <= grid_hi");
    }
    if (grid_steps < 10) {
        throw Error("optimize_c0 requires grid_steps >= 10");
    }
    if (!(refine_tol > 0.0)) {
        throw Error("optimize_c0 requires refine_tol > 0");
    }

    const auto value = [](double eps) {
        const double delta = delta_eps(eps);
        if (delta >= 1.0) {
            return std::numeric_limits<double>::infinity();
        }
        const double small_defect = (4.0 * std::sqrt(2.0) + delta) / (1.0 - delta);
        const double e = std::exp(-eps);
        return std::max(small_defect, std::sqrt((1.0 + e) / (1.0 - e)));
    };

    const int points = grid_lo == grid_hi ? 1 : grid_steps + 1;
    const double step = points > 1 ? (grid_hi - grid_lo) / grid_steps : 0.0;
    double best_eps = 0.0;
    double best_c = std::numeric_limits<double>::infinity();
    int best_index = -1;
    for (int i = 0; i < points; ++i) {
        const double eps = grid_lo + step * i;
        const double c = value(eps);
        if (c < best_c) {
            best_c = c;
            best_eps = eps;
            best_index = i;
        }
    }
    if (best_index < 0) {
        throw NoFeasiblePoint("Delta(eps) >= 1 on the whole grid [" +
                              std::to_string(grid_lo) + ", " + std::to_string(grid_hi) + "]");
    }

    if (points > 1) {
        double lo = grid_lo + step * std::max(0, best_index - 1);
        double hi = grid_lo + step * std::min(points - 1, best_index + 1);
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - inv_phi * (hi - lo);
        double x2 = lo + inv_phi * (hi - lo);
        double f1 = value(x1);
        double f2 = value(x2);
        for (int iter = 0; iter < 200 && hi - lo > refine_tol; ++iter) {
            if (f1 <= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = value(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = value(x2);
            }
        }
        const double mid = 0.5 * (lo + hi);
        const double fmid = value(mid);
        if (fmid <= best_c) {
            best_c = fmid;
            best_eps = mid;
        }
    }

    ConstantsReport report;
    report.eps_star = best_eps;
    report.delta_eps_star = delta_eps(best_eps);
    report.c_eps_star = best_c;
    report.c0_upper = best_c;
    report.c_lower = 1.0 / best_c;
    return report;
}

}  // namespace tvhom
