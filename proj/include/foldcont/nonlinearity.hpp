#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace foldcont {

/// f with f'(x) = alpha atan(x) + beta, f(0) = 0; f' sweeps (ell_minus, ell_plus).
struct ArctanNonlinearity {
    double ell_minus = 0.0;
    double ell_plus = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    ArctanNonlinearity() = default;
    ArctanNonlinearity(double lm, double lp)
        : ell_minus(lm), ell_plus(lp), alpha((lp - lm) / std::numbers::pi), beta(0.5 * (lp + lm))
    {
        if (!(lm < lp)) throw std::invalid_argument("ArctanNonlinearity: need ell_minus < ell_plus");
    }

    [[nodiscard]] double value(double x) const noexcept
    {
        return alpha * (x * std::atan(x) - 0.5 * std::log1p(x * x)) + beta * x;
    }
    [[nodiscard]] double slope(double x) const noexcept { return alpha * std::atan(x) + beta; }
};

/// Piecewise-linear f(x) = ell_plus x for x > 0, ell_minus x for x < 0.
struct PLParams {
    double ell_minus = 0.0;
    double ell_plus = 0.0;

    [[nodiscard]] double value(double x) const noexcept { return x > 0 ? ell_plus * x : ell_minus * x; }
    [[nodiscard]] double slope_for_sign(int s) const noexcept { return s > 0 ? ell_plus : ell_minus; }
};

}  // namespace foldcont
