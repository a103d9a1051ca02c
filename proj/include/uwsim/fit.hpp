#pragma once

#include <array>

#include "uwsim/image.hpp"
#include "uwsim/water.hpp"

namespace uwsim {

struct FitBounds {
    double beta_min = 1e-9; // keeps beta strictly positive under projection
    double beta_max = 10.0;
    double veiling_min = 0.0;
    double veiling_max = 1.0;
};

/// Recover (beta_c, A_c) from a known clean image, known depth and an
/// observed degraded image by minimizing the mean squared error of the
/// two-term haze composition.
struct FitProblem {
    ImagePlane clean;
    DepthMap depth;
    ImagePlane observed;
    WaterProfile init;
    FitBounds bounds;
    double tol = 1e-9;     // stop when the projected-gradient sup-norm drops below this
    int max_iters = 20000; // per channel
};

struct FitResult {
    WaterProfile profile;
    double final_mse = 0.0;
    int iterations = 0;        // largest per-channel iteration count
    bool converged = false;    // every channel reached tol
    double gradient_norm = 0.0; // projected-gradient sup-norm at the solution
};

struct ProfileGradient {
    std::array<double, 3> d_beta{};
    std::array<double, 3> d_veiling{};
};

/// Mean over pixels and channels of (t J + (1-t) A - y)^2, t = exp(-beta z).
double forward_mse(const FitProblem& problem, const WaterProfile& profile);

/// Analytic partials of forward_mse; matches central finite differences.
ProfileGradient gradient(const FitProblem& problem, const WaterProfile& profile);

/// Projected gradient descent with Armijo backtracking (halving, c = 1e-4).
/// The objective splits per channel, so each channel runs its own 2-D
/// descent; the combined MSE is non-increasing across accepted steps.
/// Throws std::invalid_argument on degenerate problems (any clean channel
/// with variance below 1e-6, or depth variance below 1e-6) where the
/// parameters are not jointly identifiable.
FitResult fit(const FitProblem& problem);

} // namespace uwsim
