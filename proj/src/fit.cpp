#include "uwsim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uwsim {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;

void require_valid(const FitProblem& p) {
    if (p.clean.empty() || p.observed.empty() || p.depth.empty()) {
        throw std::invalid_argument("fit problem: empty inputs");
    }
    if (!p.clean.same_shape(p.observed)) {
        throw std::invalid_argument("fit problem: clean/observed dimension mismatch");
    }
    require_matching_dims(p.clean, p.depth);
    if (!(p.bounds.beta_min > 0.0) || !(p.bounds.beta_min < p.bounds.beta_max) ||
        !(p.bounds.veiling_min < p.bounds.veiling_max)) {
        throw std::invalid_argument("fit problem: bounds are not well-ordered");
    }
}

// Per-channel residual sum of squares and its two partials. The mean in
// forward_mse divides by pixels * 3; partials here are of the raw SSE.
struct ChannelEval {
    double sse = 0.0;
    double d_beta = 0.0;
    double d_veiling = 0.0;
};

ChannelEval eval_channel(const FitProblem& p, int c, double beta, double veiling,
                         bool with_gradient) {
    ChannelEval e;
    const auto j = p.clean.channel(c);
    const auto y = p.observed.channel(c);
    const auto& z = p.depth.data();
    for (std::size_t i = 0; i < j.size(); ++i) {
        const double t = std::exp(-beta * z[i]);
        const double model = t * j[i] + (1.0 - t) * veiling;
        const double r = model - y[i];
        e.sse += r * r;
        if (with_gradient) {
            e.d_beta += 2.0 * r * (-z[i] * t * (j[i] - veiling));
            e.d_veiling += 2.0 * r * (1.0 - t);
        }
    }
    return e;
}

double variance(std::span<const float> v) {
    double mean = 0.0;
    for (float x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (float x : v) {
        const double d = x - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) {
        const double d = x - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(v.size());
}

struct Point {
    double beta;
    double veiling;
};

Point project(Point p, const FitBounds& b) {
    return {std::clamp(p.beta, b.beta_min, b.beta_max),
            std::clamp(p.veiling, b.veiling_min, b.veiling_max)};
}

// Gradient components pointing out of the feasible box are inactive.
Point projected_gradient(Point p, Point g, const FitBounds& b) {
    Point out = g;
    if ((p.beta <= b.beta_min && g.beta > 0.0) || (p.beta >= b.beta_max && g.beta < 0.0)) {
        out.beta = 0.0;
    }
    if ((p.veiling <= b.veiling_min && g.veiling > 0.0) ||
        (p.veiling >= b.veiling_max && g.veiling < 0.0)) {
        out.veiling = 0.0;
    }
    return out;
}

struct ChannelFit {
    Point point;
    double sse;
    int iterations;
    bool converged;
    Point grad;
};

ChannelFit fit_channel(const FitProblem& p, int c) {
    const FitBounds& b = p.bounds;
    Point theta = project({p.init.beta[c], p.init.veiling[c]}, b);
    ChannelEval e = eval_channel(p, c, theta.beta, theta.veiling, true);
    double step = 1.0;
    int it = 0;
    bool converged = false;
    Point grad{e.d_beta, e.d_veiling};

    const double n_total = static_cast<double>(p.clean.data().size());
    for (; it < p.max_iters; ++it) {
        grad = {e.d_beta, e.d_veiling};
        const Point pg = projected_gradient(theta, grad, b);
        // tol is stated on the mean objective; sse partials rescale by n
        const double norm = std::max(std::abs(pg.beta), std::abs(pg.veiling)) / n_total;
        if (norm <= p.tol) {
            converged = true;
            break;
        }
        bool accepted = false;
        for (int h = 0; h < kMaxHalvings; ++h) {
            const Point cand = project({theta.beta - step * grad.beta,
                                        theta.veiling - step * grad.veiling}, b);
            const double decrease = grad.beta * (theta.beta - cand.beta) +
                                    grad.veiling * (theta.veiling - cand.veiling);
            if (decrease <= 0.0) {
                step *= 0.5;
                continue;
            }
            const ChannelEval trial = eval_channel(p, c, cand.beta, cand.veiling, true);
            if (trial.sse <= e.sse - kArmijo * decrease) {
                theta = cand;
                e = trial;
                accepted = true;
                step *= 2.0; // try a bolder step next round
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // Line search exhausted: no descent direction at working precision.
            grad = {e.d_beta, e.d_veiling};
            const Point pg2 = projected_gradient(theta, grad, b);
            converged = std::max(std::abs(pg2.beta), std::abs(pg2.veiling)) / n_total <= p.tol;
            break;
        }
    }
    const Point pg = projected_gradient(theta, {e.d_beta, e.d_veiling}, b);
    return {theta, e.sse, it, converged, {pg.beta / n_total, pg.veiling / n_total}};
}

} // namespace

double forward_mse(const FitProblem& problem, const WaterProfile& profile) {
    require_valid(problem);
    double sse = 0.0;
    for (int c = 0; c < 3; ++c) {
        sse += eval_channel(problem, c, profile.beta[c], profile.veiling[c], false).sse;
    }
    return sse / static_cast<double>(problem.clean.data().size());
}

ProfileGradient gradient(const FitProblem& problem, const WaterProfile& profile) {
    require_valid(problem);
    ProfileGradient g;
    const double n = static_cast<double>(problem.clean.data().size());
    for (int c = 0; c < 3; ++c) {
        const ChannelEval e = eval_channel(problem, c, profile.beta[c], profile.veiling[c], true);
        g.d_beta[c] = e.d_beta / n;
        g.d_veiling[c] = e.d_veiling / n;
    }
    return g;
}

FitResult fit(const FitProblem& problem) {
    require_valid(problem);
    for (int c = 0; c < 3; ++c) {
        if (variance(problem.clean.channel(c)) < 1e-6) {
            throw std::invalid_argument(
                "degenerate fit problem: clean channel " + std::to_string(c) +
                " is nearly constant, attenuation and veiling are not jointly identifiable");
        }
    }
    if (variance(std::span<const double>(problem.depth.data())) < 1e-6) {
        throw std::invalid_argument(
            "degenerate fit problem: depth is nearly constant, attenuation and veiling "
            "are not jointly identifiable");
    }

    FitResult result;
    result.profile = problem.init;
    result.profile.name = "fitted";
    result.converged = true;
    double sse = 0.0;
    for (int c = 0; c < 3; ++c) {
        const ChannelFit cf = fit_channel(problem, c);
        result.profile.beta[c] = cf.point.beta;
        result.profile.veiling[c] = cf.point.veiling;
        result.iterations = std::max(result.iterations, cf.iterations);
        result.converged = result.converged && cf.converged;
        result.gradient_norm = std::max({result.gradient_norm, std::abs(cf.grad.beta),
                                         std::abs(cf.grad.veiling)});
        sse += cf.sse;
    }
    result.final_mse = sse / static_cast<double>(problem.clean.data().size());
    return result;
}

} // namespace uwsim
