#pragma once

#include <cstdint>

#include "bbfgs/objective.hpp"

namespace bbfgs {

struct BadConstants : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct StepTooLarge : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct InnerLoopTooShort : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct TooManySubsets : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct OptimumNotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Spectral bounds gamma*I <= H_t <= Gamma*I for the limited-memory
/// metric built from M block updates with H_{t-M} = I.
struct TheoryBounds {
    double lambda;
    double Lambda;
    double kappa;
    std::size_t memory;
    double gamma_lb;  // 1 / (1 + M*Lambda)
    double Gamma_ub;  // geometric-sum form, tighter than the closed form
};

/// gamma_lb = 1/(1 + M*Lambda); Gamma_ub = alpha^M + (alpha^M - 1) /
/// (lambda*(alpha - 1)) with alpha = (1 + sqrt(kappa))^2, taking the
/// norms of the initial H and B as 1. `initial_norm` overrides that
/// baseline for experimentation.
TheoryBounds metric_bounds(double lambda, double Lambda, std::size_t memory,
                           double initial_norm = 1.0);

/// The looser closed-form upper bound
/// (1+sqrt(kappa))^(2M) * (1 + 1/(lambda*(2*sqrt(kappa)+kappa))); always
/// at least the geometric-sum Gamma_ub.
double gamma_upper_closed_form(double lambda, double Lambda, std::size_t memory);

/// Linear rate rho = (1/(2 m eta) + eta Gamma^2 Lambda (Lambda-lambda))
///                 / (gamma lambda - eta Gamma^2 Lambda^2), valid (and
/// < 1) once eta < gamma*lambda/(2 Gamma^2 Lambda^2) and
/// m exceeds min_inner_loop.
double convergence_rate(double eta, double m, const TheoryBounds& bounds);

/// Smallest admissible inner-loop length,
/// 1 / (2 eta (gamma lambda - eta Gamma^2 Lambda (2 Lambda - lambda))).
double min_inner_loop(double eta, const TheoryBounds& bounds);

struct VrBoundReport {
    double lhs;  // exact E ||g||^2 over all size-s subsets
    double rhs;  // 4 Lambda (f(x)-f*) + 4 (Lambda-lambda) (f(w)-f*)
    bool holds;
};

/// Exact-enumeration check of the variance-reduced gradient bound:
/// averages ||grad f_S(x) - grad f_S(w) + grad f(w)||^2 over every
/// size-s subset S. Guarded to C(n, s) <= 1e5.
VrBoundReport verify_vr_bound(const Objective& model, const Vector& x, const Vector& w,
                              std::size_t s_size);

/// Deterministic reference optimum by damped Newton iteration with the
/// dense subsampled Hessian (small d only). Throws OptimumNotConverged
/// when the gradient norm tolerance is not reached.
Vector reference_optimum(const Objective& model, double grad_tolerance = 1e-10,
                         std::size_t max_iterations = 200);

}  // namespace bbfgs
