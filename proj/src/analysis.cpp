#include "bbfgs/analysis.hpp"

#include <cmath>

#include "bbfgs/linalg.hpp"
#include "bbfgs/metric.hpp"

namespace bbfgs {

TheoryBounds metric_bounds(double lambda, double Lambda, std::size_t memory,
                           double initial_norm) {
    if (!(lambda > 0.0) || Lambda < lambda) {
        throw BadConstants("need 0 < lambda <= Lambda");
    }
    const double kappa = Lambda / lambda;
    const double alpha = (1.0 + std::sqrt(kappa)) * (1.0 + std::sqrt(kappa));
    const double alpha_m = std::pow(alpha, double(memory));
    const double geometric_sum =
        memory == 0 ? 0.0 : (alpha_m - 1.0) / (alpha - 1.0);  // sum alpha^i, i < M
    TheoryBounds b;
    b.lambda = lambda;
    b.Lambda = Lambda;
    b.kappa = kappa;
    b.memory = memory;
    b.gamma_lb = 1.0 / (initial_norm + double(memory) * Lambda);
    b.Gamma_ub = alpha_m * initial_norm + geometric_sum / lambda;
    return b;
}

double gamma_upper_closed_form(double lambda, double Lambda, std::size_t memory) {
    if (!(lambda > 0.0) || Lambda < lambda) {
        throw BadConstants("need 0 < lambda <= Lambda");
    }
    const double kappa = Lambda / lambda;
    const double sqrt_kappa = std::sqrt(kappa);
    return std::pow(1.0 + sqrt_kappa, 2.0 * double(memory)) *
           (1.0 + 1.0 / (lambda * (2.0 * sqrt_kappa + kappa)));
}

namespace {

void check_step(double eta, const TheoryBounds& b) {
    const double threshold =
        b.gamma_lb * b.lambda / (2.0 * b.Gamma_ub * b.Gamma_ub * b.Lambda * b.Lambda);
    if (!(eta > 0.0) || eta >= threshold) {
        throw StepTooLarge("stepsize must satisfy eta < gamma*lambda/(2 Gamma^2 Lambda^2)");
    }
}

}  // namespace

double min_inner_loop(double eta, const TheoryBounds& b) {
    check_step(eta, b);
    const double denom = b.gamma_lb * b.lambda - eta * b.Gamma_ub * b.Gamma_ub * b.Lambda *
                                                     (2.0 * b.Lambda - b.lambda);
    return 1.0 / (2.0 * eta * denom);
}

double convergence_rate(double eta, double m, const TheoryBounds& b) {
    check_step(eta, b);
    if (m < min_inner_loop(eta, b)) {
        throw InnerLoopTooShort("inner loop length below the admissible minimum");
    }
    const double g2 = b.Gamma_ub * b.Gamma_ub;
    const double numerator = 1.0 / (2.0 * m * eta) + eta * g2 * b.Lambda * (b.Lambda - b.lambda);
    const double denominator = b.gamma_lb * b.lambda - eta * g2 * b.Lambda * b.Lambda;
    return numerator / denominator;
}

VrBoundReport verify_vr_bound(const Objective& model, const Vector& x, const Vector& w,
                              std::size_t s_size) {
    const std::size_t n = model.num_examples();
    if (s_size == 0 || s_size > n) throw SizeOutOfRange("subset size out of range");
    double count = 1.0;
    for (std::size_t i = 0; i < s_size; ++i) count = count * double(n - i) / double(i + 1);
    if (count > 1e5) throw TooManySubsets("C(n, s) exceeds the enumeration guard");

    const Vector w_star = reference_optimum(model);
    const double f_star = model.value(w_star);
    const Vector mu = model.full_gradient(w);

    double lhs_sum = 0.0;
    std::size_t subsets = 0;
    IndexSample subset(s_size);
    // enumerate all size-s subsets in lexicographic order
    for (std::size_t i = 0; i < s_size; ++i) subset[i] = std::uint32_t(i);
    while (true) {
        Vector gx = model.subsampled_gradient(x, subset);
        Vector gw = model.subsampled_gradient(w, subset);
        double sq = 0.0;
        for (std::size_t i = 0; i < gx.size(); ++i) {
            const double gi = gx[i] - gw[i] + mu[i];
            sq += gi * gi;
        }
        lhs_sum += sq;
        ++subsets;
        // next combination
        std::size_t pos = s_size;
        while (pos > 0 && subset[pos - 1] == n - s_size + pos - 1) --pos;
        if (pos == 0) break;
        ++subset[pos - 1];
        for (std::size_t i = pos; i < s_size; ++i) subset[i] = subset[i - 1] + 1;
    }

    const auto [lambda, Lambda] = model.smoothness_constants();
    VrBoundReport report;
    report.lhs = lhs_sum / double(subsets);
    report.rhs = 4.0 * Lambda * (model.value(x) - f_star) +
                 4.0 * (Lambda - lambda) * (model.value(w) - f_star);
    report.holds = report.lhs <= report.rhs + 1e-12;
    return report;
}

Vector reference_optimum(const Objective& model, double grad_tolerance,
                         std::size_t max_iterations) {
    const std::size_t d = model.dim();
    if (d > 1000) throw TooLarge("reference optimum solver guarded to d <= 1000");
    const IndexSample all = model.full_sample();
    Vector w(d, 0.0);
    for (std::size_t it = 0; it < max_iterations; ++it) {
        Vector grad = model.full_gradient(w);
        double norm = 0.0;
        for (double g : grad) norm += g * g;
        norm = std::sqrt(norm);
        if (norm <= grad_tolerance) return w;
        Matrix hessian = model.hessian_action(w, all, Matrix::identity(d));
        // symmetrize before factorizing
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                const double avg = 0.5 * (hessian(i, j) + hessian(j, i));
                hessian(i, j) = hessian(j, i) = avg;
            }
        }
        Vector step = cholesky(hessian).solve(grad);
        // Near the optimum the objective decrease drops below double
        // precision and a backtracking test on f would stall, so take the
        // undamped step there and rely on local quadratic convergence.
        if (norm <= 1e-6) {
            for (std::size_t i = 0; i < d; ++i) w[i] -= step[i];
            continue;
        }
        // otherwise backtrack on the objective
        const double f0 = model.value(w);
        double scale = 1.0;
        for (int bt = 0; bt < 40; ++bt) {
            Vector trial = w;
            for (std::size_t i = 0; i < d; ++i) trial[i] -= scale * step[i];
            if (model.value(trial) <= f0) {
                w = std::move(trial);
                break;
            }
            scale *= 0.5;
        }
    }
    Vector grad = model.full_gradient(w);
    double norm = 0.0;
    for (double g : grad) norm += g * g;
    if (std::sqrt(norm) > grad_tolerance) {
        throw OptimumNotConverged("Newton iteration did not reach the gradient tolerance");
    }
    return w;
}

}  // namespace bbfgs
