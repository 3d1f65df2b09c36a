#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "bbfgs/dataset.hpp"
#include "bbfgs/linalg.hpp"

namespace bbfgs {

struct EmptySample : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using IndexSample = std::vector<std::uint32_t>;

/// Finite-sum objective f(x) = (1/n) sum_i f_i(x). Gradients and Hessian
/// actions are over uniform subsamples; the full gradient is the special
/// case S = [n].
class Objective {
  public:
    virtual ~Objective() = default;

    virtual std::size_t dim() const = 0;
    virtual std::size_t num_examples() const = 0;

    virtual double value(const Vector& w) const = 0;
    virtual Vector subsampled_gradient(const Vector& w, const IndexSample& sample) const = 0;

    /// Y = hessian of f_T at w, applied to the columns of D, without ever
    /// materializing a d x d matrix.
    virtual Matrix hessian_action(const Vector& w, const IndexSample& sample,
                                  const Matrix& d) const = 0;

    /// (lambda, Lambda) with lambda*I <= hessian of f_T <= Lambda*I for
    /// every T and w.
    virtual std::pair<double, double> smoothness_constants() const = 0;

    Vector full_gradient(const Vector& w) const;
    IndexSample full_sample() const;
};

/// L2-regularized logistic regression over a sparse dataset:
///   f(w) = (1/n) sum_i ln(1 + exp(-y_i <a^i, w>)) + (reg/2) ||w||^2.
/// The loss is averaged; reg defaults to 1/n so minimizers match the
/// unaveraged form with regularizer ||w||^2 / n up to constant rescaling.
class LogisticModel final : public Objective {
  public:
    LogisticModel(const Dataset& data, double reg);

    static double default_reg(const Dataset& data) { return 1.0 / double(data.n()); }

    std::size_t dim() const override { return data_->d(); }
    std::size_t num_examples() const override { return data_->n(); }
    double reg() const { return reg_; }
    const Dataset& data() const { return *data_; }

    double value(const Vector& w) const override;
    Vector subsampled_gradient(const Vector& w, const IndexSample& sample) const override;
    Matrix hessian_action(const Vector& w, const IndexSample& sample,
                          const Matrix& d) const override;

    /// lambda = reg, Lambda = reg + max_i ||a^i||^2 / 4.
    std::pair<double, double> smoothness_constants() const override;

  private:
    const Dataset* data_;
    double reg_;
};

/// ln(1 + exp(-z)) without overflow for large |z|.
double logistic_loss(double z);
/// sigma(z) = 1 / (1 + exp(-z)).
double sigmoid(double z);
/// sigma'(z) = sigma(z) * sigma(-z).
double sigmoid_derivative(double z);

}  // namespace bbfgs
