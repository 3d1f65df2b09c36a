#include "bbfgs/objective.hpp"

#include <cmath>
#include <numeric>

namespace bbfgs {

double logistic_loss(double z) {
    // ln(1 + exp(-z)), two-branch softplus
    if (z >= 0.0) {
        return std::log1p(std::exp(-z));
    }
    return -z + std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double sigmoid_derivative(double z) { return sigmoid(z) * sigmoid(-z); }

Vector Objective::full_gradient(const Vector& w) const {
    return subsampled_gradient(w, full_sample());
}

IndexSample Objective::full_sample() const {
    IndexSample s(num_examples());
    std::iota(s.begin(), s.end(), 0u);
    return s;
}

LogisticModel::LogisticModel(const Dataset& data, double reg) : data_(&data), reg_(reg) {
    if (!(reg > 0.0)) {
        throw std::invalid_argument("regularization coefficient must be positive");
    }
    if (data.n() == 0) {
        throw std::invalid_argument("dataset is empty");
    }
}

namespace {

double margin(const SparseExample& ex, const Vector& w) {
    double z = 0.0;
    for (std::size_t k = 0; k < ex.indices.size(); ++k) {
        z += ex.values[k] * w[ex.indices[k] - 1];
    }
    return z;
}

}  // namespace

double LogisticModel::value(const Vector& w) const {
    if (w.size() != dim()) throw DimensionMismatch("iterate length does not match dimension");
    double loss = 0.0;
    for (std::size_t i = 0; i < data_->n(); ++i) {
        loss += logistic_loss(double(data_->label(i)) * margin(data_->example(i), w));
    }
    loss /= double(data_->n());
    double sq = 0.0;
    for (double wi : w) sq += wi * wi;
    return loss + 0.5 * reg_ * sq;
}

Vector LogisticModel::subsampled_gradient(const Vector& w, const IndexSample& sample) const {
    if (w.size() != dim()) throw DimensionMismatch("iterate length does not match dimension");
    if (sample.empty()) throw EmptySample("gradient subsample is empty");
    Vector g(dim(), 0.0);
    const double inv = 1.0 / double(sample.size());
    for (std::uint32_t i : sample) {
        const auto& ex = data_->example(i);
        const double y = double(data_->label(i));
        const double coeff = -y * sigmoid(-y * margin(ex, w)) * inv;
        for (std::size_t k = 0; k < ex.indices.size(); ++k) {
            g[ex.indices[k] - 1] += coeff * ex.values[k];
        }
    }
    for (std::size_t j = 0; j < dim(); ++j) g[j] += reg_ * w[j];
    return g;
}

Matrix LogisticModel::hessian_action(const Vector& w, const IndexSample& sample,
                                     const Matrix& d) const {
    if (w.size() != dim() || d.rows() != dim()) {
        throw DimensionMismatch("hessian action shapes do not match dimension");
    }
    if (sample.empty()) throw EmptySample("hessian subsample is empty");
    const std::size_t q = d.cols();
    Matrix y(dim(), q);
    const double inv = 1.0 / double(sample.size());
    std::vector<double> row(q);
    for (std::uint32_t i : sample) {
        const auto& ex = data_->example(i);
        const double scale = sigmoid_derivative(margin(ex, w)) * inv;
        // z = a_i^T D over nonzeros, then scatter scale * a_i * z back
        std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t k = 0; k < ex.indices.size(); ++k) {
            const double* drow = d.data() + std::size_t(ex.indices[k] - 1) * q;
            const double v = ex.values[k];
            for (std::size_t j = 0; j < q; ++j) row[j] += v * drow[j];
        }
        for (std::size_t k = 0; k < ex.indices.size(); ++k) {
            double* yrow = y.data() + std::size_t(ex.indices[k] - 1) * q;
            const double v = scale * ex.values[k];
            for (std::size_t j = 0; j < q; ++j) yrow[j] += v * row[j];
        }
    }
    for (std::size_t r = 0; r < dim(); ++r) {
        for (std::size_t j = 0; j < q; ++j) y(r, j) += reg_ * d(r, j);
    }
    return y;
}

std::pair<double, double> LogisticModel::smoothness_constants() const {
    return {reg_, reg_ + 0.25 * data_->max_squared_norm()};
}

}  // namespace bbfgs
