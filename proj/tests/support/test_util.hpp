#pragma once

// Shared helpers for the unit and acceptance suites: seeded random
// matrices, a quadratic objective with a known spectrum, and synthetic
// logistic datasets.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "bbfgs/dataset.hpp"
#include "bbfgs/linalg.hpp"
#include "bbfgs/metric.hpp"
#include "bbfgs/objective.hpp"
#include "bbfgs/rng.hpp"

namespace bbfgs::testing {

inline Matrix rand_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

inline Vector rand_vector(Rng& rng, std::size_t n) {
    Vector v(n);
    for (double& x : v) x = rng.normal();
    return v;
}

/// Random symmetric matrix with the given eigenvalues: a diagonal matrix
/// conjugated by random Givens rotations (spectrum-preserving).
inline Matrix sym_with_spectrum(Rng& rng, std::vector<double> eigenvalues) {
    const std::size_t d = eigenvalues.size();
    Matrix a(d, d);
    for (std::size_t i = 0; i < d; ++i) a(i, i) = eigenvalues[i];
    const std::size_t sweeps = 3 * d;
    for (std::size_t s = 0; s < sweeps; ++s) {
        const std::size_t p = rng.uniform_below(d);
        std::size_t q = rng.uniform_below(d);
        if (p == q) continue;
        const double theta = 2.0 * 3.14159265358979323846 * rng.uniform01();
        const double c = std::cos(theta), sn = std::sin(theta);
        for (std::size_t k = 0; k < d; ++k) {
            const double akp = a(k, p), akq = a(k, q);
            a(k, p) = c * akp - sn * akq;
            a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
            const double apk = a(p, k), aqk = a(q, k);
            a(p, k) = c * apk - sn * aqk;
            a(q, k) = sn * apk + c * aqk;
        }
    }
    return a;
}

inline Matrix rand_spd(Rng& rng, std::size_t d, double lo = 0.5, double hi = 2.0) {
    std::vector<double> eig(d);
    for (double& e : eig) e = lo + (hi - lo) * rng.uniform01();
    return sym_with_spectrum(rng, std::move(eig));
}

/// Quadratic finite sum f_i(x) = x^T A x / 2 - b_i^T x with a shared SPD
/// Hessian A, so the subsampled Hessian equals A for every T.
class QuadraticModel final : public Objective {
  public:
    QuadraticModel(Matrix a, std::vector<Vector> bs, double lambda, double Lambda)
        : a_(std::move(a)), bs_(std::move(bs)), lambda_(lambda), Lambda_(Lambda) {}

    /// f_i(x) = x^T A x / 2 for every i (all b_i = 0).
    static QuadraticModel homogeneous(Matrix a, std::size_t n, double lambda, double Lambda) {
        std::vector<Vector> bs(n, Vector(a.rows(), 0.0));
        return QuadraticModel(std::move(a), std::move(bs), lambda, Lambda);
    }

    std::size_t dim() const override { return a_.rows(); }
    std::size_t num_examples() const override { return bs_.size(); }

    double value(const Vector& w) const override {
        Vector aw = matvec(a_, w);
        double quad = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) quad += w[i] * aw[i];
        Vector mean_b(dim(), 0.0);
        for (const auto& b : bs_)
            for (std::size_t i = 0; i < b.size(); ++i) mean_b[i] += b[i];
        double lin = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) lin += mean_b[i] / double(bs_.size()) * w[i];
        return 0.5 * quad - lin;
    }

    Vector subsampled_gradient(const Vector& w, const IndexSample& sample) const override {
        if (sample.empty()) throw EmptySample("empty sample");
        Vector g = matvec(a_, w);
        for (std::uint32_t i : sample) {
            for (std::size_t j = 0; j < g.size(); ++j) g[j] -= bs_[i][j] / double(sample.size());
        }
        return g;
    }

    Matrix hessian_action(const Vector&, const IndexSample& sample,
                          const Matrix& d) const override {
        if (sample.empty()) throw EmptySample("empty sample");
        return a_ * d;
    }

    std::pair<double, double> smoothness_constants() const override {
        return {lambda_, Lambda_};
    }

    const Matrix& hessian() const { return a_; }

  private:
    Matrix a_;
    std::vector<Vector> bs_;
    double lambda_;
    double Lambda_;
};

/// Random sparse logistic dataset: labels from a planted weight vector
/// with a little label noise so the problem is not separable.
inline Dataset make_synthetic_logistic(Rng& rng, std::size_t n, std::size_t d,
                                       double density = 0.5, double flip_prob = 0.05,
                                       double feature_scale = 1.0) {
    Vector w_true = rand_vector(rng, d);
    std::vector<SparseExample> examples;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        SparseExample ex;
        double z = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (rng.uniform01() < density) {
                const double v = feature_scale * rng.normal();
                if (v == 0.0) continue;
                ex.indices.push_back(std::uint32_t(j + 1));
                ex.values.push_back(v);
                z += v * w_true[j];
            }
        }
        int label = z >= 0.0 ? 1 : -1;
        if (rng.uniform01() < flip_prob) label = -label;
        examples.push_back(std::move(ex));
        labels.push_back(label);
    }
    return Dataset(std::move(examples), std::move(labels), d);
}

/// Buffer of `count` random triples built from SPD matrices with spectrum
/// inside [lo, hi].
inline CurvatureBuffer rand_buffer(Rng& rng, std::size_t d, std::size_t q, std::size_t count,
                                   std::size_t capacity, double lo = 0.5, double hi = 2.0) {
    CurvatureBuffer buffer(capacity);
    for (std::size_t i = 0; i < count; ++i) {
        Matrix g = rand_spd(rng, d, lo, hi);
        Matrix dd = rand_matrix(rng, d, q);
        buffer.push(make_triple(dd, g * dd));
    }
    return buffer;
}

/// Factored buffer with the self-conditioning structure: each D is the
/// current factored operator applied to random identity columns.
inline CurvatureBuffer rand_factored_buffer(Rng& rng, std::size_t d, std::size_t q,
                                            std::size_t count, std::size_t capacity,
                                            double lo = 0.5, double hi = 2.0) {
    CurvatureBuffer buffer(capacity, true);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<std::uint32_t> cols = sample_indices(rng, d, q);
        Matrix identity_cols(d, q);
        for (std::size_t j = 0; j < q; ++j) identity_cols(cols[j], j) = 1.0;
        Matrix dd = factored_apply(buffer, identity_cols);
        Matrix g = rand_spd(rng, d, lo, hi);
        buffer.push(make_triple(dd, g * dd, std::move(cols)));
    }
    return buffer;
}

inline double rel_error(const Matrix& got, const Matrix& want) {
    const double denom = want.frobenius_norm();
    return (got - want).frobenius_norm() / (denom > 0.0 ? denom : 1.0);
}

inline double rel_error(const Vector& got, const Vector& want) {
    double diff = 0.0, denom = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        diff += (got[i] - want[i]) * (got[i] - want[i]);
        denom += want[i] * want[i];
    }
    return std::sqrt(diff) / (denom > 0.0 ? std::sqrt(denom) : 1.0);
}

}  // namespace bbfgs::testing
