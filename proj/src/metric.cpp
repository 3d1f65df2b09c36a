#include "bbfgs/metric.hpp"

#include <cmath>
#include <utility>

namespace bbfgs {

namespace {

LowerTriangularFactor factorize_gram(const Matrix& d, const Matrix& y) {
    if (d.rows() != y.rows() || d.cols() != y.cols()) {
        throw DimensionMismatch("D and Y must share shape");
    }
    const std::size_t q = d.cols();
    Matrix gram = d.transposed() * y;
    for (std::size_t i = 0; i < q; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double avg = 0.5 * (gram(i, j) + gram(j, i));
            gram(i, j) = gram(j, i) = avg;
        }
    }
    try {
        return cholesky(gram);
    } catch (const NotPositiveDefinite& e) {
        throw RankDeficient(std::string("sketch gram matrix is not positive definite: ") +
                            e.what());
    }
}

/// Inverse transpose of the lower Cholesky factor: upper-triangular R
/// with R R^T = (D^T Y)^-1.
Matrix inverse_transpose(const LowerTriangularFactor& chol) {
    const std::size_t q = chol.dim();
    const Matrix& l = chol.lower();
    // forward-substitute L Z = I, then R = Z^T
    Matrix z(q, q);
    for (std::size_t j = 0; j < q; ++j) {
        for (std::size_t i = j; i < q; ++i) {
            double s = i == j ? 1.0 : 0.0;
            for (std::size_t k = j; k < i; ++k) s -= l(i, k) * z(k, j);
            z(i, j) = s / l(i, i);
        }
    }
    return z.transposed();
}

}  // namespace

BlockTriple::BlockTriple(Matrix d, Matrix y)
    : d_(std::move(d)), y_(std::move(y)), chol_(factorize_gram(d_, y_)) {}

BlockTriple::BlockTriple(Matrix d, Matrix y, std::vector<std::uint32_t> columns)
    : d_(std::move(d)),
      y_(std::move(y)),
      chol_(factorize_gram(d_, y_)),
      columns_(std::move(columns)),
      r_fact_(inverse_transpose(chol_)) {
    if (columns_.size() != d_.cols()) {
        throw DimensionMismatch("column index set size must equal block size");
    }
    for (std::uint32_t c : columns_) {
        if (c >= d_.rows()) throw DimensionMismatch("column index out of range");
    }
}

const Matrix& BlockTriple::r_fact() const {
    if (!r_fact_) throw BufferNotFactored("triple carries no factored extras");
    return *r_fact_;
}

BlockTriple make_triple(Matrix d, Matrix y) { return BlockTriple(std::move(d), std::move(y)); }

BlockTriple make_triple(Matrix d, Matrix y, std::vector<std::uint32_t> columns) {
    return BlockTriple(std::move(d), std::move(y), std::move(columns));
}

void CurvatureBuffer::push(BlockTriple triple) {
    if (capacity_ == 0) return;
    if (factored_mode_ && !triple.factored()) {
        throw BufferNotFactored("factored buffer requires factored triples");
    }
    if (!triples_.empty() && triples_.front().dim() != triple.dim()) {
        throw DimensionMismatch("triple dimension differs from buffer");
    }
    if (triples_.size() == capacity_) triples_.pop_front();
    triples_.push_back(std::move(triple));
}

Matrix dense_update(const Matrix& h, const BlockTriple& t) {
    const std::size_t d = t.dim();
    if (h.rows() != d || h.cols() != d) {
        throw DimensionMismatch("H shape does not match triple dimension");
    }
    const Matrix delta_dt = t.apply_delta(t.d().transposed());   // Delta D^T
    const Matrix delta_yt = t.apply_delta(t.y().transposed());   // Delta Y^T
    Matrix v = Matrix::identity(d) - t.d() * delta_yt;           // I - D Delta Y^T
    Matrix result = t.d() * delta_dt + v * h * v.transposed();
    // enforce exact symmetry against roundoff
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double avg = 0.5 * (result(i, j) + result(j, i));
            result(i, j) = result(j, i) = avg;
        }
    }
    return result;
}

Vector two_loop_apply(const CurvatureBuffer& buffer, const Vector& g) {
    Vector v = g;
    const std::size_t m = buffer.size();
    std::vector<Vector> alphas(m);
    for (std::size_t idx = m; idx-- > 0;) {
        const BlockTriple& t = buffer.triple(idx);
        if (t.dim() != v.size()) throw DimensionMismatch("vector length mismatch");
        Vector alpha = t.apply_delta(matvec_transposed(t.d(), v));
        const Matrix& y = t.y();
        for (std::size_t r = 0; r < y.rows(); ++r) {
            double s = 0.0;
            for (std::size_t j = 0; j < y.cols(); ++j) s += y(r, j) * alpha[j];
            v[r] -= s;
        }
        alphas[idx] = std::move(alpha);
    }
    for (std::size_t idx = 0; idx < m; ++idx) {
        const BlockTriple& t = buffer.triple(idx);
        Vector beta = t.apply_delta(matvec_transposed(t.y(), v));
        const Matrix& d = t.d();
        for (std::size_t r = 0; r < d.rows(); ++r) {
            double s = 0.0;
            for (std::size_t j = 0; j < d.cols(); ++j) s += d(r, j) * (alphas[idx][j] - beta[j]);
            v[r] += s;
        }
    }
    return v;
}

Matrix factored_apply(const CurvatureBuffer& buffer, const Matrix& v) {
    Matrix w = v;
    for (std::size_t idx = 0; idx < buffer.size(); ++idx) {
        const BlockTriple& t = buffer.triple(idx);
        if (!t.factored()) throw BufferNotFactored("triple carries no factored extras");
        if (t.dim() != v.rows()) throw DimensionMismatch("matrix row count mismatch");
        const std::size_t q = t.block_size();
        const std::size_t k = v.cols();
        // W <- W - D Delta (Y^T W) + D R_fact V_{C,:}
        Matrix ytw = t.y().transposed() * w;
        Matrix delta_ytw = t.apply_delta(ytw);
        Matrix selected(q, k);
        for (std::size_t i = 0; i < q; ++i) {
            for (std::size_t j = 0; j < k; ++j) selected(i, j) = v(t.columns()[i], j);
        }
        Matrix correction = t.r_fact() * selected - delta_ytw;
        const Matrix& d = t.d();
        for (std::size_t r = 0; r < d.rows(); ++r) {
            for (std::size_t j = 0; j < k; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < q; ++c) s += d(r, c) * correction(c, j);
                w(r, j) += s;
            }
        }
    }
    return w;
}

Vector factored_apply(const CurvatureBuffer& buffer, const Vector& v) {
    Matrix col(v.size(), 1, std::vector<double>(v));
    Matrix out = factored_apply(buffer, col);
    Vector result(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) result[i] = out(i, 0);
    return result;
}

Vector factored_transpose_apply(const CurvatureBuffer& buffer, const Vector& v) {
    // L^T = (V_newest L_prev + D R I_{C,:})^T unrolled newest to oldest:
    // accumulate the scatter terms against the running vector before each
    // V^T application.
    Vector w = v;
    Vector extra(v.size(), 0.0);
    for (std::size_t idx = buffer.size(); idx-- > 0;) {
        const BlockTriple& t = buffer.triple(idx);
        if (!t.factored()) throw BufferNotFactored("triple carries no factored extras");
        if (t.dim() != v.size()) throw DimensionMismatch("vector length mismatch");
        const std::size_t q = t.block_size();
        Vector dtw = matvec_transposed(t.d(), w);
        // extra_{C} += R_fact^T (D^T w)
        const Matrix& r = t.r_fact();
        for (std::size_t j = 0; j < q; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < q; ++i) s += r(i, j) * dtw[i];
            extra[t.columns()[j]] += s;
        }
        // w <- V^T w = w - Y Delta (D^T w)
        Vector delta_dtw = t.apply_delta(dtw);
        const Matrix& y = t.y();
        for (std::size_t row = 0; row < y.rows(); ++row) {
            double s = 0.0;
            for (std::size_t j = 0; j < q; ++j) s += y(row, j) * delta_dtw[j];
            w[row] -= s;
        }
    }
    for (std::size_t i = 0; i < v.size(); ++i) w[i] += extra[i];
    return w;
}

Matrix dense_reconstruct(const CurvatureBuffer& buffer, std::size_t dim) {
    if (dim > 1000) throw TooLarge("dense_reconstruct guarded to d <= 1000");
    Matrix h(dim, dim);
    Vector e(dim, 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
        e[j] = 1.0;
        Vector col = two_loop_apply(buffer, e);
        for (std::size_t i = 0; i < dim; ++i) h(i, j) = col[i];
        e[j] = 0.0;
    }
    // symmetrize away roundoff
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double avg = 0.5 * (h(i, j) + h(j, i));
            h(i, j) = h(j, i) = avg;
        }
    }
    return h;
}

}  // namespace bbfgs
