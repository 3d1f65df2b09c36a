#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "bbfgs/linalg.hpp"

namespace bbfgs {

struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BufferNotFactored : std::logic_error {
    using std::logic_error::logic_error;
};
struct TooLarge : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// One block of curvature information: D, Y = (hessian of f_T) D, and the
/// Cholesky factor of D^T Y, which implicitly defines Delta = (D^T Y)^-1.
/// In factored mode the triple additionally carries the identity-column
/// index set C it was sketched from and an upper-triangular R_fact with
/// R_fact * R_fact^T = Delta.
class BlockTriple {
  public:
    BlockTriple(Matrix d, Matrix y);
    BlockTriple(Matrix d, Matrix y, std::vector<std::uint32_t> columns);

    std::size_t dim() const { return d_.rows(); }
    std::size_t block_size() const { return d_.cols(); }
    bool factored() const { return !columns_.empty() || r_fact_.has_value(); }

    const Matrix& d() const { return d_; }
    const Matrix& y() const { return y_; }
    const LowerTriangularFactor& chol() const { return chol_; }
    const std::vector<std::uint32_t>& columns() const { return columns_; }
    const Matrix& r_fact() const;

    /// Delta * B via two triangular solves, never forming the inverse.
    Matrix apply_delta(const Matrix& b) const { return chol_.solve(b); }
    Vector apply_delta(const Vector& b) const { return chol_.solve(b); }

  private:
    Matrix d_;
    Matrix y_;
    LowerTriangularFactor chol_;
    std::vector<std::uint32_t> columns_;  // 0-based; factored mode only
    std::optional<Matrix> r_fact_;
};

/// Builds a triple from D and Y: symmetrizes D^T Y by averaging, then
/// factorizes. Cholesky failure surfaces as RankDeficient so the caller
/// can run its sketch rank-repair policy. When `columns` is supplied the
/// factored extras are computed as well.
BlockTriple make_triple(Matrix d, Matrix y);
BlockTriple make_triple(Matrix d, Matrix y, std::vector<std::uint32_t> columns);

/// Ordered ring of at most M triples, oldest first. Pushing at capacity
/// evicts the oldest; the implicit operator uses H_{t-M} = I.
class CurvatureBuffer {
  public:
    explicit CurvatureBuffer(std::size_t capacity, bool factored_mode = false)
        : capacity_(capacity), factored_mode_(factored_mode) {}

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return triples_.size(); }
    bool empty() const { return triples_.empty(); }
    bool factored_mode() const { return factored_mode_; }
    const BlockTriple& triple(std::size_t i) const { return triples_[i]; }

    void push(BlockTriple triple);
    void clear() { triples_.clear(); }

  private:
    std::size_t capacity_;
    bool factored_mode_;
    std::deque<BlockTriple> triples_;
};

/// One step of the block BFGS update:
///   H+ = D Delta D^T + (I - D Delta Y^T) H (I - Y Delta D^T).
/// H = 0 is admitted and collapses to the D (D^T Y)^-1 D^T special case.
Matrix dense_update(const Matrix& h, const BlockTriple& t);

/// H_t * g through the block two-loop recursion; no d x d intermediate.
Vector two_loop_apply(const CurvatureBuffer& buffer, const Vector& g);

/// L_t * V for the factored form, expanding the reduced factored update
/// oldest to newest with L_{t-M} = I:
///   W <- W - D Delta (Y^T W) + D R_fact V_{C,:}
/// where the row selection applies to the original input V (the literal
/// expansion of the recursion; selecting rows of the running W instead
/// breaks L L^T = H).
Matrix factored_apply(const CurvatureBuffer& buffer, const Matrix& v);
Vector factored_apply(const CurvatureBuffer& buffer, const Vector& v);

/// L_t^T * v via the transposed recursion, newest to oldest. Together
/// with factored_apply this gives H v = L (L^T v).
Vector factored_transpose_apply(const CurvatureBuffer& buffer, const Vector& v);

/// Test oracle: materializes H_t by applying two_loop_apply to each
/// identity column. Guarded to d <= 1000.
Matrix dense_reconstruct(const CurvatureBuffer& buffer, std::size_t dim);

}  // namespace bbfgs
