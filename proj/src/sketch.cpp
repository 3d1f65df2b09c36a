#include "bbfgs/sketch.hpp"

#include <algorithm>
#include <cmath>

#include "bbfgs/dataset.hpp"

namespace bbfgs {

Matrix gaussian_sketch(Rng& stream, std::size_t d, std::size_t q) {
    if (q < 1 || q > d) throw BadShape("sketch size must satisfy 1 <= q <= d");
    Matrix m(d, q);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < q; ++j) m(i, j) = stream.normal();
    }
    return m;
}

DirectionWindow::DirectionWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw BadShape("direction window capacity must be positive");
}

std::optional<Matrix> DirectionWindow::push(const Vector& direction) {
    const bool all_zero =
        std::all_of(direction.begin(), direction.end(), [](double v) { return v == 0.0; });
    if (all_zero) throw ZeroDirection("all-zero search direction rejected");
    pending_.push_back(direction);
    if (pending_.size() < capacity_) return std::nullopt;
    Matrix block(direction.size(), capacity_);
    for (std::size_t j = 0; j < capacity_; ++j) {
        for (std::size_t i = 0; i < direction.size(); ++i) block(i, j) = pending_[j][i];
    }
    pending_.clear();
    return block;
}

SelfConditioningResult self_conditioning_sketch(Rng& stream, const CurvatureBuffer& buffer,
                                                std::size_t dim, std::size_t q) {
    if (q < 1 || q > dim) throw BadShape("sketch size must satisfy 1 <= q <= d");
    if (!buffer.empty() && !buffer.factored_mode()) {
        throw BufferNotFactored("self-conditioning sketch needs a factored buffer");
    }
    std::vector<std::uint32_t> columns = sample_indices(stream, dim, q);
    Matrix identity_cols(dim, q);
    for (std::size_t j = 0; j < q; ++j) identity_cols(columns[j], j) = 1.0;
    return {std::move(columns), factored_apply(buffer, identity_cols)};
}

std::size_t default_sketch_size(std::size_t d) {
    return std::min<std::size_t>(32, std::size_t(std::ceil(std::sqrt(double(d)))));
}

std::size_t default_direction_window(std::size_t d) {
    return std::max<std::size_t>(1, std::size_t(std::ceil(std::pow(double(d), 0.25))));
}

}  // namespace bbfgs
