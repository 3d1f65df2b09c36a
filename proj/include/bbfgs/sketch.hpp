#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "bbfgs/linalg.hpp"
#include "bbfgs/metric.hpp"
#include "bbfgs/rng.hpp"

namespace bbfgs {

struct BadShape : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ZeroDirection : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// How the sketching matrix D_t is produced each step.
struct GaussianSketch {
    std::size_t q;
};
struct PrevDirectionsSketch {
    std::size_t window;  // L: directions per emission
};
struct SelfConditioningSketch {
    std::size_t q;
};
struct IdentityMetric {};

using SketchStrategy =
    std::variant<GaussianSketch, PrevDirectionsSketch, SelfConditioningSketch, IdentityMetric>;

/// d x q matrix of i.i.d. standard normal entries from the given stream.
Matrix gaussian_sketch(Rng& stream, std::size_t d, std::size_t q);

/// Collects search directions and emits them as a d x L block once every
/// L pushes, oldest direction first.
class DirectionWindow {
  public:
    explicit DirectionWindow(std::size_t capacity);

    std::size_t capacity() const { return capacity_; }

    /// Appends d_t; returns [d_{t+1-L}, ..., d_t] exactly when L directions
    /// have accumulated since the last emission. All-zero directions are
    /// rejected: they can never contribute rank.
    std::optional<Matrix> push(const Vector& direction);

  private:
    std::size_t capacity_;
    std::vector<Vector> pending_;
};

/// Self-conditioning sketch: C sampled uniformly without replacement from
/// the d coordinates, D = L_{t-1} I_{:C} through the factored recursion
/// (identity when the buffer is empty).
struct SelfConditioningResult {
    std::vector<std::uint32_t> columns;  // 0-based, sorted
    Matrix d;
};
SelfConditioningResult self_conditioning_sketch(Rng& stream, const CurvatureBuffer& buffer,
                                                std::size_t dim, std::size_t q);

/// Defaults: q = ceil(sqrt(d)) capped at 32, L = ceil(d^(1/4)).
std::size_t default_sketch_size(std::size_t d);
std::size_t default_direction_window(std::size_t d);

}  // namespace bbfgs
