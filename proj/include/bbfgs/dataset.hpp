#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbfgs/rng.hpp"

namespace bbfgs {

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what + " at line " + std::to_string(line)), line_number(line) {}
    std::size_t line_number;
};
struct MalformedLine : ParseError {
    using ParseError::ParseError;
};
struct NonFiniteValue : ParseError {
    using ParseError::ParseError;
};
struct NonPositiveIndex : ParseError {
    using ParseError::ParseError;
};
struct UnrecognizedLabel : ParseError {
    using ParseError::ParseError;
};
struct BiasAlreadyAdded : std::logic_error {
    using std::logic_error::logic_error;
};
struct SizeOutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// One example: strictly increasing 1-based feature indices with nonzero
/// finite values.
struct SparseExample {
    std::vector<std::uint32_t> indices;
    std::vector<double> values;
};

/// Immutable sparse dataset: columns a^i of the data matrix plus +-1 labels.
class Dataset {
  public:
    Dataset(std::vector<SparseExample> examples, std::vector<int> labels, std::size_t d,
            bool bias_added = false);

    std::size_t n() const { return examples_.size(); }
    std::size_t d() const { return d_; }
    bool bias_added() const { return bias_added_; }

    const SparseExample& example(std::size_t i) const { return examples_[i]; }
    int label(std::size_t i) const { return labels_[i]; }

    /// Squared Euclidean norm of example i.
    double squared_norm(std::size_t i) const { return squared_norms_[i]; }
    double max_squared_norm() const;

  private:
    std::vector<SparseExample> examples_;
    std::vector<int> labels_;
    std::vector<double> squared_norms_;
    std::size_t d_;
    bool bias_added_;
};

/// Parses LIBSVM text: one example per line, "label idx:val idx:val ...".
/// Labels {0,1} and {-1,+1} are both accepted; 0 maps to -1, 1 to +1.
/// Blank lines are skipped. d is the max index seen unless d_override is
/// larger.
Dataset parse_libsvm(std::istream& in, std::size_t d_override = 0);
Dataset parse_libsvm(const std::string& text, std::size_t d_override = 0);
Dataset load_libsvm_file(const std::string& path, std::size_t d_override = 0);

/// Writes the dataset back out in LIBSVM text form (round-trips with
/// parse_libsvm).
void serialize_libsvm(const Dataset& data, std::ostream& out);

/// Bias trick: appends feature (d+1, 1.0) to every example.
Dataset add_bias(const Dataset& data);

/// Distinct 0-based indices in [0, n), uniform without replacement,
/// drawn by partial Fisher-Yates. Returned sorted.
std::vector<std::uint32_t> sample_indices(Rng& stream, std::size_t n, std::size_t size);

}  // namespace bbfgs
