#include "bbfgs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace bbfgs {

Dataset::Dataset(std::vector<SparseExample> examples, std::vector<int> labels, std::size_t d,
                 bool bias_added)
    : examples_(std::move(examples)), labels_(std::move(labels)), d_(d), bias_added_(bias_added) {
    if (examples_.size() != labels_.size()) {
        throw std::invalid_argument("example and label counts differ");
    }
    squared_norms_.reserve(examples_.size());
    for (std::size_t i = 0; i < examples_.size(); ++i) {
        const auto& ex = examples_[i];
        if (ex.indices.size() != ex.values.size()) {
            throw std::invalid_argument("index and value counts differ");
        }
        std::uint32_t prev = 0;
        double sq = 0.0;
        for (std::size_t k = 0; k < ex.indices.size(); ++k) {
            if (ex.indices[k] <= prev) {
                throw std::invalid_argument("feature indices must be strictly increasing");
            }
            if (ex.indices[k] > d_) {
                throw std::invalid_argument("feature index exceeds dimension");
            }
            if (!std::isfinite(ex.values[k])) {
                throw std::invalid_argument("feature value is not finite");
            }
            prev = ex.indices[k];
            sq += ex.values[k] * ex.values[k];
        }
        squared_norms_.push_back(sq);
        if (labels_[i] != 1 && labels_[i] != -1) {
            throw std::invalid_argument("labels must be +1 or -1");
        }
    }
}

double Dataset::max_squared_norm() const {
    double m = 0.0;
    for (double s : squared_norms_) m = std::max(m, s);
    return m;
}

namespace {

bool parse_double(std::string_view tok, double& out) {
    // from_chars rejects an explicit plus sign, but "+1" labels are common
    if (tok.size() > 1 && tok.front() == '+') tok.remove_prefix(1);
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, std::size_t d_override) {
    std::vector<SparseExample> examples;
    std::vector<int> labels;
    std::size_t d = 0;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::istringstream tokens(line);
        std::string tok;
        if (!(tokens >> tok)) continue;  // blank line

        double raw_label;
        if (!parse_double(tok, raw_label)) {
            throw MalformedLine("non-numeric label '" + tok + "'", line_number);
        }
        int label;
        if (raw_label == 1.0 || raw_label == 0.0 || raw_label == -1.0) {
            label = raw_label == 1.0 ? 1 : -1;
        } else {
            throw UnrecognizedLabel("label must be in {0,1,-1,+1}, got '" + tok + "'",
                                    line_number);
        }

        SparseExample ex;
        while (tokens >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) {
                throw MalformedLine("expected idx:val, got '" + tok + "'", line_number);
            }
            double idx_raw;
            if (!parse_double(std::string_view(tok).substr(0, colon), idx_raw) ||
                idx_raw != std::floor(idx_raw)) {
                throw MalformedLine("non-integer index in '" + tok + "'", line_number);
            }
            if (idx_raw < 1.0) {
                throw NonPositiveIndex("index must be >= 1 in '" + tok + "'", line_number);
            }
            double value;
            if (!parse_double(std::string_view(tok).substr(colon + 1), value)) {
                throw MalformedLine("non-numeric value in '" + tok + "'", line_number);
            }
            if (!std::isfinite(value)) {
                throw NonFiniteValue("non-finite value in '" + tok + "'", line_number);
            }
            const auto idx = static_cast<std::uint32_t>(idx_raw);
            if (value != 0.0) {
                ex.indices.push_back(idx);
                ex.values.push_back(value);
            }
            d = std::max<std::size_t>(d, idx);
        }
        if (!std::is_sorted(ex.indices.begin(), ex.indices.end())) {
            std::vector<std::size_t> order(ex.indices.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return ex.indices[a] < ex.indices[b]; });
            SparseExample sorted;
            for (std::size_t k : order) {
                sorted.indices.push_back(ex.indices[k]);
                sorted.values.push_back(ex.values[k]);
            }
            ex = std::move(sorted);
        }
        for (std::size_t k = 1; k < ex.indices.size(); ++k) {
            if (ex.indices[k] == ex.indices[k - 1]) {
                throw MalformedLine("duplicate feature index " + std::to_string(ex.indices[k]),
                                    line_number);
            }
        }
        examples.push_back(std::move(ex));
        labels.push_back(label);
    }
    d = std::max(d, d_override);
    return Dataset(std::move(examples), std::move(labels), d);
}

Dataset parse_libsvm(const std::string& text, std::size_t d_override) {
    std::istringstream in(text);
    return parse_libsvm(in, d_override);
}

Dataset load_libsvm_file(const std::string& path, std::size_t d_override) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open data file: " + path);
    }
    return parse_libsvm(in, d_override);
}

void serialize_libsvm(const Dataset& data, std::ostream& out) {
    out.precision(17);
    for (std::size_t i = 0; i < data.n(); ++i) {
        out << (data.label(i) > 0 ? "+1" : "-1");
        const auto& ex = data.example(i);
        for (std::size_t k = 0; k < ex.indices.size(); ++k) {
            out << ' ' << ex.indices[k] << ':' << ex.values[k];
        }
        out << '\n';
    }
}

Dataset add_bias(const Dataset& data) {
    if (data.bias_added()) {
        throw BiasAlreadyAdded("bias feature already present");
    }
    const auto d_new = static_cast<std::uint32_t>(data.d() + 1);
    std::vector<SparseExample> examples;
    std::vector<int> labels;
    examples.reserve(data.n());
    labels.reserve(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        SparseExample ex = data.example(i);
        ex.indices.push_back(d_new);
        ex.values.push_back(1.0);
        examples.push_back(std::move(ex));
        labels.push_back(data.label(i));
    }
    return Dataset(std::move(examples), std::move(labels), d_new, true);
}

std::vector<std::uint32_t> sample_indices(Rng& stream, std::size_t n, std::size_t size) {
    if (size > n) {
        throw SizeOutOfRange("sample size exceeds population");
    }
    std::vector<std::uint32_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0u);
    for (std::size_t i = 0; i < size; ++i) {
        const std::size_t j = i + stream.uniform_below(n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(size);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace bbfgs
