#pragma once

// Labeled data in the column-sample convention: a d x n matrix whose columns
// are samples, plus dense integer labels 0..M-1.

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "slce/errors.hpp"

namespace slce {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

class LabeledDataset {
public:
    LabeledDataset() = default;

    /// `label_names[j]` is the original token of class j. When empty, class
    /// names default to the decimal id and M = max(label) + 1.
    LabeledDataset(Matrix data, std::vector<int> labels,
                   std::vector<std::string> label_names = {},
                   std::vector<std::string> feature_names = {})
        : data_(std::move(data)),
          labels_(std::move(labels)),
          label_names_(std::move(label_names)),
          feature_names_(std::move(feature_names))
    {
        if (static_cast<Index>(labels_.size()) != data_.cols())
            throw DataError("label count " + std::to_string(labels_.size()) +
                            " does not match sample count " + std::to_string(data_.cols()));
        if (!data_.allFinite()) throw DataError("data matrix contains non-finite entries");
        if (label_names_.empty()) {
            int max_label = -1;
            for (int l : labels_) max_label = std::max(max_label, l);
            for (int j = 0; j <= max_label; ++j) label_names_.push_back(std::to_string(j));
        }
        if (!feature_names_.empty() && static_cast<Index>(feature_names_.size()) != data_.rows())
            throw DataError("feature name count does not match feature count");

        class_indices_.assign(label_names_.size(), {});
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            const int l = labels_[i];
            if (l < 0 || l >= static_cast<int>(label_names_.size()))
                throw DataError("label " + std::to_string(l) + " at sample " + std::to_string(i) +
                                " is outside 0.." + std::to_string(label_names_.size() - 1));
            class_indices_[l].push_back(static_cast<Index>(i));
        }
    }

    const Matrix& data() const { return data_; }
    const std::vector<int>& labels() const { return labels_; }
    const std::vector<std::string>& label_names() const { return label_names_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

    Index dim() const { return data_.rows(); }
    Index size() const { return data_.cols(); }
    int n_classes() const { return static_cast<int>(label_names_.size()); }

    /// Ordered column indices I_j of class j.
    const std::vector<Index>& class_indices(int j) const { return class_indices_.at(j); }
    Index class_count(int j) const { return static_cast<Index>(class_indices_.at(j).size()); }

    std::vector<Index> class_counts() const
    {
        std::vector<Index> counts;
        for (const auto& idx : class_indices_) counts.push_back(static_cast<Index>(idx.size()));
        return counts;
    }

    /// Training-time contract: at least one sample and no empty class.
    /// Evaluation partitions produced by split() may legitimately miss a class.
    void require_nonempty_classes() const
    {
        if (size() == 0) throw DataError("dataset has no samples");
        for (int j = 0; j < n_classes(); ++j)
            if (class_indices_[j].empty())
                throw DataError("class '" + label_names_[j] + "' has no samples");
    }

    /// Same samples, new feature values (e.g. after centering). Keeps encoding.
    LabeledDataset with_data(Matrix data) const
    {
        if (data.cols() != size()) throw DataError("with_data: sample count changed");
        auto names = data.rows() == dim() ? feature_names_ : std::vector<std::string>{};
        return LabeledDataset(std::move(data), labels_, label_names_, std::move(names));
    }

    /// Columns `indices` in the given order, keeping the label encoding.
    LabeledDataset subset(const std::vector<Index>& indices) const
    {
        Matrix sub(dim(), static_cast<Index>(indices.size()));
        std::vector<int> sub_labels;
        sub_labels.reserve(indices.size());
        for (std::size_t c = 0; c < indices.size(); ++c) {
            sub.col(static_cast<Index>(c)) = data_.col(indices[c]);
            sub_labels.push_back(labels_.at(static_cast<std::size_t>(indices[c])));
        }
        return LabeledDataset(std::move(sub), std::move(sub_labels), label_names_, feature_names_);
    }

    /// Keeps only the listed classes, re-encoded 0..k-1 in the listed order.
    LabeledDataset select_classes(const std::vector<int>& classes) const
    {
        std::vector<int> remap(label_names_.size(), -1);
        std::vector<std::string> names;
        for (std::size_t c = 0; c < classes.size(); ++c) {
            remap.at(static_cast<std::size_t>(classes[c])) = static_cast<int>(c);
            names.push_back(label_names_.at(static_cast<std::size_t>(classes[c])));
        }
        std::vector<Index> keep;
        std::vector<int> new_labels;
        for (Index i = 0; i < size(); ++i) {
            if (remap[labels_[i]] >= 0) {
                keep.push_back(i);
                new_labels.push_back(remap[labels_[i]]);
            }
        }
        Matrix sub(dim(), static_cast<Index>(keep.size()));
        for (std::size_t c = 0; c < keep.size(); ++c) sub.col(static_cast<Index>(c)) = data_.col(keep[c]);
        return LabeledDataset(std::move(sub), std::move(new_labels), std::move(names), feature_names_);
    }

    /// Keeps only the listed feature rows.
    LabeledDataset select_features(const std::vector<Index>& rows) const
    {
        Matrix sub(static_cast<Index>(rows.size()), size());
        std::vector<std::string> names;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            sub.row(static_cast<Index>(r)) = data_.row(rows[r]);
            if (!feature_names_.empty()) names.push_back(feature_names_.at(static_cast<std::size_t>(rows[r])));
        }
        return LabeledDataset(std::move(sub), labels_, label_names_, std::move(names));
    }

private:
    Matrix data_;
    std::vector<int> labels_;
    std::vector<std::string> label_names_;
    std::vector<std::string> feature_names_;
    std::vector<std::vector<Index>> class_indices_;
};

/// C-tilde: column i holds the centroid of sample i's class.
struct CentroidMatrix {
    Matrix data;       // d x n
    Matrix centroids;  // d x M, one column per class
};

struct SplitPair {
    LabeledDataset train;
    LabeledDataset test;
    std::vector<Index> train_indices;  // into the source, ascending
    std::vector<Index> test_indices;
    std::uint64_t seed = 0;
    double ratio = 0.0;
};

struct Centered {
    LabeledDataset data;
    Vector mean;
};

struct Standardized {
    LabeledDataset data;
    Vector mean;
    Vector scale;
};

// ---------------------------------------------------------------------------
// CSV loading

struct CsvOptions {
    bool header = true;
    char delimiter = ',';
    /// "last", a zero-based column index, or a header name.
    std::string label_column = "last";
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split_fields(const std::string& line, char delim)
{
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '"') {
            if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else {
                quoted = !quoted;
            }
        } else if (c == delim && !quoted) {
            fields.push_back(trim(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(trim(field));
    return fields;
}

inline bool parse_real(const std::string& s, double& out)
{
    if (s.empty()) return false;
    const char* begin = s.data();
    if (*begin == '+') ++begin;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

} // namespace detail

/// Reads samples-as-rows CSV into the d x n column-sample layout. Labels are
/// re-encoded densely in first-appearance order.
inline LabeledDataset load_csv(const std::string& path, const CsvOptions& options = {})
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (detail::trim(line).empty()) continue;
        rows.push_back(detail::split_fields(line, options.delimiter));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) throw DataError("'" + path + "' is empty");

    std::vector<std::string> header;
    std::size_t first_data = 0;
    if (options.header) {
        header = rows.front();
        first_data = 1;
    }
    if (first_data >= rows.size()) throw DataError("'" + path + "' has a header but no data rows");

    const std::size_t width = rows[first_data].size();
    if (width < 2) throw DataError("'" + path + "' needs at least one feature and one label column");
    if (options.header && header.size() != width)
        throw DataError("'" + path + "': header has " + std::to_string(header.size()) +
                        " fields but row at line " + std::to_string(line_numbers[first_data]) + " has " +
                        std::to_string(width));

    std::size_t label_col = width - 1;
    const std::string& sel = options.label_column;
    if (sel.empty() || sel == "last") {
        label_col = width - 1;
    } else if (std::all_of(sel.begin(), sel.end(), [](unsigned char c) { return std::isdigit(c); })) {
        label_col = static_cast<std::size_t>(std::stoul(sel));
        if (label_col >= width)
            throw DataError("label column index " + sel + " out of range (" + std::to_string(width) + " columns)");
    } else {
        auto it = std::find(header.begin(), header.end(), sel);
        if (it == header.end()) throw DataError("label column '" + sel + "' not found in header");
        label_col = static_cast<std::size_t>(it - header.begin());
    }

    const auto n = static_cast<Index>(rows.size() - first_data);
    const auto d = static_cast<Index>(width - 1);
    Matrix data(d, n);
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(n));
    std::vector<std::string> label_names;
    std::unordered_map<std::string, int> encoding;

    for (std::size_t r = first_data; r < rows.size(); ++r) {
        const auto& fields = rows[r];
        const std::size_t file_line = line_numbers[r];
        if (fields.size() != width)
            throw DataError("ragged row at line " + std::to_string(file_line) + ": expected " +
                            std::to_string(width) + " fields, got " + std::to_string(fields.size()));
        const auto col = static_cast<Index>(r - first_data);
        Index feature = 0;
        for (std::size_t c = 0; c < width; ++c) {
            if (c == label_col) continue;
            double value = 0.0;
            if (!detail::parse_real(fields[c], value))
                throw DataError("parse error at line " + std::to_string(file_line) + ", column " +
                                std::to_string(c + 1) + ": '" + fields[c] + "' is not a finite number");
            data(feature++, col) = value;
        }
        const std::string& token = fields[label_col];
        if (token.empty())
            throw DataError("empty label at line " + std::to_string(file_line) + ", column " +
                            std::to_string(label_col + 1));
        auto [it, inserted] = encoding.try_emplace(token, static_cast<int>(label_names.size()));
        if (inserted) label_names.push_back(token);
        labels.push_back(it->second);
    }

    std::vector<std::string> feature_names;
    if (options.header)
        for (std::size_t c = 0; c < width; ++c)
            if (c != label_col) feature_names.push_back(header[c]);

    LabeledDataset ds(std::move(data), std::move(labels), std::move(label_names), std::move(feature_names));
    for (int j = 0; j < ds.n_classes(); ++j)
        if (ds.class_count(j) == 0) throw Error("internal: class with zero samples after encoding");
    return ds;
}

/// Writes a dataset back in the samples-as-rows layout with a trailing label column.
inline void save_csv(const LabeledDataset& ds, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out.precision(17);
    for (Index f = 0; f < ds.dim(); ++f)
        out << (ds.feature_names().empty() ? "f" + std::to_string(f + 1) : ds.feature_names()[f]) << ',';
    out << "label\n";
    for (Index i = 0; i < ds.size(); ++i) {
        for (Index f = 0; f < ds.dim(); ++f) out << ds.data()(f, i) << ',';
        out << ds.label_names()[ds.labels()[i]] << '\n';
    }
}

// ---------------------------------------------------------------------------
// Partitioning and preprocessing

/// Per-class count sent to training. Ties favour training; the small epsilon
/// keeps 0.8 * 50 from rounding up to 41.
inline Index stratified_train_count(Index class_size, double ratio)
{
    const double raw = ratio * static_cast<double>(class_size);
    return std::min(class_size, static_cast<Index>(std::ceil(raw - 1e-9)));
}

/// Stratified, seeded split. Indices inside each partition stay in source order.
inline SplitPair split(const LabeledDataset& ds, double ratio, std::uint64_t seed)
{
    if (!(ratio > 0.0 && ratio < 1.0)) throw DataError("split ratio must lie in (0,1)");
    ds.require_nonempty_classes();

    std::mt19937_64 rng(seed);
    std::vector<Index> train_idx, test_idx;
    for (int j = 0; j < ds.n_classes(); ++j) {
        if (ds.class_count(j) < 2)
            throw DataError("class '" + ds.label_names()[j] + "' has a single sample; cannot stratify");
        std::vector<Index> members = ds.class_indices(j);
        std::shuffle(members.begin(), members.end(), rng);
        const Index n_train = stratified_train_count(ds.class_count(j), ratio);
        train_idx.insert(train_idx.end(), members.begin(), members.begin() + n_train);
        test_idx.insert(test_idx.end(), members.begin() + n_train, members.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    if (test_idx.empty()) throw DataError("split ratio leaves the test partition empty");

    SplitPair out;
    out.train = ds.subset(train_idx);
    out.test = ds.subset(test_idx);
    out.train_indices = std::move(train_idx);
    out.test_indices = std::move(test_idx);
    out.seed = seed;
    out.ratio = ratio;
    return out;
}

/// Subtracts the global column mean.
inline Centered center(const LabeledDataset& ds)
{
    if (ds.size() < 1) throw DataError("cannot center an empty dataset");
    Vector mean = ds.data().rowwise().mean();
    Matrix centered = ds.data().colwise() - mean;
    return {ds.with_data(std::move(centered)), std::move(mean)};
}

/// Per-feature z-scoring. Constant features keep scale 1.
inline Standardized standardize(const LabeledDataset& ds)
{
    if (ds.size() < 2) throw DataError("standardization needs at least two samples");
    Vector mean = ds.data().rowwise().mean();
    Matrix centered = ds.data().colwise() - mean;
    Vector scale = (centered.rowwise().squaredNorm() / static_cast<double>(ds.size() - 1)).cwiseSqrt();
    for (Index f = 0; f < scale.size(); ++f)
        if (!(scale[f] > 0.0)) scale[f] = 1.0;
    Matrix z = centered.array().colwise() / scale.array();
    return {ds.with_data(std::move(z)), std::move(mean), std::move(scale)};
}

/// Unique class centroids (d x M). Empty classes get a zero column.
inline Matrix class_centroids(const LabeledDataset& ds)
{
    Matrix centroids = Matrix::Zero(ds.dim(), ds.n_classes());
    for (int j = 0; j < ds.n_classes(); ++j) {
        const auto& members = ds.class_indices(j);
        if (members.empty()) continue;
        for (Index i : members) centroids.col(j) += ds.data().col(i);
        centroids.col(j) /= static_cast<double>(members.size());
    }
    return centroids;
}

inline CentroidMatrix centroid_matrix(const LabeledDataset& ds)
{
    CentroidMatrix out;
    out.centroids = class_centroids(ds);
    out.data.resize(ds.dim(), ds.size());
    for (Index i = 0; i < ds.size(); ++i) out.data.col(i) = out.centroids.col(ds.labels()[i]);
    return out;
}

} // namespace slce
