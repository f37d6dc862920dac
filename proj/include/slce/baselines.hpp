#pragma once

// Reference linear reducers behind one transform contract,
// y = basis^T (x - mean):
//   pca        top eigenvectors of the centered scatter X X^T
//   lda        Fisher discriminant with trace-scaled shrinkage on S_w
//   bair_spca  regression screening of features, then PCA on the survivors
//   hsic_spca  top eigenvectors of X H L H X^T with the delta label kernel
//   slce       see slce.hpp

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include "slce/dataset.hpp"
#include "slce/errors.hpp"
#include "slce/knn.hpp"
#include "slce/linalg.hpp"
#include "slce/slce.hpp"

namespace slce {

enum class Method { pca, lda, bair_spca, hsic_spca, slce };

inline std::string to_string(Method m)
{
    switch (m) {
    case Method::pca: return "pca";
    case Method::lda: return "lda";
    case Method::bair_spca: return "bair_spca";
    case Method::hsic_spca: return "hsic_spca";
    case Method::slce: return "slce";
    }
    return "?";
}

inline Method parse_method(const std::string& name)
{
    for (Method m : {Method::pca, Method::lda, Method::bair_spca, Method::hsic_spca, Method::slce})
        if (to_string(m) == name) return m;
    throw DataError("unknown method '" + name + "' (expected slce, pca, lda, bair_spca or hsic_spca)");
}

struct LinearReducer {
    Method method = Method::pca;
    Matrix basis;     // d x k
    Vector mean;      // d
    Vector spectrum;  // per-column eigenvalue / Fisher ratio, descending
    nlohmann::json aux = nlohmann::json::object();
    std::vector<std::string> notes;

    Index dim() const { return basis.rows(); }
    Index rank() const { return basis.cols(); }
};

inline Matrix transform(const LinearReducer& model, const Matrix& x)
{
    if (x.rows() != model.dim())
        throw DataError("transform: data has " + std::to_string(x.rows()) + " features, model expects " +
                        std::to_string(model.dim()));
    return model.basis.transpose() * (x.colwise() - model.mean);
}

/// The model restricted to its leading `k` directions.
inline LinearReducer truncate(const LinearReducer& model, Index k)
{
    if (k < 1 || k > model.rank())
        throw DataError("truncate: cannot keep " + std::to_string(k) + " of " + std::to_string(model.rank()) +
                        " directions");
    LinearReducer out = model;
    out.basis = model.basis.leftCols(k);
    if (model.spectrum.size() >= k) out.spectrum = model.spectrum.head(k);
    return out;
}

inline LinearReducer to_reducer(const SlceModel& model)
{
    LinearReducer out;
    out.method = Method::slce;
    out.basis = model.basis;
    out.mean = model.mean;
    out.spectrum = model.spectrum;
    out.notes = model.notes;
    out.aux = {{"n_classes", model.n_classes},
               {"trace_ctc", model.trace_ctc},
               {"positive_count", model.positive_count},
               {"positive_tolerance", model.positive_tolerance},
               {"centered", true}};
    return out;
}

/// One-hot label matrix Y (M x n).
inline Matrix one_hot(const LabeledDataset& ds)
{
    Matrix y = Matrix::Zero(ds.n_classes(), ds.size());
    for (Index i = 0; i < ds.size(); ++i) y(ds.labels()[i], i) = 1.0;
    return y;
}

// ---------------------------------------------------------------------------
// PCA

inline LinearReducer fit_pca(const LabeledDataset& train, Index k, const SolverOptions& solver = {})
{
    if (k < 1 || k > std::min(train.dim(), train.size()))
        throw DataError("pca fit: k must satisfy 1 <= k <= min(d, n) = " +
                        std::to_string(std::min(train.dim(), train.size())) + " (got " + std::to_string(k) + ")");
    const Centered centered = center(train);
    const TopEigen eig = top_eigenpairs(
        centered.data.data(), k, [](const Matrix& y) { return Matrix(y * y.transpose()); }, solver);

    LinearReducer out;
    out.method = Method::pca;
    out.basis = eig.vectors;
    out.mean = centered.mean;
    out.spectrum = eig.values;
    return out;
}

// ---------------------------------------------------------------------------
// LDA

/// X Y^T (Y Y^T)^+ Y X^T for a label coding Y (q x n). With one-hot Y this is
/// the between-class scatter sum_j |C_j| c_j c_j^T of centered X, and it is
/// unchanged by any invertible recoding Y -> G Y.
inline Matrix between_class_scatter(const Matrix& xc, const Matrix& coding)
{
    if (coding.cols() != xc.cols()) throw DataError("between_class_scatter: coding/sample count mismatch");
    const Matrix xy = xc * coding.transpose();
    const Matrix gram_pinv = (coding * coding.transpose()).completeOrthogonalDecomposition().pseudoInverse();
    Matrix sb = xy * gram_pinv * xy.transpose();
    return 0.5 * (sb + sb.transpose());
}

inline Matrix within_class_scatter(const LabeledDataset& centered)
{
    const Matrix ctilde = centroid_matrix(centered).data;
    const Matrix resid = centered.data() - ctilde;
    Matrix sw = resid * resid.transpose();
    return 0.5 * (sw + sw.transpose());
}

/// Fisher ratio v^T S_b v / v^T (S_w + alpha I) v for every column of `dirs`,
/// with alpha = shrinkage * Tr(S_w) / d.
inline Vector fisher_ratios(const LabeledDataset& train, const Matrix& dirs, double shrinkage)
{
    const Centered c = center(train);
    const Matrix sb = between_class_scatter(c.data.data(), one_hot(c.data));
    const Matrix sw = within_class_scatter(c.data);
    const double alpha = shrinkage * sw.trace() / static_cast<double>(train.dim());
    Vector out(dirs.cols());
    for (Index i = 0; i < dirs.cols(); ++i) {
        const auto v = dirs.col(i);
        out[i] = v.dot(sb * v) / (v.dot(sw * v) + alpha * v.squaredNorm());
    }
    return out;
}

inline LinearReducer fit_lda(const LabeledDataset& train, Index k, double shrinkage = 1e-4,
                             const SolverOptions& solver = {}, const Matrix& label_coding = Matrix())
{
    train.require_nonempty_classes();
    const int m = train.n_classes();
    if (k < 1) throw DataError("lda fit: k must satisfy k >= 1");
    if (k > m - 1)
        throw DataError("lda fit: k = " + std::to_string(k) + " exceeds M - 1 = " + std::to_string(m - 1) +
                        " (rank of the between-class scatter)");
    if (k > train.dim()) throw DataError("lda fit: k exceeds the feature dimension");
    if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) throw DataError("lda fit: shrinkage must lie in [0,1]");

    const Centered centered = center(train);
    const Matrix& xc = centered.data.data();
    const Matrix coding = label_coding.size() ? label_coding : one_hot(centered.data);

    // Every eigenvector with nonzero Fisher ratio lies in range(X), so the d >> n
    // case is solved in the coordinates of a range basis.
    const bool reduced = use_reduced_path(train.dim(), train.size(), solver);
    Matrix range_basis;
    Matrix coords;
    if (reduced) {
        RangeBasis range(xc);
        range_basis = range.basis();
        coords = range_basis.transpose() * xc;
    } else {
        coords = xc;
    }
    if (coords.rows() < k) throw DataError("lda fit: data range has fewer than k dimensions");

    const Matrix sb = between_class_scatter(coords, coding);
    const Matrix sw = within_class_scatter(centered.data.with_data(coords));
    const double alpha = shrinkage * sw.trace() / static_cast<double>(train.dim());
    const Matrix sw_reg = sw + alpha * Matrix::Identity(sw.rows(), sw.cols());

    const SymmetricEigen sw_eig = sym_eig(sw_reg);
    const double sw_max = sw_eig.values.size() ? std::abs(sw_eig.values[0]) : 0.0;
    const double sw_min = sw_eig.values.size() ? sw_eig.values[sw_eig.values.size() - 1] : 0.0;
    if (!(sw_min > 1e-12 * sw_max) || sw_max == 0.0)
        throw NumericalError("lda fit: within-class scatter is singular (smallest eigenvalue " +
                             std::to_string(sw_min) + ", largest " + std::to_string(sw_max) +
                             "); raise the shrinkage");

    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> gen(sb, sw_reg);
    if (gen.info() != Eigen::Success) throw NumericalError("lda fit: generalized eigensolver failed");

    const Index r = coords.rows();
    Matrix dirs(train.dim(), k);
    Vector ratios(k);
    for (Index i = 0; i < k; ++i) {
        const Vector v = gen.eigenvectors().col(r - 1 - i);
        ratios[i] = gen.eigenvalues()[r - 1 - i];
        Vector lifted = reduced ? Vector(range_basis * v) : v;
        dirs.col(i) = lifted / lifted.norm();
    }
    apply_sign_convention(dirs);

    LinearReducer out;
    out.method = Method::lda;
    out.basis = dirs;
    out.mean = centered.mean;
    out.spectrum = ratios;
    out.aux = {{"shrinkage", shrinkage}, {"ridge", alpha}};
    return out;
}

// ---------------------------------------------------------------------------
// Bair's supervised PCA

struct BairOptions {
    std::vector<double> threshold_grid{0.01, 0.05, 0.1, 0.25, 0.5, 1.0};
    int cv_folds = 5;
    int cv_neighbors = 5;
    std::uint64_t seed = 0;
    SolverOptions solver;
};

/// Screening score per feature: max over classes of |x_j^T y_c| / ||x_j|| with
/// x_j the centered feature and y_c the centered one-hot response of class c.
/// For two classes this is |w_j| of the single-response coefficient.
/// Features with zero norm get a negative score.
inline Vector bair_scores(const LabeledDataset& train)
{
    const Centered c = center(train);
    const Matrix& xc = c.data.data();
    Matrix y = one_hot(c.data);
    y = y.colwise() - y.rowwise().mean();
    const Matrix xy = xc * y.transpose();  // d x M
    Vector scores(train.dim());
    const double scale = xc.size() ? xc.cwiseAbs().maxCoeff() : 0.0;
    for (Index j = 0; j < train.dim(); ++j) {
        const double norm = xc.row(j).norm();
        if (!(norm > 1e-12 * scale * std::sqrt(static_cast<double>(train.size()))) || norm == 0.0) {
            scores[j] = -1.0;
            continue;
        }
        scores[j] = xy.row(j).cwiseAbs().maxCoeff() / norm;
    }
    return scores;
}

namespace detail {

/// Top `fraction` of the valid (non-constant) features, at least `k`,
/// returned in ascending feature order.
inline std::vector<Index> select_features(const Vector& scores, double fraction, Index k)
{
    std::vector<Index> valid;
    for (Index j = 0; j < scores.size(); ++j)
        if (scores[j] >= 0.0) valid.push_back(j);
    std::stable_sort(valid.begin(), valid.end(), [&](Index a, Index b) { return scores[a] > scores[b]; });
    const auto want = static_cast<Index>(std::ceil(fraction * static_cast<double>(valid.size()) - 1e-9));
    const Index keep = std::min<Index>(static_cast<Index>(valid.size()), std::max(want, k));
    std::vector<Index> out(valid.begin(), valid.begin() + keep);
    std::sort(out.begin(), out.end());
    return out;
}

inline LinearReducer pca_on_features(const LabeledDataset& train, const std::vector<Index>& features, Index k,
                                     const SolverOptions& solver)
{
    const LabeledDataset sub = train.select_features(features);
    const Index kk = std::min({k, sub.dim(), sub.size()});
    const LinearReducer pca = fit_pca(sub, kk, solver);
    LinearReducer out;
    out.method = Method::bair_spca;
    out.basis = Matrix::Zero(train.dim(), kk);
    for (std::size_t r = 0; r < features.size(); ++r) out.basis.row(features[r]) = pca.basis.row(static_cast<Index>(r));
    out.mean = train.data().rowwise().mean();
    out.spectrum = pca.spectrum;
    return out;
}

/// Stratified fold assignment: each class is shuffled and dealt round-robin.
inline std::vector<int> stratified_folds(const LabeledDataset& ds, int folds, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<int> fold(static_cast<std::size_t>(ds.size()), 0);
    int offset = 0;
    for (int j = 0; j < ds.n_classes(); ++j) {
        std::vector<Index> members = ds.class_indices(j);
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t p = 0; p < members.size(); ++p)
            fold[static_cast<std::size_t>(members[p])] = static_cast<int>((p + static_cast<std::size_t>(offset)) % static_cast<std::size_t>(folds));
        offset += static_cast<int>(members.size());
    }
    return fold;
}

} // namespace detail

inline LinearReducer fit_bair_spca(const LabeledDataset& train, Index k, const BairOptions& options = {})
{
    train.require_nonempty_classes();
    if (k < 1) throw DataError("bair_spca fit: k must satisfy k >= 1");
    if (options.threshold_grid.empty()) throw DataError("bair_spca fit: threshold grid is empty");
    for (double f : options.threshold_grid)
        if (!(f > 0.0 && f <= 1.0)) throw DataError("bair_spca fit: grid fractions must lie in (0,1]");

    const Vector scores = bair_scores(train);
    std::vector<Index> dropped;
    for (Index j = 0; j < scores.size(); ++j)
        if (scores[j] < 0.0) dropped.push_back(j);
    std::vector<std::string> notes;
    if (!dropped.empty()) {
        notes.push_back("bair_spca: dropped " + std::to_string(dropped.size()) + " zero-variance feature(s)");
        warn(notes.back());
    }
    if (static_cast<Index>(scores.size()) - static_cast<Index>(dropped.size()) < 1)
        throw DataError("bair_spca fit: every feature is constant");

    // Cross-validated choice of the screening fraction on the training set only.
    std::vector<double> cv_accuracy(options.threshold_grid.size(), 0.0);
    std::size_t best = 0;
    int folds = std::min<int>(options.cv_folds, static_cast<int>(train.size()));
    if (options.threshold_grid.size() > 1) {
        if (folds < 2) throw DataError("bair_spca fit: cross-validation needs at least 2 folds");
        const std::vector<int> fold_of = detail::stratified_folds(train, folds, options.seed);
        WarningCapture quiet;
        for (int f = 0; f < folds; ++f) {
            std::vector<Index> tr, va;
            for (Index i = 0; i < train.size(); ++i) (fold_of[static_cast<std::size_t>(i)] == f ? va : tr).push_back(i);
            if (va.empty() || tr.empty()) continue;
            const LabeledDataset fold_train = train.subset(tr);
            const LabeledDataset fold_val = train.subset(va);
            const Vector fold_scores = bair_scores(fold_train);
            for (std::size_t g = 0; g < options.threshold_grid.size(); ++g) {
                const auto feats = detail::select_features(fold_scores, options.threshold_grid[g], k);
                if (feats.empty()) continue;
                const LinearReducer m = detail::pca_on_features(fold_train, feats, k, options.solver);
                const int nn = std::min<int>(options.cv_neighbors, static_cast<int>(fold_train.size()));
                const auto pred = knn_predict(transform(m, fold_train.data()), fold_train.labels(),
                                              transform(m, fold_val.data()), nn);
                // Summed over folds, so fold order does not matter.
                cv_accuracy[g] += accuracy(pred, fold_val.labels()) * static_cast<double>(va.size());
            }
        }
        for (double& a : cv_accuracy) a /= static_cast<double>(train.size());
        for (std::size_t g = 1; g < cv_accuracy.size(); ++g)
            if (cv_accuracy[g] > cv_accuracy[best]) best = g;
    }

    const double fraction = options.threshold_grid[best];
    const auto features = detail::select_features(scores, fraction, k);
    LinearReducer out = detail::pca_on_features(train, features, k, options.solver);
    if (out.rank() < k) throw DataError("bair_spca fit: only " + std::to_string(out.rank()) + " directions available for k = " + std::to_string(k));

    double threshold = std::numeric_limits<double>::infinity();
    for (Index j : features) threshold = std::min(threshold, scores[j]);
    out.notes = notes;
    out.aux = {{"selected_features", features},
               {"selected_fraction", fraction},
               {"score_threshold", threshold},
               {"threshold_grid", options.threshold_grid},
               {"cv_accuracy", cv_accuracy},
               {"cv_folds", folds},
               {"seed", options.seed},
               {"dropped_features", dropped}};
    return out;
}

// ---------------------------------------------------------------------------
// HSIC supervised PCA

/// Q = X H L H X^T with L = Y^T Y (delta kernel). Evaluated as B B^T with
/// B = X H Y^T, which is what makes Q positive semi-definite.
inline Matrix hsic_matrix(const Matrix& xc, const Matrix& y)
{
    const Matrix b = xc * y.transpose();
    Matrix q = b * b.transpose();
    return 0.5 * (q + q.transpose());
}

inline LinearReducer fit_hsic_spca(const LabeledDataset& train, Index k, const SolverOptions& solver = {})
{
    train.require_nonempty_classes();
    if (k < 1 || k > std::min(train.dim(), train.size()))
        throw DataError("hsic_spca fit: k must satisfy 1 <= k <= min(d, n) = " +
                        std::to_string(std::min(train.dim(), train.size())) + " (got " + std::to_string(k) + ")");
    if (train.n_classes() < 2)
        throw DataError("hsic_spca fit: degenerate single-class supervision (H L H = 0)");

    const Centered centered = center(train);
    const Matrix y = one_hot(centered.data);
    const TopEigen eig = top_eigenpairs(
        centered.data.data(), k, [&](const Matrix& coords) { return hsic_matrix(coords, y); }, solver);

    LinearReducer out;
    out.method = Method::hsic_spca;
    out.basis = eig.vectors;
    out.mean = centered.mean;
    out.spectrum = eig.values;
    out.aux = {{"label_kernel", "delta"}};
    return out;
}

// ---------------------------------------------------------------------------

struct ReducerParams {
    double lda_shrinkage = 1e-4;
    BairOptions bair;
    SlceOptions slce;
    SolverOptions solver;
};

inline LinearReducer fit_reducer(Method method, const LabeledDataset& train, Index k, const ReducerParams& params = {})
{
    switch (method) {
    case Method::pca: return fit_pca(train, k, params.solver);
    case Method::lda: return fit_lda(train, k, params.lda_shrinkage, params.solver);
    case Method::bair_spca: {
        BairOptions b = params.bair;
        b.solver = params.solver;
        return fit_bair_spca(train, k, b);
    }
    case Method::hsic_spca: return fit_hsic_spca(train, k, params.solver);
    case Method::slce: {
        SlceOptions s = params.slce;
        s.solver = params.solver;
        return to_reducer(fit(train, k, s));
    }
    }
    throw DataError("unknown method");
}

} // namespace slce
