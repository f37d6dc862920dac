#pragma once

// Supervised Linear Centroid-Encoder.
//
// Finds the orthonormal d x k basis A minimising ||C - A A^T X||_F^2, where X
// is the centered training matrix and C its centroid matrix. The minimiser is
// the top-k eigenvectors of the symmetric system matrix
//
//     S = X C^T + C X^T - X X^T
//
// and the cost of the optimum is Tr(C^T C) - (mu_1 + ... + mu_k). At most
// M - 1 eigenvalues of S are positive, so directions past that count never
// lower the cost.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "slce/dataset.hpp"
#include "slce/errors.hpp"
#include "slce/linalg.hpp"

namespace slce {

struct SlceModel {
    Matrix basis;                 // d x k, orthonormal columns
    Vector spectrum;              // top-k eigenvalues, descending
    Vector mean;                  // training mean
    int n_classes = 0;
    double trace_ctc = 0.0;       // Tr(C^T C) of the centered training centroids
    Index positive_count = 0;     // eigenvalues of S above positive_tolerance
    double positive_tolerance = 0.0;
    bool reduced_path = false;
    std::vector<std::string> notes;

    Index dim() const { return basis.rows(); }
    Index rank() const { return basis.cols(); }
};

struct SlceOptions {
    SolverOptions solver;
    /// Relative positivity threshold on |spectrum|_max.
    double positive_rel_tol = 1e-8;
};

/// X C^T + C X^T - X X^T, explicitly symmetrized. X is expected centered.
inline Matrix build_system_matrix(const Matrix& x, const Matrix& ctilde)
{
    if (x.rows() != ctilde.rows() || x.cols() != ctilde.cols())
        throw DataError("build_system_matrix: X is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                        " but the centroid matrix is " + std::to_string(ctilde.rows()) + "x" +
                        std::to_string(ctilde.cols()));
    if (x.cols() > 0) {
        const double mean_norm = x.rowwise().mean().norm();
        const double scale = x.cwiseAbs().maxCoeff();
        if (mean_norm > 1e-8 * std::max(scale, 1e-300))
            warn("build_system_matrix: X is not centered (||mean|| = " + std::to_string(mean_norm) + ")");
    }
    Matrix cross = x * ctilde.transpose();
    Matrix s = cross + cross.transpose();
    s.noalias() -= x * x.transpose();
    return 0.5 * (s + s.transpose());
}

/// X C^T + C X^T, the positive semi-definite part of the system matrix.
inline Matrix build_centroid_gram(const Matrix& x, const Matrix& ctilde)
{
    Matrix cross = x * ctilde.transpose();
    Matrix s = cross + cross.transpose();
    return 0.5 * (s + s.transpose());
}

namespace detail {

inline auto slce_builder(const LabeledDataset& centered)
{
    return [&centered](const Matrix& coords) {
        const LabeledDataset in_coords = centered.with_data(coords);
        return build_system_matrix(coords, centroid_matrix(in_coords).data);
    };
}

inline Index count_positive(const Vector& spectrum, double rel_tol, double& tol_out)
{
    const double scale = spectrum.size() ? spectrum.cwiseAbs().maxCoeff() : 0.0;
    tol_out = rel_tol * scale;
    Index count = 0;
    for (Index i = 0; i < spectrum.size(); ++i)
        if (spectrum[i] > tol_out) ++count;
    return count;
}

} // namespace detail

inline SlceModel fit(const LabeledDataset& train, Index k, const SlceOptions& options = {})
{
    if (k < 1) throw DataError("slce fit: k must satisfy k >= 1 (got " + std::to_string(k) + ")");
    if (k > train.dim())
        throw DataError("slce fit: k = " + std::to_string(k) + " exceeds the feature dimension d = " +
                        std::to_string(train.dim()));
    train.require_nonempty_classes();

    const Centered centered = center(train);
    const CentroidMatrix ctilde = centroid_matrix(centered.data);

    SlceModel model;
    model.mean = centered.mean;
    model.n_classes = train.n_classes();
    model.trace_ctc = ctilde.data.squaredNorm();
    model.reduced_path = use_reduced_path(train.dim(), train.size(), options.solver);

    const TopEigen eig = top_eigenpairs(centered.data.data(), k, detail::slce_builder(centered.data), options.solver);
    model.basis = eig.vectors;
    model.spectrum = eig.values;
    model.positive_count = detail::count_positive(eig.spectrum, options.positive_rel_tol, model.positive_tolerance);

    if (k > model.positive_count) {
        std::string msg = "slce fit: k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(model.positive_count) +
                          " positive eigenvalue(s); the extra directions will not decrease the "
                          "centroid-reconstruction error";
        model.notes.push_back(msg);
        warn(msg);
    }
    return model;
}

/// basis^T (X - mean).
inline Matrix transform(const SlceModel& model, const Matrix& x)
{
    if (x.rows() != model.dim())
        throw DataError("transform: data has " + std::to_string(x.rows()) + " features, model expects " +
                        std::to_string(model.dim()));
    return model.basis.transpose() * (x.colwise() - model.mean);
}

/// basis basis^T (X - mean) + mean.
inline Matrix reconstruct(const SlceModel& model, const Matrix& x)
{
    if (x.rows() != model.dim())
        throw DataError("reconstruct: data has " + std::to_string(x.rows()) + " features, model expects " +
                        std::to_string(model.dim()));
    Matrix out = model.basis * (model.basis.transpose() * (x.colwise() - model.mean));
    out.colwise() += model.mean;
    return out;
}

/// Centroid-reconstruction loss of the fitted basis on its training set.
inline double training_cost(const SlceModel& model, const LabeledDataset& train)
{
    if (train.dim() != model.dim())
        throw DataError("training_cost: dataset has " + std::to_string(train.dim()) + " features, model expects " +
                        std::to_string(model.dim()));
    if (train.n_classes() != model.n_classes)
        throw DataError("training_cost: dataset has " + std::to_string(train.n_classes()) +
                        " classes, model was fitted on " + std::to_string(model.n_classes));
    const Matrix xc = train.data().colwise() - model.mean;
    const Matrix ctilde = centroid_matrix(train.with_data(xc)).data;
    return centroid_cost(ctilde, model.basis, xc);
}

/// Full descending spectra of X C^T + C X^T and of the system matrix, for a
/// centered copy of `train`. Used by diagnostics and the property suites.
struct SystemSpectra {
    Vector centroid_gram;
    Vector system;
};

inline SystemSpectra system_spectra(const LabeledDataset& train, const SolverOptions& solver = {})
{
    const Centered centered = center(train);
    const Matrix& xc = centered.data.data();
    SystemSpectra out;
    out.system = top_eigenpairs(xc, 0, detail::slce_builder(centered.data), solver).spectrum;
    out.centroid_gram = top_eigenpairs(
                            xc, 0,
                            [&](const Matrix& coords) {
                                return build_centroid_gram(coords, centroid_matrix(centered.data.with_data(coords)).data);
                            },
                            solver)
                            .spectrum;
    return out;
}

} // namespace slce
