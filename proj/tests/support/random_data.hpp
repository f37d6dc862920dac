#pragma once

// Seeded generators for randomized property tests.

#include <Eigen/Dense>

#include <algorithm>
#include <random>
#include <vector>

#include "slce/dataset.hpp"

namespace slce::testing {

using Rng = std::mt19937_64;

inline double gauss(Rng& rng)
{
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

inline Matrix gaussian_matrix(Rng& rng, Index rows, Index cols)
{
    Matrix m(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) m(r, c) = gauss(rng);
    return m;
}

inline Index uniform_int(Rng& rng, Index lo, Index hi)
{
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// n samples in d dimensions over M classes; every class non-empty. Class
/// means are Gaussian scaled by `separation`, noise is unit Gaussian, and the
/// whole cloud is shifted by a random offset so centering matters.
inline LabeledDataset random_dataset(Rng& rng, Index d, Index n, int m, double separation = 2.0)
{
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        labels[static_cast<std::size_t>(i)] = i < m ? static_cast<int>(i) : static_cast<int>(uniform_int(rng, 0, m - 1));
    std::shuffle(labels.begin(), labels.end(), rng);
    const Matrix means = separation * gaussian_matrix(rng, d, m);
    const Vector offset = 3.0 * gaussian_matrix(rng, d, 1);
    Matrix x = gaussian_matrix(rng, d, n);
    for (Index i = 0; i < n; ++i) x.col(i) += means.col(labels[static_cast<std::size_t>(i)]) + offset;
    return LabeledDataset(std::move(x), std::move(labels));
}

/// Every sample in its own class.
inline LabeledDataset singleton_dataset(Rng& rng, Index d, Index n)
{
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i);
    return LabeledDataset(gaussian_matrix(rng, d, n) + Matrix::Constant(d, n, 1.5), std::move(labels));
}

/// Haar-ish random orthogonal matrix from the QR of a Gaussian matrix.
inline Matrix random_orthogonal(Rng& rng, Index k)
{
    Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(rng, k, k));
    return qr.householderQ() * Matrix::Identity(k, k);
}

inline Vector random_unit(Rng& rng, Index d)
{
    Vector v = gaussian_matrix(rng, d, 1);
    return v / v.norm();
}

} // namespace slce::testing
