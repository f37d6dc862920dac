#pragma once

// Dense symmetric eigensolver contract, the centroid-reconstruction cost, and
// the thin-range reduction used when features far outnumber samples.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "slce/dataset.hpp"
#include "slce/errors.hpp"

namespace slce {

/// Eigenvalues in descending order; column i of `vectors` pairs with value i.
struct SymmetricEigen {
    Vector values;
    Matrix vectors;
};

/// Flips each column so its largest-magnitude entry is positive. Ties go to
/// the lowest row index.
inline void apply_sign_convention(Matrix& vectors)
{
    for (Index c = 0; c < vectors.cols(); ++c) {
        Index arg = 0;
        double best = -1.0;
        for (Index r = 0; r < vectors.rows(); ++r) {
            const double mag = std::abs(vectors(r, c));
            if (mag > best) {
                best = mag;
                arg = r;
            }
        }
        if (vectors.rows() > 0 && vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
    }
}

inline SymmetricEigen sym_eig(const Matrix& s)
{
    if (s.rows() != s.cols())
        throw DataError("sym_eig: matrix is " + std::to_string(s.rows()) + "x" + std::to_string(s.cols()) +
                        ", expected square");
    if (!s.allFinite()) throw DataError("sym_eig: matrix has non-finite entries");

    const double norm = s.norm();
    const double asym = (s - s.transpose()).norm();
    if (asym > 1e-8 * norm)
        throw DataError("sym_eig: matrix is not symmetric (||S - S^T||_F = " + std::to_string(asym) +
                        ", ||S||_F = " + std::to_string(norm) + ")");

    const Matrix sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "sym_eig: eigensolver failed to converge on a " << s.rows() << "x" << s.cols()
            << " matrix (||S||_F = " << norm << ", max|S_ij| = " << sym.cwiseAbs().maxCoeff() << ")";
        throw NumericalError(msg.str());
    }

    SymmetricEigen out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    apply_sign_convention(out.vectors);
    return out;
}

/// ||V^T V - I||_max.
inline double orthonormality_error(const Matrix& v)
{
    if (v.cols() == 0) return 0.0;
    return (v.transpose() * v - Matrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
}

/// ||C - A A^T X||_F^2. A with zero columns gives ||C||_F^2.
template <typename DerivedC, typename DerivedA, typename DerivedX>
double centroid_cost(const Eigen::MatrixBase<DerivedC>& ctilde, const Eigen::MatrixBase<DerivedA>& basis,
                     const Eigen::MatrixBase<DerivedX>& x)
{
    if (ctilde.rows() != x.rows() || ctilde.cols() != x.cols())
        throw DataError("centroid_cost: centroid matrix and data matrix shapes differ");
    if (basis.rows() != x.rows() && basis.cols() > 0)
        throw DataError("centroid_cost: basis has " + std::to_string(basis.rows()) + " rows, data has " +
                        std::to_string(x.rows()));
    if (basis.cols() == 0) return ctilde.squaredNorm();
    const double ortho = orthonormality_error(basis);
    if (ortho > 1e-8) warn("centroid_cost: basis is not orthonormal (max |A^T A - I| = " + std::to_string(ortho) + ")");
    const Matrix projected = basis * (basis.transpose() * x);
    return (ctilde - projected).squaredNorm();
}

/// Largest principal angle between the column spaces of two orthonormal
/// bases, computed from the sine side so tiny angles stay accurate.
inline double max_principal_angle(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DataError("max_principal_angle: bases must have the same shape");
    if (a.cols() == 0) return 0.0;
    const Matrix residual = b - a * (a.transpose() * b);
    Eigen::JacobiSVD<Matrix> svd(residual);
    const double s = std::min(1.0, svd.singularValues()(0));
    return std::asin(s);
}

/// Orthonormal basis of the column range of a d x n matrix, taken from a
/// column-pivoted Householder QR. `complement(count)` extends it with
/// orthonormal directions outside that range.
class RangeBasis {
public:
    explicit RangeBasis(const Matrix& x) : qr_(x)
    {
        rank_ = qr_.rank();
        basis_ = columns(0, rank_);
    }

    Index rank() const { return rank_; }
    Index ambient_dim() const { return qr_.rows(); }
    const Matrix& basis() const { return basis_; }

    Matrix complement(Index count) const
    {
        count = std::min(count, ambient_dim() - rank_);
        return columns(rank_, count);
    }

private:
    Matrix columns(Index first, Index count) const
    {
        Matrix sel = Matrix::Zero(qr_.rows(), count);
        for (Index c = 0; c < count; ++c) sel(first + c, c) = 1.0;
        Matrix q = qr_.householderQ() * sel;
        return q;
    }

    Eigen::ColPivHouseholderQR<Matrix> qr_;
    Index rank_ = 0;
    Matrix basis_;
};

enum class SolverPath { automatic, dense, reduced };

struct SolverOptions {
    SolverPath path = SolverPath::automatic;
    /// The reduced path is used when d > reduce_ratio * n.
    double reduce_ratio = 2.0;
};

inline bool use_reduced_path(Index d, Index n, const SolverOptions& options)
{
    switch (options.path) {
    case SolverPath::dense: return false;
    case SolverPath::reduced: return true;
    case SolverPath::automatic: break;
    }
    return static_cast<double>(d) > options.reduce_ratio * static_cast<double>(n);
}

/// Result of a top-k spectral solve: the full descending spectrum (length d)
/// and the leading `k` eigenvectors.
struct TopEigen {
    Vector spectrum;
    Vector values;
    Matrix vectors;
};

/// Solves for the leading eigenpairs of a d x d operator S(X) whose
/// eigenvectors with nonzero eigenvalue lie in the column range of X.
///
/// `build` receives a coordinate matrix Y and must return the operator
/// expressed in Y's coordinates. On the dense path Y = X; on the reduced path
/// Y = Q^T X for an orthonormal basis Q of range(X), and the remaining d - r
/// eigenvalues are exact zeros whose eigenvectors span range(X)'s complement.
template <typename Builder>
TopEigen top_eigenpairs(const Matrix& x, Index k, Builder&& build, const SolverOptions& options = {})
{
    const Index d = x.rows();
    if (k < 0 || k > d) throw DataError("requested " + std::to_string(k) + " eigenpairs of a " + std::to_string(d) + "-dimensional operator");

    TopEigen out;
    if (!use_reduced_path(d, x.cols(), options)) {
        SymmetricEigen eig = sym_eig(build(x));
        out.spectrum = eig.values;
        out.values = eig.values.head(k);
        out.vectors = eig.vectors.leftCols(k);
        return out;
    }

    const RangeBasis range(x);
    const Index r = range.rank();
    const Matrix coords = range.basis().transpose() * x;
    SymmetricEigen eig = r > 0 ? sym_eig(build(coords)) : SymmetricEigen{Vector(0), Matrix(0, 0)};

    // Merge the r reduced eigenvalues with d - r exact zeros, descending.
    // Reduced eigenvalues >= 0 precede the complement's zeros.
    out.spectrum.resize(d);
    out.values.resize(k);
    out.vectors.resize(d, k);
    const Index zeros = d - r;
    Index next_reduced = 0, zeros_used = 0, pos = 0;
    std::vector<Index> complement_slots;
    while (pos < d) {
        const bool take_reduced =
            next_reduced < r && (eig.values[next_reduced] >= 0.0 || zeros_used == zeros);
        if (take_reduced) {
            out.spectrum[pos] = eig.values[next_reduced];
            if (pos < k) out.vectors.col(pos) = range.basis() * eig.vectors.col(next_reduced);
            ++next_reduced;
        } else {
            out.spectrum[pos] = 0.0;
            if (pos < k) complement_slots.push_back(pos);
            ++zeros_used;
        }
        ++pos;
    }
    if (!complement_slots.empty()) {
        const Matrix extra = range.complement(static_cast<Index>(complement_slots.size()));
        for (std::size_t c = 0; c < complement_slots.size(); ++c)
            out.vectors.col(complement_slots[c]) = extra.col(static_cast<Index>(c));
    }
    out.values = out.spectrum.head(k);
    apply_sign_convention(out.vectors);
    return out;
}

} // namespace slce
