#include <catch2/catch_amalgamated.hpp>

#include "slce/baselines.hpp"
#include "support/oracles.hpp"
#include "support/random_data.hpp"

using namespace slce;
using slce::testing::Rng;

namespace {

double angle_between(const Vector& a, const Vector& b)
{
    const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
    return std::acos(std::min(1.0, c));
}

/// X H L H X^T with explicit n x n centering and delta-kernel matrices.
Matrix literal_hsic(const LabeledDataset& ds)
{
    const Index n = ds.size();
    const Matrix h = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
    Matrix l(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) l(i, j) = ds.labels()[i] == ds.labels()[j] ? 1.0 : 0.0;
    return ds.data() * h * l * h * ds.data().transpose();
}

/// Two classes whose within-class scatter is exactly 2 * count * I.
LabeledDataset cross_classes(const Vector& mu0, const Vector& mu1)
{
    Matrix x(2, 8);
    std::vector<int> labels;
    const Matrix dirs = (Matrix(2, 4) << 1, -1, 0, 0, 0, 0, 1, -1).finished();
    for (int c = 0; c < 2; ++c)
        for (Index p = 0; p < 4; ++p) {
            x.col(4 * c + p) = (c ? mu1 : mu0) + dirs.col(p);
            labels.push_back(c);
        }
    return LabeledDataset(x, labels);
}

Matrix orthonormalize(const Matrix& a)
{
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

} // namespace

TEST_CASE("method names", "[baselines]")
{
    for (Method m : {Method::pca, Method::lda, Method::bair_spca, Method::hsic_spca, Method::slce})
        CHECK(parse_method(to_string(m)) == m);
    CHECK_THROWS_AS(parse_method("tsne"), DataError);
}

TEST_CASE("PCA recovers a line", "[baselines][pca]")
{
    Rng rng(50);
    const Vector dir = slce::testing::random_unit(rng, 4);
    Matrix x(4, 30);
    for (Index i = 0; i < 30; ++i) x.col(i) = slce::testing::gauss(rng) * dir + Vector::Constant(4, 2.0);
    const auto pca = fit_pca(LabeledDataset(x, std::vector<int>(30, 0)), 1);
    CHECK(angle_between(pca.basis.col(0), dir) < 1e-8);
}

TEST_CASE("PCA on isotropic noise", "[baselines][pca]")
{
    Rng rng(51);
    const LabeledDataset ds(slce::testing::gaussian_matrix(rng, 5, 200), std::vector<int>(200, 0));
    const auto pca = fit_pca(ds, 3);
    CHECK(orthonormality_error(pca.basis) <= 1e-12);
    const Matrix xc = ds.data().colwise() - pca.mean;
    const Matrix resid = xc - pca.basis * (pca.basis.transpose() * xc);
    CHECK((pca.basis.transpose() * resid).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK_THROWS_AS(fit_pca(ds, 6), DataError);
    CHECK_THROWS_AS(fit_pca(ds, 0), DataError);
}

TEST_CASE("PCA direction maximizes variance on a grid", "[baselines][pca]")
{
    Rng rng(52);
    Matrix x = slce::testing::gaussian_matrix(rng, 2, 100);
    x.row(0) *= 3.0;
    x = Eigen::Rotation2Dd(0.7).toRotationMatrix() * x;
    const LabeledDataset ds(x, std::vector<int>(100, 0));
    const auto pca = fit_pca(ds, 1);
    const Matrix xc = slce::oracle::loop_center(x);
    auto variance = [&](const Matrix& a) { return (a.transpose() * xc).squaredNorm(); };
    const double best_neg = slce::oracle::min_over_directions_2d(10000, [&](const Matrix& a) { return -variance(a); });
    CHECK(variance(pca.basis) >= -best_neg - 1e-9);
}

TEST_CASE("LDA follows the centroid difference for isotropic scatter", "[baselines][lda]")
{
    const Vector mu0 = Vector::Zero(2);
    const Vector mu1 = (Vector(2) << 7.0, 3.0).finished();
    const auto lda = fit_lda(cross_classes(mu0, mu1), 1);
    CHECK(angle_between(lda.basis.col(0), mu1 - mu0) < 1e-3);
}

TEST_CASE("LDA component limit", "[baselines][lda]")
{
    Rng rng(53);
    const auto ds = slce::testing::random_dataset(rng, 5, 60, 3);
    CHECK(fit_lda(ds, 2).rank() == 2);
    CHECK_THROWS_AS(fit_lda(ds, 3), DataError);
    CHECK_THROWS_AS(fit_lda(ds, 0), DataError);
    CHECK_THROWS_AS(fit_lda(ds, 1, -0.5), DataError);
}

TEST_CASE("LDA on wide data maximizes the Fisher ratio", "[baselines][lda]")
{
    Rng rng(54);
    const auto ds = slce::testing::random_dataset(rng, 500, 40, 2, 0.5);
    const auto lda = fit_lda(ds, 1, 1e-3);
    const double top = fisher_ratios(ds, lda.basis, 1e-3)[0];
    CHECK(top == Catch::Approx(lda.spectrum[0]).epsilon(1e-6));
    const Matrix random_dirs = slce::testing::gaussian_matrix(rng, 500, 1000);
    const Vector ratios = fisher_ratios(ds, random_dirs.colwise().normalized(), 1e-3);
    CHECK(top >= ratios.maxCoeff());

    SolverOptions dense{SolverPath::dense};
    const auto lda_dense = fit_lda(ds, 1, 1e-3, dense);
    CHECK(max_principal_angle(lda.basis, lda_dense.basis) < 1e-6);
}

TEST_CASE("LDA without shrinkage on wide data is singular", "[baselines][lda]")
{
    Rng rng(55);
    const auto ds = slce::testing::random_dataset(rng, 200, 30, 2);
    CHECK_THROWS_AS(fit_lda(ds, 1, 0.0), NumericalError);
}

TEST_CASE("LDA is invariant to invertible label recoding", "[baselines][lda]")
{
    Rng rng(56);
    const auto ds = slce::testing::random_dataset(rng, 6, 80, 3);
    const Matrix y = one_hot(ds);
    Matrix g = slce::testing::gaussian_matrix(rng, 3, 3) + 3.0 * Matrix::Identity(3, 3);
    const auto a = fit_lda(ds, 2, 1e-4);
    const auto b = fit_lda(ds, 2, 1e-4, {}, g * y);
    CHECK(max_principal_angle(orthonormalize(a.basis), orthonormalize(b.basis)) < 1e-6);
    CHECK((a.spectrum - b.spectrum).cwiseAbs().maxCoeff() <= 1e-8 * a.spectrum.maxCoeff());
}

TEST_CASE("Bair score favours the class code", "[baselines][bair]")
{
    Rng rng(57);
    Matrix x = slce::testing::gaussian_matrix(rng, 6, 40);
    std::vector<int> labels(40);
    for (Index i = 0; i < 40; ++i) {
        labels[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
        x(3, i) = i % 2 ? 1.0 : -1.0;
    }
    const Vector scores = bair_scores(LabeledDataset(x, labels));
    Index arg;
    scores.maxCoeff(&arg);
    CHECK(arg == 3);
}

TEST_CASE("Bair drops constant features", "[baselines][bair]")
{
    Rng rng(58);
    auto ds = slce::testing::random_dataset(rng, 5, 40, 2);
    Matrix x = ds.data();
    x.row(2).setConstant(4.0);
    ds = ds.with_data(x);
    WarningCapture capture;
    const auto model = fit_bair_spca(ds, 2);
    CHECK(capture.contains("zero-variance"));
    CHECK(model.aux.at("dropped_features") == std::vector<Index>{2});
    CHECK(model.basis.row(2).isZero(0.0));
    CHECK(orthonormality_error(model.basis) <= 1e-10);
}

TEST_CASE("Bair selects informative features", "[baselines][bair]")
{
    std::vector<Index> hits;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(1000 + seed);
        Matrix x = slce::testing::gaussian_matrix(rng, 100, 80);
        std::vector<int> labels(80);
        for (Index i = 0; i < 80; ++i) {
            labels[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
            if (i % 2)
                for (Index f = 0; f < 5; ++f) x(f * 20, i) += 1.2;
        }
        BairOptions opts;
        opts.seed = seed;
        const auto model = fit_bair_spca(LabeledDataset(x, labels), 2, opts);
        const auto selected = model.aux.at("selected_features").get<std::vector<Index>>();
        Index found = 0;
        for (Index f = 0; f < 5; ++f) found += std::count(selected.begin(), selected.end(), f * 20);
        hits.push_back(found);
    }
    std::sort(hits.begin(), hits.end());
    CHECK(hits[10] >= 4);
}

TEST_CASE("Bair validation and determinism", "[baselines][bair]")
{
    Rng rng(59);
    const auto ds = slce::testing::random_dataset(rng, 20, 50, 3);
    BairOptions bad;
    bad.threshold_grid = {};
    CHECK_THROWS_AS(fit_bair_spca(ds, 2, bad), DataError);
    bad.threshold_grid = {0.0, 0.5};
    CHECK_THROWS_AS(fit_bair_spca(ds, 2, bad), DataError);
    const auto a = fit_bair_spca(ds, 2);
    const auto b = fit_bair_spca(ds, 2);
    CHECK(a.basis == b.basis);
    CHECK(a.aux == b.aux);
    CHECK(detail::select_features((Vector(4) << 0.1, -1.0, 0.9, 0.5).finished(), 0.5, 1) == std::vector<Index>{2, 3});
}

TEST_CASE("HSIC supervision needs two classes", "[baselines][hsic]")
{
    Rng rng(60);
    const LabeledDataset ds(slce::testing::gaussian_matrix(rng, 4, 20), std::vector<int>(20, 0));
    CHECK_THROWS_WITH(fit_hsic_spca(ds, 1), Catch::Matchers::ContainsSubstring("degenerate single-class supervision"));
}

TEST_CASE("HSIC with singleton classes is PCA", "[baselines][hsic]")
{
    Rng rng(61);
    const auto ds = slce::testing::singleton_dataset(rng, 6, 15);
    const auto hsic = fit_hsic_spca(ds, 2);
    const auto pca = fit_pca(ds, 2);
    CHECK(max_principal_angle(hsic.basis, pca.basis) < 1e-6);
}

TEST_CASE("HSIC matrix matches the literal kernel form", "[baselines][hsic]")
{
    Rng rng(62);
    const auto ds = slce::testing::random_dataset(rng, 2, 30, 2);
    const Matrix q = literal_hsic(ds);
    const auto c = center(ds).data;
    CHECK((hsic_matrix(c.data(), one_hot(c)) - q).cwiseAbs().maxCoeff() <= 1e-9 * q.cwiseAbs().maxCoeff());

    const auto hsic = fit_hsic_spca(ds, 1);
    auto score = [&](const Matrix& a) { return (a.transpose() * q * a)(0, 0); };
    const double best_neg = slce::oracle::min_over_directions_2d(10000, [&](const Matrix& a) { return -score(a); });
    CHECK(score(hsic.basis) >= -best_neg - 1e-9 * q.norm());
}

TEST_CASE("reducers share one interface", "[baselines]")
{
    Rng rng(63);
    const auto ds = slce::testing::random_dataset(rng, 8, 60, 3);
    WarningCapture quiet;
    for (Method m : {Method::pca, Method::lda, Method::bair_spca, Method::hsic_spca, Method::slce}) {
        const Index k = m == Method::lda ? 2 : 3;
        const auto model = fit_reducer(m, ds, k);
        CHECK(model.method == m);
        CHECK(model.rank() == k);
        CHECK(model.dim() == 8);
        const Matrix z = transform(model, ds.data());
        CHECK(z.rows() == k);
        const auto one = truncate(model, 1);
        CHECK((transform(one, ds.data()) - z.topRows(1)).cwiseAbs().maxCoeff() <= 1e-12);
        if (m != Method::lda) CHECK(orthonormality_error(model.basis) <= 1e-10);
    }
}
