#include <catch2/catch_amalgamated.hpp>

#include "slce/harness.hpp"
#include "support/files.hpp"
#include "support/random_data.hpp"

#include <sstream>

using namespace slce;
using slce::testing::Rng;

namespace {

ExperimentConfig small_config()
{
    ExperimentConfig c;
    c.name = "toy";
    c.dataset = "toy";
    c.methods = {Method::slce, Method::pca, Method::lda, Method::bair_spca, Method::hsic_spca};
    c.dims = {1, 2};
    c.repetitions = 3;
    c.base_seed = 17;
    return c;
}

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("reports are deterministic and independent of job count", "[harness]")
{
    Rng rng(80);
    const auto ds = slce::testing::random_dataset(rng, 6, 60, 3, 1.0);
    ExperimentConfig c = small_config();
    c.repetitions = 5;
    const std::string a = to_json(run_experiment(c, ds)).dump(2);
    const std::string b = to_json(run_experiment(c, ds)).dump(2);
    CHECK(a == b);
    c.jobs = 3;
    CHECK(to_json(run_experiment(c, ds)).dump(2) == a);
    CHECK(a.find("wall_clock_seconds") == std::string::npos);

    c.record_timing = true;
    CHECK(to_json(run_experiment(c, ds)).dump(2).find("wall_clock_seconds") != std::string::npos);
}

TEST_CASE("well separated classes are classified perfectly", "[harness]")
{
    Rng rng(81);
    Matrix x = slce::testing::gaussian_matrix(rng, 5, 80);
    std::vector<int> labels(80);
    for (Index i = 0; i < 80; ++i) {
        labels[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
        if (i % 2) x.col(i).array() += 10.0;
    }
    ExperimentConfig c = small_config();
    c.dims = {2};
    const auto report = run_experiment(c, LabeledDataset(x, labels));
    for (const auto& cell : report.cells) {
        INFO(to_string(cell.method));
        CHECK(cell.status() == "ok");
        CHECK(cell.mean == 1.0);
    }
    const auto* lda = report.find(Method::lda, 2);
    REQUIRE(lda);
    CHECK(lda->effective_dim == 1);
    CHECK_THAT(lda->note, Catch::Matchers::ContainsSubstring("M-1"));
}

TEST_CASE("SLCE is competitive with PCA on Iris", "[harness]")
{
    ExperimentConfig c;
    c.dataset = slce::testing::data_path("iris.csv");
    c.methods = {Method::slce, Method::pca};
    c.dims = {2};
    c.repetitions = 25;
    const auto report = run_experiment(c);
    CHECK(report.n == 150);
    const double slce_acc = report.find(Method::slce, 2)->mean;
    const double pca_acc = report.find(Method::pca, 2)->mean;
    CHECK(slce_acc >= pca_acc - 0.02);
}

TEST_CASE("stored accuracies reproduce mean and std", "[harness]")
{
    Rng rng(82);
    const auto ds = slce::testing::random_dataset(rng, 8, 50, 4, 1.0);
    const auto report = run_experiment(small_config(), ds);
    for (const auto& cell : report.cells) {
        CellResult copy;
        copy.accuracies = cell.accuracies;
        aggregate(copy);
        CHECK(copy.mean == cell.mean);
        CHECK(copy.stddev == cell.stddev);

        std::vector<double> ok;
        for (const auto& a : cell.accuracies)
            if (a) ok.push_back(*a);
        if (ok.size() < 2) continue;
        double mean = 0.0;
        for (double a : ok) mean += a / static_cast<double>(ok.size());
        double ss = 0.0;
        for (double a : ok) ss += (a - mean) * (a - mean);
        CHECK(cell.mean == Catch::Approx(mean).epsilon(1e-14));
        CHECK(cell.stddev == Catch::Approx(std::sqrt(ss / static_cast<double>(ok.size() - 1))).epsilon(1e-12).margin(1e-15));
    }

    CellResult partial;
    partial.accuracies = {0.5, std::nullopt, 1.0};
    aggregate(partial);
    CHECK(partial.status() == "partial");
    CHECK(partial.mean == 0.75);
    CHECK(partial.stddev == Catch::Approx(std::sqrt(0.125)));
}

TEST_CASE("failed cells are kept", "[harness]")
{
    Rng rng(83);
    const auto ds = slce::testing::random_dataset(rng, 4, 40, 2);
    ExperimentConfig c = small_config();
    c.methods = {Method::slce, Method::pca};
    c.dims = {1, 2, 3, 6};
    const auto report = run_experiment(c, ds);
    const auto* bad = report.find(Method::pca, 6);
    REQUIRE(bad);
    CHECK(bad->status() == "failed");
    CHECK(bad->n_failed == 3);
    CHECK(bad->errors.size() == 3);
    CHECK(report.find(Method::slce, 6)->status() == "failed");

    slce::testing::TempDir tmp;
    emit_accuracy_curves(report, tmp.file("curves.csv"), tmp.file("curves.svg"));
    const auto lines = lines_of(slce::testing::read_text(tmp.file("curves.csv")));
    REQUIRE(lines.size() == 9);
    CHECK(lines[0] == "method,dim,effective_dim,mean,std,n_ok,n_failed,status");
    CHECK(lines[8] == "pca,6,6,,,0,3,failed");
    CHECK(slce::testing::read_text(tmp.file("curves.svg")).find("<svg") == 0);

    const auto j = to_json(report);
    CHECK(j.at("results").size() == 8);
    CHECK(j.at("results")[7].at("mean").is_null());
}

TEST_CASE("fixed test partition", "[harness]")
{
    Rng rng(84);
    const auto train = slce::testing::random_dataset(rng, 5, 40, 3);
    const auto test = slce::testing::random_dataset(rng, 5, 20, 3);
    ExperimentConfig c = small_config();
    c.methods = {Method::slce, Method::pca, Method::hsic_spca};
    const auto report = run_experiment(c, train, test);
    CHECK(report.fixed_split);
    for (const auto& cell : report.cells) CHECK(cell.stddev == 0.0);
    CHECK(to_json(report).at("metadata").at("split_ratio").is_null());
}

TEST_CASE("configs", "[harness]")
{
    slce::testing::TempDir tmp;
    slce::testing::write_text(tmp.file("exp.json"), R"({
        "name": "demo", "dataset": "sub/data.csv", "methods": ["slce", "lda"],
        "dims": [1, 3], "repetitions": 4, "base_seed": 9, "knn_k": 3,
        "lda_shrinkage": 0.01, "bair_grid": [0.5, 1.0], "reference": "colon", "jobs": 2
    })");
    const auto c = load_config(tmp.file("exp.json"));
    CHECK(c.dataset == tmp.file("sub/data.csv"));
    CHECK(c.methods == std::vector<Method>{Method::slce, Method::lda});
    CHECK(c.dims == std::vector<Index>{1, 3});
    CHECK(c.repetitions == 4);
    CHECK(c.base_seed == 9);
    CHECK(c.knn_k == 3);
    CHECK(c.jobs == 2);
    CHECK(c.params.lda_shrinkage == 0.01);
    CHECK(c.params.bair.threshold_grid == std::vector<double>{0.5, 1.0});

    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"dims": [2]})")), DataError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"dataset": "x", "dims": [3, 2]})")), DataError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"dataset": "x", "methods": ["umap"]})")), DataError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"dataset": "x", "split_ratio": 1.5})")), DataError);
    slce::testing::write_text(tmp.file("bad.json"), "{");
    CHECK_THROWS_AS(load_config(tmp.file("bad.json")), DataError);
}

TEST_CASE("published reference rows", "[harness]")
{
    const auto colon = published_reference("colon");
    REQUIRE(colon.size() == 2);
    CHECK(colon[0].mean == 80.80);
    CHECK(colon[1].stddev == 12.50);
    const auto iono = published_reference("ionosphere");
    CHECK(iono[0].mean == 83.90);
    CHECK(iono[1].mean == 85.90);
    const auto arcene = published_reference("arcene");
    CHECK(arcene[0].mean == 80.67);
    CHECK(arcene[1].stddev == 8.40);
    CHECK(published_reference("iris").empty());
}

TEST_CASE("embedding tables", "[harness]")
{
    Rng rng(85);
    const auto ds = slce::testing::random_dataset(rng, 4, 30, 3);
    const auto sp = split(ds, 0.8, 1);
    WarningCapture quiet;
    const LinearReducer model = fit_reducer(Method::slce, sp.train, 3);
    slce::testing::TempDir tmp;
    const auto table = emit_embedding(model, sp.train, sp.test, 2, tmp.file("a.csv"), tmp.file("a.svg"));
    emit_embedding(model, sp.train, sp.test, 2, tmp.file("b.csv"));
    const std::string a = slce::testing::read_text(tmp.file("a.csv"));
    CHECK(a == slce::testing::read_text(tmp.file("b.csv")));
    const auto lines = lines_of(a);
    REQUIRE(lines.size() == 31);
    CHECK(lines[0] == "coord_1,coord_2,label,partition");
    CHECK(std::count(lines[1].begin(), lines[1].end(), ',') == 3);
    CHECK(table.coordinates.cols() == 30);
    CHECK(std::count(table.partition.begin(), table.partition.end(), "test") == sp.test.size());
    CHECK(slce::testing::read_text(tmp.file("a.svg")).find("</svg>") != std::string::npos);

    CHECK_THROWS_AS(make_embedding(model, sp.train, std::nullopt, 4), DataError);
    CHECK_THROWS_AS(emit_embedding(model, sp.train, std::nullopt, 1, tmp.file("c.csv"), tmp.file("c.svg")), DataError);
}

TEST_CASE("centroid separation", "[harness]")
{
    Matrix tight(1, 4), loose(1, 4);
    tight << 0.0, 0.2, 10.0, 10.2;
    loose << 0.0, 4.0, 6.0, 10.0;
    const std::vector<int> labels{0, 0, 1, 1};
    CHECK(centroid_separation(tight, labels) == Catch::Approx(100.0));
    CHECK(centroid_separation(tight, labels) > centroid_separation(loose, labels));
}

TEST_CASE("spectrum diagnostics", "[harness]")
{
    Rng rng(86);
    const auto five = slce::testing::random_dataset(rng, 12, 100, 5);
    const auto diag = spectrum_diagnostics(five);
    CHECK(diag.positive_count <= 4);
    CHECK(diag.rows.size() == 12);
    const double scale = std::abs(diag.rows.front().system);
    for (const auto& r : diag.rows) {
        CHECK(r.centroid_gram >= r.system - 1e-8 * scale);
        CHECK(std::abs(r.cost_1d - (diag.trace_ctc - r.system)) <= 1e-6 * std::max(diag.trace_ctc, scale));
    }

    const auto singles = slce::testing::singleton_dataset(rng, 5, 8);
    const auto sd = spectrum_diagnostics(singles, 5);
    const auto c = center(singles).data;
    const Vector pca = sym_eig(c.data() * c.data().transpose()).values;
    for (std::size_t i = 0; i < sd.rows.size(); ++i)
        CHECK(std::abs(sd.rows[i].system - pca[static_cast<Index>(i)]) <= 1e-8 * pca[0]);

    slce::testing::TempDir tmp;
    const auto three = slce::testing::random_dataset(rng, 6, 60, 3);
    emit_spectrum_diagnostics(three, tmp.file("spec.csv"), -1, tmp.file("spec.svg"));
    const auto lines = lines_of(slce::testing::read_text(tmp.file("spec.csv")));
    CHECK(lines[0] == "index,centroid_gram_eigenvalue,system_eigenvalue,cost_1d,trace_ctc_minus_eigenvalue");
    CHECK(lines.size() == 7);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<double> v;
        std::istringstream row(lines[i]);
        for (std::string cell; std::getline(row, cell, ',');) v.push_back(std::stod(cell));
        REQUIRE(v.size() == 5);
        CHECK(std::abs(v[3] - v[4]) <= 1e-6 * std::max(std::abs(v[4]), std::abs(v[2])));
        CHECK(v[1] >= v[2] - 1e-8 * std::abs(v[1]));
    }
}
