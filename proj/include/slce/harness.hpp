#pragma once

// Benchmark harness: repeated split -> fit -> project -> k-NN accuracy runs,
// their aggregation, and the CSV/SVG emitters for embeddings, accuracy
// curves and spectrum diagnostics.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include "slce/baselines.hpp"
#include "slce/dataset.hpp"
#include "slce/errors.hpp"
#include "slce/format.hpp"
#include "slce/knn.hpp"
#include "slce/linalg.hpp"
#include "slce/slce.hpp"
#include "slce/svg.hpp"
#include "slce/version.hpp"

namespace slce {

struct ExperimentConfig {
    std::string name;
    std::string dataset;
    /// When set, the dataset is the fixed training partition and this file the
    /// fixed test partition; no resplitting happens.
    std::string test_dataset;
    CsvOptions csv;
    std::vector<Method> methods{Method::slce, Method::pca, Method::lda, Method::bair_spca, Method::hsic_spca};
    std::vector<Index> dims{2, 3, 5, 10, 15, 20};
    double split_ratio = 0.8;
    int repetitions = 25;
    std::uint64_t base_seed = 0;
    int knn_k = 5;
    bool standardize = false;
    ReducerParams params;
    int jobs = 1;
    bool record_timing = false;
    /// Key into the table of published reference rows ("colon", "arcene", ...).
    std::string reference;

    void validate() const
    {
        if (methods.empty()) throw DataError("config: no methods");
        if (dims.empty()) throw DataError("config: no dims");
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (dims[i] < 1) throw DataError("config: dims must be positive");
            if (i > 0 && dims[i] <= dims[i - 1]) throw DataError("config: dims must be strictly ascending");
        }
        if (repetitions < 1) throw DataError("config: repetitions must be >= 1");
        if (knn_k < 1) throw DataError("config: knn_k must be >= 1");
        if (test_dataset.empty() && !(split_ratio > 0.0 && split_ratio < 1.0))
            throw DataError("config: split_ratio must lie in (0,1)");
        if (jobs < 1) throw DataError("config: jobs must be >= 1");
    }
};

inline ExperimentConfig config_from_json(const nlohmann::json& j)
{
    ExperimentConfig c;
    try {
        c.name = j.value("name", std::string());
        c.dataset = j.at("dataset").get<std::string>();
        c.test_dataset = j.value("test_dataset", std::string());
        c.csv.header = j.value("header", true);
        c.csv.label_column = j.value("label_column", std::string("last"));
        if (j.contains("methods")) {
            c.methods.clear();
            for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
        }
        if (j.contains("dims")) c.dims = j.at("dims").get<std::vector<Index>>();
        c.split_ratio = j.value("split_ratio", c.split_ratio);
        c.repetitions = j.value("repetitions", c.repetitions);
        c.base_seed = j.value("base_seed", c.base_seed);
        c.knn_k = j.value("knn_k", c.knn_k);
        c.standardize = j.value("standardize", false);
        c.jobs = j.value("jobs", 1);
        c.record_timing = j.value("record_timing", false);
        c.reference = j.value("reference", std::string());
        c.params.lda_shrinkage = j.value("lda_shrinkage", c.params.lda_shrinkage);
        if (j.contains("bair_grid")) c.params.bair.threshold_grid = j.at("bair_grid").get<std::vector<double>>();
        c.params.bair.cv_folds = j.value("bair_folds", c.params.bair.cv_folds);
        if (j.contains("reduce_ratio")) c.params.solver.reduce_ratio = j.at("reduce_ratio").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

/// Loads a config file and resolves relative dataset paths against its directory.
inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("config '" + path + "' is not valid JSON: " + e.what());
    }
    ExperimentConfig c = config_from_json(j);
    const auto slash = path.find_last_of('/');
    const std::string dir = slash == std::string::npos ? "" : path.substr(0, slash + 1);
    auto resolve = [&](std::string& p) {
        if (!p.empty() && p.front() != '/') p = dir + p;
    };
    resolve(c.dataset);
    resolve(c.test_dataset);
    return c;
}

struct CellResult {
    Method method = Method::slce;
    Index dim = 0;
    Index effective_dim = 0;
    std::vector<std::optional<double>> accuracies;  // one per repetition
    std::vector<std::string> errors;
    double mean = 0.0;
    double stddev = 0.0;
    int n_ok = 0;
    int n_failed = 0;
    std::string note;

    std::string status() const
    {
        if (n_failed == 0) return "ok";
        return n_ok == 0 ? "failed" : "partial";
    }
};

struct ReferenceRow {
    std::string method;
    Index dim;
    double mean;
    double stddev;
    std::string source;
};

/// Published LRPCA numbers that this library does not recompute, surfaced as
/// static rows in reports.
inline std::vector<ReferenceRow> published_reference(const std::string& dataset)
{
    const std::string src = "published LRPCA result, not recomputed";
    if (dataset == "colon") return {{"lrpca_cv", 2, 80.80, 10.40, src}, {"lrpca_mle", 2, 80.80, 12.50, src}};
    if (dataset == "ionosphere") return {{"lrpca_cv", 2, 83.90, 4.20, src}, {"lrpca_mle", 2, 85.90, 2.60, src}};
    if (dataset == "arcene") return {{"lrpca_cv", 2, 80.67, 11.20, src}, {"lrpca_mle", 2, 81.00, 8.40, src}};
    return {};
}

struct ExperimentReport {
    std::string name;
    std::string dataset;
    Index n = 0;
    Index d = 0;
    int n_classes = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<CellResult> cells;
    std::vector<ReferenceRow> reference;
    std::vector<std::string> notes;
    nlohmann::json hyperparameters;
    bool fixed_split = false;
    double split_ratio = 0.0;
    int knn_k = 5;
    bool standardized = false;
    std::optional<double> wall_clock_seconds;

    const CellResult* find(Method m, Index dim) const
    {
        for (const auto& c : cells)
            if (c.method == m && c.dim == dim) return &c;
        return nullptr;
    }
};

/// Sample mean and (n - 1) standard deviation of the successful repetitions.
inline void aggregate(CellResult& cell)
{
    std::vector<double> ok;
    for (const auto& a : cell.accuracies)
        if (a) ok.push_back(*a);
    cell.n_ok = static_cast<int>(ok.size());
    cell.n_failed = static_cast<int>(cell.accuracies.size()) - cell.n_ok;
    cell.mean = 0.0;
    cell.stddev = 0.0;
    if (ok.empty()) return;
    double sum = 0.0;
    for (double a : ok) sum += a;
    cell.mean = sum / static_cast<double>(ok.size());
    if (ok.size() > 1) {
        double ss = 0.0;
        for (double a : ok) ss += (a - cell.mean) * (a - cell.mean);
        cell.stddev = std::sqrt(ss / static_cast<double>(ok.size() - 1));
    }
}

namespace detail {

struct RepetitionOutcome {
    // Indexed [method][dim]; nullopt marks a failure with its message.
    std::vector<std::vector<std::optional<double>>> accuracy;
    std::vector<std::vector<std::string>> error;
};

inline bool nested_method(Method m) { return m != Method::bair_spca; }

/// Largest embedding dimension a method can deliver on `train`.
inline Index method_dim_cap(Method m, const LabeledDataset& train)
{
    switch (m) {
    case Method::lda: return std::min<Index>(train.n_classes() - 1, train.dim());
    case Method::slce: return train.dim();
    case Method::pca:
    case Method::bair_spca:
    case Method::hsic_spca: return std::min(train.dim(), train.size());
    }
    return 0;
}

inline RepetitionOutcome run_repetition(const ExperimentConfig& config, const LabeledDataset& train_in,
                                        const LabeledDataset& test_in, std::uint64_t seed)
{
    RepetitionOutcome out;
    out.accuracy.assign(config.methods.size(), std::vector<std::optional<double>>(config.dims.size()));
    out.error.assign(config.methods.size(), std::vector<std::string>(config.dims.size()));

    LabeledDataset train = train_in, test = test_in;
    if (config.standardize) {
        const Standardized z = standardize(train_in);
        train = z.data;
        test = test_in.with_data((test_in.data().colwise() - z.mean).array().colwise() / z.scale.array());
    }

    ReducerParams params = config.params;
    params.bair.seed = seed;

    WarningCapture quiet;
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        const Method method = config.methods[mi];
        const Index cap = method_dim_cap(method, train);
        auto record_error = [&](std::size_t di, const std::string& what) { out.error[mi][di] = what; };
        auto evaluate = [&](const LinearReducer& model, std::size_t di, Index k) {
            const LinearReducer m = k < model.rank() ? truncate(model, k) : model;
            const int nn = config.knn_k;
            const auto pred = knn_predict(transform(m, train.data()), train.labels(), transform(m, test.data()), nn);
            out.accuracy[mi][di] = accuracy(pred, test.labels());
        };

        if (nested_method(method)) {
            Index kmax = 0;
            for (Index d : config.dims) kmax = std::max(kmax, method == Method::lda ? std::min(d, cap) : d);
            kmax = std::min(kmax, cap);
            std::optional<LinearReducer> model;
            std::string fit_error;
            try {
                if (kmax < 1) throw DataError(to_string(method) + ": no feasible embedding dimension");
                model = fit_reducer(method, train, kmax, params);
            } catch (const std::exception& e) {
                fit_error = e.what();
            }
            for (std::size_t di = 0; di < config.dims.size(); ++di) {
                const Index want = method == Method::lda ? std::min(config.dims[di], cap) : config.dims[di];
                if (!model) {
                    record_error(di, fit_error);
                    continue;
                }
                if (want > model->rank()) {
                    record_error(di, to_string(method) + ": dimension " + std::to_string(config.dims[di]) +
                                         " exceeds the method's limit " + std::to_string(cap));
                    continue;
                }
                try {
                    evaluate(*model, di, want);
                } catch (const std::exception& e) {
                    record_error(di, e.what());
                }
            }
        } else {
            for (std::size_t di = 0; di < config.dims.size(); ++di) {
                try {
                    evaluate(fit_reducer(method, train, config.dims[di], params), di, config.dims[di]);
                } catch (const std::exception& e) {
                    record_error(di, e.what());
                }
            }
        }
    }
    return out;
}

inline nlohmann::json reducer_params_json(const ExperimentConfig& c)
{
    return {{"lda_shrinkage", c.params.lda_shrinkage},
            {"lda_shrinkage_form", "S_w + shrinkage * Tr(S_w)/d * I"},
            {"bair_grid", c.params.bair.threshold_grid},
            {"bair_folds", c.params.bair.cv_folds},
            {"bair_cv_neighbors", c.params.bair.cv_neighbors},
            {"hsic_label_kernel", "delta"},
            {"slce_positive_rel_tol", c.params.slce.positive_rel_tol},
            {"reduce_ratio", c.params.solver.reduce_ratio}};
}

} // namespace detail

/// Runs the workflow on already-loaded data. `fixed_test`, when given, is
/// used as the test partition for every repetition and `data` as the
/// training partition.
inline ExperimentReport run_experiment(const ExperimentConfig& config, const LabeledDataset& data,
                                       const std::optional<LabeledDataset>& fixed_test = std::nullopt)
{
    config.validate();
    data.require_nonempty_classes();
    const auto start = std::chrono::steady_clock::now();

    ExperimentReport report;
    report.name = config.name;
    report.dataset = config.dataset;
    report.n = data.size();
    report.d = data.dim();
    report.n_classes = data.n_classes();
    report.fixed_split = fixed_test.has_value();
    report.split_ratio = config.split_ratio;
    report.knn_k = config.knn_k;
    report.standardized = config.standardize;
    report.hyperparameters = detail::reducer_params_json(config);
    report.reference = published_reference(config.reference);
    if (fixed_test && fixed_test->dim() != data.dim())
        throw DataError("fixed test partition has " + std::to_string(fixed_test->dim()) + " features, training has " +
                        std::to_string(data.dim()));

    const auto reps = static_cast<std::size_t>(config.repetitions);
    for (std::size_t r = 0; r < reps; ++r) report.seeds.push_back(config.base_seed + r);

    auto job = [&](std::size_t r) {
        const std::uint64_t seed = report.seeds[r];
        if (fixed_test) return detail::run_repetition(config, data, *fixed_test, seed);
        const SplitPair sp = split(data, config.split_ratio, seed);
        return detail::run_repetition(config, sp.train, sp.test, seed);
    };

    std::vector<detail::RepetitionOutcome> outcomes(reps);
    if (config.jobs <= 1) {
        for (std::size_t r = 0; r < reps; ++r) outcomes[r] = job(r);
    } else {
        for (std::size_t begin = 0; begin < reps; begin += static_cast<std::size_t>(config.jobs)) {
            const std::size_t end = std::min(reps, begin + static_cast<std::size_t>(config.jobs));
            std::vector<std::future<detail::RepetitionOutcome>> running;
            for (std::size_t r = begin; r < end; ++r) running.push_back(std::async(std::launch::async, job, r));
            for (std::size_t r = begin; r < end; ++r) outcomes[r] = running[r - begin].get();
        }
    }

    // Deterministic fold over seed order.
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        const Method method = config.methods[mi];
        for (std::size_t di = 0; di < config.dims.size(); ++di) {
            CellResult cell;
            cell.method = method;
            cell.dim = config.dims[di];
            cell.effective_dim = cell.dim;
            if (method == Method::lda && cell.dim > data.n_classes() - 1) {
                cell.effective_dim = data.n_classes() - 1;
                cell.note = "lda capped at M-1 = " + std::to_string(cell.effective_dim);
            }
            for (std::size_t r = 0; r < reps; ++r) {
                cell.accuracies.push_back(outcomes[r].accuracy[mi][di]);
                if (!outcomes[r].accuracy[mi][di])
                    cell.errors.push_back("seed " + std::to_string(report.seeds[r]) + ": " + outcomes[r].error[mi][di]);
            }
            aggregate(cell);
            report.cells.push_back(std::move(cell));
        }
    }

    report.notes.push_back("data centered with the training mean before every fit");
    if (!fixed_test) report.notes.push_back("splits stratified per class; training count ceil(ratio * |C_j|)");
    report.notes.push_back("std is the sample standard deviation (n - 1) over successful repetitions");
    if (config.record_timing)
        report.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

inline ExperimentReport run_experiment(const ExperimentConfig& config)
{
    const LabeledDataset data = load_csv(config.dataset, config.csv);
    std::optional<LabeledDataset> test;
    if (!config.test_dataset.empty()) {
        LabeledDataset raw = load_csv(config.test_dataset, config.csv);
        // Re-encode the test labels with the training token map.
        std::vector<int> labels;
        for (int l : raw.labels()) {
            const auto& token = raw.label_names()[l];
            auto it = std::find(data.label_names().begin(), data.label_names().end(), token);
            if (it == data.label_names().end()) throw DataError("test label '" + token + "' does not occur in training data");
            labels.push_back(static_cast<int>(it - data.label_names().begin()));
        }
        test = LabeledDataset(raw.data(), std::move(labels), data.label_names(), data.feature_names());
    }
    return run_experiment(config, data, test);
}

inline nlohmann::json to_json(const ExperimentReport& report)
{
    nlohmann::json j;
    j["schema_version"] = schema_version;
    j["version"] = version;
    j["name"] = report.name;
    j["dataset"] = {{"path", report.dataset}, {"n", report.n}, {"d", report.d}, {"n_classes", report.n_classes}};
    nlohmann::json meta;
    meta["seeds"] = report.seeds;
    meta["centered"] = true;
    meta["stratified"] = !report.fixed_split;
    meta["fixed_split"] = report.fixed_split;
    meta["split_ratio"] = report.fixed_split ? nlohmann::json(nullptr) : nlohmann::json(report.split_ratio);
    meta["knn_k"] = report.knn_k;
    meta["standardized"] = report.standardized;
    meta["std_convention"] = "sample";
    meta["hyperparameters"] = report.hyperparameters;
    meta["notes"] = report.notes;
    if (report.wall_clock_seconds) meta["wall_clock_seconds"] = *report.wall_clock_seconds;
    j["metadata"] = meta;

    nlohmann::json results = nlohmann::json::array();
    for (const auto& c : report.cells) {
        nlohmann::json cell;
        cell["method"] = to_string(c.method);
        cell["dim"] = c.dim;
        cell["effective_dim"] = c.effective_dim;
        cell["status"] = c.status();
        cell["n_ok"] = c.n_ok;
        cell["n_failed"] = c.n_failed;
        cell["mean"] = c.n_ok ? nlohmann::json(c.mean) : nlohmann::json(nullptr);
        cell["std"] = c.n_ok ? nlohmann::json(c.stddev) : nlohmann::json(nullptr);
        nlohmann::json accs = nlohmann::json::array();
        for (const auto& a : c.accuracies) accs.push_back(a ? nlohmann::json(*a) : nlohmann::json(nullptr));
        cell["accuracies"] = accs;
        if (!c.errors.empty()) cell["errors"] = c.errors;
        if (!c.note.empty()) cell["note"] = c.note;
        results.push_back(cell);
    }
    j["results"] = results;
    nlohmann::json ref = nlohmann::json::array();
    for (const auto& r : report.reference)
        ref.push_back({{"method", r.method}, {"dim", r.dim}, {"mean_percent", r.mean}, {"std_percent", r.stddev}, {"source", r.source}});
    j["reference"] = ref;
    return j;
}

inline void write_report(const ExperimentReport& report, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << to_json(report).dump(2) << '\n';
    if (!out) throw DataError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Embeddings

struct EmbeddingTable {
    Matrix coordinates;  // p x m
    std::vector<int> labels;
    std::vector<std::string> label_names;
    std::vector<std::string> partition;  // "train" / "test"
    Method method = Method::slce;
    Index dim = 0;
};

inline EmbeddingTable make_embedding(const LinearReducer& model, const LabeledDataset& train,
                                     const std::optional<LabeledDataset>& test, Index dim)
{
    if (dim < 1 || dim > model.rank())
        throw DataError("embedding dimension " + std::to_string(dim) + " outside 1.." + std::to_string(model.rank()));
    const LinearReducer m = truncate(model, dim);
    const Matrix tr = transform(m, train.data());
    const Matrix te = test ? transform(m, test->data()) : Matrix(dim, 0);

    EmbeddingTable table;
    table.method = model.method;
    table.dim = dim;
    table.label_names = train.label_names();
    table.coordinates.resize(dim, tr.cols() + te.cols());
    table.coordinates << tr, te;
    table.labels = train.labels();
    table.partition.assign(static_cast<std::size_t>(tr.cols()), "train");
    if (test) {
        table.labels.insert(table.labels.end(), test->labels().begin(), test->labels().end());
        table.partition.insert(table.partition.end(), static_cast<std::size_t>(te.cols()), "test");
    }
    return table;
}

inline void write_embedding_csv(const EmbeddingTable& table, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    for (Index c = 0; c < table.dim; ++c) out << "coord_" << c + 1 << ',';
    out << "label,partition\n";
    for (Index i = 0; i < table.coordinates.cols(); ++i) {
        for (Index c = 0; c < table.dim; ++c) out << format_real(table.coordinates(c, i)) << ',';
        out << table.label_names[static_cast<std::size_t>(table.labels[static_cast<std::size_t>(i)])] << ','
            << table.partition[static_cast<std::size_t>(i)] << '\n';
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

inline EmbeddingTable emit_embedding(const LinearReducer& model, const LabeledDataset& train,
                                     const std::optional<LabeledDataset>& test, Index dim, const std::string& path,
                                     const std::string& svg_path = {})
{
    EmbeddingTable table = make_embedding(model, train, test, dim);
    write_embedding_csv(table, path);
    if (!svg_path.empty()) {
        if (dim < 2 || dim > 3) throw DataError("SVG scatter needs a 2- or 3-dimensional embedding");
        std::vector<std::string> labels;
        std::vector<bool> hollow;
        for (std::size_t i = 0; i < table.labels.size(); ++i) {
            labels.push_back(table.label_names[static_cast<std::size_t>(table.labels[i])]);
            hollow.push_back(table.partition[i] == "test");
        }
        write_file(svg_path, svg_scatter(table.coordinates, table.labels, labels, hollow,
                                         to_string(table.method) + " embedding, dim " + std::to_string(dim)));
    }
    return table;
}

/// Minimum distance between class centroids divided by the mean distance of
/// points to their own centroid. Larger means better separated blobs.
inline double centroid_separation(const Matrix& coords, const std::vector<int>& labels)
{
    const LabeledDataset ds(coords, labels);
    const Matrix centroids = class_centroids(ds);
    double min_between = std::numeric_limits<double>::infinity();
    for (int a = 0; a < ds.n_classes(); ++a)
        for (int b = a + 1; b < ds.n_classes(); ++b)
            if (ds.class_count(a) && ds.class_count(b))
                min_between = std::min(min_between, (centroids.col(a) - centroids.col(b)).norm());
    double spread = 0.0;
    for (Index i = 0; i < ds.size(); ++i) spread += (coords.col(i) - centroids.col(labels[static_cast<std::size_t>(i)])).norm();
    spread /= static_cast<double>(std::max<Index>(ds.size(), 1));
    return min_between / spread;
}

// ---------------------------------------------------------------------------
// Accuracy curves

inline void emit_accuracy_curves(const ExperimentReport& report, const std::string& path,
                                 const std::string& svg_path = {})
{
    if (report.cells.empty()) throw DataError("emit_accuracy_curves: report is empty");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "method,dim,effective_dim,mean,std,n_ok,n_failed,status\n";
    for (const auto& c : report.cells) {
        out << to_string(c.method) << ',' << c.dim << ',' << c.effective_dim << ',';
        if (c.n_ok)
            out << format_real(c.mean) << ',' << format_real(c.stddev);
        else
            out << ',';
        out << ',' << c.n_ok << ',' << c.n_failed << ',' << c.status() << '\n';
    }
    if (!out) throw DataError("failed writing '" + path + "'");

    if (!svg_path.empty()) {
        std::vector<SvgSeries> series;
        for (const auto& c : report.cells) {
            auto it = std::find_if(series.begin(), series.end(), [&](const SvgSeries& s) { return s.name == to_string(c.method); });
            if (it == series.end()) {
                series.push_back({to_string(c.method), {}, {}});
                it = series.end() - 1;
            }
            if (c.n_ok) {
                it->x.push_back(static_cast<double>(c.dim));
                it->y.push_back(c.mean);
            }
        }
        write_file(svg_path, svg_lines(series, "embedding dimension", "mean k-NN accuracy"));
    }
}

// ---------------------------------------------------------------------------
// Spectrum diagnostics

struct SpectrumRow {
    Index index;
    double centroid_gram;  // eigenvalue of X C^T + C X^T
    double system;         // eigenvalue mu_i of the system matrix
    double cost_1d;        // ||C - a_i a_i^T X||_F^2 for the i-th eigenvector
};

struct SpectrumDiagnostics {
    double trace_ctc = 0.0;
    Index positive_count = 0;
    std::vector<SpectrumRow> rows;
};

inline SpectrumDiagnostics spectrum_diagnostics(const LabeledDataset& train, Index count = -1,
                                                const SolverOptions& solver = {})
{
    train.require_nonempty_classes();
    if (count < 0) count = std::min<Index>(train.dim(), 2 * train.n_classes() + 5);
    count = std::min(count, train.dim());

    const Centered centered = center(train);
    const Matrix& xc = centered.data.data();
    const Matrix ctilde = centroid_matrix(centered.data).data;
    const TopEigen sys = top_eigenpairs(xc, count, detail::slce_builder(centered.data), solver);
    const SystemSpectra spectra = system_spectra(train, solver);

    SpectrumDiagnostics out;
    out.trace_ctc = ctilde.squaredNorm();
    double tol = 0.0;
    out.positive_count = detail::count_positive(sys.spectrum, 1e-8, tol);
    for (Index i = 0; i < count; ++i) {
        out.rows.push_back({i + 1, spectra.centroid_gram[i], sys.values[i],
                            centroid_cost(ctilde, sys.vectors.col(i), xc)});
    }
    return out;
}

inline SpectrumDiagnostics emit_spectrum_diagnostics(const LabeledDataset& train, const std::string& path,
                                                     Index count = -1, const std::string& svg_path = {})
{
    SpectrumDiagnostics diag = spectrum_diagnostics(train, count);
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "index,centroid_gram_eigenvalue,system_eigenvalue,cost_1d,trace_ctc_minus_eigenvalue\n";
    for (const auto& r : diag.rows)
        out << r.index << ',' << format_real(r.centroid_gram) << ',' << format_real(r.system) << ','
            << format_real(r.cost_1d) << ',' << format_real(diag.trace_ctc - r.system) << '\n';
    if (!out) throw DataError("failed writing '" + path + "'");

    if (!svg_path.empty()) {
        SvgSeries gram{"eig(XC^T + CX^T)", {}, {}}, sys{"eig(system)", {}, {}};
        for (const auto& r : diag.rows) {
            gram.x.push_back(static_cast<double>(r.index));
            gram.y.push_back(r.centroid_gram);
            sys.x.push_back(static_cast<double>(r.index));
            sys.y.push_back(r.system);
        }
        write_file(svg_path, svg_lines({gram, sys}, "eigenvalue index", "eigenvalue"));
    }
    return diag;
}

} // namespace slce
