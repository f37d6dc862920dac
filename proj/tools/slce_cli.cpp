// slce: command-line front end.
//
//   slce fit       --method slce --data D.csv --dim k --out model.json
//   slce transform --model model.json --data D.csv --out emb.csv
//   slce eval      --model model.json --train T.csv --test S.csv --knn 5
//   slce bench     --config exp.json --out report.json
//   slce spectrum  --data D.csv --out spec.csv
//   slce embed     --model model.json --train T.csv [--test S.csv] --out table.csv [--svg plot.svg]
//
// Exit codes: 0 success, 1 user error, 2 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "slce/all.hpp"

namespace {

struct DataFlags {
    std::string label_col = "last";
    bool no_header = false;

    slce::CsvOptions csv() const
    {
        slce::CsvOptions o;
        o.label_column = label_col;
        o.header = !no_header;
        return o;
    }
};

void add_data_flags(CLI::App* cmd, DataFlags& flags)
{
    cmd->add_option("--label-col", flags.label_col, "Label column: 'last', a zero-based index, or a header name")
        ->capture_default_str();
    cmd->add_flag("--no-header", flags.no_header, "The CSV has no header row");
}

slce::SolverOptions solver_from(const std::string& path, double ratio)
{
    slce::SolverOptions s;
    s.reduce_ratio = ratio;
    if (path == "dense")
        s.path = slce::SolverPath::dense;
    else if (path == "reduced")
        s.path = slce::SolverPath::reduced;
    else
        s.path = slce::SolverPath::automatic;
    return s;
}

/// Re-encodes `ds` with the label order of `names`, appending unseen tokens.
slce::LabeledDataset align_labels(const slce::LabeledDataset& ds, std::vector<std::string> names)
{
    std::vector<int> labels;
    for (int l : ds.labels()) {
        const auto& token = ds.label_names()[static_cast<std::size_t>(l)];
        auto it = std::find(names.begin(), names.end(), token);
        if (it == names.end()) {
            names.push_back(token);
            it = names.end() - 1;
        }
        labels.push_back(static_cast<int>(it - names.begin()));
    }
    return slce::LabeledDataset(ds.data(), std::move(labels), std::move(names), ds.feature_names());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Supervised linear dimensionality reduction: SLCE, PCA, LDA, Bair's SPCA and HSIC SPCA, "
                 "with a k-NN benchmark harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(slce::version));

    // fit
    auto* fit = app.add_subcommand("fit", "Fit a reducer on a labeled CSV and write a JSON model");
    std::string fit_method = "slce", fit_data, fit_out, fit_solver = "auto";
    long fit_dim = 0;
    double fit_shrinkage = 1e-4, fit_reduce_ratio = 2.0;
    std::vector<double> fit_grid{0.01, 0.05, 0.1, 0.25, 0.5, 1.0};
    int fit_folds = 5;
    std::uint64_t fit_seed = 0;
    bool fit_standardize = false;
    DataFlags fit_flags;
    fit->add_option("--method", fit_method, "slce, pca, lda, bair_spca or hsic_spca")
        ->check(CLI::IsMember({"slce", "pca", "lda", "bair_spca", "hsic_spca"}))
        ->capture_default_str();
    fit->add_option("--data", fit_data, "Training CSV (samples as rows)")->required();
    fit->add_option("--dim", fit_dim, "Embedding dimension k (k >= 1)")->required();
    fit->add_option("--out", fit_out, "Output model JSON")->required();
    fit->add_option("--shrinkage", fit_shrinkage, "LDA shrinkage in [0,1], scaled by Tr(S_w)/d")->capture_default_str();
    fit->add_option("--bair-grid", fit_grid, "Bair screening fractions tried by cross-validation")->capture_default_str();
    fit->add_option("--bair-folds", fit_folds, "Bair cross-validation folds")->capture_default_str();
    fit->add_option("--seed", fit_seed, "Seed for every random choice (Bair CV folds)")->capture_default_str();
    fit->add_option("--solver", fit_solver, "Eigensolver path: auto, dense or reduced")
        ->check(CLI::IsMember({"auto", "dense", "reduced"}))
        ->capture_default_str();
    fit->add_option("--reduce-ratio", fit_reduce_ratio, "auto uses the reduced path when d > ratio * n")
        ->capture_default_str();
    fit->add_flag("--standardize", fit_standardize, "Z-score features before fitting (stored in the model)");
    add_data_flags(fit, fit_flags);

    // transform
    auto* tr = app.add_subcommand("transform", "Project a labeled CSV with a fitted model");
    std::string tr_model, tr_data, tr_out, tr_partition = "data";
    DataFlags tr_flags;
    tr->add_option("--model", tr_model, "Model JSON")->required();
    tr->add_option("--data", tr_data, "CSV to project")->required();
    tr->add_option("--out", tr_out, "Output CSV: coord_1..coord_k,label,partition")->required();
    tr->add_option("--partition", tr_partition, "Value written to the partition column")->capture_default_str();
    add_data_flags(tr, tr_flags);

    // eval
    auto* ev = app.add_subcommand("eval", "k-NN accuracy of a fitted model on a test CSV");
    std::string ev_model, ev_train, ev_test, ev_out;
    int ev_knn = 5;
    DataFlags ev_flags;
    ev->add_option("--model", ev_model, "Model JSON")->required();
    ev->add_option("--train", ev_train, "Training CSV (k-NN reference points)")->required();
    ev->add_option("--test", ev_test, "Test CSV")->required();
    ev->add_option("--knn", ev_knn, "Number of neighbours")->capture_default_str();
    ev->add_option("--out", ev_out, "Optional JSON file with accuracy and predictions");
    add_data_flags(ev, ev_flags);

    // bench
    auto* bench = app.add_subcommand("bench", "Run the repeated split/fit/k-NN benchmark from a JSON config");
    std::string bench_config, bench_out, bench_curves, bench_curves_svg;
    std::optional<std::uint64_t> bench_seed;
    int bench_jobs = 0;
    bench->add_option("--config", bench_config, "Experiment config (JSON)")->required();
    bench->add_option("--out", bench_out, "Report JSON")->required();
    bench->add_option("--curves", bench_curves, "Optional long-format accuracy CSV (method,dim,mean,std)");
    bench->add_option("--curves-svg", bench_curves_svg, "Optional SVG accuracy chart");
    bench->add_option("--seed", bench_seed, "Override the config's base_seed");
    bench->add_option("--jobs", bench_jobs, "Repetitions run concurrently (overrides the config)");

    // spectrum
    auto* sp = app.add_subcommand("spectrum", "Write eigenvalue/cost diagnostics of the SLCE system matrix");
    std::string sp_data, sp_out, sp_svg;
    long sp_count = -1;
    DataFlags sp_flags;
    sp->add_option("--data", sp_data, "Labeled CSV")->required();
    sp->add_option("--out", sp_out, "Output CSV")->required();
    sp->add_option("--count", sp_count, "Number of leading eigenvalues (default min(d, 2M+5))");
    sp->add_option("--svg", sp_svg, "Optional SVG plot of both spectra");
    add_data_flags(sp, sp_flags);

    // embed
    auto* em = app.add_subcommand("embed", "Write an embedding table (and optional SVG scatter) for train/test data");
    std::string em_model, em_train, em_test, em_out, em_svg;
    long em_dim = 0;
    DataFlags em_flags;
    em->add_option("--model", em_model, "Model JSON")->required();
    em->add_option("--train", em_train, "Training CSV")->required();
    em->add_option("--test", em_test, "Optional test CSV");
    em->add_option("--dim", em_dim, "Embedding dimension (default: model k)");
    em->add_option("--out", em_out, "Output CSV: coord_1..coord_p,label,partition")->required();
    em->add_option("--svg", em_svg, "Optional SVG scatter (dim 2 or 3)");
    add_data_flags(em, em_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*fit) {
            if (fit_dim < 1) throw slce::DataError("--dim: k must satisfy k >= 1 (got " + std::to_string(fit_dim) + ")");
            slce::LabeledDataset train = slce::load_csv(fit_data, fit_flags.csv());
            slce::ModelFile file;
            if (fit_standardize) {
                slce::Standardized z = slce::standardize(train);
                file.scaling = slce::InputScaling{z.mean, z.scale};
                train = z.data;
            }
            slce::ReducerParams params;
            params.solver = solver_from(fit_solver, fit_reduce_ratio);
            params.lda_shrinkage = fit_shrinkage;
            params.bair.threshold_grid = fit_grid;
            params.bair.cv_folds = fit_folds;
            params.bair.seed = fit_seed;
            file.model = slce::fit_reducer(slce::parse_method(fit_method), train, fit_dim, params);
            file.label_names = train.label_names();
            slce::save_model(file, fit_out);
            std::cout << fit_method << ": fitted k=" << fit_dim << " on n=" << train.size() << ", d=" << train.dim()
                      << ", M=" << train.n_classes() << " -> " << fit_out << '\n';
            if (file.model.spectrum.size()) std::cout << "spectrum: " << file.model.spectrum.transpose() << '\n';
        } else if (*tr) {
            const slce::ModelFile file = slce::load_model(tr_model);
            const slce::LabeledDataset data = slce::load_csv(tr_data, tr_flags.csv());
            slce::EmbeddingTable table;
            table.coordinates = file.transform(data.data());
            table.dim = table.coordinates.rows();
            table.labels = data.labels();
            table.label_names = data.label_names();
            table.partition.assign(static_cast<std::size_t>(data.size()), tr_partition);
            table.method = file.model.method;
            slce::write_embedding_csv(table, tr_out);
            std::cout << "projected " << data.size() << " samples to " << table.dim << " dimensions -> " << tr_out << '\n';
        } else if (*ev) {
            const slce::ModelFile file = slce::load_model(ev_model);
            const slce::LabeledDataset train = align_labels(slce::load_csv(ev_train, ev_flags.csv()), file.label_names);
            const slce::LabeledDataset test = align_labels(slce::load_csv(ev_test, ev_flags.csv()), train.label_names());
            const auto result = slce::knn_evaluate(file.transform(train.data()), train.labels(),
                                                   file.transform(test.data()), test.labels(), ev_knn);
            std::cout << ev_knn << "-NN accuracy: " << result.accuracy << " (" << test.size() << " test samples)\n";
            if (!ev_out.empty()) {
                std::vector<std::string> predicted;
                for (int p : result.predictions) predicted.push_back(train.label_names()[static_cast<std::size_t>(p)]);
                nlohmann::json j{{"schema_version", slce::schema_version},
                                 {"knn", ev_knn},
                                 {"accuracy", result.accuracy},
                                 {"n_test", test.size()},
                                 {"predictions", predicted}};
                slce::write_file(ev_out, j.dump(2) + "\n");
            }
        } else if (*bench) {
            slce::ExperimentConfig config = slce::load_config(bench_config);
            if (bench_seed) config.base_seed = *bench_seed;
            if (bench_jobs > 0) config.jobs = bench_jobs;
            const auto start = std::chrono::steady_clock::now();
            const slce::ExperimentReport report = slce::run_experiment(config);
            slce::write_report(report, bench_out);
            if (!bench_curves.empty() || !bench_curves_svg.empty())
                slce::emit_accuracy_curves(report, bench_curves.empty() ? bench_out + ".curves.csv" : bench_curves,
                                           bench_curves_svg);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::cout << "method      dim   mean     std      ok/failed\n";
            for (const auto& c : report.cells) {
                std::printf("%-11s %-5ld %-8.4f %-8.4f %d/%d%s\n", slce::to_string(c.method).c_str(),
                            static_cast<long>(c.dim), c.mean, c.stddev, c.n_ok, c.n_failed,
                            c.note.empty() ? "" : ("  (" + c.note + ")").c_str());
            }
            for (const auto& r : report.reference)
                std::printf("%-11s %-5ld %-8.2f %-8.2f reference (%s)\n", r.method.c_str(), static_cast<long>(r.dim),
                            r.mean, r.stddev, r.source.c_str());
            std::cout << "wall clock " << secs << " s -> " << bench_out << '\n';
        } else if (*sp) {
            const slce::LabeledDataset data = slce::load_csv(sp_data, sp_flags.csv());
            const auto diag = slce::emit_spectrum_diagnostics(data, sp_out, sp_count, sp_svg);
            std::cout << "Tr(C^T C) = " << diag.trace_ctc << ", positive eigenvalues: " << diag.positive_count
                      << " (M - 1 = " << data.n_classes() - 1 << ") -> " << sp_out << '\n';
        } else if (*em) {
            const slce::ModelFile file = slce::load_model(em_model);
            slce::LabeledDataset train = align_labels(slce::load_csv(em_train, em_flags.csv()), file.label_names);
            std::optional<slce::LabeledDataset> test;
            if (!em_test.empty()) {
                test = align_labels(slce::load_csv(em_test, em_flags.csv()), train.label_names());
                train = align_labels(train, test->label_names());
            }
            slce::LinearReducer model = file.model;
            if (file.scaling) {
                // Fold the input scaling into the training/test matrices.
                train = train.with_data(file.scaling->apply(train.data()));
                if (test) test = test->with_data(file.scaling->apply(test->data()));
            }
            const auto dim = em_dim > 0 ? static_cast<slce::Index>(em_dim) : model.rank();
            const auto table = slce::emit_embedding(model, train, test, dim, em_out, em_svg);
            std::cout << "wrote " << table.coordinates.cols() << " points in " << dim << " dimensions -> " << em_out
                      << '\n';
        }
    } catch (const slce::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const slce::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
