#pragma once

// JSON model files. Layout:
//
//   { "schema_version": 1, "version": "0.1.0", "method": "slce",
//     "d": 4, "k": 2, "mean": [...], "basis": [... column-major d*k ...],
//     "spectrum": [...], "centered": true,
//     "n_classes": 3, "trace_ctc": ..., "positive_count": 2,   // slce only
//     "aux": {...},                                           // method-specific
//     "label_names": [...],                                   // optional
//     "input_scaling": {"mean": [...], "scale": [...]} }      // optional
//
// Doubles are written with round-trip precision.

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include "slce/baselines.hpp"
#include "slce/dataset.hpp"
#include "slce/errors.hpp"
#include "slce/slce.hpp"
#include "slce/version.hpp"

namespace slce {

/// Per-feature z-scoring applied before the model's own centering.
struct InputScaling {
    Vector mean;
    Vector scale;

    Matrix apply(const Matrix& x) const
    {
        if (x.rows() != mean.size()) throw DataError("input scaling: feature count mismatch");
        return (x.colwise() - mean).array().colwise() / scale.array();
    }
};

struct ModelFile {
    LinearReducer model;
    std::vector<std::string> label_names;
    std::optional<InputScaling> scaling;

    Matrix transform(const Matrix& x) const
    {
        return slce::transform(model, scaling ? scaling->apply(x) : x);
    }
};

namespace detail {

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline Vector vector_from(const nlohmann::json& j, const char* key, Index expected)
{
    if (!j.contains(key)) throw DataError(std::string("model file: missing '") + key + "'");
    const auto values = j.at(key).get<std::vector<double>>();
    if (expected >= 0 && static_cast<Index>(values.size()) != expected)
        throw DataError(std::string("model file: '") + key + "' has " + std::to_string(values.size()) +
                        " entries, expected " + std::to_string(expected));
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

} // namespace detail

inline nlohmann::json to_json(const ModelFile& file)
{
    const LinearReducer& m = file.model;
    nlohmann::json j;
    j["schema_version"] = schema_version;
    j["version"] = version;
    j["method"] = to_string(m.method);
    j["d"] = m.dim();
    j["k"] = m.rank();
    j["mean"] = detail::to_std(m.mean);
    j["basis"] = std::vector<double>(m.basis.data(), m.basis.data() + m.basis.size());
    j["spectrum"] = detail::to_std(m.spectrum);
    j["centered"] = true;
    if (m.method == Method::slce) {
        for (const char* key : {"n_classes", "trace_ctc", "positive_count"})
            if (m.aux.contains(key)) j[key] = m.aux.at(key);
    }
    j["aux"] = m.aux;
    if (!file.label_names.empty()) j["label_names"] = file.label_names;
    if (file.scaling)
        j["input_scaling"] = {{"mean", detail::to_std(file.scaling->mean)}, {"scale", detail::to_std(file.scaling->scale)}};
    return j;
}

inline ModelFile model_from_json(const nlohmann::json& j)
{
    try {
        ModelFile file;
        LinearReducer& m = file.model;
        m.method = parse_method(j.at("method").get<std::string>());
        const auto d = j.at("d").get<Index>();
        const auto k = j.at("k").get<Index>();
        if (d < 1 || k < 0) throw DataError("model file: invalid shape");
        m.mean = detail::vector_from(j, "mean", d);
        const Vector flat = detail::vector_from(j, "basis", d * k);
        m.basis = Eigen::Map<const Matrix>(flat.data(), d, k);
        m.spectrum = j.contains("spectrum") ? detail::vector_from(j, "spectrum", -1) : Vector();
        if (j.contains("aux")) m.aux = j.at("aux");
        if (j.contains("label_names")) file.label_names = j.at("label_names").get<std::vector<std::string>>();
        if (j.contains("input_scaling")) {
            const auto& s = j.at("input_scaling");
            file.scaling = InputScaling{detail::vector_from(s, "mean", d), detail::vector_from(s, "scale", d)};
        }
        return file;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
}

/// Rebuilds the SLCE-specific view of an slce model file.
inline SlceModel slce_model_from_json(const nlohmann::json& j)
{
    const ModelFile file = model_from_json(j);
    if (file.model.method != Method::slce) throw DataError("model file: method is not slce");
    SlceModel m;
    m.basis = file.model.basis;
    m.spectrum = file.model.spectrum;
    m.mean = file.model.mean;
    m.n_classes = j.value("n_classes", 0);
    m.trace_ctc = j.value("trace_ctc", 0.0);
    m.positive_count = j.value("positive_count", Index{0});
    m.positive_tolerance = file.model.aux.value("positive_tolerance", 0.0);
    return m;
}

inline void save_model(const ModelFile& file, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << to_json(file).dump(2) << '\n';
    if (!out) throw DataError("failed writing '" + path + "'");
}

inline nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline ModelFile load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

} // namespace slce
