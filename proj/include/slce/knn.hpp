#pragma once

// Brute-force k-nearest-neighbour classification in an embedding space.
//
// Distances are Euclidean. Neighbours are ordered by (distance, training
// index), so equidistant points resolve to the lower index. A vote tie goes
// to the tied class whose closest member ranks first among the neighbours.

#include <Eigen/Dense>

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "slce/dataset.hpp"
#include "slce/errors.hpp"

namespace slce {

struct KnnResult {
    std::vector<int> predictions;
    double accuracy = 0.0;
    int k = 0;
};

inline double accuracy(const std::vector<int>& predictions, const std::vector<int>& truth)
{
    if (predictions.size() != truth.size())
        throw DataError("accuracy: " + std::to_string(predictions.size()) + " predictions for " +
                        std::to_string(truth.size()) + " labels");
    if (truth.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) correct += predictions[i] == truth[i];
    return static_cast<double>(correct) / static_cast<double>(truth.size());
}

inline std::vector<int> knn_predict(const Matrix& train_emb, const std::vector<int>& train_labels,
                                    const Matrix& query_emb, int neighbors)
{
    const Index n = train_emb.cols();
    if (n == 0) throw DataError("knn_predict: empty training set");
    if (neighbors < 1) throw DataError("knn_predict: neighbors must be >= 1");
    if (neighbors > n)
        throw DataError("knn_predict: neighbors = " + std::to_string(neighbors) + " exceeds training size " +
                        std::to_string(n));
    if (static_cast<Index>(train_labels.size()) != n)
        throw DataError("knn_predict: label count does not match training embedding");
    if (query_emb.rows() != train_emb.rows())
        throw DataError("knn_predict: query dimension " + std::to_string(query_emb.rows()) +
                        " differs from training dimension " + std::to_string(train_emb.rows()));

    int n_labels = 0;
    for (int l : train_labels) n_labels = std::max(n_labels, l + 1);

    std::vector<int> predictions(static_cast<std::size_t>(query_emb.cols()));
    std::vector<std::pair<double, Index>> order(static_cast<std::size_t>(n));
    std::vector<int> votes(static_cast<std::size_t>(n_labels));
    std::vector<int> first_rank(static_cast<std::size_t>(n_labels));

    for (Index q = 0; q < query_emb.cols(); ++q) {
        for (Index i = 0; i < n; ++i)
            order[static_cast<std::size_t>(i)] = {(train_emb.col(i) - query_emb.col(q)).squaredNorm(), i};
        std::partial_sort(order.begin(), order.begin() + neighbors, order.end());

        std::fill(votes.begin(), votes.end(), 0);
        std::fill(first_rank.begin(), first_rank.end(), neighbors);
        for (int r = 0; r < neighbors; ++r) {
            const int label = train_labels[static_cast<std::size_t>(order[static_cast<std::size_t>(r)].second)];
            ++votes[static_cast<std::size_t>(label)];
            first_rank[static_cast<std::size_t>(label)] = std::min(first_rank[static_cast<std::size_t>(label)], r);
        }
        int best = -1;
        for (int c = 0; c < n_labels; ++c) {
            if (votes[c] == 0) continue;
            if (best < 0 || votes[c] > votes[best] || (votes[c] == votes[best] && first_rank[c] < first_rank[best]))
                best = c;
        }
        predictions[static_cast<std::size_t>(q)] = best;
    }
    return predictions;
}

inline KnnResult knn_evaluate(const Matrix& train_emb, const std::vector<int>& train_labels,
                              const Matrix& query_emb, const std::vector<int>& query_labels, int neighbors)
{
    KnnResult out;
    out.k = neighbors;
    out.predictions = knn_predict(train_emb, train_labels, query_emb, neighbors);
    out.accuracy = accuracy(out.predictions, query_labels);
    return out;
}

} // namespace slce
