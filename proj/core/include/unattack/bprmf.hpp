#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unattack/knn.hpp"
#include "unattack/rating_matrix.hpp"

namespace unattack {

struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BprConfig {
    int embedding_dim = 20;
    double learning_rate = 0.01;
    double regularization = 0.01;
    int epochs = 50;
    std::uint64_t seed = 0;
};

// Matrix-factorization model trained with the BPR pairwise objective.
// Ratings are treated as implicit positives; score(u,i) is a plain dot
// product of the factor rows (no bias terms).
struct MFModel {
    int num_users = 0;
    int num_items = 0;
    int embedding_dim = 0;
    std::vector<double> user_factors;  // row-major m x d
    std::vector<double> item_factors;  // row-major n x d

    int epochs_trained = 0;
    std::vector<double> epoch_loss;  // mean -ln sigma per epoch

    double score(int u, int i) const;
};

MFModel train_bprmf(const RatingMatrix& matrix, const BprConfig& config);

// Top-N unrated items by dot-product score; ties by ascending item id.
RecommendationList mf_recommend(const MFModel& model,
                                const RatingMatrix& matrix, int u, int n);

// Binary checkpoint: magic+version header, dimensions, then the two
// row-major factor payloads as little-endian doubles.
void save_model(const MFModel& model, const std::string& path);
MFModel load_model(const std::string& path);

}  // namespace unattack
