#pragma once

#include <vector>

#include "unattack/rating_matrix.hpp"
#include "unattack/similarity.hpp"

namespace unattack {

// Top-K nearest neighbours of a user, sorted by similarity descending,
// ties broken by ascending user id.
struct NeighborList {
    int user = 0;
    std::vector<std::pair<int, double>> neighbors;  // (user v, s_uv)
};

// Top-N unrated items for a user, sorted by predicted score descending,
// ties broken by ascending item id.
struct RecommendationList {
    int user = 0;
    std::vector<std::pair<int, double>> items;  // (item i, p_ui)

    bool contains(int item) const;
};

NeighborList top_k_neighbors(const RatingMatrix& matrix, int u, int k,
                             SimilarityKind kind);

// Unnormalized weighted sum over neighbours that rated i:
// p_ui = sum_{v in S(u,K) ^ U_i+} s_uv * X_vi
double predict(const RatingMatrix& matrix, int u, int i,
               const NeighborList& nbrs);

RecommendationList recommend(const RatingMatrix& matrix, int u, int n, int k,
                             SimilarityKind kind);

// Same ranking as recommend, reusing a prebuilt neighbour list.
RecommendationList recommend_with_neighbors(const RatingMatrix& matrix, int u,
                                            int n, const NeighborList& nbrs);

}  // namespace unattack
