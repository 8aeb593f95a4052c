#include "unattack/knn.hpp"

#include <algorithm>

namespace unattack {

bool RecommendationList::contains(int item) const {
    for (const auto& [i, p] : items)
        if (i == item) return true;
    return false;
}

NeighborList top_k_neighbors(const RatingMatrix& matrix, int u, int k,
                             SimilarityKind kind) {
    if (u < 0 || u >= matrix.num_users())
        throw ValidationError("top_k_neighbors: user out of range");
    if (k < 1) throw ValidationError("top_k_neighbors: K must be >= 1");

    const auto row_u = matrix.user_ratings(u);
    const double norm_u = matrix.row_norm(u);

    std::vector<std::pair<int, double>> sims;
    sims.reserve(matrix.num_users() - 1);
    for (int v = 0; v < matrix.num_users(); ++v) {
        if (v == u) continue;
        const auto row_v = matrix.user_ratings(v);
        double s = 0.0;
        switch (kind) {
            case SimilarityKind::cosine:
                s = sparse_cosine(row_u, norm_u, row_v, matrix.row_norm(v));
                break;
            case SimilarityKind::euclidean:
                s = sparse_euclidean_sim(row_u, norm_u, row_v,
                                         matrix.row_norm(v));
                break;
            case SimilarityKind::pearson:
                s = sparse_pearson(row_u, row_v);
                break;
        }
        sims.emplace_back(v, s);
    }
    const auto by_sim_then_id = [](const std::pair<int, double>& a,
                                   const std::pair<int, double>& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    };
    const std::size_t kk = std::min<std::size_t>(k, sims.size());
    std::partial_sort(sims.begin(), sims.begin() + kk, sims.end(),
                      by_sim_then_id);
    sims.resize(kk);
    return NeighborList{u, std::move(sims)};
}

double predict(const RatingMatrix& matrix, int u, int i,
               const NeighborList& nbrs) {
    double p = 0.0;
    for (const auto& [v, s] : nbrs.neighbors) {
        const double x = matrix.rating(v, i);
        if (x != 0.0) p += s * x;
    }
    (void)u;
    return p;
}

RecommendationList recommend_with_neighbors(const RatingMatrix& matrix, int u,
                                            int n, const NeighborList& nbrs) {
    if (n < 1) throw ValidationError("recommend: N must be >= 1");
    std::vector<double> score(matrix.num_items(), 0.0);
    for (const auto& [v, s] : nbrs.neighbors)
        for (const auto& [i, x] : matrix.user_ratings(v)) score[i] += s * x;

    std::vector<std::pair<int, double>> scored;
    scored.reserve(matrix.num_items());
    for (int i = 0; i < matrix.num_items(); ++i)
        if (!matrix.has_rating(u, i)) scored.emplace_back(i, score[i]);

    const auto by_score_then_id = [](const std::pair<int, double>& a,
                                     const std::pair<int, double>& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    };
    const std::size_t nn = std::min<std::size_t>(n, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + nn, scored.end(),
                      by_score_then_id);
    scored.resize(nn);
    return RecommendationList{u, std::move(scored)};
}

RecommendationList recommend(const RatingMatrix& matrix, int u, int n, int k,
                             SimilarityKind kind) {
    const NeighborList nbrs = top_k_neighbors(matrix, u, k, kind);
    return recommend_with_neighbors(matrix, u, n, nbrs);
}

}  // namespace unattack
