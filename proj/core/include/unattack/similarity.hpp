#pragma once

#include <span>
#include <string>
#include <vector>

namespace unattack {

enum class SimilarityKind { cosine, euclidean, pearson };

std::string to_string(SimilarityKind kind);
SimilarityKind similarity_from_string(const std::string& name);

// (x.y)/(|x||y|); 0 when either norm is zero (no information).
double cosine(std::span<const double> x, std::span<const double> y);

// 1/(1 + |x-y|_2), in (0,1].
double euclidean_sim(std::span<const double> x, std::span<const double> y);

// Centered cosine over the co-rated support (positions where both are
// nonzero); 0 when the support has <2 items or either side has zero
// variance on it.
double pearson(std::span<const double> x, std::span<const double> y);

struct CosineGradient {
    std::vector<double> grad;
    bool degenerate = false;  // a zero-norm input; grad is all zeros
};

// d cos(x_u, x_f) / d x_f = x_u/(|x_u||x_f|) - (x_u.x_f) x_f/(|x_u||x_f|^3)
CosineGradient cosine_gradient(std::span<const double> x_u,
                               std::span<const double> x_f);

// Sparse-row helpers. Rows are (item, score) pairs sorted by item id.
using SparseRow = std::span<const std::pair<int, double>>;

double sparse_dot(SparseRow a, SparseRow b);
double sparse_cosine(SparseRow a, double norm_a, SparseRow b, double norm_b);
double sparse_euclidean_sim(SparseRow a, double norm_a, SparseRow b,
                            double norm_b);
double sparse_pearson(SparseRow a, SparseRow b);

}  // namespace unattack
