#include "unattack/similarity.hpp"

#include <cmath>
#include <stdexcept>

namespace unattack {

std::string to_string(SimilarityKind kind) {
    switch (kind) {
        case SimilarityKind::cosine: return "cosine";
        case SimilarityKind::euclidean: return "euclidean";
        case SimilarityKind::pearson: return "pearson";
    }
    return "?";
}

SimilarityKind similarity_from_string(const std::string& name) {
    if (name == "cosine") return SimilarityKind::cosine;
    if (name == "euclidean") return SimilarityKind::euclidean;
    if (name == "pearson") return SimilarityKind::pearson;
    throw std::invalid_argument("unknown similarity kind: " + name);
}

namespace {

double norm2(std::span<const double> x) {
    double sq = 0.0;
    for (double v : x) sq += v * v;
    return std::sqrt(sq);
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
    return s;
}

}  // namespace

double cosine(std::span<const double> x, std::span<const double> y) {
    const double nx = norm2(x), ny = norm2(y);
    if (nx == 0.0 || ny == 0.0) return 0.0;
    return dot(x, y) / (nx * ny);
}

double euclidean_sim(std::span<const double> x, std::span<const double> y) {
    double sq = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        sq += d * d;
    }
    return 1.0 / (1.0 + std::sqrt(sq));
}

double pearson(std::span<const double> x, std::span<const double> y) {
    double sx = 0.0, sy = 0.0;
    int cnt = 0;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] != 0.0 && y[k] != 0.0) {
            sx += x[k];
            sy += y[k];
            ++cnt;
        }
    if (cnt < 2) return 0.0;
    const double mx = sx / cnt, my = sy / cnt;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] != 0.0 && y[k] != 0.0) {
            sxy += (x[k] - mx) * (y[k] - my);
            sxx += (x[k] - mx) * (x[k] - mx);
            syy += (y[k] - my) * (y[k] - my);
        }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

CosineGradient cosine_gradient(std::span<const double> x_u,
                               std::span<const double> x_f) {
    CosineGradient out;
    out.grad.assign(x_f.size(), 0.0);
    const double nu = norm2(x_u), nf = norm2(x_f);
    if (nu == 0.0 || nf == 0.0) {
        out.degenerate = true;
        return out;
    }
    const double d = dot(x_u, x_f);
    const double inv = 1.0 / (nu * nf);
    const double coef = d * inv / (nf * nf);
    for (std::size_t k = 0; k < x_f.size(); ++k)
        out.grad[k] = x_u[k] * inv - coef * x_f[k];
    return out;
}

double sparse_dot(SparseRow a, SparseRow b) {
    double s = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia].first < b[ib].first)
            ++ia;
        else if (a[ia].first > b[ib].first)
            ++ib;
        else {
            s += a[ia].second * b[ib].second;
            ++ia;
            ++ib;
        }
    }
    return s;
}

double sparse_cosine(SparseRow a, double norm_a, SparseRow b, double norm_b) {
    if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
    return sparse_dot(a, b) / (norm_a * norm_b);
}

double sparse_euclidean_sim(SparseRow a, double norm_a, SparseRow b,
                            double norm_b) {
    const double sq =
        std::max(0.0, norm_a * norm_a + norm_b * norm_b - 2.0 * sparse_dot(a, b));
    return 1.0 / (1.0 + std::sqrt(sq));
}

double sparse_pearson(SparseRow a, SparseRow b) {
    double sx = 0.0, sy = 0.0;
    int cnt = 0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia].first < b[ib].first)
            ++ia;
        else if (a[ia].first > b[ib].first)
            ++ib;
        else {
            sx += a[ia].second;
            sy += b[ib].second;
            ++cnt;
            ++ia;
            ++ib;
        }
    }
    if (cnt < 2) return 0.0;
    const double mx = sx / cnt, my = sy / cnt;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    ia = ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia].first < b[ib].first)
            ++ia;
        else if (a[ia].first > b[ib].first)
            ++ib;
        else {
            const double dx = a[ia].second - mx, dy = b[ib].second - my;
            sxy += dx * dy;
            sxx += dx * dx;
            syy += dy * dy;
            ++ia;
            ++ib;
        }
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace unattack
