#include "unattack/rating_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace unattack {

void RatingScale::validate() const {
    if (!(min_score < max_score))
        throw ValidationError("rating scale: min_score must be < max_score");
    if (!(step > 0.0))
        throw ValidationError("rating scale: step must be positive");
    const double span = (max_score - min_score) / step;
    if (std::abs(span - std::round(span)) > 1e-9)
        throw ValidationError(
            "rating scale: (max_score - min_score) must be a multiple of step");
}

int RatingScale::num_levels() const {
    return static_cast<int>(std::round((max_score - min_score) / step)) + 1;
}

bool RatingScale::is_legal(double score) const {
    if (score < min_score - 1e-9 || score > max_score + 1e-9) return false;
    const double k = (score - min_score) / step;
    return std::abs(k - std::round(k)) < 1e-9;
}

double RatingScale::round_clip(double score) const {
    const double k = std::round((score - min_score) / step);
    const double level = min_score + k * step;
    return std::clamp(level, min_score, max_score);
}

RatingMatrix::RatingMatrix(int num_users, int num_items,
                           std::vector<Rating> entries, RatingScale scale)
    : num_users_(num_users), num_items_(num_items), scale_(scale) {
    scale_.validate();
    if (num_users < 0 || num_items < 0)
        throw ValidationError("matrix dimensions must be nonnegative");
    rows_.resize(num_users_);
    cols_.resize(num_items_);
    for (const Rating& r : entries) {
        if (r.user < 0 || r.user >= num_users_ || r.item < 0 ||
            r.item >= num_items_)
            throw ValidationError("rating entry out of range: user " +
                                  std::to_string(r.user) + " item " +
                                  std::to_string(r.item));
        if (!scale_.is_legal(r.score))
            throw ValidationError("score " + std::to_string(r.score) +
                                  " is not a legal level of the rating scale");
        rows_[r.user].emplace_back(r.item, r.score);
        cols_[r.item].emplace_back(r.user, r.score);
    }
    for (int u = 0; u < num_users_; ++u) {
        auto& row = rows_[u];
        std::sort(row.begin(), row.end());
        for (std::size_t k = 1; k < row.size(); ++k)
            if (row[k].first == row[k - 1].first)
                throw ValidationError("duplicate rating for user " +
                                      std::to_string(u) + " item " +
                                      std::to_string(row[k].first));
    }
    for (auto& col : cols_) std::sort(col.begin(), col.end());
    num_entries_ = static_cast<std::int64_t>(entries.size());

    row_norms_.resize(num_users_, 0.0);
    for (int u = 0; u < num_users_; ++u) {
        double sq = 0.0;
        for (const auto& [i, x] : rows_[u]) sq += x * x;
        row_norms_[u] = std::sqrt(sq);
    }
}

std::span<const std::pair<int, double>> RatingMatrix::user_ratings(int u) const {
    return rows_.at(u);
}

std::span<const std::pair<int, double>> RatingMatrix::item_raters(int i) const {
    return cols_.at(i);
}

bool RatingMatrix::has_rating(int u, int i) const {
    const auto& row = rows_.at(u);
    auto it = std::lower_bound(row.begin(), row.end(),
                               std::pair<int, double>{i, -1e300});
    return it != row.end() && it->first == i;
}

double RatingMatrix::rating(int u, int i) const {
    const auto& row = rows_.at(u);
    auto it = std::lower_bound(row.begin(), row.end(),
                               std::pair<int, double>{i, -1e300});
    if (it != row.end() && it->first == i) return it->second;
    return 0.0;
}

std::vector<double> RatingMatrix::dense_row(int u) const {
    std::vector<double> x(num_items_, 0.0);
    for (const auto& [i, score] : rows_.at(u)) x[i] = score;
    return x;
}

double RatingMatrix::row_norm(int u) const { return row_norms_.at(u); }

std::vector<Rating> RatingMatrix::entries() const {
    std::vector<Rating> out;
    out.reserve(static_cast<std::size_t>(num_entries_));
    for (int u = 0; u < num_users_; ++u)
        for (const auto& [i, score] : rows_[u]) out.push_back({u, i, score});
    return out;
}

int RatingMatrix::add_user(const std::map<int, double>& ratings) {
    for (const auto& [i, score] : ratings) {
        if (i < 0 || i >= num_items_)
            throw ValidationError("add_user: item out of range");
        if (!scale_.is_legal(score))
            throw ValidationError("add_user: illegal score level");
    }
    const int u = num_users_++;
    rows_.emplace_back();
    double sq = 0.0;
    for (const auto& [i, score] : ratings) {
        rows_[u].emplace_back(i, score);
        cols_[i].emplace_back(u, score);
        sq += score * score;
    }
    row_norms_.push_back(std::sqrt(sq));
    num_entries_ += static_cast<std::int64_t>(ratings.size());
    return u;
}

double sparsity(const RatingMatrix& matrix) {
    if (matrix.num_users() == 0 || matrix.num_items() == 0)
        throw ValidationError("sparsity undefined on an empty matrix");
    const double cells = static_cast<double>(matrix.num_users()) *
                         static_cast<double>(matrix.num_items());
    return 1.0 - static_cast<double>(matrix.num_entries()) / cells;
}

SplitResult split(const RatingMatrix& matrix, double train_frac,
                  double val_frac, std::uint64_t seed) {
    if (!(train_frac > 0.0 && train_frac < 1.0))
        throw ValidationError("split: train_frac must be in (0,1)");
    if (!(val_frac >= 0.0 && val_frac < 1.0))
        throw ValidationError("split: val_frac must be in [0,1)");

    std::vector<Rating> all = matrix.entries();
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const std::size_t total = all.size();
    const std::size_t n_train_pool =
        static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(total)));
    const std::size_t n_val = static_cast<std::size_t>(
        std::floor(val_frac * static_cast<double>(n_train_pool)));
    const std::size_t n_train = n_train_pool - n_val;

    std::vector<Rating> train_e, val_e, test_e;
    train_e.reserve(n_train);
    val_e.reserve(n_val);
    test_e.reserve(total - n_train_pool);
    for (std::size_t k = 0; k < total; ++k) {
        const Rating& r = all[order[k]];
        if (k < n_train)
            train_e.push_back(r);
        else if (k < n_train_pool)
            val_e.push_back(r);
        else
            test_e.push_back(r);
    }
    const int m = matrix.num_users();
    const int n = matrix.num_items();
    const RatingScale& sc = matrix.scale();
    return SplitResult{RatingMatrix(m, n, std::move(train_e), sc),
                       RatingMatrix(m, n, std::move(val_e), sc),
                       RatingMatrix(m, n, std::move(test_e), sc)};
}

namespace {

std::pair<double, double> global_mean_std(const RatingMatrix& matrix) {
    if (matrix.num_entries() == 0) return {0.0, 0.0};
    double sum = 0.0, sumsq = 0.0;
    for (int u = 0; u < matrix.num_users(); ++u)
        for (const auto& [i, x] : matrix.user_ratings(u)) {
            sum += x;
            sumsq += x * x;
        }
    const double cnt = static_cast<double>(matrix.num_entries());
    const double mean = sum / cnt;
    const double var = std::max(0.0, sumsq / cnt - mean * mean);
    return {mean, std::sqrt(var)};
}

ItemStats make_item_stats(const RatingMatrix& matrix, int item,
                          double global_mean, double global_stddev) {
    ItemStats s;
    s.item = item;
    s.global_mean = global_mean;
    s.global_stddev = global_stddev;
    const auto raters = matrix.item_raters(item);
    s.count = static_cast<int>(raters.size());
    if (s.count == 0) {
        s.mean = global_mean;
        s.stddev = global_stddev;
        s.fallback_mean = true;
        s.fallback_std = true;
        return s;
    }
    double sum = 0.0, sumsq = 0.0;
    for (const auto& [u, x] : raters) {
        sum += x;
        sumsq += x * x;
    }
    s.mean = sum / s.count;
    if (s.count < 2) {
        s.stddev = global_stddev;
        s.fallback_std = true;
    } else {
        const double var = std::max(0.0, sumsq / s.count - s.mean * s.mean);
        s.stddev = std::sqrt(var);
    }
    return s;
}

}  // namespace

ItemStats item_stats(const RatingMatrix& matrix, int item) {
    auto [gm, gs] = global_mean_std(matrix);
    return make_item_stats(matrix, item, gm, gs);
}

ItemStatsTable::ItemStatsTable(const RatingMatrix& matrix) {
    auto [gm, gs] = global_mean_std(matrix);
    global_mean_ = gm;
    global_stddev_ = gs;
    stats_.reserve(matrix.num_items());
    for (int i = 0; i < matrix.num_items(); ++i)
        stats_.push_back(make_item_stats(matrix, i, gm, gs));
}

}  // namespace unattack
