#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace unattack {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Legal rating levels: min_score + k*step for k = 0 .. num_levels()-1.
// 0 is never a legal explicit rating; it marks "unrated" in dense views.
struct RatingScale {
    double min_score = 1.0;
    double max_score = 5.0;
    double step = 1.0;

    void validate() const;
    int num_levels() const;
    bool is_legal(double score) const;
    // Nearest legal level, clipped to [min_score, max_score].
    double round_clip(double score) const;
};

struct Rating {
    int user = 0;
    int item = 0;
    double score = 0.0;
};

// Sparse user x item explicit-rating store. Rows and columns are kept
// sorted; a constructed matrix is immutable apart from add_user, which
// appends a new row (attack injection works on a private copy).
class RatingMatrix {
public:
    RatingMatrix(int num_users, int num_items, std::vector<Rating> entries,
                 RatingScale scale);

    int num_users() const { return num_users_; }
    int num_items() const { return num_items_; }
    std::int64_t num_entries() const { return num_entries_; }
    const RatingScale& scale() const { return scale_; }

    // Row of user u, sorted by item id.
    std::span<const std::pair<int, double>> user_ratings(int u) const;
    // Raters of item i (U_i+), sorted by user id.
    std::span<const std::pair<int, double>> item_raters(int i) const;

    bool has_rating(int u, int i) const;
    double rating(int u, int i) const;  // 0 when unrated

    // Dense n-vector X_u with 0 at unrated positions.
    std::vector<double> dense_row(int u) const;
    double row_norm(int u) const;

    std::vector<Rating> entries() const;

    // Appends a user rating the given items; returns the new user id.
    int add_user(const std::map<int, double>& ratings);

private:
    int num_users_ = 0;
    int num_items_ = 0;
    std::int64_t num_entries_ = 0;
    RatingScale scale_;
    std::vector<std::vector<std::pair<int, double>>> rows_;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> row_norms_;
};

double sparsity(const RatingMatrix& matrix);

struct SplitResult {
    RatingMatrix train;
    RatingMatrix validation;
    RatingMatrix test;
};

// Entry-level random partition, deterministic under seed. The test part
// gets 1-train_frac of all entries; validation gets val_frac of the
// remaining training portion (floor-then-remainder counts).
SplitResult split(const RatingMatrix& matrix, double train_frac,
                  double val_frac, std::uint64_t seed);

struct ItemStats {
    int item = 0;
    int count = 0;
    double mean = 0.0;
    double stddev = 0.0;  // population stddev
    double global_mean = 0.0;
    double global_stddev = 0.0;
    bool fallback_mean = false;  // count == 0, mean <- global_mean
    bool fallback_std = false;   // count < 2, stddev <- global_stddev
};

ItemStats item_stats(const RatingMatrix& matrix, int item);

// Precomputed per-item stats for samplers that touch many items.
class ItemStatsTable {
public:
    explicit ItemStatsTable(const RatingMatrix& matrix);
    const ItemStats& of(int item) const { return stats_.at(item); }
    double global_mean() const { return global_mean_; }
    double global_stddev() const { return global_stddev_; }

private:
    std::vector<ItemStats> stats_;
    double global_mean_ = 0.0;
    double global_stddev_ = 0.0;
};

}  // namespace unattack
