#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unattack/baseline_attacks.hpp"
#include "unattack/knn.hpp"
#include "unattack/rating_matrix.hpp"

namespace unattack {

enum class TargetCategory { random_items, cold_start, warm_start };

std::string to_string(TargetCategory category);
TargetCategory target_category_from_string(const std::string& name);

struct TargetItemSet {
    TargetCategory category = TargetCategory::random_items;
    std::vector<int> items;
    int min_raters_cold = 5;
    double cold_hr_threshold = 0.001;
    double warm_hr_threshold = 0.1;
    bool shortfall_warning = false;  // fewer qualifying items than requested
};

struct HitRatioReport {
    struct PerItem {
        int item = 0;
        double hit_ratio = 0.0;
        int num_target_users = 0;
    };
    std::vector<PerItem> items;
    double mean = 0.0;

    std::string attack;
    double attack_size = 0.0;  // fraction of normal users
    int num_fakes = 0;
    SimilarityKind similarity = SimilarityKind::cosine;
    int k = 0, top_n = 0;
    std::uint64_t seed = 0;
};

// Top-N lists for users [0, num_normal). Passing num_normal lets fake
// users (appended above the normal range) influence neighbourhoods while
// staying out of the evaluated population.
std::vector<RecommendationList> recommend_all(const RatingMatrix& matrix,
                                              int n, int k,
                                              SimilarityKind kind,
                                              int num_normal = -1);

// Fraction of normal users in U_t^- whose top-N list contains t.
// Throws when U_t^- is empty.
double hit_ratio(const RatingMatrix& matrix, int t, int n, int k,
                 SimilarityKind kind, int num_normal = -1);

// Same, over prebuilt lists.
double hit_ratio_from_lists(const std::vector<RecommendationList>& lists,
                            const RatingMatrix& matrix, int t,
                            int num_normal = -1);

TargetItemSet select_targets(const RatingMatrix& matrix,
                             TargetCategory category, int count, int n, int k,
                             SimilarityKind kind, std::uint64_t seed);

struct TransferSpec {
    int embedding_dim = 20;
    double learning_rate = 0.01;
    double regularization = 0.01;
    int epochs = 50;
};

struct ExperimentSpec {
    std::string dataset_name = "dataset";
    std::string dataset_path;
    std::optional<char> delimiter;
    RatingScale scale;
    double train_frac = 0.8;
    double val_frac = 0.1;
    std::uint64_t split_seed = 1;

    std::vector<std::string> attacks;  // none|random|average|bandwagon|covisitation|unattack
    std::vector<double> attack_sizes;  // fractions of normal users
    TargetCategory target_category = TargetCategory::random_items;
    int target_count = 10;
    std::vector<SimilarityKind> similarities = {SimilarityKind::cosine};

    int k = 30, top_n = 20, fillers_z = 10;
    double lambda = 0.5, eta = 0.01;
    int max_iters = 100;
    int recompute_period = 1;
    int target_user_sample = -1;  // kAllTargetUsers
    std::uint64_t seed = 1;

    std::string fakes_file;  // for attack name "external"
    std::string output_path;
};

struct ReportRow {
    std::string dataset;
    std::string attack;
    TargetCategory target_category = TargetCategory::random_items;
    double attack_size = 0.0;
    SimilarityKind similarity = SimilarityKind::cosine;
    int k = 0, top_n = 0, fillers_z = 0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    double hr_none = 0.0;
    double hr_post = 0.0;
    int num_fakes = 0;
    bool failed = false;
    std::string error;
};

// Generates fake profiles for a named attack. "none" yields an empty
// list; "external" loads spec.fakes_file.
std::vector<FakeUserProfile> generate_attack(const std::string& name,
                                             const RatingMatrix& matrix,
                                             int target_item, int j, int z,
                                             const ExperimentSpec& spec,
                                             std::uint64_t seed);

// Full grid: per (attack x size x similarity), select targets, measure
// pre-attack HitRatio, inject, re-measure. Errors abort the cell only.
std::vector<ReportRow> run_experiment(const ExperimentSpec& spec);
std::vector<ReportRow> run_experiment(const ExperimentSpec& spec,
                                      const RatingMatrix& train);

std::string render_report(const ExperimentSpec& spec,
                          const std::vector<ReportRow>& rows);
std::string render_summary(const std::vector<ReportRow>& rows);

}  // namespace unattack
