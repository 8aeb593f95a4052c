#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "unattack/baseline_attacks.hpp"
#include "unattack/knn.hpp"
#include "unattack/rating_matrix.hpp"

namespace unattack {

inline constexpr int kAllTargetUsers = -1;

struct AttackConfig {
    int target_item = 0;
    double lambda = 0.5;  // trade-off between the neighbourhood/ranking terms
    int k = 30;           // neighbour count
    int top_n = 20;       // recommendation list length
    int fillers_z = 1;
    int num_fakes_j = 0;
    double eta = 0.01;
    int max_iters = 100;
    int target_user_sample = kAllTargetUsers;  // B, or all of U_t^-
    int recompute_period = 1;                  // E
    std::uint64_t seed = 0;

    void validate() const;
};

// Relaxed fake-user vector: reals in [0, max_score], coordinate
// target_item pinned to max_score.
struct ContinuousProfile {
    std::vector<double> values;
    int target_item = 0;
};

struct LossTerms {
    struct PerUser {
        int user = 0;
        double loss1 = 0.0;  // neighbourhood term
        double loss2 = 0.0;  // ranking term
    };
    std::vector<PerUser> users;
    double total = 0.0;
};

// Neighbourhoods and recommendation lists frozen for gradient evaluation.
// The loss is smooth in x_f given fixed structures; they are rebuilt
// every recompute_period iterations during optimization.
struct AttackStructures {
    struct PerUser {
        int user = 0;
        std::vector<std::pair<int, double>> neighbors;  // excludes the fake
        bool fake_in_neighbors = false;
        std::vector<int> rec_items;  // L_u under the augmented matrix
    };
    std::vector<PerUser> users;     // sampled target users from U_t^-
    std::vector<char> fake_support; // per item: x_f[i] > 0 at freeze time
};

double sigmoid(double x);

// Box projection onto [0, max_score]^n with coordinate t re-pinned.
void project(ContinuousProfile& profile, const RatingScale& scale);

std::vector<int> target_users(const RatingMatrix& matrix, int t,
                              int sample, std::uint64_t seed);

AttackStructures build_structures(const RatingMatrix& matrix,
                                  const ContinuousProfile& x_f,
                                  const AttackConfig& cfg,
                                  const std::vector<int>& users);

std::pair<double, LossTerms> loss_given(const RatingMatrix& matrix,
                                        const ContinuousProfile& x_f,
                                        const AttackConfig& cfg,
                                        const AttackStructures& structs);

// Exact gradient of loss_given at fixed structures; coordinate
// target_item is forced to 0 (pinned).
std::vector<double> gradient_given(const RatingMatrix& matrix,
                                   const ContinuousProfile& x_f,
                                   const AttackConfig& cfg,
                                   const AttackStructures& structs);

std::pair<double, LossTerms> attack_loss(const RatingMatrix& matrix,
                                         const ContinuousProfile& x_f,
                                         const AttackConfig& cfg);

std::vector<double> attack_gradient(const RatingMatrix& matrix,
                                    const ContinuousProfile& x_f,
                                    const AttackConfig& cfg);

ContinuousProfile initial_profile(const RatingMatrix& matrix, int t,
                                  std::uint64_t seed);

// Projected gradient descent on the relaxed profile; returns the
// best-loss iterate seen.
ContinuousProfile optimize_profile(const RatingMatrix& matrix,
                                   const AttackConfig& cfg);

// Top-z continuous values become fillers; target pinned to max_score;
// filler scores drawn from each item's rating distribution.
FakeUserProfile discretize(const ContinuousProfile& x_f,
                           const RatingMatrix& matrix, int t, int z,
                           std::uint64_t seed);

// Sequential generation: each fake user is optimized against the matrix
// already containing the previous ones. The observer (when set) is called
// after each injection with the working matrix.
using UnattackObserver =
    std::function<void(int fake_index, const RatingMatrix& working)>;

std::vector<FakeUserProfile> unattack(const RatingMatrix& matrix,
                                      const AttackConfig& cfg,
                                      const UnattackObserver& observer = {});

}  // namespace unattack
