#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "unattack/rating_matrix.hpp"

namespace unattack {

// One fake user's profile: target item at max_score plus at most z rated
// filler items, all on legal scale levels.
struct FakeUserProfile {
    std::map<int, double> ratings;  // includes the target item
    int target_item = 0;
    std::vector<int> filler_items;

    // Throws ValidationError when the Eq.-3-style constraints are violated.
    void check(const RatingScale& scale, int z) const;
};

std::vector<FakeUserProfile> random_attack(const RatingMatrix& matrix, int t,
                                           int j, int z, std::uint64_t seed);

std::vector<FakeUserProfile> average_attack(const RatingMatrix& matrix, int t,
                                            int j, int z, std::uint64_t seed);

// ceil(0.2 z) globally popular fillers (highest mean rating among items
// with >= min_popular_raters raters), remainder uniform random; scores
// drawn from the global rating distribution.
std::vector<FakeUserProfile> bandwagon_attack(const RatingMatrix& matrix,
                                              int t, int j, int z,
                                              std::uint64_t seed,
                                              int min_popular_raters = 5);

// Fillers sampled without replacement proportionally to the co-rating
// count with t; zero co-count items get floor_weight. Scores follow the
// per-item distribution, as in the average attack.
std::vector<FakeUserProfile> covisitation_attack(const RatingMatrix& matrix,
                                                 int t, int j, int z,
                                                 std::uint64_t seed,
                                                 double floor_weight = 1.0);

// Appends the profiles to the matrix as new users; returns first fake id.
int inject(RatingMatrix& matrix, const std::vector<FakeUserProfile>& profiles);

}  // namespace unattack
