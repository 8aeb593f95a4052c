#include "unattack/baseline_attacks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace unattack {

void FakeUserProfile::check(const RatingScale& scale, int z) const {
    auto it = ratings.find(target_item);
    if (it == ratings.end() || it->second != scale.max_score)
        throw ValidationError("fake profile: target item must be rated max_score");
    if (static_cast<int>(filler_items.size()) > z)
        throw ValidationError("fake profile: more than z filler items");
    if (ratings.size() != filler_items.size() + 1)
        throw ValidationError("fake profile: ratings must be fillers + target");
    for (int i : filler_items) {
        if (i == target_item)
            throw ValidationError("fake profile: target listed as filler");
        if (!ratings.count(i))
            throw ValidationError("fake profile: unrated filler item");
    }
    for (const auto& [i, score] : ratings)
        if (!scale.is_legal(score))
            throw ValidationError("fake profile: off-scale score");
}

namespace {

void require_budget(const RatingMatrix& matrix, int t, int z) {
    if (t < 0 || t >= matrix.num_items())
        throw ConfigError("attack: target item out of range");
    if (z < 0 || z > matrix.num_items() - 1)
        throw ConfigError("attack: filler budget z must be in [0, n-1]");
}

std::vector<int> sample_uniform(std::vector<int> pool, int count,
                                std::mt19937_64& rng) {
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min<std::size_t>(count, pool.size()));
    return pool;
}

double draw_score(double mean, double stddev, const RatingScale& scale,
                  std::mt19937_64& rng) {
    std::normal_distribution<double> dist(mean, stddev);
    const double raw = stddev > 0.0 ? dist(rng) : mean;
    return scale.round_clip(raw);
}

// Shared skeleton: per fake user, pick fillers then score them.
template <typename PickFillers, typename ScoreItem>
std::vector<FakeUserProfile> generate(const RatingMatrix& matrix, int t,
                                      int j, int z, std::uint64_t seed,
                                      PickFillers pick, ScoreItem score_item) {
    require_budget(matrix, t, z);
    if (j < 0) throw ConfigError("attack: fake-user budget j must be >= 0");
    std::mt19937_64 rng(seed);
    std::vector<FakeUserProfile> out;
    out.reserve(j);
    for (int f = 0; f < j; ++f) {
        FakeUserProfile p;
        p.target_item = t;
        p.ratings[t] = matrix.scale().max_score;
        p.filler_items = pick(rng);
        std::sort(p.filler_items.begin(), p.filler_items.end());
        for (int i : p.filler_items) p.ratings[i] = score_item(i, rng);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<int> non_target_items(const RatingMatrix& matrix, int t) {
    std::vector<int> items;
    items.reserve(matrix.num_items() - 1);
    for (int i = 0; i < matrix.num_items(); ++i)
        if (i != t) items.push_back(i);
    return items;
}

}  // namespace

std::vector<FakeUserProfile> random_attack(const RatingMatrix& matrix, int t,
                                           int j, int z, std::uint64_t seed) {
    const ItemStatsTable stats(matrix);
    const auto pool = non_target_items(matrix, t);
    return generate(
        matrix, t, j, z, seed,
        [&](std::mt19937_64& rng) { return sample_uniform(pool, z, rng); },
        [&](int, std::mt19937_64& rng) {
            return draw_score(stats.global_mean(), stats.global_stddev(),
                              matrix.scale(), rng);
        });
}

std::vector<FakeUserProfile> average_attack(const RatingMatrix& matrix, int t,
                                            int j, int z, std::uint64_t seed) {
    const ItemStatsTable stats(matrix);
    const auto pool = non_target_items(matrix, t);
    return generate(
        matrix, t, j, z, seed,
        [&](std::mt19937_64& rng) { return sample_uniform(pool, z, rng); },
        [&](int i, std::mt19937_64& rng) {
            const ItemStats& s = stats.of(i);
            return draw_score(s.mean, s.stddev, matrix.scale(), rng);
        });
}

std::vector<FakeUserProfile> bandwagon_attack(const RatingMatrix& matrix,
                                              int t, int j, int z,
                                              std::uint64_t seed,
                                              int min_popular_raters) {
    const ItemStatsTable stats(matrix);
    require_budget(matrix, t, z);

    // popular = top ceil(0.2 z) by mean rating among qualified items
    const int want_popular = static_cast<int>(std::ceil(0.2 * z));
    std::vector<std::pair<int, double>> qualified;
    for (int i = 0; i < matrix.num_items(); ++i) {
        if (i == t) continue;
        const ItemStats& s = stats.of(i);
        if (s.count >= min_popular_raters) qualified.emplace_back(i, s.mean);
    }
    std::sort(qualified.begin(), qualified.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
              });
    std::vector<int> popular;
    for (const auto& [i, mean] : qualified) {
        if (static_cast<int>(popular.size()) == want_popular) break;
        popular.push_back(i);
    }

    std::vector<int> rest;
    for (int i = 0; i < matrix.num_items(); ++i)
        if (i != t && std::find(popular.begin(), popular.end(), i) == popular.end())
            rest.push_back(i);

    return generate(
        matrix, t, j, z, seed,
        [&](std::mt19937_64& rng) {
            std::vector<int> fillers = popular;
            const int remaining = z - static_cast<int>(fillers.size());
            auto random_part = sample_uniform(rest, remaining, rng);
            fillers.insert(fillers.end(), random_part.begin(),
                           random_part.end());
            return fillers;
        },
        [&](int, std::mt19937_64& rng) {
            return draw_score(stats.global_mean(), stats.global_stddev(),
                              matrix.scale(), rng);
        });
}

std::vector<FakeUserProfile> covisitation_attack(const RatingMatrix& matrix,
                                                 int t, int j, int z,
                                                 std::uint64_t seed,
                                                 double floor_weight) {
    const ItemStatsTable stats(matrix);
    require_budget(matrix, t, z);

    // co-rating counts with the target
    std::vector<double> weight(matrix.num_items(), 0.0);
    for (const auto& [u, xt] : matrix.item_raters(t))
        for (const auto& [i, x] : matrix.user_ratings(u))
            if (i != t) weight[i] += 1.0;
    for (int i = 0; i < matrix.num_items(); ++i)
        if (i != t && weight[i] == 0.0) weight[i] = floor_weight;
    weight[t] = 0.0;

    return generate(
        matrix, t, j, z, seed,
        [&](std::mt19937_64& rng) {
            // weighted sampling without replacement
            std::vector<double> w = weight;
            std::vector<int> fillers;
            fillers.reserve(z);
            for (int k = 0; k < z; ++k) {
                if (std::accumulate(w.begin(), w.end(), 0.0) <= 0.0) break;
                std::discrete_distribution<int> dist(w.begin(), w.end());
                const int pick = dist(rng);
                fillers.push_back(pick);
                w[pick] = 0.0;
            }
            return fillers;
        },
        [&](int i, std::mt19937_64& rng) {
            const ItemStats& s = stats.of(i);
            return draw_score(s.mean, s.stddev, matrix.scale(), rng);
        });
}

int inject(RatingMatrix& matrix,
           const std::vector<FakeUserProfile>& profiles) {
    const int first = matrix.num_users();
    for (const FakeUserProfile& p : profiles) matrix.add_user(p.ratings);
    return first;
}

}  // namespace unattack
