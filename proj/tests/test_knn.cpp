#include <doctest.h>

#include <algorithm>

#include "test_helpers.hpp"
#include "unattack/knn.hpp"

using namespace unattack;
using test_helpers::make_matrix;
using test_helpers::random_matrix;

namespace {

// Brute-force oracle: dense similarity of u to every other user, full sort.
std::vector<std::pair<int, double>> oracle_neighbors(const RatingMatrix& m,
                                                     int u, int k,
                                                     SimilarityKind kind) {
    const auto xu = m.dense_row(u);
    std::vector<std::pair<int, double>> sims;
    for (int v = 0; v < m.num_users(); ++v) {
        if (v == u) continue;
        const auto xv = m.dense_row(v);
        double s = 0;
        switch (kind) {
            case SimilarityKind::cosine: s = cosine(xu, xv); break;
            case SimilarityKind::euclidean: s = euclidean_sim(xu, xv); break;
            case SimilarityKind::pearson: s = pearson(xu, xv); break;
        }
        sims.emplace_back(v, s);
    }
    std::stable_sort(sims.begin(), sims.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (static_cast<int>(sims.size()) > k) sims.resize(k);
    return sims;
}

}  // namespace

TEST_CASE("top_k_neighbors forced and identity cases") {
    SUBCASE("two users: the other one is the only neighbor") {
        const RatingMatrix m = make_matrix(2, 3, {{0, 0, 5}, {1, 2, 1}});
        const NeighborList nb =
            top_k_neighbors(m, 0, 4, SimilarityKind::cosine);
        REQUIRE(nb.neighbors.size() == 1);
        CHECK(nb.neighbors[0].first == 1);
    }
    SUBCASE("duplicated row is the rank-1 cosine neighbor with s=1") {
        const RatingMatrix m = make_matrix(
            3, 3, {{0, 0, 4}, {0, 1, 2}, {1, 0, 4}, {1, 1, 2}, {2, 2, 5}});
        const NeighborList nb =
            top_k_neighbors(m, 0, 2, SimilarityKind::cosine);
        CHECK(nb.neighbors[0].first == 1);
        CHECK(nb.neighbors[0].second == doctest::Approx(1.0));
    }
}

TEST_CASE("top_k_neighbors equals the brute-force oracle") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const RatingMatrix m = random_matrix(10, 8, 0.45, seed);
        for (SimilarityKind kind :
             {SimilarityKind::cosine, SimilarityKind::euclidean,
              SimilarityKind::pearson}) {
            for (int u = 0; u < m.num_users(); ++u) {
                const auto expected = oracle_neighbors(m, u, 4, kind);
                const NeighborList nb = top_k_neighbors(m, u, 4, kind);
                REQUIRE(nb.neighbors.size() == expected.size());
                for (std::size_t q = 0; q < expected.size(); ++q) {
                    CHECK(nb.neighbors[q].first == expected[q].first);
                    CHECK(nb.neighbors[q].second ==
                          doctest::Approx(expected[q].second));
                }
            }
        }
    }
}

TEST_CASE("predict is the unnormalized weighted sum") {
    const RatingMatrix m =
        make_matrix(3, 2, {{1, 0, 4}, {2, 0, 2}, {1, 1, 1}});
    SUBCASE("single neighbor") {
        NeighborList nb{0, {{1, 0.5}}};
        CHECK(predict(m, 0, 0, nb) == doctest::Approx(2.0));
    }
    SUBCASE("no neighbor rated the item") {
        NeighborList nb{0, {{2, 0.9}}};
        CHECK(predict(m, 0, 1, nb) == 0.0);
    }
    SUBCASE("two neighbors") {
        NeighborList nb{0, {{1, 0.5}, {2, 0.25}}};
        CHECK(predict(m, 0, 0, nb) == doctest::Approx(2.5));
    }
    SUBCASE("linear in neighbor ratings") {
        const RatingMatrix doubled =
            make_matrix(3, 2, {{1, 0, 2}, {2, 0, 1}, {1, 1, 1}});
        NeighborList nb{0, {{1, 0.5}, {2, 0.25}}};
        CHECK(predict(m, 0, 0, nb) ==
              doctest::Approx(2.0 * predict(doubled, 0, 0, nb)));
    }
}

TEST_CASE("recommend") {
    SUBCASE("user who rated everything gets an empty list") {
        const RatingMatrix m =
            make_matrix(2, 2, {{0, 0, 3}, {0, 1, 4}, {1, 0, 5}});
        const RecommendationList l =
            recommend(m, 0, 5, 1, SimilarityKind::cosine);
        CHECK(l.items.empty());
    }
    SUBCASE("N larger than unrated count returns all unrated, ranked") {
        const RatingMatrix m =
            make_matrix(2, 4, {{0, 0, 3}, {1, 1, 5}, {1, 2, 3}});
        const RecommendationList l =
            recommend(m, 0, 10, 1, SimilarityKind::cosine);
        CHECK(l.items.size() == 3);  // items 1,2,3 unrated by user 0
        for (std::size_t q = 1; q < l.items.size(); ++q)
            CHECK(l.items[q - 1].second >= l.items[q].second);
    }
    SUBCASE("matches exhaustive predict-and-sort oracle") {
        const RatingMatrix m = random_matrix(8, 6, 0.5, 77);
        for (int u = 0; u < m.num_users(); ++u) {
            const NeighborList nb =
                top_k_neighbors(m, u, 3, SimilarityKind::cosine);
            std::vector<std::pair<int, double>> scored;
            for (int i = 0; i < m.num_items(); ++i)
                if (!m.has_rating(u, i))
                    scored.emplace_back(i, predict(m, u, i, nb));
            std::stable_sort(scored.begin(), scored.end(),
                             [](const auto& a, const auto& b) {
                                 if (a.second != b.second)
                                     return a.second > b.second;
                                 return a.first < b.first;
                             });
            if (scored.size() > 4) scored.resize(4);
            const RecommendationList l =
                recommend(m, u, 4, 3, SimilarityKind::cosine);
            REQUIRE(l.items.size() == scored.size());
            for (std::size_t q = 0; q < scored.size(); ++q) {
                CHECK(l.items[q].first == scored[q].first);
                CHECK(l.items[q].second == doctest::Approx(scored[q].second));
            }
        }
    }
    SUBCASE("never recommends already-rated items") {
        const RatingMatrix m = random_matrix(9, 7, 0.6, 13);
        for (int u = 0; u < m.num_users(); ++u) {
            const RecommendationList l =
                recommend(m, u, 5, 3, SimilarityKind::cosine);
            for (const auto& [i, p] : l.items) CHECK(!m.has_rating(u, i));
        }
    }
}

TEST_CASE("zero-similarity users do not change recommendations") {
    const RatingMatrix base = make_matrix(
        3, 4, {{0, 0, 5}, {1, 0, 4}, {1, 1, 3}, {2, 1, 2}, {2, 2, 4}});
    RatingMatrix extended = base;
    extended.add_user({{3, 1.0}});  // rates only item 3, disjoint from user 0

    const RecommendationList a = recommend(base, 0, 2, 2, SimilarityKind::cosine);
    const RecommendationList b =
        recommend(extended, 0, 2, 2, SimilarityKind::cosine);
    REQUIRE(a.items.size() == b.items.size());
    for (std::size_t q = 0; q < a.items.size(); ++q) {
        CHECK(a.items[q].first == b.items[q].first);
        CHECK(a.items[q].second == doctest::Approx(b.items[q].second));
    }
}

TEST_CASE("determinism: identical inputs, identical lists") {
    const RatingMatrix m = random_matrix(12, 9, 0.4, 21);
    for (int u = 0; u < m.num_users(); ++u) {
        const RecommendationList a =
            recommend(m, u, 4, 5, SimilarityKind::pearson);
        const RecommendationList b =
            recommend(m, u, 4, 5, SimilarityKind::pearson);
        CHECK(a.items == b.items);
    }
}
