#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "test_helpers.hpp"
#include "unattack/io.hpp"
#include "unattack/rating_matrix.hpp"

using namespace unattack;
using test_helpers::make_matrix;
using test_helpers::random_matrix;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content) {
        path = (std::filesystem::temp_directory_path() /
                ("unattack_test_" + std::to_string(rand()) + ".tsv"))
                   .string();
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("rating scale validation and rounding") {
    RatingScale scale{1.0, 5.0, 1.0};
    scale.validate();
    CHECK(scale.num_levels() == 5);
    CHECK(scale.is_legal(3.0));
    CHECK(!scale.is_legal(3.5));
    CHECK(!scale.is_legal(0.0));
    CHECK(scale.round_clip(3.4) == 3.0);
    CHECK(scale.round_clip(7.0) == 5.0);
    CHECK(scale.round_clip(-2.0) == 1.0);

    RatingScale half{0.5, 4.0, 0.5};
    half.validate();
    CHECK(half.num_levels() == 8);
    CHECK(half.is_legal(2.5));

    CHECK_THROWS_AS((RatingScale{5.0, 1.0, 1.0}).validate(), ValidationError);
    CHECK_THROWS_AS((RatingScale{1.0, 5.0, 0.0}).validate(), ValidationError);
    CHECK_THROWS_AS((RatingScale{1.0, 5.0, 3.0}).validate(), ValidationError);
}

TEST_CASE("load_ratings parses a toy file") {
    TempFile file("0\t0\t4\n0\t1\t3\n1\t1\t5\n");
    LoadOptions opts;
    const LoadResult r = load_ratings(file.path, opts);
    CHECK(r.matrix.num_users() == 2);
    CHECK(r.matrix.num_items() == 2);
    CHECK(r.matrix.num_entries() == 3);
    CHECK(r.matrix.rating(0, 0) == 4.0);
    CHECK(r.matrix.rating(1, 1) == 5.0);
    CHECK(r.duplicate_count == 0);
}

TEST_CASE("load_ratings skips comments and ignores extra columns") {
    TempFile file("# header\n10\t20\t4\t881250949\n11\t20\t2\textra\tmore\n");
    LoadOptions opts;
    const LoadResult r = load_ratings(file.path, opts);
    CHECK(r.matrix.num_entries() == 2);
    CHECK(r.user_ids[0] == "10");
    CHECK(r.item_ids[0] == "20");
}

TEST_CASE("load_ratings error paths") {
    LoadOptions opts;
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_ratings("/nonexistent/file", opts), ParseError);
    }
    SUBCASE("empty file") {
        TempFile file("");
        CHECK_THROWS_WITH_AS(load_ratings(file.path, opts),
                             doctest::Contains("no ratings"), ParseError);
    }
    SUBCASE("malformed line reports line number") {
        TempFile file("0\t0\t4\n0\t1\n");
        CHECK_THROWS_WITH_AS(load_ratings(file.path, opts),
                             doctest::Contains("line 2"), ParseError);
    }
    SUBCASE("bad score token") {
        TempFile file("0\t0\tfour\n");
        CHECK_THROWS_AS(load_ratings(file.path, opts), ParseError);
    }
    SUBCASE("off-scale score") {
        TempFile file("0\t0\t9\n");
        CHECK_THROWS_AS(load_ratings(file.path, opts), ValidationError);
    }
    SUBCASE("duplicate keeps last and counts") {
        TempFile file("0\t0\t4\n0\t0\t2\n");
        const LoadResult r = load_ratings(file.path, opts);
        CHECK(r.duplicate_count == 1);
        CHECK(r.matrix.num_entries() == 1);
        CHECK(r.matrix.rating(0, 0) == 2.0);
    }
}

TEST_CASE("canonical round-trip preserves the entry set") {
    const RatingMatrix m = random_matrix(17, 23, 0.3, 42);
    const std::string path =
        (std::filesystem::temp_directory_path() / "unattack_roundtrip.tsv")
            .string();
    save_ratings(m, path);
    LoadOptions opts;
    const LoadResult r = load_ratings(path, opts);
    std::remove(path.c_str());

    auto key = [](const Rating& e) {
        return std::tuple<int, int, double>(e.user, e.item, e.score);
    };
    std::set<std::tuple<int, int, double>> a, b;
    for (const Rating& e : m.entries()) a.insert(key(e));
    for (const Rating& e : r.matrix.entries()) {
        // reloaded ids are dense re-indexes of the written dense ids
        b.insert({std::stoi(r.user_ids[e.user]), std::stoi(r.item_ids[e.item]),
                  e.score});
    }
    CHECK(a == b);
}

TEST_CASE("sparsity") {
    SUBCASE("2x2 with 1 entry") {
        const RatingMatrix m = make_matrix(2, 2, {{0, 0, 3}});
        CHECK(sparsity(m) == doctest::Approx(0.75));
    }
    SUBCASE("fully dense") {
        const RatingMatrix m =
            make_matrix(2, 2, {{0, 0, 3}, {0, 1, 3}, {1, 0, 3}, {1, 1, 3}});
        CHECK(sparsity(m) == doctest::Approx(0.0));
    }
    SUBCASE("FilmTrust-shaped counts give 0.9886 to 4 d.p.") {
        // 1508 users, 2071 items, 35497 ratings
        std::vector<Rating> entries;
        entries.reserve(35497);
        int u = 0, i = 0;
        for (int k = 0; k < 35497; ++k) {
            entries.push_back({u, i, 4.0});
            if (++i == 2071) {
                i = 0;
                ++u;
            }
        }
        const RatingMatrix m(1508, 2071, entries, {0.5, 4.0, 0.5});
        CHECK(std::round(sparsity(m) * 1e4) / 1e4 == doctest::Approx(0.9886));
    }
}

TEST_CASE("split") {
    const RatingMatrix m = random_matrix(10, 20, 0.5, 7);

    SUBCASE("100-entry counts follow the floor-then-remainder rule") {
        std::vector<Rating> entries;
        int u = 0, i = 0;
        for (int k = 0; k < 100; ++k) {
            entries.push_back({u, i, 3.0});
            if (++i == 20) {
                i = 0;
                ++u;
            }
        }
        const RatingMatrix hundred(5, 20, entries, test_helpers::five_star());
        const SplitResult parts = split(hundred, 0.8, 0.1, 3);
        CHECK(parts.train.num_entries() == 72);
        CHECK(parts.validation.num_entries() == 8);
        CHECK(parts.test.num_entries() == 20);
    }

    SUBCASE("same seed gives identical partition") {
        const SplitResult a = split(m, 0.8, 0.1, 5);
        const SplitResult b = split(m, 0.8, 0.1, 5);
        auto flat = [](const RatingMatrix& mm) {
            std::vector<std::tuple<int, int, double>> v;
            for (const Rating& e : mm.entries()) v.emplace_back(e.user, e.item, e.score);
            return v;
        };
        CHECK(flat(a.train) == flat(b.train));
        CHECK(flat(a.validation) == flat(b.validation));
        CHECK(flat(a.test) == flat(b.test));
    }

    SUBCASE("adjacent seeds differ") {
        const RatingMatrix big = random_matrix(100, 100, 0.2, 11);
        const SplitResult a = split(big, 0.8, 0.1, 5);
        const SplitResult b = split(big, 0.8, 0.1, 6);
        CHECK(a.train.entries().size() == b.train.entries().size());
        bool differ = false;
        auto ea = a.train.entries(), eb = b.train.entries();
        for (std::size_t k = 0; k < ea.size() && !differ; ++k)
            differ = ea[k].user != eb[k].user || ea[k].item != eb[k].item;
        CHECK(differ);
    }

    SUBCASE("partition property: nothing lost, nothing duplicated") {
        for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
            const SplitResult parts = split(m, 0.7, 0.2, seed);
            std::set<std::pair<int, int>> seen;
            std::int64_t total = 0;
            for (const RatingMatrix* part :
                 {&parts.train, &parts.validation, &parts.test}) {
                for (const Rating& e : part->entries()) {
                    CHECK(seen.insert({e.user, e.item}).second);
                    CHECK(m.rating(e.user, e.item) == e.score);
                }
                total += part->num_entries();
            }
            CHECK(total == m.num_entries());
        }
    }
}

TEST_CASE("item_stats") {
    SUBCASE("constant ratings") {
        const RatingMatrix m =
            make_matrix(3, 2, {{0, 0, 4}, {1, 0, 4}, {2, 0, 4}, {0, 1, 2}});
        const ItemStats s = item_stats(m, 0);
        CHECK(s.mean == doctest::Approx(4.0));
        CHECK(s.stddev == doctest::Approx(0.0));
        CHECK(!s.fallback_std);
    }
    SUBCASE("population stddev") {
        const RatingMatrix m = make_matrix(2, 1, {{0, 0, 2}, {1, 0, 4}});
        const ItemStats s = item_stats(m, 0);
        CHECK(s.mean == doctest::Approx(3.0));
        CHECK(s.stddev == doctest::Approx(1.0));
    }
    SUBCASE("unrated item falls back to global stats") {
        const RatingMatrix m = make_matrix(2, 2, {{0, 0, 2}, {1, 0, 4}});
        const ItemStats s = item_stats(m, 1);
        CHECK(s.count == 0);
        CHECK(s.fallback_mean);
        CHECK(s.fallback_std);
        CHECK(s.mean == doctest::Approx(3.0));
        CHECK(s.stddev == doctest::Approx(1.0));
    }
    SUBCASE("single rater falls back to global stddev only") {
        const RatingMatrix m =
            make_matrix(2, 2, {{0, 0, 2}, {1, 0, 4}, {0, 1, 5}});
        const ItemStats s = item_stats(m, 1);
        CHECK(s.count == 1);
        CHECK(s.mean == doctest::Approx(5.0));
        CHECK(!s.fallback_mean);
        CHECK(s.fallback_std);
    }
}

TEST_CASE("matrix invariants") {
    CHECK_THROWS_AS(make_matrix(2, 2, {{0, 0, 3}, {0, 0, 4}}), ValidationError);
    CHECK_THROWS_AS(make_matrix(2, 2, {{0, 5, 3}}), ValidationError);
    CHECK_THROWS_AS(make_matrix(2, 2, {{0, 0, 3.5}}), ValidationError);

    RatingMatrix m = make_matrix(2, 3, {{0, 0, 3}, {1, 2, 4}});
    const int id = m.add_user({{1, 5.0}});
    CHECK(id == 2);
    CHECK(m.num_users() == 3);
    CHECK(m.rating(2, 1) == 5.0);
    CHECK(m.item_raters(1).size() == 1);
    CHECK(m.row_norm(2) == doctest::Approx(5.0));
}
