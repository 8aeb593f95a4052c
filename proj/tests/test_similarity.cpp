#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "unattack/similarity.hpp"

using namespace unattack;

namespace {

std::vector<double> random_vector(int n, std::mt19937_64& rng,
                                  bool nonnegative = true) {
    std::uniform_real_distribution<double> dist(nonnegative ? 0.0 : -5.0, 5.0);
    std::vector<double> x(n);
    for (double& v : x) v = dist(rng);
    return x;
}

}  // namespace

TEST_CASE("cosine basics") {
    std::vector<double> x{1, 2, 0}, y{2, 1, 0};
    CHECK(cosine(x, y) == doctest::Approx(0.8));
    CHECK(cosine(x, x) == doctest::Approx(1.0));

    std::vector<double> a{1, 0, 0}, b{0, 2, 0};
    CHECK(cosine(a, b) == doctest::Approx(0.0));  // disjoint supports

    std::vector<double> zero{0, 0, 0};
    CHECK(cosine(zero, x) == 0.0);
}

TEST_CASE("euclidean_sim basics") {
    std::vector<double> x{1, 2, 3};
    CHECK(euclidean_sim(x, x) == doctest::Approx(1.0));
    std::vector<double> y{1, 2, 4};  // distance 1
    CHECK(euclidean_sim(x, y) == doctest::Approx(0.5));

    // monotone decreasing in distance
    double prev = 1.0;
    for (double d : {1.0, 2.0, 5.0, 50.0, 500.0}) {
        std::vector<double> far{1 + d, 2, 3};
        const double s = euclidean_sim(x, far);
        CHECK(s < prev);
        prev = s;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("pearson basics") {
    SUBCASE("perfect positive linear relation") {
        std::vector<double> x{1, 2, 3, 0}, y{2, 4, 6, 0};
        CHECK(pearson(x, y) == doctest::Approx(1.0));
    }
    SUBCASE("perfect negative linear relation") {
        std::vector<double> x{1, 2, 3}, y{4, 3, 2};  // y = -x + 5
        CHECK(pearson(x, y) == doctest::Approx(-1.0));
    }
    SUBCASE("constant side returns 0") {
        std::vector<double> x{1, 2, 3}, y{4, 4, 4};
        CHECK(pearson(x, y) == 0.0);
    }
    SUBCASE("fewer than 2 co-rated items returns 0") {
        std::vector<double> x{1, 0, 0}, y{2, 0, 0};
        CHECK(pearson(x, y) == 0.0);
    }
}

TEST_CASE("kernel symmetry and ranges (property)") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 20);
        auto x = random_vector(n, rng);
        auto y = random_vector(n, rng);
        // sparsify a bit
        for (double& v : x)
            if (rng() % 3 == 0) v = 0.0;
        for (double& v : y)
            if (rng() % 3 == 0) v = 0.0;

        const double c = cosine(x, y);
        CHECK(c == doctest::Approx(cosine(y, x)));
        CHECK(c >= -1.0 - 1e-12);
        CHECK(c <= 1.0 + 1e-12);

        const double e = euclidean_sim(x, y);
        CHECK(e == doctest::Approx(euclidean_sim(y, x)));
        CHECK(e > 0.0);
        CHECK(e <= 1.0);

        const double p = pearson(x, y);
        CHECK(p == doctest::Approx(pearson(y, x)));
        CHECK(p >= -1.0 - 1e-12);
        CHECK(p <= 1.0 + 1e-12);

        // cosine scale invariance
        std::vector<double> x2 = x;
        for (double& v : x2) v *= 3.7;
        CHECK(cosine(x2, y) == doctest::Approx(c));
    }
}

TEST_CASE("sparse kernels agree with dense ones") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 16);
        auto x = random_vector(n, rng);
        auto y = random_vector(n, rng);
        for (double& v : x)
            if (rng() % 2 == 0) v = 0.0;
        for (double& v : y)
            if (rng() % 2 == 0) v = 0.0;
        std::vector<std::pair<int, double>> sx, sy;
        double nx = 0, ny = 0;
        for (int i = 0; i < n; ++i) {
            if (x[i] != 0.0) sx.emplace_back(i, x[i]);
            if (y[i] != 0.0) sy.emplace_back(i, y[i]);
            nx += x[i] * x[i];
            ny += y[i] * y[i];
        }
        nx = std::sqrt(nx);
        ny = std::sqrt(ny);
        CHECK(sparse_cosine(sx, nx, sy, ny) == doctest::Approx(cosine(x, y)));
        CHECK(sparse_euclidean_sim(sx, nx, sy, ny) ==
              doctest::Approx(euclidean_sim(x, y)));
        CHECK(sparse_pearson(sx, sy) == doctest::Approx(pearson(x, y)));
    }
}

TEST_CASE("cosine_gradient analytic cases") {
    SUBCASE("stationary at parallel vectors") {
        std::vector<double> x{1, 2, 3};
        const CosineGradient g = cosine_gradient(x, x);
        for (double v : g.grad) CHECK(v == doctest::Approx(0.0));
        CHECK(!g.degenerate);
    }
    SUBCASE("orthonormal basis vectors") {
        std::vector<double> e1{1, 0, 0}, e2{0, 1, 0};
        const CosineGradient g = cosine_gradient(e1, e2);
        CHECK(g.grad[0] == doctest::Approx(1.0));
        CHECK(g.grad[1] == doctest::Approx(0.0));
        CHECK(g.grad[2] == doctest::Approx(0.0));
    }
    SUBCASE("zero norm is flagged") {
        std::vector<double> zero{0, 0}, x{1, 2};
        CHECK(cosine_gradient(zero, x).degenerate);
        CHECK(cosine_gradient(x, zero).degenerate);
    }
}

TEST_CASE("cosine_gradient matches finite differences (property)") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 5 + static_cast<int>(rng() % 46);
        auto x_u = random_vector(n, rng);
        auto x_f = random_vector(n, rng);
        // keep norms bounded away from zero
        x_u[0] += 1.0;
        x_f[0] += 1.0;

        const CosineGradient g = cosine_gradient(x_u, x_f);
        for (int i = 0; i < n; ++i) {
            const double h = 1e-6 * (1.0 + std::abs(x_f[i]));
            auto plus = x_f, minus = x_f;
            plus[i] += h;
            minus[i] -= h;
            const double fd = (cosine(x_u, plus) - cosine(x_u, minus)) / (2 * h);
            CHECK(g.grad[i] ==
                  doctest::Approx(fd).epsilon(1e-5).scale(
                      std::max(1.0, std::abs(fd))));
        }
    }
}
