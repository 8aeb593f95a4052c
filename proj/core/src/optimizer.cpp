#include "unattack/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "unattack/similarity.hpp"

namespace unattack {

void AttackConfig::validate() const {
    if (lambda < 0.0 || lambda > 1.0)
        throw ConfigError("attack config: lambda must be in [0,1]");
    if (k < 1) throw ConfigError("attack config: K must be >= 1");
    if (top_n < 1) throw ConfigError("attack config: N must be >= 1");
    if (fillers_z < 1) throw ConfigError("attack config: z must be >= 1");
    if (num_fakes_j < 0) throw ConfigError("attack config: j must be >= 0");
    if (!(eta > 0.0)) throw ConfigError("attack config: eta must be > 0");
    if (max_iters < 1) throw ConfigError("attack config: max_iters must be >= 1");
    if (recompute_period < 1)
        throw ConfigError("attack config: recompute period must be >= 1");
    if (target_user_sample != kAllTargetUsers && target_user_sample < 1)
        throw ConfigError("attack config: target user sample must be >= 1 or ALL");
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace {

double sigmoid_prime(double x) {
    const double s = sigmoid(x);
    return s * (1.0 - s);
}

double dense_norm(const std::vector<double>& x) {
    double sq = 0.0;
    for (double v : x) sq += v * v;
    return std::sqrt(sq);
}

// dot of a sparse user row with the dense fake vector
double row_dot(std::span<const std::pair<int, double>> row,
               const std::vector<double>& x) {
    double s = 0.0;
    for (const auto& [i, v] : row) s += v * x[i];
    return s;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t h = seed ^ (salt + 0x9e3779b97f4a7c15ULL);
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return h;
}

// Per-target-user top-K candidate neighbours among the matrix's real
// users. These do not depend on x_f, so they are computed once per
// optimize_profile call and merged with the provisional fake each rebuild.
struct Workspace {
    std::vector<int> users;  // sampled target users
    std::vector<std::vector<std::pair<int, double>>> top_normals;  // per user
};

Workspace build_workspace(const RatingMatrix& matrix, const AttackConfig& cfg,
                          const std::vector<int>& users) {
    Workspace ws;
    ws.users = users;
    ws.top_normals.reserve(users.size());
    for (int u : users) {
        NeighborList nb = top_k_neighbors(matrix, u, cfg.k, SimilarityKind::cosine);
        ws.top_normals.push_back(std::move(nb.neighbors));
    }
    return ws;
}

AttackStructures structures_from_workspace(const RatingMatrix& matrix,
                                           const Workspace& ws,
                                           const ContinuousProfile& x_f,
                                           const AttackConfig& cfg) {
    const double norm_f = dense_norm(x_f.values);
    if (norm_f == 0.0)
        throw ValidationError("attack: degenerate (all-zero) fake profile");

    AttackStructures st;
    st.fake_support.resize(x_f.values.size());
    for (std::size_t i = 0; i < x_f.values.size(); ++i)
        st.fake_support[i] = x_f.values[i] > 0.0 ? 1 : 0;

    st.users.reserve(ws.users.size());
    for (std::size_t k = 0; k < ws.users.size(); ++k) {
        const int u = ws.users[k];
        AttackStructures::PerUser pu;
        pu.user = u;
        const double norm_u = matrix.row_norm(u);
        const double s_uf =
            norm_u == 0.0
                ? 0.0
                : row_dot(matrix.user_ratings(u), x_f.values) / (norm_u * norm_f);

        // merge the provisional fake into the normal top-K; the fake has
        // the largest id, so it loses similarity ties
        pu.neighbors = ws.top_normals[k];
        const bool below_capacity =
            static_cast<int>(pu.neighbors.size()) < cfg.k;
        if (below_capacity) {
            pu.fake_in_neighbors = true;
        } else if (s_uf > pu.neighbors.back().second) {
            pu.fake_in_neighbors = true;
            pu.neighbors.pop_back();
        }

        // L_u on the augmented matrix
        std::vector<double> score(matrix.num_items(), 0.0);
        for (const auto& [v, s] : pu.neighbors)
            for (const auto& [i, x] : matrix.user_ratings(v)) score[i] += s * x;
        if (pu.fake_in_neighbors)
            for (std::size_t i = 0; i < x_f.values.size(); ++i)
                if (x_f.values[i] > 0.0) score[i] += s_uf * x_f.values[i];

        std::vector<std::pair<int, double>> scored;
        scored.reserve(matrix.num_items());
        for (int i = 0; i < matrix.num_items(); ++i)
            if (!matrix.has_rating(u, i)) scored.emplace_back(i, score[i]);
        const std::size_t nn = std::min<std::size_t>(cfg.top_n, scored.size());
        std::partial_sort(scored.begin(), scored.begin() + nn, scored.end(),
                          [](const auto& a, const auto& b) {
                              if (a.second != b.second) return a.second > b.second;
                              return a.first < b.first;
                          });
        pu.rec_items.reserve(nn);
        for (std::size_t q = 0; q < nn; ++q)
            pu.rec_items.push_back(scored[q].first);

        st.users.push_back(std::move(pu));
    }
    return st;
}

}  // namespace

void project(ContinuousProfile& profile, const RatingScale& scale) {
    for (double& v : profile.values) v = std::clamp(v, 0.0, scale.max_score);
    profile.values[profile.target_item] = scale.max_score;
}

std::vector<int> target_users(const RatingMatrix& matrix, int t, int sample,
                              std::uint64_t seed) {
    std::vector<int> users;
    for (int u = 0; u < matrix.num_users(); ++u)
        if (!matrix.has_rating(u, t)) users.push_back(u);
    if (sample != kAllTargetUsers &&
        sample < static_cast<int>(users.size())) {
        std::mt19937_64 rng(mix_seed(seed, 0x7a72676574ULL));
        std::shuffle(users.begin(), users.end(), rng);
        users.resize(sample);
        std::sort(users.begin(), users.end());
    }
    return users;
}

AttackStructures build_structures(const RatingMatrix& matrix,
                                  const ContinuousProfile& x_f,
                                  const AttackConfig& cfg,
                                  const std::vector<int>& users) {
    const Workspace ws = build_workspace(matrix, cfg, users);
    return structures_from_workspace(matrix, ws, x_f, cfg);
}

std::pair<double, LossTerms> loss_given(const RatingMatrix& matrix,
                                        const ContinuousProfile& x_f,
                                        const AttackConfig& cfg,
                                        const AttackStructures& structs) {
    const double norm_f = dense_norm(x_f.values);
    if (norm_f == 0.0)
        throw ValidationError("attack: degenerate (all-zero) fake profile");
    const int t = x_f.target_item;
    const double r_max = matrix.scale().max_score;

    LossTerms terms;
    terms.users.reserve(structs.users.size());
    for (const auto& pu : structs.users) {
        const int u = pu.user;
        const double norm_u = matrix.row_norm(u);
        const double s_uf =
            norm_u == 0.0
                ? 0.0
                : row_dot(matrix.user_ratings(u), x_f.values) / (norm_u * norm_f);

        double loss1 = pu.fake_in_neighbors ? 0.5 : 0.0;  // sigma(s_uf - s_uf)
        for (const auto& [v, s_uv] : pu.neighbors)
            loss1 += sigmoid(s_uv - s_uf);

        double p_ut = pu.fake_in_neighbors ? s_uf * r_max : 0.0;
        for (const auto& [v, s_uv] : pu.neighbors) {
            const double x = matrix.rating(v, t);
            if (x != 0.0) p_ut += s_uv * x;
        }

        double loss2 = 0.0;
        for (int i : pu.rec_items) {
            if (i == t) continue;
            double p_ui = 0.0;
            for (const auto& [v, s_uv] : pu.neighbors) {
                const double x = matrix.rating(v, i);
                if (x != 0.0) p_ui += s_uv * x;
            }
            if (pu.fake_in_neighbors && structs.fake_support[i])
                p_ui += s_uf * x_f.values[i];
            loss2 += sigmoid(p_ui - p_ut);
        }

        terms.users.push_back({u, loss1, loss2});
        terms.total += (1.0 - cfg.lambda) * loss1 + cfg.lambda * loss2;
    }
    return {terms.total, std::move(terms)};
}

std::vector<double> gradient_given(const RatingMatrix& matrix,
                                   const ContinuousProfile& x_f,
                                   const AttackConfig& cfg,
                                   const AttackStructures& structs) {
    const int n = matrix.num_items();
    const int t = x_f.target_item;
    const double r_max = matrix.scale().max_score;
    const double norm_f = dense_norm(x_f.values);
    if (norm_f == 0.0)
        throw ValidationError("attack: degenerate (all-zero) fake profile");

    std::vector<double> grad(n, 0.0);
    // accumulated coefficient of the shared -x_f direction of d s_uf/d x_f
    double beta = 0.0;

    for (const auto& pu : structs.users) {
        const int u = pu.user;
        const auto row_u = matrix.user_ratings(u);
        const double norm_u = matrix.row_norm(u);
        if (norm_u == 0.0) continue;
        const double dot_uf = row_dot(row_u, x_f.values);
        const double s_uf = dot_uf / (norm_u * norm_f);

        // loss1: sum_v sigma'(s_uv - s_uf) * (0 - d s_uf); the fake's own
        // top-K slot differentiates to zero
        double coef = 0.0;  // multiplier on d s_uf/d x_f
        for (const auto& [v, s_uv] : pu.neighbors)
            coef -= (1.0 - cfg.lambda) * sigmoid_prime(s_uv - s_uf);

        // loss2
        double p_ut = pu.fake_in_neighbors ? s_uf * r_max : 0.0;
        for (const auto& [v, s_uv] : pu.neighbors) {
            const double x = matrix.rating(v, t);
            if (x != 0.0) p_ut += s_uv * x;
        }
        for (int i : pu.rec_items) {
            if (i == t) continue;
            double p_ui = 0.0;
            for (const auto& [v, s_uv] : pu.neighbors) {
                const double x = matrix.rating(v, i);
                if (x != 0.0) p_ui += s_uv * x;
            }
            const bool fake_rates_i =
                pu.fake_in_neighbors && structs.fake_support[i];
            if (fake_rates_i) p_ui += s_uf * x_f.values[i];
            const double sp = sigmoid_prime(p_ui - p_ut);
            // d p_ui/d x_f = [f in W_ui] (x_fi * d s_uf + s_uf * e_i)
            if (fake_rates_i) {
                coef += cfg.lambda * sp * x_f.values[i];
                grad[i] += cfg.lambda * sp * s_uf;
            }
            // d p_ut/d x_f = [f in S(u,K)] r_max * d s_uf  (t pinned)
            if (pu.fake_in_neighbors) coef -= cfg.lambda * sp * r_max;
        }

        // d s_uf/d x_f = x_u/(|x_u||x_f|) - dot * x_f/(|x_u||x_f|^3)
        const double inv = 1.0 / (norm_u * norm_f);
        for (const auto& [i, x] : row_u) grad[i] += coef * x * inv;
        beta += coef * dot_uf * inv / (norm_f * norm_f);
    }

    for (int i = 0; i < n; ++i) grad[i] -= beta * x_f.values[i];
    grad[t] = 0.0;  // pinned coordinate
    return grad;
}

std::pair<double, LossTerms> attack_loss(const RatingMatrix& matrix,
                                         const ContinuousProfile& x_f,
                                         const AttackConfig& cfg) {
    cfg.validate();
    const auto users =
        target_users(matrix, cfg.target_item, cfg.target_user_sample, cfg.seed);
    return loss_given(matrix, x_f, cfg,
                      build_structures(matrix, x_f, cfg, users));
}

std::vector<double> attack_gradient(const RatingMatrix& matrix,
                                    const ContinuousProfile& x_f,
                                    const AttackConfig& cfg) {
    cfg.validate();
    const auto users =
        target_users(matrix, cfg.target_item, cfg.target_user_sample, cfg.seed);
    return gradient_given(matrix, x_f, cfg,
                          build_structures(matrix, x_f, cfg, users));
}

ContinuousProfile initial_profile(const RatingMatrix& matrix, int t,
                                  std::uint64_t seed) {
    const ItemStatsTable stats(matrix);
    const double r_max = matrix.scale().max_score;
    std::mt19937_64 rng(mix_seed(seed, 0x696e6974ULL));
    std::uniform_real_distribution<double> jitter(0.0, 0.01 * r_max);

    ContinuousProfile x;
    x.target_item = t;
    x.values.resize(matrix.num_items());
    for (int i = 0; i < matrix.num_items(); ++i)
        x.values[i] = std::min(0.1 * stats.of(i).mean + jitter(rng), r_max);
    x.values[t] = r_max;
    return x;
}

ContinuousProfile optimize_profile(const RatingMatrix& matrix,
                                   const AttackConfig& cfg) {
    cfg.validate();
    const int t = cfg.target_item;
    const auto users =
        target_users(matrix, t, cfg.target_user_sample, cfg.seed);
    const Workspace ws = build_workspace(matrix, cfg, users);

    ContinuousProfile x = initial_profile(matrix, t, cfg.seed);
    AttackStructures structs = structures_from_workspace(matrix, ws, x, cfg);

    ContinuousProfile best = x;
    double best_loss = loss_given(matrix, x, cfg, structs).first;

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        const std::vector<double> grad = gradient_given(matrix, x, cfg, structs);
        for (std::size_t i = 0; i < x.values.size(); ++i)
            x.values[i] -= cfg.eta * grad[i];
        project(x, matrix.scale());
        if (iter % cfg.recompute_period == 0)
            structs = structures_from_workspace(matrix, ws, x, cfg);
        const double loss = loss_given(matrix, x, cfg, structs).first;
        if (loss < best_loss) {
            best_loss = loss;
            best = x;
        }
    }
    return best;
}

FakeUserProfile discretize(const ContinuousProfile& x_f,
                           const RatingMatrix& matrix, int t, int z,
                           std::uint64_t seed) {
    if (z < 0 || z > matrix.num_items() - 1)
        throw ConfigError("discretize: filler budget z must be in [0, n-1]");
    const ItemStatsTable stats(matrix);
    const RatingScale& scale = matrix.scale();

    std::vector<std::pair<int, double>> ranked;
    ranked.reserve(matrix.num_items() - 1);
    for (int i = 0; i < matrix.num_items(); ++i)
        if (i != t) ranked.emplace_back(i, x_f.values[i]);
    const std::size_t zz = std::min<std::size_t>(z, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + zz, ranked.end(),
                      [](const auto& a, const auto& b) {
                          if (a.second != b.second) return a.second > b.second;
                          return a.first < b.first;
                      });

    std::mt19937_64 rng(mix_seed(seed, 0x64697363ULL));
    FakeUserProfile p;
    p.target_item = t;
    p.ratings[t] = scale.max_score;
    for (std::size_t q = 0; q < zz; ++q) {
        const int i = ranked[q].first;
        const ItemStats& s = stats.of(i);
        double raw = s.mean;
        if (s.stddev > 0.0) {
            std::normal_distribution<double> dist(s.mean, s.stddev);
            raw = dist(rng);
        }
        p.filler_items.push_back(i);
        p.ratings[i] = scale.round_clip(raw);
    }
    std::sort(p.filler_items.begin(), p.filler_items.end());
    return p;
}

std::vector<FakeUserProfile> unattack(const RatingMatrix& matrix,
                                      const AttackConfig& cfg,
                                      const UnattackObserver& observer) {
    cfg.validate();
    RatingMatrix working = matrix;
    std::vector<FakeUserProfile> profiles;
    profiles.reserve(cfg.num_fakes_j);
    for (int f = 0; f < cfg.num_fakes_j; ++f) {
        AttackConfig step = cfg;
        step.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(f));
        const ContinuousProfile x = optimize_profile(working, step);
        FakeUserProfile p =
            discretize(x, working, cfg.target_item, cfg.fillers_z, step.seed);
        p.check(working.scale(), cfg.fillers_z);
        working.add_user(p.ratings);
        profiles.push_back(std::move(p));
        if (observer) observer(f, working);
    }
    return profiles;
}

}  // namespace unattack
