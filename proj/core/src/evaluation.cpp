#include "unattack/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "unattack/io.hpp"
#include "unattack/optimizer.hpp"

namespace unattack {

std::string to_string(TargetCategory category) {
    switch (category) {
        case TargetCategory::random_items: return "random";
        case TargetCategory::cold_start: return "cold";
        case TargetCategory::warm_start: return "warm";
    }
    return "?";
}

TargetCategory target_category_from_string(const std::string& name) {
    if (name == "random") return TargetCategory::random_items;
    if (name == "cold" || name == "cold_start") return TargetCategory::cold_start;
    if (name == "warm" || name == "warm_start") return TargetCategory::warm_start;
    throw ValidationError("unknown target category: " + name);
}

std::vector<RecommendationList> recommend_all(const RatingMatrix& matrix,
                                              int n, int k,
                                              SimilarityKind kind,
                                              int num_normal) {
    if (num_normal < 0) num_normal = matrix.num_users();
    std::vector<RecommendationList> lists;
    lists.reserve(num_normal);
    for (int u = 0; u < num_normal; ++u)
        lists.push_back(recommend(matrix, u, n, k, kind));
    return lists;
}

double hit_ratio_from_lists(const std::vector<RecommendationList>& lists,
                            const RatingMatrix& matrix, int t,
                            int num_normal) {
    if (num_normal < 0) num_normal = static_cast<int>(lists.size());
    int hits = 0, population = 0;
    for (int u = 0; u < num_normal; ++u) {
        if (matrix.has_rating(u, t)) continue;
        ++population;
        if (lists[u].contains(t)) ++hits;
    }
    if (population == 0)
        throw ValidationError("hit_ratio: target item " + std::to_string(t) +
                              " is rated by every normal user (U_t^- empty)");
    return static_cast<double>(hits) / static_cast<double>(population);
}

double hit_ratio(const RatingMatrix& matrix, int t, int n, int k,
                 SimilarityKind kind, int num_normal) {
    if (t < 0 || t >= matrix.num_items())
        throw ValidationError("hit_ratio: target item out of range");
    const auto lists = recommend_all(matrix, n, k, kind, num_normal);
    return hit_ratio_from_lists(lists, matrix, t, num_normal);
}

TargetItemSet select_targets(const RatingMatrix& matrix,
                             TargetCategory category, int count, int n, int k,
                             SimilarityKind kind, std::uint64_t seed) {
    TargetItemSet set;
    set.category = category;
    std::mt19937_64 rng(seed);

    if (category == TargetCategory::random_items) {
        std::vector<int> items(matrix.num_items());
        for (int i = 0; i < matrix.num_items(); ++i) items[i] = i;
        std::shuffle(items.begin(), items.end(), rng);
        if (static_cast<int>(items.size()) > count) items.resize(count);
        std::sort(items.begin(), items.end());
        set.items = std::move(items);
        set.shortfall_warning = static_cast<int>(set.items.size()) < count;
        return set;
    }

    const auto lists = recommend_all(matrix, n, k, kind);
    std::vector<int> qualifying;
    for (int i = 0; i < matrix.num_items(); ++i) {
        const int raters = static_cast<int>(matrix.item_raters(i).size());
        if (raters == matrix.num_users()) continue;  // U_i^- empty
        const double hr = hit_ratio_from_lists(lists, matrix, i);
        if (category == TargetCategory::cold_start) {
            if (raters < set.min_raters_cold && hr < set.cold_hr_threshold)
                qualifying.push_back(i);
        } else {
            if (hr > set.warm_hr_threshold) qualifying.push_back(i);
        }
    }
    std::shuffle(qualifying.begin(), qualifying.end(), rng);
    if (static_cast<int>(qualifying.size()) > count) qualifying.resize(count);
    std::sort(qualifying.begin(), qualifying.end());
    set.shortfall_warning = static_cast<int>(qualifying.size()) < count;
    set.items = std::move(qualifying);
    return set;
}

std::vector<FakeUserProfile> generate_attack(const std::string& name,
                                             const RatingMatrix& matrix,
                                             int target_item, int j, int z,
                                             const ExperimentSpec& spec,
                                             std::uint64_t seed) {
    if (name == "none") return {};
    if (name == "random") return random_attack(matrix, target_item, j, z, seed);
    if (name == "average") return average_attack(matrix, target_item, j, z, seed);
    if (name == "bandwagon")
        return bandwagon_attack(matrix, target_item, j, z, seed);
    if (name == "covisitation")
        return covisitation_attack(matrix, target_item, j, z, seed);
    if (name == "unattack") {
        AttackConfig cfg;
        cfg.target_item = target_item;
        cfg.lambda = spec.lambda;
        cfg.k = spec.k;
        cfg.top_n = spec.top_n;
        cfg.fillers_z = z;
        cfg.num_fakes_j = j;
        cfg.eta = spec.eta;
        cfg.max_iters = spec.max_iters;
        cfg.recompute_period = spec.recompute_period;
        cfg.target_user_sample = spec.target_user_sample;
        cfg.seed = seed;
        return unattack(matrix, cfg);
    }
    if (name == "external") {
        if (spec.fakes_file.empty())
            throw ConfigError("attack `external` needs a fakes file");
        LoadOptions opts;
        opts.scale = matrix.scale();
        const LoadResult fakes = load_ratings(spec.fakes_file, opts);
        std::vector<FakeUserProfile> profiles;
        for (int u = 0; u < fakes.matrix.num_users(); ++u) {
            FakeUserProfile p;
            p.target_item = target_item;
            for (const auto& [tok_i, score] : fakes.matrix.user_ratings(u)) {
                const int i = std::stoi(fakes.item_ids[tok_i]);
                p.ratings[i] = score;
                if (i != target_item) p.filler_items.push_back(i);
            }
            profiles.push_back(std::move(p));
        }
        return profiles;
    }
    throw ConfigError("unknown attack: " + name);
}

namespace {

std::uint64_t cell_seed(std::uint64_t base, std::size_t a, std::size_t b,
                        std::size_t c) {
    std::uint64_t h = base;
    for (std::uint64_t salt : {a + 1, b + 1, c + 1}) {
        h ^= salt + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdULL;
    }
    return h;
}

}  // namespace

std::vector<ReportRow> run_experiment(const ExperimentSpec& spec) {
    LoadOptions opts;
    opts.delimiter = spec.delimiter;
    opts.scale = spec.scale;
    const LoadResult loaded = load_ratings(spec.dataset_path, opts);
    const SplitResult parts =
        split(loaded.matrix, spec.train_frac, spec.val_frac, spec.split_seed);
    return run_experiment(spec, parts.train);
}

std::vector<ReportRow> run_experiment(const ExperimentSpec& spec,
                                      const RatingMatrix& train) {
    const int m_normal = train.num_users();
    std::vector<ReportRow> rows;

    for (std::size_t si = 0; si < spec.similarities.size(); ++si) {
        const SimilarityKind kind = spec.similarities[si];
        const TargetItemSet targets =
            select_targets(train, spec.target_category, spec.target_count,
                           spec.top_n, spec.k, kind, spec.seed);

        // pre-attack ("None") lists, shared across the grid for this kind
        const auto pre_lists =
            recommend_all(train, spec.top_n, spec.k, kind, m_normal);
        double hr_none_sum = 0.0;
        for (int t : targets.items)
            hr_none_sum += hit_ratio_from_lists(pre_lists, train, t, m_normal);
        const double hr_none =
            targets.items.empty() ? 0.0
                                  : hr_none_sum / static_cast<double>(targets.items.size());

        for (std::size_t ai = 0; ai < spec.attacks.size(); ++ai) {
            for (std::size_t zi = 0; zi < spec.attack_sizes.size(); ++zi) {
                const double size = spec.attack_sizes[zi];
                const int j = static_cast<int>(std::lround(size * m_normal));

                ReportRow row;
                row.dataset = spec.dataset_name;
                row.attack = spec.attacks[ai];
                row.target_category = spec.target_category;
                row.attack_size = size;
                row.similarity = kind;
                row.k = spec.k;
                row.top_n = spec.top_n;
                row.fillers_z = spec.fillers_z;
                row.lambda = spec.lambda;
                row.seed = spec.seed;
                row.hr_none = hr_none;
                row.num_fakes = 0;

                try {
                    double hr_post_sum = 0.0;
                    for (int t : targets.items) {
                        RatingMatrix poisoned = train;  // private per cell
                        const auto profiles = generate_attack(
                            spec.attacks[ai], poisoned, t, j, spec.fillers_z,
                            spec, cell_seed(spec.seed, si, ai, zi));
                        row.num_fakes = static_cast<int>(profiles.size());
                        inject(poisoned, profiles);
                        hr_post_sum +=
                            hit_ratio(poisoned, t, spec.top_n, spec.k, kind,
                                      m_normal);
                    }
                    row.hr_post =
                        targets.items.empty()
                            ? 0.0
                            : hr_post_sum / static_cast<double>(targets.items.size());
                } catch (const std::exception& e) {
                    row.failed = true;
                    row.error = e.what();
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

namespace {

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(6);
    out << std::fixed << v;
    return out.str();
}

}  // namespace

std::string render_report(const ExperimentSpec& spec,
                          const std::vector<ReportRow>& rows) {
    std::ostringstream out;
    out << "# dataset=" << spec.dataset_name << " path=" << spec.dataset_path
        << "\n# train_frac=" << spec.train_frac << " val_frac=" << spec.val_frac
        << " split_seed=" << spec.split_seed << "\n# target_type="
        << to_string(spec.target_category) << " target_count=" << spec.target_count
        << "\n# k=" << spec.k << " n=" << spec.top_n << " z=" << spec.fillers_z
        << " lambda=" << spec.lambda << " eta=" << spec.eta
        << " iters=" << spec.max_iters << " seed=" << spec.seed << "\n";
    out << "dataset,attack,target_category,attack_size,similarity,k,n,z,"
           "lambda,seed,hr_none,hr_post\n";
    for (const ReportRow& r : rows) {
        if (r.failed) {
            out << "# ERROR " << r.attack << " size=" << r.attack_size << " ("
                << to_string(r.similarity) << "): " << r.error << "\n";
            continue;
        }
        out << r.dataset << ',' << r.attack << ',' << to_string(r.target_category)
            << ',' << fmt(r.attack_size) << ',' << to_string(r.similarity) << ','
            << r.k << ',' << r.top_n << ',' << r.fillers_z << ',' << fmt(r.lambda)
            << ',' << r.seed << ',' << fmt(r.hr_none) << ',' << fmt(r.hr_post)
            << '\n';
    }
    return out.str();
}

std::string render_summary(const std::vector<ReportRow>& rows) {
    std::ostringstream out;
    out << "attack          size    similarity  hr_none    hr_post\n";
    for (const ReportRow& r : rows) {
        if (r.failed) {
            out << r.attack << "  FAILED: " << r.error << "\n";
            continue;
        }
        out << r.attack;
        for (std::size_t p = r.attack.size(); p < 16; ++p) out << ' ';
        std::ostringstream size;
        size << r.attack_size * 100.0 << '%';
        out << size.str();
        for (std::size_t p = size.str().size(); p < 8; ++p) out << ' ';
        out << to_string(r.similarity);
        for (std::size_t p = to_string(r.similarity).size(); p < 12; ++p)
            out << ' ';
        out << fmt(r.hr_none) << "   " << fmt(r.hr_post) << '\n';
    }
    return out.str();
}

}  // namespace unattack
