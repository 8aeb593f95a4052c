#include "unattack/bprmf.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

namespace unattack {

double MFModel::score(int u, int i) const {
    const double* pu = &user_factors[static_cast<std::size_t>(u) * embedding_dim];
    const double* qi = &item_factors[static_cast<std::size_t>(i) * embedding_dim];
    double s = 0.0;
    for (int d = 0; d < embedding_dim; ++d) s += pu[d] * qi[d];
    return s;
}

MFModel train_bprmf(const RatingMatrix& matrix, const BprConfig& config) {
    if (matrix.num_entries() == 0)
        throw TrainingError("bprmf: empty rating matrix");
    if (config.embedding_dim < 1 || config.epochs < 0 ||
        !(config.learning_rate > 0.0) || config.regularization < 0.0)
        throw ConfigError("bprmf: invalid training configuration");

    const int m = matrix.num_users(), n = matrix.num_items();
    const int d = config.embedding_dim;

    MFModel model;
    model.num_users = m;
    model.num_items = n;
    model.embedding_dim = d;
    model.user_factors.resize(static_cast<std::size_t>(m) * d);
    model.item_factors.resize(static_cast<std::size_t>(n) * d);

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> init(0.0, 0.1);
    for (double& v : model.user_factors) v = init(rng);
    for (double& v : model.item_factors) v = init(rng);

    // implicit positives: any observed rating
    std::vector<std::pair<int, int>> positives;
    positives.reserve(static_cast<std::size_t>(matrix.num_entries()));
    for (int u = 0; u < m; ++u)
        for (const auto& [i, x] : matrix.user_ratings(u))
            positives.emplace_back(u, i);

    std::uniform_int_distribution<int> item_dist(0, n - 1);
    const double lr = config.learning_rate;
    const double reg = config.regularization;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(positives.begin(), positives.end(), rng);
        double loss_sum = 0.0;
        for (const auto& [u, pos] : positives) {
            // uniform negative sampling with rejection
            int neg = item_dist(rng);
            int guard = 0;
            while (matrix.has_rating(u, neg) && ++guard < 64)
                neg = item_dist(rng);
            if (matrix.has_rating(u, neg)) continue;  // user rated ~everything

            double* pu = &model.user_factors[static_cast<std::size_t>(u) * d];
            double* qp = &model.item_factors[static_cast<std::size_t>(pos) * d];
            double* qn = &model.item_factors[static_cast<std::size_t>(neg) * d];

            double x_uij = 0.0;
            for (int k = 0; k < d; ++k) x_uij += pu[k] * (qp[k] - qn[k]);
            const double sig = 1.0 / (1.0 + std::exp(x_uij));  // sigma(-x)
            loss_sum += std::log1p(std::exp(-x_uij));

            for (int k = 0; k < d; ++k) {
                const double pu_k = pu[k], qp_k = qp[k], qn_k = qn[k];
                pu[k] += lr * (sig * (qp_k - qn_k) - reg * pu_k);
                qp[k] += lr * (sig * pu_k - reg * qp_k);
                qn[k] += lr * (-sig * pu_k - reg * qn_k);
            }
        }
        model.epoch_loss.push_back(loss_sum /
                                   static_cast<double>(positives.size()));
        model.epochs_trained = epoch + 1;
        for (double v : model.user_factors)
            if (!std::isfinite(v))
                throw TrainingError("bprmf: diverged (non-finite factors) at epoch " +
                                    std::to_string(epoch + 1));
    }
    return model;
}

RecommendationList mf_recommend(const MFModel& model,
                                const RatingMatrix& matrix, int u, int n) {
    if (u < 0 || u >= model.num_users)
        throw ValidationError("mf_recommend: user out of range");
    if (n < 1) throw ValidationError("mf_recommend: N must be >= 1");

    std::vector<std::pair<int, double>> scored;
    scored.reserve(model.num_items);
    for (int i = 0; i < model.num_items; ++i)
        if (!matrix.has_rating(u, i)) scored.emplace_back(i, model.score(u, i));
    const std::size_t nn = std::min<std::size_t>(n, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + nn, scored.end(),
                      [](const auto& a, const auto& b) {
                          if (a.second != b.second) return a.second > b.second;
                          return a.first < b.first;
                      });
    scored.resize(nn);
    return RecommendationList{u, std::move(scored)};
}

namespace {
constexpr char kMagic[8] = {'B', 'P', 'R', 'M', 'F', '0', '0', '1'};
}

void save_model(const MFModel& model, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out.is_open())
            throw std::runtime_error("cannot write model file: " + tmp);
        out.write(kMagic, sizeof(kMagic));
        const std::int32_t dims[3] = {model.num_users, model.num_items,
                                      model.embedding_dim};
        out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
        out.write(reinterpret_cast<const char*>(model.user_factors.data()),
                  static_cast<std::streamsize>(model.user_factors.size() *
                                               sizeof(double)));
        out.write(reinterpret_cast<const char*>(model.item_factors.data()),
                  static_cast<std::streamsize>(model.item_factors.size() *
                                               sizeof(double)));
    }
    std::filesystem::rename(tmp, path);
}

MFModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open())
        throw std::runtime_error("cannot open model file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("bad model file header: " + path);
    std::int32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in || dims[0] < 0 || dims[1] < 0 || dims[2] < 1)
        throw std::runtime_error("bad model dimensions: " + path);

    MFModel model;
    model.num_users = dims[0];
    model.num_items = dims[1];
    model.embedding_dim = dims[2];
    model.user_factors.resize(static_cast<std::size_t>(dims[0]) * dims[2]);
    model.item_factors.resize(static_cast<std::size_t>(dims[1]) * dims[2]);
    in.read(reinterpret_cast<char*>(model.user_factors.data()),
            static_cast<std::streamsize>(model.user_factors.size() *
                                         sizeof(double)));
    in.read(reinterpret_cast<char*>(model.item_factors.data()),
            static_cast<std::streamsize>(model.item_factors.size() *
                                         sizeof(double)));
    if (!in) throw std::runtime_error("truncated model file: " + path);
    return model;
}

}  // namespace unattack
