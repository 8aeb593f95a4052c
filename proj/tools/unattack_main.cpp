// Experiment CLI: ingest datasets, generate fake-user attacks, evaluate
// HitRatio grids, and run matrix-factorization transfer experiments.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "unattack/bprmf.hpp"
#include "unattack/evaluation.hpp"
#include "unattack/io.hpp"
#include "unattack/optimizer.hpp"

namespace {

using namespace unattack;

RatingScale parse_scale(const std::string& text) {
    // "min:max:step", e.g. 1:5:1 or 0.5:4:0.5
    RatingScale scale;
    std::istringstream in(text);
    std::string tok;
    double* fields[3] = {&scale.min_score, &scale.max_score, &scale.step};
    for (int k = 0; k < 3; ++k) {
        if (!std::getline(in, tok, ':'))
            throw ConfigError("scale must be min:max:step, got: " + text);
        *fields[k] = std::stod(tok);
    }
    scale.validate();
    return scale;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

// Flat key=value config file; '#' comments; unknown keys rejected.
// Command-line flags override file values.
std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw ConfigError("cannot open config file: " + path);
    static const std::vector<std::string> known = {
        "dataset",      "name",       "delim",        "scale",
        "train_frac",   "val_frac",   "split_seed",   "attacks",
        "sizes",        "target_type", "target_count", "similarity",
        "k",            "n",          "z",            "lambda",
        "eta",          "iters",      "recompute",    "sample",
        "seed",         "out",        "fakes",        "transfer_d",
        "transfer_lr",  "transfer_reg", "transfer_epochs"};
    std::map<std::string, std::string> cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": unknown key `" + key + "`");
        cfg[key] = value;
    }
    return cfg;
}

std::optional<char> parse_delim(const std::string& text) {
    if (text.empty() || text == "ws" || text == "whitespace") return std::nullopt;
    if (text == "tab" || text == "\\t") return '\t';
    if (text.size() == 1) return text[0];
    throw ConfigError("delimiter must be a single character, `tab` or `ws`");
}

struct CommonArgs {
    std::string config_path;
    std::string dataset;
    std::string name = "dataset";
    std::string delim = "ws";
    std::string scale = "1:5:1";
    double train_frac = 0.8, val_frac = 0.1;
    std::uint64_t split_seed = 1;
    std::string attacks = "none";
    std::string sizes = "0.02";
    std::string target_type = "random";
    int target_count = 10;
    std::string similarity = "cosine";
    int k = 30, n = 20, z = 10;
    double lambda = 0.5, eta = 0.01;
    int iters = 100, recompute = 1, sample = -1;
    std::uint64_t seed = 1;
    std::string out;
    std::string fakes;
    TransferSpec transfer;
};

void add_common_flags(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config_path, "flat key=value config file");
    cmd->add_option("--dataset", a.dataset, "rating file path");
    cmd->add_option("--name", a.name, "dataset name for reports");
    cmd->add_option("--delim", a.delim, "field delimiter: char, `tab` or `ws`");
    cmd->add_option("--scale", a.scale, "rating scale min:max:step");
    cmd->add_option("--train-frac", a.train_frac);
    cmd->add_option("--val-frac", a.val_frac);
    cmd->add_option("--split-seed", a.split_seed);
    cmd->add_option("--attack", a.attacks,
                    "comma list of none|random|average|bandwagon|covisitation|"
                    "unattack|external");
    cmd->add_option("--attack-size", a.sizes, "comma list of fractions of m");
    cmd->add_option("--target-type", a.target_type, "random|cold|warm");
    cmd->add_option("--target-count", a.target_count);
    cmd->add_option("--similarity", a.similarity,
                    "comma list of cosine|euclidean|pearson");
    cmd->add_option("--k", a.k, "neighbour count K");
    cmd->add_option("--n", a.n, "recommendation list length N");
    cmd->add_option("--z", a.z, "filler budget per fake user");
    cmd->add_option("--lambda", a.lambda);
    cmd->add_option("--eta", a.eta);
    cmd->add_option("--iters", a.iters);
    cmd->add_option("--recompute", a.recompute,
                    "neighbourhood recompute period E");
    cmd->add_option("--sample", a.sample, "target-user subsample B (-1 = all)");
    cmd->add_option("--seed", a.seed);
    cmd->add_option("--out", a.out, "output file");
    cmd->add_option("--fakes", a.fakes, "externally supplied fake-user file");
    cmd->add_option("--transfer-d", a.transfer.embedding_dim);
    cmd->add_option("--transfer-lr", a.transfer.learning_rate);
    cmd->add_option("--transfer-reg", a.transfer.regularization);
    cmd->add_option("--transfer-epochs", a.transfer.epochs);
}

// Config-file values fill in anything the command line left at default.
void apply_config(CLI::App* cmd, CommonArgs& a) {
    if (a.config_path.empty()) return;
    const auto cfg = read_config(a.config_path);
    auto get = [&](const char* key, auto& field, const char* flag) {
        auto it = cfg.find(key);
        if (it == cfg.end()) return;
        if (cmd->count(flag) > 0) return;  // flag overrides file
        std::istringstream in(it->second);
        in >> field;
    };
    auto get_str = [&](const char* key, std::string& field, const char* flag) {
        auto it = cfg.find(key);
        if (it != cfg.end() && cmd->count(flag) == 0) field = it->second;
    };
    get_str("dataset", a.dataset, "--dataset");
    get_str("name", a.name, "--name");
    get_str("delim", a.delim, "--delim");
    get_str("scale", a.scale, "--scale");
    get("train_frac", a.train_frac, "--train-frac");
    get("val_frac", a.val_frac, "--val-frac");
    get("split_seed", a.split_seed, "--split-seed");
    get_str("attacks", a.attacks, "--attack");
    get_str("sizes", a.sizes, "--attack-size");
    get_str("target_type", a.target_type, "--target-type");
    get("target_count", a.target_count, "--target-count");
    get_str("similarity", a.similarity, "--similarity");
    get("k", a.k, "--k");
    get("n", a.n, "--n");
    get("z", a.z, "--z");
    get("lambda", a.lambda, "--lambda");
    get("eta", a.eta, "--eta");
    get("iters", a.iters, "--iters");
    get("recompute", a.recompute, "--recompute");
    get("sample", a.sample, "--sample");
    get("seed", a.seed, "--seed");
    get_str("out", a.out, "--out");
    get_str("fakes", a.fakes, "--fakes");
    get("transfer_d", a.transfer.embedding_dim, "--transfer-d");
    get("transfer_lr", a.transfer.learning_rate, "--transfer-lr");
    get("transfer_reg", a.transfer.regularization, "--transfer-reg");
    get("transfer_epochs", a.transfer.epochs, "--transfer-epochs");
}

LoadResult load_dataset(const CommonArgs& a) {
    if (a.dataset.empty()) throw ConfigError("--dataset is required");
    LoadOptions opts;
    opts.delimiter = parse_delim(a.delim);
    opts.scale = parse_scale(a.scale);
    return load_ratings(a.dataset, opts);
}

ExperimentSpec make_spec(const CommonArgs& a) {
    ExperimentSpec spec;
    spec.dataset_name = a.name;
    spec.dataset_path = a.dataset;
    spec.delimiter = parse_delim(a.delim);
    spec.scale = parse_scale(a.scale);
    spec.train_frac = a.train_frac;
    spec.val_frac = a.val_frac;
    spec.split_seed = a.split_seed;
    spec.attacks = split_list(a.attacks);
    for (const std::string& s : split_list(a.sizes))
        spec.attack_sizes.push_back(std::stod(s));
    spec.target_category = target_category_from_string(a.target_type);
    spec.target_count = a.target_count;
    spec.similarities.clear();
    for (const std::string& s : split_list(a.similarity))
        spec.similarities.push_back(similarity_from_string(s));
    spec.k = a.k;
    spec.top_n = a.n;
    spec.fillers_z = a.z;
    spec.lambda = a.lambda;
    spec.eta = a.eta;
    spec.max_iters = a.iters;
    spec.recompute_period = a.recompute;
    spec.target_user_sample = a.sample;
    spec.seed = a.seed;
    spec.fakes_file = a.fakes;
    spec.output_path = a.out;
    return spec;
}

int cmd_ingest(const CommonArgs& a) {
    const LoadResult loaded = load_dataset(a);
    const RatingMatrix& m = loaded.matrix;
    std::cout << "users    " << m.num_users() << "\n"
              << "items    " << m.num_items() << "\n"
              << "ratings  " << m.num_entries() << "\n"
              << "sparsity " << std::fixed << std::setprecision(4)
              << 100.0 * sparsity(m) << "%\n"
              << "average  "
              << std::setprecision(1)
              << static_cast<double>(m.num_entries()) / m.num_users() << "\n";
    if (loaded.duplicate_count > 0)
        std::cout << "warning: " << loaded.duplicate_count
                  << " duplicate (user,item) pairs, last kept\n";
    return 0;
}

int cmd_attack(const CommonArgs& a, int target_item) {
    const LoadResult loaded = load_dataset(a);
    const SplitResult parts =
        split(loaded.matrix, a.train_frac, a.val_frac, a.split_seed);
    const RatingMatrix& train = parts.train;

    if (target_item < 0) {
        const auto targets = select_targets(
            train, target_category_from_string(a.target_type), 1, a.n, a.k,
            similarity_from_string(split_list(a.similarity).at(0)), a.seed);
        if (targets.items.empty()) throw ConfigError("no qualifying target item");
        target_item = targets.items[0];
        std::cout << "selected target item " << target_item << "\n";
    }

    const auto names = split_list(a.attacks);
    if (names.size() != 1)
        throw ConfigError("attack command takes exactly one --attack name");
    const auto sizes = split_list(a.sizes);
    const int j = static_cast<int>(
        std::lround(std::stod(sizes.at(0)) * train.num_users()));

    ExperimentSpec spec = make_spec(a);
    const auto start = std::chrono::steady_clock::now();
    const auto profiles =
        generate_attack(names[0], train, target_item, j, a.z, spec, a.seed);
    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();

    std::ostringstream out;
    int fake_id = train.num_users();
    for (const FakeUserProfile& p : profiles) {
        for (const auto& [i, score] : p.ratings) {
            out << fake_id << '\t' << i << '\t';
            if (score == static_cast<long long>(score))
                out << static_cast<long long>(score);
            else
                out << score;
            out << '\n';
        }
        ++fake_id;
    }
    const std::string path = a.out.empty() ? "fakes.tsv" : a.out;
    write_file_atomic(path, out.str());
    std::cout << "wrote " << profiles.size() << " fake users to " << path
              << " (generation took " << std::fixed << std::setprecision(1)
              << elapsed << "s)\n";
    return 0;
}

int cmd_eval(const CommonArgs& a) {
    const ExperimentSpec spec = make_spec(a);
    const auto rows = run_experiment(spec);
    const std::string report = render_report(spec, rows);
    if (!a.out.empty()) {
        write_file_atomic(a.out, report);
        std::cout << "report written to " << a.out << "\n";
    } else {
        std::cout << report;
    }
    std::cout << render_summary(rows);
    for (const ReportRow& r : rows)
        if (r.failed) return 0;  // per-cell errors are recorded, not fatal
    return 0;
}

int cmd_transfer(const CommonArgs& a) {
    const LoadResult loaded = load_dataset(a);
    const SplitResult parts =
        split(loaded.matrix, a.train_frac, a.val_frac, a.split_seed);
    const RatingMatrix& train = parts.train;

    const auto targets = select_targets(
        train, target_category_from_string(a.target_type), a.target_count, a.n,
        a.k, similarity_from_string(split_list(a.similarity).at(0)), a.seed);

    BprConfig bpr;
    bpr.embedding_dim = a.transfer.embedding_dim;
    bpr.learning_rate = a.transfer.learning_rate;
    bpr.regularization = a.transfer.regularization;
    bpr.epochs = a.transfer.epochs;
    bpr.seed = a.seed;

    auto mf_hit_ratio = [&](const RatingMatrix& data, int num_normal) {
        const MFModel model = train_bprmf(data, bpr);
        double sum = 0.0;
        for (int t : targets.items) {
            int hits = 0, population = 0;
            for (int u = 0; u < num_normal; ++u) {
                if (data.has_rating(u, t)) continue;
                ++population;
                if (mf_recommend(model, data, u, a.n).contains(t)) ++hits;
            }
            sum += population == 0 ? 0.0
                                   : static_cast<double>(hits) / population;
        }
        return targets.items.empty()
                   ? 0.0
                   : sum / static_cast<double>(targets.items.size());
    };

    const double hr_clean = mf_hit_ratio(train, train.num_users());
    std::cout << "bprmf hr (clean): " << std::fixed << std::setprecision(6)
              << hr_clean << "\n";

    if (!a.fakes.empty()) {
        LoadOptions opts;
        opts.scale = parse_scale(a.scale);
        const LoadResult fakes = load_ratings(a.fakes, opts);
        RatingMatrix poisoned = train;
        for (int fu = 0; fu < fakes.matrix.num_users(); ++fu) {
            std::map<int, double> ratings;
            for (const auto& [tok_i, score] : fakes.matrix.user_ratings(fu))
                ratings[std::stoi(fakes.item_ids[tok_i])] = score;
            poisoned.add_user(ratings);
        }
        const double hr_poisoned = mf_hit_ratio(poisoned, train.num_users());
        std::cout << "bprmf hr (poisoned): " << hr_poisoned << "\n";
    }
    return 0;
}

int cmd_report(const std::string& in_path) {
    std::ifstream in(in_path);
    if (!in.is_open()) throw ConfigError("cannot open report: " + in_path);
    std::vector<ReportRow> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {  // column header
            header_seen = true;
            continue;
        }
        std::istringstream fields(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(fields, tok, ',')) cols.push_back(tok);
        if (cols.size() != 12) continue;
        ReportRow r;
        r.dataset = cols[0];
        r.attack = cols[1];
        r.target_category = target_category_from_string(cols[2]);
        r.attack_size = std::stod(cols[3]);
        r.similarity = similarity_from_string(cols[4]);
        r.k = std::stoi(cols[5]);
        r.top_n = std::stoi(cols[6]);
        r.fillers_z = std::stoi(cols[7]);
        r.lambda = std::stod(cols[8]);
        r.seed = std::stoull(cols[9]);
        r.hr_none = std::stod(cols[10]);
        r.hr_post = std::stod(cols[11]);
        rows.push_back(std::move(r));
    }
    std::cout << render_summary(rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shilling-attack toolkit for neighbourhood recommenders"};
    app.require_subcommand(1);

    CommonArgs args;
    int target_item = -1;
    std::string report_in;

    CLI::App* ingest = app.add_subcommand("ingest", "dataset statistics");
    add_common_flags(ingest, args);

    CLI::App* attack = app.add_subcommand("attack", "generate fake users");
    add_common_flags(attack, args);
    attack->add_option("--target-item", target_item,
                       "target item id (default: pick by --target-type)");

    CLI::App* eval = app.add_subcommand("eval", "run a HitRatio experiment grid");
    add_common_flags(eval, args);

    CLI::App* transfer =
        app.add_subcommand("transfer", "BPRMF transferability experiment");
    add_common_flags(transfer, args);

    CLI::App* report = app.add_subcommand("report", "summarize a report file");
    report->add_option("--in", report_in, "report file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        for (CLI::App* cmd : {ingest, attack, eval, transfer})
            if (cmd->parsed()) apply_config(cmd, args);
        if (ingest->parsed()) return cmd_ingest(args);
        if (attack->parsed()) return cmd_attack(args, target_item);
        if (eval->parsed()) return cmd_eval(args);
        if (transfer->parsed()) return cmd_transfer(args);
        if (report->parsed()) return cmd_report(report_in);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
