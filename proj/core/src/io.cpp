#include "unattack/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace unattack {

namespace {

std::vector<std::string> split_line(const std::string& line,
                                    std::optional<char> delim) {
    std::vector<std::string> tokens;
    if (delim) {
        std::string tok;
        std::istringstream in(line);
        while (std::getline(in, tok, *delim)) tokens.push_back(tok);
    } else {
        std::istringstream in(line);
        std::string tok;
        while (in >> tok) tokens.push_back(tok);
    }
    // trim stray carriage returns / spaces
    for (auto& t : tokens) {
        while (!t.empty() && (t.back() == '\r' || t.back() == ' ')) t.pop_back();
        std::size_t b = 0;
        while (b < t.size() && t[b] == ' ') ++b;
        t.erase(0, b);
    }
    while (!tokens.empty() && tokens.back().empty()) tokens.pop_back();
    return tokens;
}

}  // namespace

LoadResult load_ratings(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in.is_open()) throw ParseError("cannot open rating file: " + path);
    options.scale.validate();

    std::unordered_map<std::string, int> user_index, item_index;
    std::vector<std::string> user_ids, item_ids;
    // per (u,i): last score wins
    std::unordered_map<std::int64_t, double> cell;
    int duplicates = 0;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto tokens = split_line(line, options.delimiter);
        if (tokens.empty()) continue;
        if (tokens.size() < 3)
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected `user item score`, got " +
                             std::to_string(tokens.size()) + " fields");
        double score;
        try {
            std::size_t pos = 0;
            score = std::stod(tokens[2], &pos);
            if (pos != tokens[2].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": malformed score `" + tokens[2] + "`");
        }
        if (!options.scale.is_legal(score))
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": score " + tokens[2] +
                                  " is off the rating scale");
        auto intern = [](std::unordered_map<std::string, int>& index,
                         std::vector<std::string>& ids,
                         const std::string& token) {
            auto [it, inserted] =
                index.emplace(token, static_cast<int>(ids.size()));
            if (inserted) ids.push_back(token);
            return it->second;
        };
        const int u = intern(user_index, user_ids, tokens[0]);
        const int i = intern(item_index, item_ids, tokens[1]);
        const std::int64_t key =
            static_cast<std::int64_t>(u) * (1LL << 31) + i;
        auto [it, inserted] = cell.emplace(key, score);
        if (!inserted) {
            it->second = score;  // keep last
            ++duplicates;
        }
    }
    if (cell.empty()) throw ParseError("no ratings in file: " + path);

    std::vector<Rating> entries;
    entries.reserve(cell.size());
    for (const auto& [key, score] : cell)
        entries.push_back({static_cast<int>(key >> 31),
                           static_cast<int>(key & ((1LL << 31) - 1)), score});
    RatingMatrix matrix(static_cast<int>(user_ids.size()),
                        static_cast<int>(item_ids.size()), std::move(entries),
                        options.scale);
    return LoadResult{std::move(matrix), std::move(user_ids),
                      std::move(item_ids), duplicates};
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out.is_open())
            throw std::runtime_error("cannot write file: " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

void save_ratings(const RatingMatrix& matrix, const std::string& path,
                  int user_id_offset) {
    std::ostringstream out;
    for (int u = 0; u < matrix.num_users(); ++u)
        for (const auto& [i, score] : matrix.user_ratings(u)) {
            out << (u + user_id_offset) << '\t' << i << '\t';
            // print integral levels without trailing zeros
            if (score == static_cast<long long>(score))
                out << static_cast<long long>(score);
            else
                out << score;
            out << '\n';
        }
    write_file_atomic(path, out.str());
}

}  // namespace unattack
