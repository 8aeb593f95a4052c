#pragma once

#include <optional>
#include <string>
#include <vector>

#include "unattack/rating_matrix.hpp"

namespace unattack {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Canonical rating file: one interaction per line, `user item score`,
// extra columns ignored, '#' lines skipped. delimiter == nullopt splits
// on any run of whitespace.
struct LoadOptions {
    std::optional<char> delimiter;  // default: tab
    RatingScale scale;
};

struct LoadResult {
    RatingMatrix matrix;
    std::vector<std::string> user_ids;  // dense id -> original token
    std::vector<std::string> item_ids;
    int duplicate_count = 0;  // duplicate (u,i) pairs, last kept
};

LoadResult load_ratings(const std::string& path, const LoadOptions& options);

// Writes in the canonical format (tab-separated, dense ids offset by
// user_id_offset). Atomic: writes a temp file then renames.
void save_ratings(const RatingMatrix& matrix, const std::string& path,
                  int user_id_offset = 0);

// Writes arbitrary text atomically (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace unattack
