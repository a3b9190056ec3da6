#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace prospect {

struct CacheEntry {
    std::vector<double> values;
    std::vector<std::int64_t> counts;

    bool operator==(const CacheEntry&) const = default;
};

/// Append-only, content-keyed result store backed by a JSON-lines file.
///
/// Each line is {"k": key, "v": [values], "n": [counts]}. On open, every
/// parsable line is loaded (later lines win) and unparsable lines are
/// skipped, so a file cut short by a killed process still loads. Writes go
/// through a single mutex and are flushed per entry.
class ScoreCache {
public:
    /// Opens (creating if needed) the cache file. Throws IoError.
    explicit ScoreCache(std::filesystem::path file);

    std::optional<CacheEntry> lookup(const std::string& key) const;
    void store(const std::string& key, const CacheEntry& entry);

    std::size_t size() const;
    std::size_t skipped_lines() const { return skipped_lines_; }
    const std::filesystem::path& path() const { return file_; }

private:
    std::filesystem::path file_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, CacheEntry> entries_;
    std::ofstream out_;
    std::size_t skipped_lines_ = 0;
};

}  // namespace prospect
