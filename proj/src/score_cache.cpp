#include "prospect/score_cache.hpp"

#include <sstream>

#include "json.hpp"
#include "prospect/error.hpp"

namespace prospect {

ScoreCache::ScoreCache(std::filesystem::path file) : file_(std::move(file)) {
    std::error_code ec;
    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path(), ec);

    bool needs_newline = false;
    if (std::ifstream in(file_, std::ios::binary); in) {
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                const auto j = nlohmann::json::parse(line);
                CacheEntry e;
                e.values = j.at("v").get<std::vector<double>>();
                if (const auto it = j.find("n"); it != j.end()) e.counts = it->get<std::vector<std::int64_t>>();
                entries_[j.at("k").get<std::string>()] = std::move(e);
            } catch (const nlohmann::json::exception&) {
                ++skipped_lines_;
            }
        }
        in.clear();
        in.seekg(0, std::ios::end);
        if (in.tellg() > 0) {
            in.seekg(-1, std::ios::end);
            needs_newline = in.get() != '\n';
        }
    }

    out_.open(file_, std::ios::binary | std::ios::app);
    if (!out_) throw IoError("cannot open cache file '" + file_.string() + "'");
    // A torn final line must not swallow the next entry.
    if (needs_newline) out_ << '\n' << std::flush;
}

std::optional<CacheEntry> ScoreCache::lookup(const std::string& key) const {
    std::lock_guard lock(mu_);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ScoreCache::store(const std::string& key, const CacheEntry& entry) {
    nlohmann::json j = {{"k", key}, {"v", entry.values}};
    if (!entry.counts.empty()) j["n"] = entry.counts;
    const auto line = j.dump() + "\n";

    std::lock_guard lock(mu_);
    out_ << line << std::flush;
    if (!out_) throw IoError("write to cache file '" + file_.string() + "' failed");
    entries_[key] = entry;
}

std::size_t ScoreCache::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

}  // namespace prospect
