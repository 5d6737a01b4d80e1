#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "judgekit/errors.hpp"
#include "judgekit/judge.hpp"

namespace judgekit {

namespace detail {

// FNV-1a 64 over length-prefixed fields; hex string. Used as a content hash
// for cache keys, not for security.
inline std::uint64_t fnv1a_update(std::uint64_t h, std::string_view data) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string content_hash(std::initializer_list<std::string_view> fields) {
  std::uint64_t h = 14695981039346656037ULL;
  for (std::string_view f : fields) {
    h = fnv1a_update(h, std::to_string(f.size()));
    h = fnv1a_update(h, "|");
    h = fnv1a_update(h, f);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

/// Append-only store of raw judge responses keyed by a content hash of the
/// task, template version, model id, and prompt direction. A warm cache
/// makes judging runs resumable and repeatable without network access.
/// The recorded fetch time is replayed from the cache, so reruns emit
/// byte-identical result files.
class VerdictCache {
public:
  struct Entry {
    std::string response;
    std::string fetched_at;
  };

  explicit VerdictCache(std::filesystem::path file) : file_(std::move(file)) {
    std::ifstream in(file_);
    if (!in) return;  // cold cache
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (j.is_discarded() || !j.is_object() || !j.contains("key") || !j.contains("response")) {
        throw ParseError(line_no, "malformed cache record in " + file_.string());
      }
      Entry entry;
      entry.response = j["response"].get<std::string>();
      if (j.contains("fetched_at")) entry.fetched_at = j["fetched_at"].get<std::string>();
      entries_[j["key"].get<std::string>()] = std::move(entry);
    }
  }

  static std::string key_for(const JudgeTask& task, std::string_view template_version,
                             std::string_view model_id, std::string_view direction) {
    return detail::content_hash({task.item_id, task.question, task.reference_answer,
                                 task.generated_answer, template_version, model_id, direction});
  }

  std::optional<Entry> lookup(const std::string& key) const {
    std::scoped_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  /// Records a response and appends it to the backing file. Single writer:
  /// all mutation is serialized through this call.
  Entry insert(const std::string& key, const JudgeTask& task, std::string_view template_version,
               std::string_view model_id, std::string_view direction, std::string response) {
    std::scoped_lock lock(mutex_);
    Entry entry{std::move(response), detail::utc_timestamp()};
    std::ofstream out(file_, std::ios::app);
    if (!out) {
      throw IoError("cannot append to cache file " + file_.string());
    }
    nlohmann::ordered_json j;
    j["key"] = key;
    j["item_id"] = task.item_id;
    j["model"] = std::string(model_id);
    j["template_version"] = std::string(template_version);
    j["direction"] = std::string(direction);
    j["response"] = entry.response;
    j["fetched_at"] = entry.fetched_at;
    out << j.dump() << '\n';
    out.flush();
    if (!out) {
      throw IoError("write failed for cache file " + file_.string());
    }
    entries_[key] = entry;
    return entry;
  }

  std::size_t size() const {
    std::scoped_lock lock(mutex_);
    return entries_.size();
  }

private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::map<std::string, Entry> entries_;
};

}  // namespace judgekit
