#pragma once

#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace overton {

inline constexpr std::string_view kKindEssay = "essay";
inline constexpr std::string_view kKindAssessment = "assessment";
inline constexpr std::string_view kKindFailure = "failure";
inline constexpr std::string_view kKindInstrument = "instrument";

struct CassetteEntry {
    std::string record_id;
    std::string kind;
    nlohmann::json payload;
};

/// Append-only store of model exchanges, one JSON document per line:
///   {"kind": ..., "payload": {...}, "record_id": ...}
///
/// At most one entry exists per (kind, record_id); appending an existing key
/// is a no-op. A corrupted final line (an interrupted write) is ignored on
/// load and cut off before the next append. All members are thread-safe.
class Cassette {
public:
    /// In-memory cassette with no backing file.
    Cassette() = default;
    /// Loads `path` if it exists; appends are written through to it.
    explicit Cassette(std::filesystem::path path);

    Cassette(const Cassette&) = delete;
    Cassette& operator=(const Cassette&) = delete;

    /// Returns false (and writes nothing) when the key already exists.
    bool append(std::string_view kind, const std::string& record_id, const nlohmann::json& payload);

    std::optional<nlohmann::json> find(std::string_view kind, const std::string& record_id) const;
    bool contains(std::string_view kind, const std::string& record_id) const;

    std::vector<CassetteEntry> entries() const;
    std::size_t size() const;

    /// True when loading dropped a corrupted trailing line.
    bool dropped_corrupt_tail() const { return dropped_tail_; }
    const std::optional<std::filesystem::path>& path() const { return path_; }

    static std::string serialize(const CassetteEntry& entry);

private:
    void load();
    void insert_locked(CassetteEntry entry);

    mutable std::mutex mu_;
    std::deque<CassetteEntry> entries_;
    std::map<std::pair<std::string, std::string>, std::size_t> index_;
    std::optional<std::filesystem::path> path_;
    bool dropped_tail_ = false;
    bool needs_newline_ = false;
};

}  // namespace overton
