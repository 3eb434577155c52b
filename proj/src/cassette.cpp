#include "overton/cassette.hpp"

#include <sstream>

#include "overton/errors.hpp"

namespace overton {

using nlohmann::json;

namespace {

std::optional<CassetteEntry> parse_line(const std::string& line) {
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::parse_error&) {
        return std::nullopt;
    }
    if (!doc.is_object() || !doc.contains("record_id") || !doc["record_id"].is_string() ||
        !doc.contains("kind") || !doc["kind"].is_string() || !doc.contains("payload") ||
        !doc["payload"].is_object())
        return std::nullopt;
    return CassetteEntry{doc["record_id"].get<std::string>(), doc["kind"].get<std::string>(),
                         std::move(doc["payload"])};
}

}  // namespace

Cassette::Cassette(std::filesystem::path path) : path_(std::move(path)) { load(); }

void Cassette::load() {
    if (!std::filesystem::exists(*path_)) return;
    std::ifstream in(*path_, std::ios::binary);
    if (!in) throw ConfigError("cannot read cassette " + path_->string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    std::size_t good_end = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
        auto nl = content.find('\n', pos);
        bool last = nl == std::string::npos;
        auto end = last ? content.size() : nl;
        std::string line = content.substr(pos, end - pos);
        ++line_no;
        std::size_t next = last ? content.size() : nl + 1;
        bool is_final = next >= content.size();
        if (line.empty()) {
            pos = next;
            if (!last) good_end = next;
            continue;
        }
        auto entry = parse_line(line);
        if (!entry) {
            if (is_final) {
                dropped_tail_ = true;
                break;
            }
            throw ConfigError("corrupt cassette " + path_->string() + " at line " +
                              std::to_string(line_no));
        }
        insert_locked(std::move(*entry));
        good_end = next;
        needs_newline_ = last;
        pos = next;
    }
    if (dropped_tail_) {
        std::filesystem::resize_file(*path_, good_end);
        needs_newline_ = good_end > 0 && content[good_end - 1] != '\n';
    }
}

void Cassette::insert_locked(CassetteEntry entry) {
    auto key = std::make_pair(entry.kind, entry.record_id);
    if (index_.count(key)) return;
    index_.emplace(std::move(key), entries_.size());
    entries_.push_back(std::move(entry));
}

std::string Cassette::serialize(const CassetteEntry& entry) {
    json doc = {{"record_id", entry.record_id}, {"kind", entry.kind}, {"payload", entry.payload}};
    return doc.dump();
}

bool Cassette::append(std::string_view kind, const std::string& record_id, const json& payload) {
    std::lock_guard lock(mu_);
    auto key = std::make_pair(std::string(kind), record_id);
    if (index_.count(key)) return false;
    CassetteEntry entry{record_id, std::string(kind), payload};
    if (path_) {
        std::ofstream out(*path_, std::ios::binary | std::ios::app);
        if (!out) throw ConfigError("cannot append to cassette " + path_->string());
        if (needs_newline_) out << '\n';
        out << serialize(entry) << '\n';
        out.flush();
        if (!out) throw ConfigError("write to cassette " + path_->string() + " failed");
        needs_newline_ = false;
    }
    index_.emplace(std::move(key), entries_.size());
    entries_.push_back(std::move(entry));
    return true;
}

std::optional<json> Cassette::find(std::string_view kind, const std::string& record_id) const {
    std::lock_guard lock(mu_);
    auto it = index_.find({std::string(kind), record_id});
    if (it == index_.end()) return std::nullopt;
    return std::optional<json>(std::in_place, entries_[it->second].payload);
}

bool Cassette::contains(std::string_view kind, const std::string& record_id) const {
    std::lock_guard lock(mu_);
    return index_.count({std::string(kind), record_id}) > 0;
}

std::vector<CassetteEntry> Cassette::entries() const {
    std::lock_guard lock(mu_);
    return {entries_.begin(), entries_.end()};
}

std::size_t Cassette::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

}  // namespace overton
