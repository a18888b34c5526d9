#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace s2c {

/// Map preserving insertion order of keys. Lookup is linear; every container
/// in this project is query-sized, so simplicity beats asymptotics.
template <typename V>
class OrderedMap {
public:
    using Entry = std::pair<std::string, V>;
    using const_iterator = typename std::vector<Entry>::const_iterator;

    bool contains(const std::string& key) const { return find(key) != nullptr; }

    const V* find(const std::string& key) const {
        for (const auto& e : entries_)
            if (e.first == key) return &e.second;
        return nullptr;
    }

    V* find(const std::string& key) {
        for (auto& e : entries_)
            if (e.first == key) return &e.second;
        return nullptr;
    }

    /// Inserts or overwrites; insertion order is kept on overwrite.
    V& set(const std::string& key, V value) {
        if (V* existing = find(key)) {
            *existing = std::move(value);
            return *existing;
        }
        entries_.emplace_back(key, std::move(value));
        return entries_.back().second;
    }

    const V& at(const std::string& key) const {
        const V* v = find(key);
        if (!v) throw std::out_of_range("OrderedMap: missing key '" + key + "'");
        return *v;
    }

    V& operator[](const std::string& key) {
        if (V* existing = find(key)) return *existing;
        entries_.emplace_back(key, V{});
        return entries_.back().second;
    }

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const_iterator begin() const { return entries_.begin(); }
    const_iterator end() const { return entries_.end(); }
    const std::vector<Entry>& entries() const { return entries_; }

    std::vector<std::string> keys() const {
        std::vector<std::string> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back(e.first);
        return out;
    }

    bool operator==(const OrderedMap& other) const { return entries_ == other.entries_; }

private:
    std::vector<Entry> entries_;
};

}  // namespace s2c
