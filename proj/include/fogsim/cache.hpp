#pragma once

#include <cstddef>
#include <list>
#include <string>
#include <unordered_map>
#include <vector>

namespace fogsim {

// LRU key cache. Only presence is tracked; payloads live elsewhere.
// capacity 0 disables caching entirely (put is a no-op).
class Cache {
 public:
  explicit Cache(std::size_t capacity) : capacity_(capacity) {}

  // Hit moves the key to most-recently-used. Miss leaves state untouched.
  bool get(const std::string& key);

  // Insert or refresh. Evicts the least-recently-used entry when full.
  void put(const std::string& key);

  // Presence check without touching recency (used to peek at candidate
  // nodes during route planning).
  bool contains(const std::string& key) const { return index_.count(key) > 0; }

  std::size_t size() const { return order_.size(); }
  std::size_t capacity() const { return capacity_; }
  void clear();

  // Least-recently-used first. For tests and the recency-list oracle.
  std::vector<std::string> keys_lru_order() const;

 private:
  std::size_t capacity_;
  std::list<std::string> order_;  // LRU at front, MRU at back
  std::unordered_map<std::string, std::list<std::string>::iterator> index_;
};

}  // namespace fogsim
