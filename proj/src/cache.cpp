#include "fogsim/cache.hpp"

namespace fogsim {

bool Cache::get(const std::string& key) {
  auto it = index_.find(key);
  if (it == index_.end()) return false;
  order_.splice(order_.end(), order_, it->second);
  return true;
}

void Cache::put(const std::string& key) {
  if (capacity_ == 0) return;
  auto it = index_.find(key);
  if (it != index_.end()) {
    order_.splice(order_.end(), order_, it->second);
    return;
  }
  if (order_.size() >= capacity_) {
    index_.erase(order_.front());
    order_.pop_front();
  }
  order_.push_back(key);
  index_[key] = std::prev(order_.end());
}

void Cache::clear() {
  order_.clear();
  index_.clear();
}

std::vector<std::string> Cache::keys_lru_order() const {
  return {order_.begin(), order_.end()};
}

}  // namespace fogsim
