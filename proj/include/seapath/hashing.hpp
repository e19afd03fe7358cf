#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "seapath/agents.hpp"

namespace seapath {

using Key = std::vector<std::int64_t>;

struct KeyHash {
  std::size_t operator()(const Key& v) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto x : v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

inline void append_key(Key& key, const Plan& plan) {
  key.push_back(plan.agent);
  key.push_back(static_cast<std::int64_t>(plan.actions.size()));
  for (const auto& a : plan.actions) {
    if (const auto* m = std::get_if<MoveAction>(&a)) {
      key.push_back(m->location.index());
      key.push_back(m->t.ticks());
    } else {
      const auto& w = std::get<WaitAction>(a);
      key.push_back(-1);
      key.push_back(w.d.ticks());
    }
  }
}

inline Key solution_key(std::span<const Plan> plans) {
  Key key;
  for (const auto& p : plans) append_key(key, p);
  return key;
}

}  // namespace seapath
