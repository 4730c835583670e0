#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace rost {

using WordId = std::uint32_t;
using TopicId = std::uint32_t;
using TokenId = std::size_t;
using Timestep = std::int64_t;

/// Sentinel for a token that has not received its initial label. Never counted.
inline constexpr TopicId kUnassigned = std::numeric_limits<TopicId>::max();

/// Spacetime location of an observed word. Space is in abstract integer
/// units (pixels for visual words); t is the observation index.
struct Position {
  std::int64_t x = 0;
  std::int64_t y = 0;
  Timestep t = 0;

  friend bool operator==(const Position&, const Position&) = default;
};

struct WordToken {
  WordId word = 0;
  Position pos;
  TopicId topic = kUnassigned;

  bool assigned() const noexcept { return topic != kUnassigned; }
};

struct ObservedWord {
  WordId word = 0;
  Position pos;

  friend bool operator==(const ObservedWord&, const ObservedWord&) = default;
};

/// All words that arrived at one timestep.
struct Observation {
  Timestep t = 0;
  std::vector<ObservedWord> words;
};

using Stream = std::vector<Observation>;

/// Index of a spacetime cell. Ordered by (ct, cy, cx), which is the batch
/// sweep order.
struct CellKey {
  std::int64_t cx = 0;
  std::int64_t cy = 0;
  std::int64_t ct = 0;

  friend bool operator==(const CellKey&, const CellKey&) = default;
  friend std::strong_ordering operator<=>(const CellKey& a, const CellKey& b) {
    if (auto c = a.ct <=> b.ct; c != 0) return c;
    if (auto c = a.cy <=> b.cy; c != 0) return c;
    return a.cx <=> b.cx;
  }
};

}  // namespace rost
