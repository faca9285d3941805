#pragma once

#include <boost/dynamic_bitset.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace segdist {

/// A set of region ids drawn from a fixed universe `[0, capacity)`.
///
/// Backed by a bitset; every set that takes part in a binary operation must
/// share the same capacity (the region count of the graph it belongs to).
class RegionSet {
 public:
  RegionSet() = default;
  explicit RegionSet(std::size_t capacity) : bits_(capacity) {}

  /// Throws InputError for ids outside `[0, capacity)`.
  static RegionSet from_ids(std::size_t capacity, std::span<const int> ids);
  static RegionSet from_ids(std::size_t capacity, std::initializer_list<int> ids) {
    return from_ids(capacity, std::span<const int>(ids.begin(), ids.size()));
  }
  static RegionSet full(std::size_t capacity);

  std::size_t capacity() const noexcept { return bits_.size(); }
  std::size_t size() const noexcept { return bits_.count(); }
  bool empty() const noexcept { return bits_.none(); }

  bool contains(int id) const noexcept {
    return id >= 0 && static_cast<std::size_t>(id) < bits_.size() && bits_.test(static_cast<std::size_t>(id));
  }
  void insert(int id);
  void erase(int id);

  /// Lowest member, or -1 when empty.
  int first() const noexcept;
  /// Next member strictly above `id`, or -1.
  int next(int id) const noexcept;

  std::vector<int> ids() const;

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (auto i = bits_.find_first(); i != Bits::npos; i = bits_.find_next(i)) fn(static_cast<int>(i));
  }

  bool intersects(const RegionSet& other) const;
  bool is_subset_of(const RegionSet& other) const;

  RegionSet& operator|=(const RegionSet& other);
  RegionSet& operator&=(const RegionSet& other);
  RegionSet& operator-=(const RegionSet& other);
  friend RegionSet operator|(RegionSet a, const RegionSet& b) { return a |= b; }
  friend RegionSet operator&(RegionSet a, const RegionSet& b) { return a &= b; }
  friend RegionSet operator-(RegionSet a, const RegionSet& b) { return a -= b; }

  friend bool operator==(const RegionSet& a, const RegionSet& b) { return a.bits_ == b.bits_; }

  /// Platform-independent hash of the member ids and capacity.
  std::uint64_t stable_hash() const noexcept;

 private:
  using Bits = boost::dynamic_bitset<std::uint64_t>;
  void check_same(const RegionSet& other) const;
  Bits bits_;
};

/// Lexicographic comparison of the sorted id sequences ({0,2} < {1}).
std::strong_ordering compare_ids(const RegionSet& a, const RegionSet& b);

struct RegionSetHash {
  std::size_t operator()(const RegionSet& s) const noexcept { return static_cast<std::size_t>(s.stable_hash()); }
};

}  // namespace segdist
