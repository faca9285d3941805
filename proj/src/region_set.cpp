#include "segdist/region_set.hpp"

#include "segdist/errors.hpp"

#include <string>

namespace segdist {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RegionSet RegionSet::from_ids(std::size_t capacity, std::span<const int> ids) {
  RegionSet s(capacity);
  for (int id : ids) s.insert(id);
  return s;
}

RegionSet RegionSet::full(std::size_t capacity) {
  RegionSet s(capacity);
  s.bits_.set();
  return s;
}

void RegionSet::insert(int id) {
  if (id < 0 || static_cast<std::size_t>(id) >= bits_.size())
    throw InputError("region id " + std::to_string(id) + " out of range [0, " + std::to_string(bits_.size()) + ")");
  bits_.set(static_cast<std::size_t>(id));
}

void RegionSet::erase(int id) {
  if (id < 0 || static_cast<std::size_t>(id) >= bits_.size())
    throw InputError("region id " + std::to_string(id) + " out of range [0, " + std::to_string(bits_.size()) + ")");
  bits_.reset(static_cast<std::size_t>(id));
}

int RegionSet::first() const noexcept {
  auto i = bits_.find_first();
  return i == Bits::npos ? -1 : static_cast<int>(i);
}

int RegionSet::next(int id) const noexcept {
  auto i = bits_.find_next(static_cast<std::size_t>(id));
  return i == Bits::npos ? -1 : static_cast<int>(i);
}

std::vector<int> RegionSet::ids() const {
  std::vector<int> out;
  out.reserve(size());
  for_each([&](int i) { out.push_back(i); });
  return out;
}

void RegionSet::check_same(const RegionSet& other) const {
  if (other.bits_.size() != bits_.size())
    throw InputError("region sets from different universes (" + std::to_string(bits_.size()) + " vs " +
                     std::to_string(other.bits_.size()) + ")");
}

bool RegionSet::intersects(const RegionSet& other) const {
  check_same(other);
  return bits_.intersects(other.bits_);
}

bool RegionSet::is_subset_of(const RegionSet& other) const {
  check_same(other);
  return bits_.is_subset_of(other.bits_);
}

RegionSet& RegionSet::operator|=(const RegionSet& other) {
  check_same(other);
  bits_ |= other.bits_;
  return *this;
}

RegionSet& RegionSet::operator&=(const RegionSet& other) {
  check_same(other);
  bits_ &= other.bits_;
  return *this;
}

RegionSet& RegionSet::operator-=(const RegionSet& other) {
  check_same(other);
  bits_ -= other.bits_;
  return *this;
}

std::uint64_t RegionSet::stable_hash() const noexcept {
  std::uint64_t h = splitmix64(bits_.size());
  for_each([&](int i) { h = splitmix64(h ^ static_cast<std::uint64_t>(i)); });
  return h;
}

std::strong_ordering compare_ids(const RegionSet& a, const RegionSet& b) {
  int x = a.first();
  int y = b.first();
  while (x >= 0 && y >= 0) {
    if (x != y) return x <=> y;
    x = a.next(x);
    y = b.next(y);
  }
  if (x < 0 && y < 0) return std::strong_ordering::equal;
  return x < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
}

}  // namespace segdist
