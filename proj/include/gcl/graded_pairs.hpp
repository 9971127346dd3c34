#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace gcl {

// Graded similarity of one query/map image pair, psi in [0, 1].
struct GradedPair {
  std::string query_id;
  std::string map_id;
  double psi = 0.0;
};

// Compact pair used in bulk paths: indices into the owning set's id tables.
struct PairRef {
  std::uint32_t query = 0;
  std::uint32_t map = 0;
  double psi = 0.0;
};

// All query x map pairs over two id universes. Only explicitly added pairs are
// stored; every other combination is an implicit psi = 0 pair.
class GradedPairSet {
 public:
  GradedPairSet() = default;
  // Throws InvalidInput on duplicate ids within either list.
  GradedPairSet(std::vector<std::string> query_ids, std::vector<std::string> map_ids);

  // Builds the universes from the ids in order of first appearance.
  static GradedPairSet from_records(std::span<const GradedPair> records);

  // Throws InvalidInput for psi outside [0, 1] or a duplicate (query, map).
  void add(std::uint32_t query, std::uint32_t map, double psi);
  void add(const std::string& query_id, const std::string& map_id, double psi);

  const std::vector<std::string>& query_ids() const { return query_ids_; }
  const std::vector<std::string>& map_ids() const { return map_ids_; }

  // Explicitly stored pairs, in insertion order.
  std::span<const PairRef> stored() const { return pairs_; }

  // Number of logical entries, |queries| x |maps|.
  std::size_t logical_size() const { return query_ids_.size() * map_ids_.size(); }

  double psi(std::uint32_t query, std::uint32_t map) const;
  // Unknown ids are an error, not an implicit zero.
  double psi(const std::string& query_id, const std::string& map_id) const;
  bool contains(std::uint32_t query, std::uint32_t map) const;

  std::uint32_t query_index(const std::string& id) const;
  std::uint32_t map_index(const std::string& id) const;
  std::optional<std::uint32_t> find_query(const std::string& id) const;
  std::optional<std::uint32_t> find_map(const std::string& id) const;

  // Stored pairs as records, ordered by (query_id, map_id).
  std::vector<GradedPair> sorted_records() const;

 private:
  static std::uint64_t key(std::uint32_t q, std::uint32_t m) {
    return (static_cast<std::uint64_t>(q) << 32) | m;
  }

  std::vector<std::string> query_ids_;
  std::vector<std::string> map_ids_;
  std::unordered_map<std::string, std::uint32_t> query_lookup_;
  std::unordered_map<std::string, std::uint32_t> map_lookup_;
  std::vector<PairRef> pairs_;
  std::unordered_map<std::uint64_t, std::size_t> pair_lookup_;
};

}  // namespace gcl
