#include "gcl/graded_pairs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gcl/error.hpp"

namespace gcl {
namespace {

std::unordered_map<std::string, std::uint32_t> build_lookup(const std::vector<std::string>& ids,
                                                            const char* what) {
  if (ids.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidInput(std::string("too many ") + what + " ids");
  }
  std::unordered_map<std::string, std::uint32_t> lookup;
  lookup.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!lookup.emplace(ids[i], static_cast<std::uint32_t>(i)).second) {
      throw InvalidInput(std::string("duplicate ") + what + " id '" + ids[i] + "'");
    }
  }
  return lookup;
}

}  // namespace

GradedPairSet::GradedPairSet(std::vector<std::string> query_ids, std::vector<std::string> map_ids)
    : query_ids_(std::move(query_ids)), map_ids_(std::move(map_ids)) {
  query_lookup_ = build_lookup(query_ids_, "query");
  map_lookup_ = build_lookup(map_ids_, "map");
}

GradedPairSet GradedPairSet::from_records(std::span<const GradedPair> records) {
  std::vector<std::string> queries;
  std::vector<std::string> maps;
  std::unordered_map<std::string, bool> seen_q;
  std::unordered_map<std::string, bool> seen_m;
  for (const GradedPair& r : records) {
    if (seen_q.emplace(r.query_id, true).second) queries.push_back(r.query_id);
    if (seen_m.emplace(r.map_id, true).second) maps.push_back(r.map_id);
  }
  GradedPairSet set(std::move(queries), std::move(maps));
  for (const GradedPair& r : records) set.add(r.query_id, r.map_id, r.psi);
  return set;
}

void GradedPairSet::add(std::uint32_t query, std::uint32_t map, double psi) {
  if (query >= query_ids_.size() || map >= map_ids_.size()) {
    throw InvalidInput("pair index out of range");
  }
  if (!(psi >= 0.0 && psi <= 1.0)) {
    throw InvalidInput("psi " + std::to_string(psi) + " outside [0, 1] for pair (" +
                       query_ids_[query] + ", " + map_ids_[map] + ")");
  }
  if (!pair_lookup_.emplace(key(query, map), pairs_.size()).second) {
    throw InvalidInput("duplicate pair (" + query_ids_[query] + ", " + map_ids_[map] + ")");
  }
  pairs_.push_back({query, map, psi});
}

void GradedPairSet::add(const std::string& query_id, const std::string& map_id, double psi) {
  add(query_index(query_id), map_index(map_id), psi);
}

double GradedPairSet::psi(std::uint32_t query, std::uint32_t map) const {
  const auto it = pair_lookup_.find(key(query, map));
  return it == pair_lookup_.end() ? 0.0 : pairs_[it->second].psi;
}

double GradedPairSet::psi(const std::string& query_id, const std::string& map_id) const {
  return psi(query_index(query_id), map_index(map_id));
}

bool GradedPairSet::contains(std::uint32_t query, std::uint32_t map) const {
  return pair_lookup_.count(key(query, map)) != 0;
}

std::uint32_t GradedPairSet::query_index(const std::string& id) const {
  const auto it = query_lookup_.find(id);
  if (it == query_lookup_.end()) throw InvalidInput("unknown query id '" + id + "'");
  return it->second;
}

std::uint32_t GradedPairSet::map_index(const std::string& id) const {
  const auto it = map_lookup_.find(id);
  if (it == map_lookup_.end()) throw InvalidInput("unknown map id '" + id + "'");
  return it->second;
}

std::optional<std::uint32_t> GradedPairSet::find_query(const std::string& id) const {
  const auto it = query_lookup_.find(id);
  if (it == query_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> GradedPairSet::find_map(const std::string& id) const {
  const auto it = map_lookup_.find(id);
  if (it == map_lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<GradedPair> GradedPairSet::sorted_records() const {
  std::vector<GradedPair> out;
  out.reserve(pairs_.size());
  for (const PairRef& p : pairs_) out.push_back({query_ids_[p.query], map_ids_[p.map], p.psi});
  std::sort(out.begin(), out.end(), [](const GradedPair& a, const GradedPair& b) {
    if (a.query_id != b.query_id) return a.query_id < b.query_id;
    return a.map_id < b.map_id;
  });
  return out;
}

}  // namespace gcl
