#include "gcl/mining.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "gcl/error.hpp"

namespace gcl::mining {
namespace {

constexpr std::array<BinSpec, 3> kStrategyA{{
    {"positive [0.5,1]", 0.5, 1.0, true, true, 0.5},
    {"soft negative (0,0.5)", 0.0, 0.5, false, false, 0.25},
    {"hard negative {0}", 0.0, 0.0, true, true, 0.25},
}};

constexpr std::array<BinSpec, 4> kStrategyB{{
    {"strong positive [0.75,1]", 0.75, 1.0, true, true, 0.25},
    {"weak positive [0.5,0.75)", 0.5, 0.75, true, false, 0.25},
    {"soft negative (0,0.5)", 0.0, 0.5, false, false, 0.25},
    {"hard negative {0}", 0.0, 0.0, true, true, 0.25},
}};

constexpr std::array<BinSpec, 3> kStrategyC{{
    {"positive [0.5,1]", 0.5, 1.0, true, true, 1.0 / 3.0},
    {"soft negative (0,0.5)", 0.0, 0.5, false, false, 1.0 / 3.0},
    {"hard negative {0}", 0.0, 0.0, true, true, 1.0 / 3.0},
}};

constexpr std::array<BinSpec, 2> kStrategyD{{
    {"positive [0.5,1]", 0.5, 1.0, true, true, 0.5},
    {"negative [0,0.5)", 0.0, 0.5, true, false, 0.5},
}};

}  // namespace

BatchStrategy parse_strategy(std::string_view name) {
  if (name == "A" || name == "a") return BatchStrategy::A;
  if (name == "B" || name == "b") return BatchStrategy::B;
  if (name == "C" || name == "c") return BatchStrategy::C;
  if (name == "D" || name == "d") return BatchStrategy::D;
  throw InvalidInput("unknown batch strategy '" + std::string(name) + "'");
}

std::string_view to_string(BatchStrategy s) {
  switch (s) {
    case BatchStrategy::A: return "A";
    case BatchStrategy::B: return "B";
    case BatchStrategy::C: return "C";
    case BatchStrategy::D: return "D";
  }
  return "?";
}

std::span<const BinSpec> bins(BatchStrategy s) {
  switch (s) {
    case BatchStrategy::A: return kStrategyA;
    case BatchStrategy::B: return kStrategyB;
    case BatchStrategy::C: return kStrategyC;
    case BatchStrategy::D: return kStrategyD;
  }
  return {};
}

std::size_t bin_of(double psi, BatchStrategy s) {
  if (!(psi >= 0.0 && psi <= 1.0)) throw InvalidInput("psi must be in [0, 1]");
  const auto table = bins(s);
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].contains(psi)) return i;
  }
  throw InvalidInput("psi not covered by strategy bins");  // unreachable for valid tables
}

std::vector<std::size_t> bin_counts(BatchStrategy s, std::size_t batch_size) {
  const auto table = bins(s);
  std::vector<std::size_t> counts(table.size());
  std::vector<double> remainders(table.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double exact = table[i].quota * static_cast<double>(batch_size);
    // Guard against 1/3 * 3k landing a hair below an integer.
    const double fl = std::floor(exact + 1e-9);
    counts[i] = static_cast<std::size_t>(fl);
    remainders[i] = std::max(0.0, exact - fl);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(table.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b] + 1e-12;
  });
  for (std::size_t k = 0; assigned < batch_size; ++k, ++assigned) ++counts[order[k % order.size()]];
  return counts;
}

std::vector<std::vector<PairRef>> partition(const GradedPairSet& pairs, BatchStrategy s) {
  std::vector<std::vector<PairRef>> out(bins(s).size());
  for (const PairRef& p : pairs.stored()) out[bin_of(p.psi, s)].push_back(p);
  const std::size_t zero_bin = bin_of(0.0, s);
  const auto nq = static_cast<std::uint32_t>(pairs.query_ids().size());
  const auto nm = static_cast<std::uint32_t>(pairs.map_ids().size());
  for (std::uint32_t q = 0; q < nq; ++q) {
    for (std::uint32_t m = 0; m < nm; ++m) {
      if (!pairs.contains(q, m)) out[zero_bin].push_back({q, m, 0.0});
    }
  }
  return out;
}

EpochSampler::EpochSampler(const GradedPairSet& pairs, BatchStrategy strategy,
                           std::size_t batch_size, std::uint64_t seed)
    : strategy_(strategy), batch_size_(batch_size), rng_(seed) {
  if (batch_size == 0) throw InvalidInput("batch size must be positive");
  bins_ = partition(pairs, strategy);
  counts_ = bin_counts(strategy, batch_size);
  cursors_.assign(bins_.size(), 0);
  const auto table = bins(strategy);
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    if (counts_[i] == 0) continue;
    if (bins_[i].empty()) {
      throw DegenerateInput("strategy " + std::string(to_string(strategy)) + " needs pairs in bin '" +
                            std::string(table[i].name) + "' but it is empty");
    }
    const std::size_t needed = (bins_[i].size() + counts_[i] - 1) / counts_[i];
    batches_per_epoch_ = std::max(batches_per_epoch_, needed);
  }
}

void EpochSampler::start_epoch() {
  if (started_) ++epoch_;
  started_ = true;
  batch_in_epoch_ = 0;
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    rng_.shuffle(std::span<PairRef>(bins_[i]));
    cursors_[i] = 0;
  }
}

PairRef EpochSampler::draw(std::size_t bin) {
  auto& pool = bins_[bin];
  if (cursors_[bin] == pool.size()) {
    rng_.shuffle(std::span<PairRef>(pool));
    cursors_[bin] = 0;
  }
  return pool[cursors_[bin]++];
}

Batch EpochSampler::next() {
  if (!started_ || batch_in_epoch_ == batches_per_epoch_) start_epoch();
  Batch batch;
  batch.pairs.reserve(batch_size_);
  for (std::size_t b = 0; b < bins_.size(); ++b) {
    for (std::size_t k = 0; k < counts_[b]; ++k) batch.pairs.push_back(draw(b));
  }
  ++batch_in_epoch_;
  return batch;
}

std::vector<Batch> EpochSampler::next_epoch() {
  if (started_ && batch_in_epoch_ != batches_per_epoch_) start_epoch();
  std::vector<Batch> out;
  out.reserve(batches_per_epoch_);
  for (std::size_t i = 0; i < batches_per_epoch_; ++i) out.push_back(next());
  return out;
}

Batch sample_batch(const GradedPairSet& pairs, BatchStrategy strategy, std::size_t batch_size,
                   std::uint64_t seed) {
  EpochSampler sampler(pairs, strategy, batch_size, seed);
  return sampler.next();
}

std::vector<Batch> epoch_schedule(const GradedPairSet& pairs, BatchStrategy strategy,
                                  std::size_t batch_size, std::uint64_t seed) {
  EpochSampler sampler(pairs, strategy, batch_size, seed);
  return sampler.next_epoch();
}

}  // namespace gcl::mining
