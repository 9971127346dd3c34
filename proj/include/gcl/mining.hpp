#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gcl/graded_pairs.hpp"
#include "gcl/rng.hpp"

// Label-only batch composition: each batch draws fixed quotas from psi bins.
namespace gcl::mining {

enum class BatchStrategy { A, B, C, D };

BatchStrategy parse_strategy(std::string_view name);
std::string_view to_string(BatchStrategy s);

// One psi interval of a strategy together with its share of the batch.
struct BinSpec {
  std::string_view name;
  double lo;
  double hi;
  bool lo_closed;
  bool hi_closed;
  double quota;

  bool contains(double psi) const {
    const bool above = lo_closed ? psi >= lo : psi > lo;
    const bool below = hi_closed ? psi <= hi : psi < hi;
    return above && below;
  }
};

//   A: [0.5,1] 1/2, (0,0.5) 1/4, {0} 1/4
//   B: [0.75,1] 1/4, [0.5,0.75) 1/4, (0,0.5) 1/4, {0} 1/4
//   C: [0.5,1] 1/3, (0,0.5) 1/3, {0} 1/3
//   D: [0.5,1] 1/2, [0,0.5) 1/2
std::span<const BinSpec> bins(BatchStrategy s);

// Index into bins(s). Throws InvalidInput for psi outside [0, 1].
std::size_t bin_of(double psi, BatchStrategy s);

// Largest-remainder apportionment of batch_size over the strategy quotas;
// ties go to the lower bin index.
std::vector<std::size_t> bin_counts(BatchStrategy s, std::size_t batch_size);

struct Batch {
  std::vector<PairRef> pairs;
};

// Every logical pair of the set (implicit zeros included), grouped by bin.
std::vector<std::vector<PairRef>> partition(const GradedPairSet& pairs, BatchStrategy s);

// Stateful sampler. Each bin is shuffled at the start of every epoch and read
// without replacement; a bin that runs out mid-epoch is reshuffled and reused.
// An epoch lasts max over bins of ceil(bin size / bin count) batches.
class EpochSampler {
 public:
  // Throws DegenerateInput naming the first bin that has a quota but no pairs.
  EpochSampler(const GradedPairSet& pairs, BatchStrategy strategy, std::size_t batch_size,
               std::uint64_t seed);

  std::size_t batches_per_epoch() const { return batches_per_epoch_; }
  std::size_t batch_size() const { return batch_size_; }
  std::span<const std::size_t> counts() const { return counts_; }
  std::size_t epoch() const { return epoch_; }

  // Next batch; crosses into the following epoch when the current one is done.
  Batch next();

  // The batches of one full epoch, starting from a fresh epoch boundary.
  std::vector<Batch> next_epoch();

 private:
  void start_epoch();
  PairRef draw(std::size_t bin);

  BatchStrategy strategy_;
  std::size_t batch_size_;
  Rng rng_;
  std::vector<std::vector<PairRef>> bins_;
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> cursors_;
  std::size_t batches_per_epoch_ = 0;
  std::size_t batch_in_epoch_ = 0;
  std::size_t epoch_ = 0;
  bool started_ = false;
};

// First batch of a fresh sampler.
Batch sample_batch(const GradedPairSet& pairs, BatchStrategy strategy, std::size_t batch_size,
                   std::uint64_t seed);

// Batches of the first epoch.
std::vector<Batch> epoch_schedule(const GradedPairSet& pairs, BatchStrategy strategy,
                                  std::size_t batch_size, std::uint64_t seed);

}  // namespace gcl::mining
