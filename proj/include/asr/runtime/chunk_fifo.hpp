#pragma once

#include "asr/core/types.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>

namespace asr::runtime {

// Bounded single-producer/single-consumer queue of fixed-size chunk slots.
// All storage is allocated in the constructor; push and pop copy sample data
// in and out of the slots and never allocate or lock.
//
// One slot more than `capacity` is kept so the consumer can copy out of a
// slot it has claimed while the producer keeps filling the others. The
// producer may also reclaim the oldest queued chunk (push_drop_oldest); both
// sides claim a queued index with a CAS on the read index, so every chunk is
// either popped or dropped, never both.
class ChunkFifo {
public:
  ChunkFifo(Eigen::Index channels, Eigen::Index chunk_capacity, std::size_t capacity);

  ChunkFifo(const ChunkFifo&) = delete;
  ChunkFifo& operator=(const ChunkFifo&) = delete;

  struct PushResult {
    bool pushed{false};
    int dropped{0}; // chunks discarded by this call (queued ones or the new one)
  };

  // Producer side. try_push fails when full; push_drop_oldest discards the
  // oldest queued chunk to make room. Blocks wider than chunk_capacity are a
  // precondition violation (checked with assert).
  bool try_push(const Eigen::Ref<const Matrix>& block, std::int64_t first_sample_index);
  PushResult push_drop_oldest(const Eigen::Ref<const Matrix>& block,
                              std::int64_t first_sample_index);

  // Consumer side. Copies the oldest chunk into the leading columns of `out`
  // (which must have chunk_capacity columns) and returns its sample count.
  std::optional<Eigen::Index> try_pop(Eigen::Ref<Matrix> out,
                                      std::int64_t* first_sample_index = nullptr);

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  bool full() const { return size() >= capacity_; }
  std::size_t capacity() const { return capacity_; }
  Eigen::Index channels() const { return channels_; }
  Eigen::Index chunk_capacity() const { return chunk_capacity_; }

private:
  struct Slot {
    Matrix data;
    Eigen::Index samples{0};
    std::int64_t first_sample_index{0};
    std::atomic<bool> busy{false};
  };

  void write_slot(Slot& slot, const Eigen::Ref<const Matrix>& block, std::int64_t first);

  Eigen::Index channels_;
  Eigen::Index chunk_capacity_;
  std::size_t capacity_;
  std::size_t storage_;
  std::unique_ptr<Slot[]> slots_;

  alignas(64) std::atomic<std::uint64_t> head_{0}; // written by producer only
  alignas(64) std::atomic<std::uint64_t> tail_{0}; // advanced by consumer pops and producer drops
};

} // namespace asr::runtime
