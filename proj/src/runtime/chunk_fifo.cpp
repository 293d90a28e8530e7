#include "asr/runtime/chunk_fifo.hpp"

#include "asr/core/error.hpp"

#include <cassert>

namespace asr::runtime {

static_assert(std::atomic<std::uint64_t>::is_always_lock_free);
static_assert(std::atomic<bool>::is_always_lock_free);

ChunkFifo::ChunkFifo(Eigen::Index channels, Eigen::Index chunk_capacity, std::size_t capacity)
    : channels_(channels), chunk_capacity_(chunk_capacity), capacity_(capacity),
      storage_(capacity + 1) {
  if (channels < 1 || chunk_capacity < 1 || capacity < 1)
    throw Error(ErrorCode::InvalidValue, "ChunkFifo dimensions must be positive");
  slots_ = std::make_unique<Slot[]>(storage_);
  for (std::size_t i = 0; i < storage_; ++i) slots_[i].data = Matrix::Zero(channels, chunk_capacity);
}

std::size_t ChunkFifo::size() const {
  const std::uint64_t t = tail_.load();
  const std::uint64_t h = head_.load();
  return h > t ? static_cast<std::size_t>(h - t) : 0;
}

void ChunkFifo::write_slot(Slot& slot, const Eigen::Ref<const Matrix>& block, std::int64_t first) {
  assert(block.rows() == channels_ && block.cols() <= chunk_capacity_);
  slot.data.leftCols(block.cols()) = block;
  slot.samples = block.cols();
  slot.first_sample_index = first;
}

bool ChunkFifo::try_push(const Eigen::Ref<const Matrix>& block, std::int64_t first_sample_index) {
  const std::uint64_t h = head_.load(std::memory_order_relaxed);
  if (h - tail_.load() >= capacity_) return false;
  Slot& slot = slots_[h % storage_];
  if (slot.busy.load()) return false;
  write_slot(slot, block, first_sample_index);
  head_.store(h + 1);
  return true;
}

ChunkFifo::PushResult ChunkFifo::push_drop_oldest(const Eigen::Ref<const Matrix>& block,
                                                  std::int64_t first_sample_index) {
  PushResult r;
  const std::uint64_t h = head_.load(std::memory_order_relaxed);
  for (;;) {
    std::uint64_t t = tail_.load();
    if (h - t < capacity_) break;
    if (tail_.compare_exchange_strong(t, t + 1)) {
      ++r.dropped;
      break;
    }
    // The consumer claimed the oldest chunk first; there is room now.
  }
  Slot& slot = slots_[h % storage_];
  if (slot.busy.load()) {
    // The consumer is still copying out of the slot we would overwrite
    // (only possible after drops lapped it). Discard the new chunk instead.
    ++r.dropped;
    return r;
  }
  write_slot(slot, block, first_sample_index);
  head_.store(h + 1);
  r.pushed = true;
  return r;
}

std::optional<Eigen::Index> ChunkFifo::try_pop(Eigen::Ref<Matrix> out,
                                               std::int64_t* first_sample_index) {
  assert(out.rows() == channels_ && out.cols() >= chunk_capacity_);
  for (;;) {
    std::uint64_t t = tail_.load();
    if (t == head_.load()) return std::nullopt;
    Slot& slot = slots_[t % storage_];
    slot.busy.store(true);
    if (tail_.compare_exchange_strong(t, t + 1)) {
      const Eigen::Index n = slot.samples;
      out.leftCols(n) = slot.data.leftCols(n);
      if (first_sample_index) *first_sample_index = slot.first_sample_index;
      slot.busy.store(false);
      return n;
    }
    slot.busy.store(false);
  }
}

} // namespace asr::runtime
