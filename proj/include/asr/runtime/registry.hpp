#pragma once

#include "asr/core/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace asr::runtime {

// Named side-channel payload shared between pipeline stages. `payload` has
// `stride` rows (channels) and a fixed column capacity; the first `samples`
// columns are valid for the current cycle.
struct SideChannelVariable {
  std::string name;
  Eigen::Index stride{0};
  Matrix payload;
  Eigen::Index samples{0};
  std::int64_t sample_counter{0}; // total samples published so far
  bool locked{false};

  Eigen::Index capacity() const { return payload.cols(); }
  Eigen::Block<const Matrix, Eigen::Dynamic, Eigen::Dynamic, true> view() const {
    return payload.leftCols(samples);
  }
};

class SideChannelRegistry {
public:
  // Creates or re-dimensions a variable. Re-dimensioning a locked variable
  // is InvalidLifecycle.
  SideChannelVariable& register_variable(const std::string& name, Eigen::Index stride,
                                         Eigen::Index capacity);

  SideChannelVariable* find(std::string_view name);
  const SideChannelVariable* find(std::string_view name) const;
  SideChannelVariable& at(std::string_view name);

  // Publishes a block into a variable (replacing the previous cycle's
  // contents). Wrong row count is ChannelMismatch; more columns than the
  // capacity is InvalidInput.
  void write(std::string_view name, const Eigen::Ref<const Matrix>& block);

  void remove(std::string_view name);
  std::size_t size() const { return vars_.size(); }

private:
  std::map<std::string, std::unique_ptr<SideChannelVariable>, std::less<>> vars_;
};

} // namespace asr::runtime
