#include "asr/runtime/registry.hpp"

#include "asr/core/error.hpp"

namespace asr::runtime {

SideChannelVariable& SideChannelRegistry::register_variable(const std::string& name,
                                                            Eigen::Index stride,
                                                            Eigen::Index capacity) {
  if (name.empty()) throw Error(ErrorCode::InvalidValue, "variable name must not be empty");
  if (stride < 1 || capacity < 0)
    throw Error(ErrorCode::InvalidValue, "variable '" + name + "' needs stride >= 1");
  auto it = vars_.find(name);
  if (it == vars_.end()) {
    auto var = std::make_unique<SideChannelVariable>();
    var->name = name;
    it = vars_.emplace(name, std::move(var)).first;
  } else if (it->second->locked) {
    if (it->second->stride != stride || it->second->capacity() != capacity)
      throw Error(ErrorCode::InvalidLifecycle,
                  "variable '" + name + "' is locked by a prepared pipeline");
    return *it->second;
  }
  SideChannelVariable& v = *it->second;
  v.stride = stride;
  v.payload = Matrix::Zero(stride, capacity);
  v.samples = 0;
  return v;
}

SideChannelVariable* SideChannelRegistry::find(std::string_view name) {
  const auto it = vars_.find(name);
  return it == vars_.end() ? nullptr : it->second.get();
}

const SideChannelVariable* SideChannelRegistry::find(std::string_view name) const {
  const auto it = vars_.find(name);
  return it == vars_.end() ? nullptr : it->second.get();
}

SideChannelVariable& SideChannelRegistry::at(std::string_view name) {
  SideChannelVariable* v = find(name);
  if (!v) throw Error(ErrorCode::InvalidValue, "no variable named '" + std::string(name) + "'");
  return *v;
}

void SideChannelRegistry::write(std::string_view name, const Eigen::Ref<const Matrix>& block) {
  SideChannelVariable& v = at(name);
  if (block.rows() != v.stride)
    throw Error(ErrorCode::ChannelMismatch, "variable '" + v.name + "' has stride " +
                                                std::to_string(v.stride));
  if (block.cols() > v.capacity())
    throw Error(ErrorCode::InvalidInput, "block exceeds capacity of variable '" + v.name + "'");
  v.payload.leftCols(block.cols()) = block;
  v.samples = block.cols();
  v.sample_counter += block.cols();
}

void SideChannelRegistry::remove(std::string_view name) {
  const auto it = vars_.find(name);
  if (it == vars_.end()) return;
  if (it->second->locked)
    throw Error(ErrorCode::InvalidLifecycle, "variable '" + it->first + "' is locked");
  vars_.erase(it);
}

} // namespace asr::runtime
