#include "dlcot/diagnostics.hpp"

namespace dlcot {

void Diagnostics::emit(std::string record_id, std::string stage,
                       std::string message) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (echo_ != nullptr) {
    (*echo_) << "[diag]";
    if (!stage.empty()) (*echo_) << " " << stage;
    if (!record_id.empty()) (*echo_) << " " << record_id;
    (*echo_) << ": " << message << "\n";
  }
  entries_.push_back(
      Diagnostic{std::move(record_id), std::move(stage), std::move(message)});
}

std::vector<Diagnostic> Diagnostics::entries() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_;
}

std::size_t Diagnostics::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

bool Diagnostics::contains(const std::string& needle) const {
  std::lock_guard<std::mutex> lock(mutex_);
  for (const auto& d : entries_) {
    if (d.message.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace dlcot
