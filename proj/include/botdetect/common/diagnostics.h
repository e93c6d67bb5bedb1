#pragma once

#include <string>
#include <vector>

namespace botdetect {

// Non-fatal problems collected while processing (decode failures,
// degenerate columns). Callers decide whether to print them.
class Diagnostics {
 public:
  void warn(std::string message) { messages_.push_back(std::move(message)); }

  void merge(const Diagnostics& other) {
    messages_.insert(messages_.end(), other.messages_.begin(),
                     other.messages_.end());
  }

  bool empty() const { return messages_.empty(); }
  std::size_t size() const { return messages_.size(); }
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
};

}  // namespace botdetect
