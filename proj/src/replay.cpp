#include "metarl/replay.hpp"

#include <stdexcept>

namespace metarl {

TaskBuffer::TaskBuffer(int task_id, size_t capacity) : task_id_(task_id), capacity_(capacity) {
  if (capacity_ == 0) throw std::runtime_error("task buffer: capacity must be positive");
  data_.reserve(capacity_ < 4096 ? capacity_ : 4096);
}

void TaskBuffer::push(Transition t) {
  if (size_ < capacity_) {
    data_.push_back(std::move(t));
    ++size_;
  } else {
    data_[next_] = std::move(t);  // FIFO eviction of the oldest entry
  }
  next_ = (next_ + 1) % capacity_;
  if (recent_ < capacity_) ++recent_;
}

const Transition& TaskBuffer::at(size_t i) const {
  if (i >= size_) throw std::runtime_error("task buffer: index out of range");
  if (size_ < capacity_) return data_[i];
  return data_[(next_ + i) % capacity_];  // next_ points at the oldest once full
}

std::vector<Transition> TaskBuffer::sample(size_t n, Rng& rng) const {
  if (size_ == 0) throw std::runtime_error("task buffer: sample from empty buffer");
  std::vector<Transition> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out.push_back(at(rng.uniform_int(size_)));
  return out;
}

std::vector<Transition> TaskBuffer::sample_recent(size_t n, Rng& rng) const {
  size_t r = recent_size();
  if (r == 0) throw std::runtime_error("task buffer: sample from empty recent window");
  std::vector<Transition> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out.push_back(at(size_ - r + rng.uniform_int(r)));
  return out;
}

}  // namespace metarl
