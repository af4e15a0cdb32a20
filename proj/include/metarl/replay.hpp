#pragma once

#include <cstddef>
#include <vector>

#include "metarl/encoder.hpp"
#include "metarl/rng.hpp"

namespace metarl {

/// Per-task FIFO ring of transitions plus a "recent" view of the entries
/// pushed since the last begin_collection() call. The recent view is a count
/// into the tail of the ring, so it can never reference evicted data.
class TaskBuffer {
 public:
  explicit TaskBuffer(int task_id, size_t capacity = 100000);

  int task_id() const { return task_id_; }
  size_t capacity() const { return capacity_; }
  size_t size() const { return size_; }
  size_t recent_size() const { return recent_ < size_ ? recent_ : size_; }

  /// Starts a new collection window; subsequent pushes form the recent view.
  void begin_collection() { recent_ = 0; }
  void push(Transition t);

  /// i = 0 is the oldest retained transition.
  const Transition& at(size_t i) const;

  /// Uniform with replacement over the whole ring.
  std::vector<Transition> sample(size_t n, Rng& rng) const;
  /// Uniform with replacement over the recent window.
  std::vector<Transition> sample_recent(size_t n, Rng& rng) const;

 private:
  int task_id_ = -1;
  size_t capacity_ = 0;
  std::vector<Transition> data_;
  size_t next_ = 0;    // ring write position
  size_t size_ = 0;    // filled entries
  size_t recent_ = 0;  // pushed since begin_collection, capped at capacity
};

}  // namespace metarl
