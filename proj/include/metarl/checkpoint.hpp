#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "metarl/adam.hpp"
#include "metarl/replay.hpp"
#include "metarl/tape.hpp"
#include "metarl/tensor.hpp"

namespace metarl {

uint64_t fnv1a64_bytes(const void* data, size_t n);
inline uint64_t fnv1a64_str(const std::string& s) { return fnv1a64_bytes(s.data(), s.size()); }

/// Little binary sink/source for checkpoints. Doubles are written as their
/// raw 8 bytes so state round-trips bit-exactly.
class BinaryWriter {
 public:
  explicit BinaryWriter(const std::string& path);
  void u64(uint64_t x);
  void i64(int64_t x);
  void i32(int32_t x);
  void f64(double x);
  void str(const std::string& s);
  void vec(const std::vector<double>& v);
  /// Flushes and renames the temporary file over the target (atomic on POSIX,
  /// so an interrupt never leaves a torn checkpoint).
  void commit();

 private:
  std::string path_, tmp_path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::string& path);
  uint64_t u64();
  int64_t i64();
  int32_t i32();
  double f64();
  std::string str();
  std::vector<double> vec();
  bool at_end();

 private:
  std::string path_;
  std::ifstream in_;
  void need(size_t n);
};

/// Parameters are stored (name, shape, values) in order and verified on load,
/// so a checkpoint built by a different architecture is rejected loudly.
void save_params(BinaryWriter& w, const std::vector<Parameter*>& params);
void load_params(BinaryReader& r, const std::vector<Parameter*>& params);

void save_adam(BinaryWriter& w, Adam& opt);
void load_adam(BinaryReader& r, Adam& opt);

void save_buffer(BinaryWriter& w, const TaskBuffer& buf);
TaskBuffer load_buffer(BinaryReader& r);

}  // namespace metarl
