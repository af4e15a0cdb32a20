#include "metarl/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace metarl {

uint64_t fnv1a64_bytes(const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

BinaryWriter::BinaryWriter(const std::string& path)
    : path_(path), tmp_path_(path + ".tmp"), out_(tmp_path_, std::ios::binary | std::ios::trunc) {
  if (!out_) throw std::runtime_error("checkpoint: cannot open " + tmp_path_ + " for writing");
}

void BinaryWriter::u64(uint64_t x) {
  char buf[8];
  std::memcpy(buf, &x, 8);
  out_.write(buf, 8);
}

void BinaryWriter::i64(int64_t x) { u64(static_cast<uint64_t>(x)); }
void BinaryWriter::i32(int32_t x) { i64(x); }

void BinaryWriter::f64(double x) {
  uint64_t bits;
  std::memcpy(&bits, &x, 8);
  u64(bits);
}

void BinaryWriter::str(const std::string& s) {
  u64(s.size());
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryWriter::vec(const std::vector<double>& v) {
  u64(v.size());
  for (double x : v) f64(x);
}

void BinaryWriter::commit() {
  out_.flush();
  if (!out_) throw std::runtime_error("checkpoint: write to " + tmp_path_ + " failed");
  out_.close();
  if (std::rename(tmp_path_.c_str(), path_.c_str()) != 0)
    throw std::runtime_error("checkpoint: cannot rename " + tmp_path_ + " to " + path_);
}

BinaryReader::BinaryReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw std::runtime_error("checkpoint: cannot open " + path);
}

void BinaryReader::need(size_t n) {
  if (!in_) throw std::runtime_error("checkpoint: " + path_ + " is truncated or unreadable");
  (void)n;
}

uint64_t BinaryReader::u64() {
  char buf[8];
  in_.read(buf, 8);
  need(8);
  uint64_t x;
  std::memcpy(&x, buf, 8);
  return x;
}

int64_t BinaryReader::i64() { return static_cast<int64_t>(u64()); }

int32_t BinaryReader::i32() {
  int64_t x = i64();
  if (x < INT32_MIN || x > INT32_MAX) throw std::runtime_error("checkpoint: i32 out of range");
  return static_cast<int32_t>(x);
}

double BinaryReader::f64() {
  uint64_t bits = u64();
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

std::string BinaryReader::str() {
  size_t n = u64();
  std::string s(n, '\0');
  in_.read(s.data(), static_cast<std::streamsize>(n));
  need(n);
  return s;
}

std::vector<double> BinaryReader::vec() {
  size_t n = u64();
  std::vector<double> v(n);
  for (auto& x : v) x = f64();
  return v;
}

bool BinaryReader::at_end() {
  in_.peek();
  return in_.eof();
}

void save_params(BinaryWriter& w, const std::vector<Parameter*>& params) {
  w.u64(params.size());
  for (const Parameter* p : params) {
    w.str(p->name);
    w.i32(p->value.rows());
    w.i32(p->value.cols());
    for (double x : p->value.v) w.f64(x);
  }
}

void load_params(BinaryReader& r, const std::vector<Parameter*>& params) {
  size_t n = r.u64();
  if (n != params.size())
    throw std::runtime_error("checkpoint: parameter count mismatch (file has " +
                             std::to_string(n) + ", model has " + std::to_string(params.size()) +
                             ")");
  for (Parameter* p : params) {
    std::string name = r.str();
    int rows = r.i32(), cols = r.i32();
    if (name != p->name || rows != p->value.rows() || cols != p->value.cols())
      throw std::runtime_error("checkpoint: parameter mismatch: file has " + name + " [" +
                               std::to_string(rows) + "," + std::to_string(cols) +
                               "], model expects " + p->name);
    for (double& x : p->value.v) x = r.f64();
  }
}

void save_adam(BinaryWriter& w, Adam& opt) {
  w.i64(opt.steps());
  for (auto* moments : {&opt.moment1(), &opt.moment2()}) {
    w.u64(moments->size());
    for (const Tensor& m : *moments) {
      w.i32(m.rows());
      w.i32(m.cols());
      for (double x : m.v) w.f64(x);
    }
  }
}

void load_adam(BinaryReader& r, Adam& opt) {
  opt.set_steps(r.i64());
  for (auto* moments : {&opt.moment1(), &opt.moment2()}) {
    size_t n = r.u64();
    if (n != moments->size()) throw std::runtime_error("checkpoint: optimizer moment count mismatch");
    for (Tensor& m : *moments) {
      int rows = r.i32(), cols = r.i32();
      if (rows != m.rows() || cols != m.cols())
        throw std::runtime_error("checkpoint: optimizer moment shape mismatch");
      for (double& x : m.v) x = r.f64();
    }
  }
}

void save_buffer(BinaryWriter& w, const TaskBuffer& buf) {
  w.i32(buf.task_id());
  w.u64(buf.capacity());
  w.u64(buf.size());
  w.u64(buf.recent_size());
  for (size_t i = 0; i < buf.size(); ++i) {
    const Transition& t = buf.at(i);
    w.vec(t.s);
    w.vec(t.a);
    w.f64(t.r);
    w.vec(t.s_next);
  }
}

TaskBuffer load_buffer(BinaryReader& r) {
  int task_id = r.i32();
  size_t capacity = r.u64();
  size_t size = r.u64();
  size_t recent = r.u64();
  if (size > capacity || recent > size) throw std::runtime_error("checkpoint: corrupt buffer sizes");
  TaskBuffer buf(task_id, capacity);
  // Replaying pushes in logical order rebuilds an equivalent ring; starting a
  // collection window before the last `recent` entries restores the recent view.
  for (size_t i = 0; i < size; ++i) {
    if (i == size - recent) buf.begin_collection();
    Transition t;
    t.s = r.vec();
    t.a = r.vec();
    t.r = r.f64();
    t.s_next = r.vec();
    buf.push(std::move(t));
  }
  if (recent == 0) buf.begin_collection();
  return buf;
}

}  // namespace metarl
