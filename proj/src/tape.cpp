#include "metarl/tape.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "metarl/linalg.hpp"
#include "metarl/scalar_ops.hpp"

namespace metarl {

// ---------------------------------------------------------------------------
// Tensor
// ---------------------------------------------------------------------------

size_t shape_numel(const std::vector<int>& sh) {
  size_t n = 1;
  for (int d : sh) {
    if (d < 0) throw std::runtime_error("negative dimension in shape " + shape_str(sh));
    n *= static_cast<size_t>(d);
  }
  return n;
}

std::string shape_str(const std::vector<int>& sh) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < sh.size(); ++i) os << (i ? "," : "") << sh[i];
  os << "]";
  return os.str();
}

Tensor::Tensor(std::vector<int> sh, std::vector<double> data)
    : shape(std::move(sh)), v(std::move(data)) {
  if (shape.size() != 2) {
    throw std::runtime_error("Tensor must be 2-D, got shape " + shape_str(shape));
  }
  if (shape_numel(shape) != v.size()) {
    throw std::runtime_error("Tensor data size " + std::to_string(v.size()) +
                             " does not match shape " + shape_str(shape));
  }
}

Tensor Tensor::zeros(std::vector<int> sh) {
  size_t n = shape_numel(sh);
  return Tensor(std::move(sh), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(std::vector<int> sh, double c) {
  size_t n = shape_numel(sh);
  return Tensor(std::move(sh), std::vector<double>(n, c));
}

Tensor Tensor::scalar(double c) { return Tensor({1, 1}, {c}); }

Tensor Tensor::row(std::vector<double> data) {
  int n = static_cast<int>(data.size());
  return Tensor({1, n}, std::move(data));
}

int Tensor::rows() const { return shape[0]; }
int Tensor::cols() const { return shape[1]; }

bool Tensor::all_finite() const {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void Tensor::fill(double c) { std::fill(v.begin(), v.end(), c); }

// ---------------------------------------------------------------------------
// Tape internals
// ---------------------------------------------------------------------------

Var Tape::push(Tensor val, bool needs_grad, std::function<void(Tape&, int)> back) {
  Node n;
  n.grad = Tensor::zeros(val.shape);
  n.val = std::move(val);
  n.needs_grad = needs_grad;
  if (needs_grad) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::check(Var v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) {
    throw std::runtime_error("invalid tape handle (id " + std::to_string(v.id) + ")");
  }
}

Tape::Node& Tape::node(Var v) {
  check(v);
  return nodes_[static_cast<size_t>(v.id)];
}

const Tape::Node& Tape::node(Var v) const {
  check(v);
  return nodes_[static_cast<size_t>(v.id)];
}

const Tensor& Tape::value(Var v) const { return node(v).val; }
const Tensor& Tape::grad(Var v) const { return node(v).grad; }
bool Tape::requires_grad(Var v) const { return node(v).needs_grad; }

double Tape::scalar(Var v) const {
  const Tensor& t = node(v).val;
  if (t.rows() != 1 || t.cols() != 1) {
    throw std::runtime_error("scalar() on non-scalar node of shape " + shape_str(t.shape));
  }
  return t.v[0];
}

// ---------------------------------------------------------------------------
// Leaves
// ---------------------------------------------------------------------------

Var Tape::leaf(Parameter& p) {
  Parameter* bound = &p;
  Var v = push(p.value, p.trainable, [bound](Tape& t, int id) {
    const Tensor& g = t.nodes_[static_cast<size_t>(id)].grad;
    if (!bound->grad.same_shape(g)) {
      throw std::runtime_error("parameter '" + bound->name + "' changed shape mid-tape");
    }
    for (size_t i = 0; i < g.v.size(); ++i) bound->grad.v[i] += g.v[i];
  });
  nodes_[static_cast<size_t>(v.id)].bound = bound;
  return v;
}

Var Tape::constant(Tensor t) { return push(std::move(t), false, nullptr); }

Var Tape::constant_row(std::vector<double> data) {
  return constant(Tensor::row(std::move(data)));
}

Var Tape::constant_scalar(double c) { return constant(Tensor::scalar(c)); }

// ---------------------------------------------------------------------------
// Elementwise helpers
// ---------------------------------------------------------------------------

Var Tape::unary(Var a, const char* opname, const std::function<double(double)>& f,
                const std::function<double(double, double)>& dfdx_from_in_out) {
  check(a);
  (void)opname;
  const Tensor& av = nodes_[static_cast<size_t>(a.id)].val;
  Tensor out = Tensor::zeros(av.shape);
  for (size_t i = 0; i < av.v.size(); ++i) out.v[i] = f(av.v[i]);
  int aid = a.id;
  auto d = dfdx_from_in_out;
  bool ng = nodes_[static_cast<size_t>(a.id)].needs_grad;
  return push(std::move(out), ng, [aid, d](Tape& t, int id) {
    auto& an = t.nodes_[static_cast<size_t>(aid)];
    if (!an.needs_grad) return;
    const Tensor& g = t.nodes_[static_cast<size_t>(id)].grad;
    const Tensor& y = t.nodes_[static_cast<size_t>(id)].val;
    for (size_t i = 0; i < g.v.size(); ++i) an.grad.v[i] += g.v[i] * d(an.val.v[i], y.v[i]);
  });
}

Var Tape::binary_same_shape(
    Var a, Var b, const char* opname, const std::function<double(double, double)>& f,
    const std::function<void(double, double, double, double&, double&)>& df) {
  check(a);
  check(b);
  const Tensor& av = nodes_[static_cast<size_t>(a.id)].val;
  const Tensor& bv = nodes_[static_cast<size_t>(b.id)].val;
  if (!av.same_shape(bv)) {
    throw std::runtime_error(std::string(opname) + ": shape mismatch " + shape_str(av.shape) +
                             " vs " + shape_str(bv.shape));
  }
  Tensor out = Tensor::zeros(av.shape);
  for (size_t i = 0; i < av.v.size(); ++i) out.v[i] = f(av.v[i], bv.v[i]);
  bool ng = nodes_[static_cast<size_t>(a.id)].needs_grad ||
            nodes_[static_cast<size_t>(b.id)].needs_grad;
  int aid = a.id, bid = b.id;
  auto d = df;
  return push(std::move(out), ng, [aid, bid, d](Tape& t, int id) {
    auto& an = t.nodes_[static_cast<size_t>(aid)];
    auto& bn = t.nodes_[static_cast<size_t>(bid)];
    const Tensor& g = t.nodes_[static_cast<size_t>(id)].grad;
    for (size_t i = 0; i < g.v.size(); ++i) {
      double da = 0.0, db = 0.0;
      d(an.val.v[i], bn.val.v[i], g.v[i], da, db);
      if (an.needs_grad) an.grad.v[i] += da;
      if (bn.needs_grad) bn.grad.v[i] += db;
    }
  });
}

// ---------------------------------------------------------------------------
// Elementwise ops
// ---------------------------------------------------------------------------

Var Tape::add(Var a, Var b) {
  return binary_same_shape(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double, double g, double& da, double& db) {
        da = g;
        db = g;
      });
}

Var Tape::sub(Var a, Var b) {
  return binary_same_shape(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double, double g, double& da, double& db) {
        da = g;
        db = -g;
      });
}

Var Tape::mul(Var a, Var b) {
  return binary_same_shape(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double x, double y, double g, double& da, double& db) {
        da = g * y;
        db = g * x;
      });
}

Var Tape::div(Var a, Var b) {
  return binary_same_shape(
      a, b, "div", [](double x, double y) { return x / y; },
      [](double x, double y, double g, double& da, double& db) {
        da = g / y;
        db = -g * x / (y * y);
      });
}

Var Tape::minimum(Var a, Var b) {
  return binary_same_shape(
      a, b, "minimum", [](double x, double y) { return x <= y ? x : y; },
      [](double x, double y, double g, double& da, double& db) {
        if (x <= y) {
          da = g;
        } else {
          db = g;
        }
      });
}

Var Tape::neg(Var a) {
  return unary(a, "neg", [](double x) { return -x; },
               [](double, double) { return -1.0; });
}

Var Tape::add_scalar(Var a, double c) {
  return unary(a, "add_scalar", [c](double x) { return x + c; },
               [](double, double) { return 1.0; });
}

Var Tape::mul_scalar(Var a, double c) {
  return unary(a, "mul_scalar", [c](double x) { return x * c; },
               [c](double, double) { return c; });
}

Var Tape::relu(Var a) {
  return unary(a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var Tape::tanh(Var a) {
  return unary(a, "tanh", [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Var Tape::tanh_squash(Var a) {
  return unary(a, "tanh_squash", [](double x) { return squash_tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Var Tape::sigmoid(Var a) {
  return unary(a, "sigmoid", [](double x) { return stable_sigmoid(x); },
               [](double, double y) { return y * (1.0 - y); });
}

Var Tape::exp(Var a) {
  return unary(a, "exp", [](double x) { return std::exp(x); },
               [](double, double y) { return y; });
}

Var Tape::log(Var a) {
  return unary(a, "log", [](double x) { return std::log(x); },
               [](double x, double) { return 1.0 / x; });
}

Var Tape::sqrt(Var a) {
  return unary(a, "sqrt", [](double x) { return std::sqrt(x); },
               [](double, double y) { return 0.5 / y; });
}

Var Tape::square(Var a) {
  return unary(a, "square", [](double x) { return x * x; },
               [](double x, double) { return 2.0 * x; });
}

Var Tape::softplus(Var a) {
  return unary(a, "softplus", [](double x) { return stable_softplus(x); },
               [](double x, double) { return stable_sigmoid(x); });
}

Var Tape::reciprocal(Var a) {
  return unary(a, "reciprocal", [](double x) { return 1.0 / x; },
               [](double x, double) { return -1.0 / (x * x); });
}

Var Tape::clamp(Var a, double lo, double hi) {
  if (!(lo < hi)) throw std::runtime_error("clamp: lo must be < hi");
  return unary(a, "clamp",
               [lo, hi](double x) { return x < lo ? lo : (x > hi ? hi : x); },
               [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

// ---------------------------------------------------------------------------
// Shape / reduction ops
// ---------------------------------------------------------------------------

Var Tape::matmul(Var a, Var w) {
  check(a);
  check(w);
  const Tensor& av = nodes_[static_cast<size_t>(a.id)].val;
  const Tensor& wv = nodes_[static_cast<size_t>(w.id)].val;
  if (av.cols() != wv.rows()) {
    throw std::runtime_error("matmul: inner dimensions differ, " + shape_str(av.shape) + " x " +
                             shape_str(wv.shape));
  }
  Tensor out = linalg::matmul(av, wv);
  bool ng = nodes_[static_cast<size_t>(a.id)].needs_grad ||
            nodes_[static_cast<size_t>(w.id)].needs_grad;
  int aid = a.id, wid = w.id;
  return push(std::move(out), ng, [aid, wid](Tape& t, int id) {
    auto& an = t.nodes_[static_cast<size_t>(aid)];
    auto& wn = t.nodes_[static_cast<size_t>(wid)];
    const Tensor& g = t.nodes_[static_cast<size_t>(id)].grad;
    if (an.needs_grad) linalg::acc_matmul_nt(an.grad, g, wn.val);
    if (wn.needs_grad) linalg::acc_matmul_tn(wn.grad, an.val, g);
  });
}

Var Tape::add_rowvec(Var a, Var b) {
  check(a);
  check(b);
  const Tensor& av = nodes_[static_cast<size_t>(a.id)].val;
  const Tensor& bv = nodes_[static_cast<size_t>(b.id)].val;
  if (bv.rows() != 1 || bv.cols() != av.cols()) {
    throw std::runtime_error("add_rowvec: expected [1," + std::to_string(av.cols()) + "], got " +
                             shape_str(bv.shape));
  }
  Tensor out = Tensor::zeros(av.shape);
  for (int r = 0; r < av.rows(); ++r) {
    for (int c = 0; c < av.cols(); ++c) out.at(r, c) = av.at(r, c) + bv.at(0, c);
  }
  bool ng = nodes_[static_cast<size_t>(a.id)].needs_grad ||
            nodes_[static_cast<size_t>(b.id)].needs_grad;
  int aid = a.id, bid = b.id;
  return push(std::move(out), ng, [aid, bid](Tape& t, int id) {
    auto& an = t.nodes_[static_cast<size_t>(aid)];
    auto& bn = t.nodes_[static_cast<size_t>(bid)];
    const Tensor& g = t.nodes_[static_cast<size_t>(id)].grad;
    if (an.needs_grad) {
      for (size_t i = 0; i < g.v.size(); ++i) an.grad.v[i] += g.v[i];
    }
    if (bn.needs_grad) {
      for (int r = 0; r < g.rows(); ++r) {
        for (int c = 0; c < g.cols(); ++c) bn.grad.at(0, c) += g.at(r, c);
      }
    }
  });
}

Var Tape::concat_cols(Var a, Var b) {
  check(a);
  check(b);
  const Tensor& av = nodes_[static_cast<size_t>(a.id)].val;
  const Tensor& bv = nodes_[static_cast<size_t>(b.id)].val;
  if (av.rows() != bv.rows()) {
    throw std::runtime_error("concat_cols: row counts differ, " + shape_str(av.shape) + " vs " +
                             shape_str(bv.shape));
  }
  int c1 = av.cols(), c2 = bv.cols();
  Tensor out = Tensor::zeros({av.rows(), c1 + c2});
  for (int r = 0; r < av.rows(); ++r) {
    for (int c = 0; c < c1; ++c) out.at(r, c) = av.at(r, c);
    for (int c = 0; c < c2; ++c) out.at(r, c1 + c) = bv.at(r, c);
  }
  bool ng = nodes_[static_cast<size_t>(a.id)].needs_grad ||
            nodes_[static_cast<size_t>(b.id)].needs_grad;
  int aid = a.id, bid = b.id;
  return push(std::move(out), ng, [aid, bid, c1, c2](Tape& t, int id) {
    auto& an = t.nodes_[static_cast<size_t>(aid)];
    auto& bn = t.nodes_[static_cast<size_t>(bid)];
    const Tensor& g = t.nodes_[static_cast<size_t>(id)].grad;
    for (int r = 0; r < g.rows(); ++r) {
      if (an.needs_grad) {
        for (int c = 0; c < c1; ++c) an.grad.at(r, c) += g.at(r, c);
      }
      if (bn.needs_grad) {
        for (int c = 0; c < c2; ++c) bn.grad.at(r, c) += g.at(r, c1 + c);
      }
    }
  });
}

Var Tape::slice_cols(Var a, int start, int len) {
  check(a);
  const Tensor& av = nodes_[static_cast<size_t>(a.id)].val;
  if (start < 0 || len <= 0 || start + len > av.cols()) {
    throw std::runtime_error("slice_cols: range [" + std::to_string(start) + "," +
                             std::to_string(start + len) + ") out of bounds for " +
                             shape_str(av.shape));
  }
  Tensor out = Tensor::zeros({av.rows(), len});
  for (int r = 0; r < av.rows(); ++r) {
    for (int c = 0; c < len; ++c) out.at(r, c) = av.at(r, start + c);
  }
  bool ng = nodes_[static_cast<size_t>(a.id)].needs_grad;
  int aid = a.id;
  return push(std::move(out), ng, [aid, start, len](Tape& t, int id) {
    auto& an = t.nodes_[static_cast<size_t>(aid)];
    if (!an.needs_grad) return;
    const Tensor& g = t.nodes_[static_cast<size_t>(id)].grad;
    for (int r = 0; r < g.rows(); ++r) {
      for (int c = 0; c < len; ++c) an.grad.at(r, start + c) += g.at(r, c);
    }
  });
}

Var Tape::repeat_rows(Var a, int times) {
  check(a);
  const Tensor& av = nodes_[static_cast<size_t>(a.id)].val;
  if (av.rows() != 1) {
    throw std::runtime_error("repeat_rows: expected a [1,n] row, got " + shape_str(av.shape));
  }
  if (times < 1) throw std::runtime_error("repeat_rows: times must be >= 1");
  Tensor out = Tensor::zeros({times, av.cols()});
  for (int r = 0; r < times; ++r) {
    for (int c = 0; c < av.cols(); ++c) out.at(r, c) = av.at(0, c);
  }
  bool ng = nodes_[static_cast<size_t>(a.id)].needs_grad;
  int aid = a.id;
  return push(std::move(out), ng, [aid](Tape& t, int id) {
    auto& an = t.nodes_[static_cast<size_t>(aid)];
    if (!an.needs_grad) return;
    const Tensor& g = t.nodes_[static_cast<size_t>(id)].grad;
    for (int r = 0; r < g.rows(); ++r) {
      for (int c = 0; c < g.cols(); ++c) an.grad.at(0, c) += g.at(r, c);
    }
  });
}

Var Tape::sum_all(Var a) {
  check(a);
  const Tensor& av = nodes_[static_cast<size_t>(a.id)].val;
  double s = 0.0;
  for (double x : av.v) s += x;
  bool ng = nodes_[static_cast<size_t>(a.id)].needs_grad;
  int aid = a.id;
  return push(Tensor::scalar(s), ng, [aid](Tape& t, int id) {
    auto& an = t.nodes_[static_cast<size_t>(aid)];
    if (!an.needs_grad) return;
    double g = t.nodes_[static_cast<size_t>(id)].grad.v[0];
    for (size_t i = 0; i < an.grad.v.size(); ++i) an.grad.v[i] += g;
  });
}

Var Tape::mean_all(Var a) {
  check(a);
  const Tensor& av = nodes_[static_cast<size_t>(a.id)].val;
  if (av.v.empty()) throw std::runtime_error("mean_all: empty tensor");
  double inv = 1.0 / static_cast<double>(av.v.size());
  double s = 0.0;
  for (double x : av.v) s += x;
  bool ng = nodes_[static_cast<size_t>(a.id)].needs_grad;
  int aid = a.id;
  return push(Tensor::scalar(s * inv), ng, [aid, inv](Tape& t, int id) {
    auto& an = t.nodes_[static_cast<size_t>(aid)];
    if (!an.needs_grad) return;
    double g = t.nodes_[static_cast<size_t>(id)].grad.v[0] * inv;
    for (size_t i = 0; i < an.grad.v.size(); ++i) an.grad.v[i] += g;
  });
}

Var Tape::sum_cols(Var a) {
  check(a);
  const Tensor& av = nodes_[static_cast<size_t>(a.id)].val;
  Tensor out = Tensor::zeros({av.rows(), 1});
  for (int r = 0; r < av.rows(); ++r) {
    double s = 0.0;
    for (int c = 0; c < av.cols(); ++c) s += av.at(r, c);
    out.at(r, 0) = s;
  }
  bool ng = nodes_[static_cast<size_t>(a.id)].needs_grad;
  int aid = a.id;
  return push(std::move(out), ng, [aid](Tape& t, int id) {
    auto& an = t.nodes_[static_cast<size_t>(aid)];
    if (!an.needs_grad) return;
    const Tensor& g = t.nodes_[static_cast<size_t>(id)].grad;
    for (int r = 0; r < an.grad.rows(); ++r) {
      for (int c = 0; c < an.grad.cols(); ++c) an.grad.at(r, c) += g.at(r, 0);
    }
  });
}

Var Tape::sum_rows(Var a) {
  check(a);
  const Tensor& av = nodes_[static_cast<size_t>(a.id)].val;
  Tensor out = Tensor::zeros({1, av.cols()});
  for (int r = 0; r < av.rows(); ++r) {
    for (int c = 0; c < av.cols(); ++c) out.at(0, c) += av.at(r, c);
  }
  bool ng = nodes_[static_cast<size_t>(a.id)].needs_grad;
  int aid = a.id;
  return push(std::move(out), ng, [aid](Tape& t, int id) {
    auto& an = t.nodes_[static_cast<size_t>(aid)];
    if (!an.needs_grad) return;
    const Tensor& g = t.nodes_[static_cast<size_t>(id)].grad;
    for (int r = 0; r < an.grad.rows(); ++r) {
      for (int c = 0; c < an.grad.cols(); ++c) an.grad.at(r, c) += g.at(0, c);
    }
  });
}

Var Tape::detach(Var a) {
  check(a);
  return push(nodes_[static_cast<size_t>(a.id)].val, false, nullptr);
}

Var Tape::rbf_expand(Var z, Var centers, Var log_scales) {
  check(z);
  check(centers);
  check(log_scales);
  const Tensor& zv = nodes_[static_cast<size_t>(z.id)].val;
  const Tensor& cv = nodes_[static_cast<size_t>(centers.id)].val;
  const Tensor& lv = nodes_[static_cast<size_t>(log_scales.id)].val;
  if (zv.cols() != cv.rows()) {
    throw std::runtime_error("rbf_expand: latent dim mismatch, z " + shape_str(zv.shape) +
                             " vs centers " + shape_str(cv.shape));
  }
  if (!cv.same_shape(lv)) {
    throw std::runtime_error("rbf_expand: centers " + shape_str(cv.shape) +
                             " and log_scales " + shape_str(lv.shape) + " differ");
  }
  int B = zv.rows(), d = cv.rows(), k = cv.cols();
  Tensor out = Tensor::zeros({B, d * k});
  for (int b = 0; b < B; ++b) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < k; ++j) {
        double diff = zv.at(b, i) - cv.at(i, j);
        double delta = std::exp(lv.at(i, j));
        out.at(b, i * k + j) = std::exp(-delta * diff * diff);
      }
    }
  }
  bool ng = nodes_[static_cast<size_t>(z.id)].needs_grad ||
            nodes_[static_cast<size_t>(centers.id)].needs_grad ||
            nodes_[static_cast<size_t>(log_scales.id)].needs_grad;
  int zid = z.id, cid = centers.id, lid = log_scales.id;
  return push(std::move(out), ng, [zid, cid, lid, B, d, k](Tape& t, int id) {
    auto& zn = t.nodes_[static_cast<size_t>(zid)];
    auto& cn = t.nodes_[static_cast<size_t>(cid)];
    auto& ln = t.nodes_[static_cast<size_t>(lid)];
    const Tensor& g = t.nodes_[static_cast<size_t>(id)].grad;
    const Tensor& y = t.nodes_[static_cast<size_t>(id)].val;
    for (int b = 0; b < B; ++b) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < k; ++j) {
          double diff = zn.val.at(b, i) - cn.val.at(i, j);
          double delta = std::exp(ln.val.at(i, j));
          double ge = g.at(b, i * k + j) * y.at(b, i * k + j);
          if (zn.needs_grad) zn.grad.at(b, i) += ge * (-2.0 * delta * diff);
          if (cn.needs_grad) cn.grad.at(i, j) += ge * (2.0 * delta * diff);
          if (ln.needs_grad) ln.grad.at(i, j) += ge * (-delta * diff * diff);
        }
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Backward
// ---------------------------------------------------------------------------

void Tape::backward(Var loss) {
  Node& ln = node(loss);
  if (ln.val.rows() != 1 || ln.val.cols() != 1) {
    throw std::runtime_error("backward() requires a scalar loss, got shape " +
                             shape_str(ln.val.shape));
  }
  if (!ln.needs_grad) {
    throw std::runtime_error("backward(): loss does not depend on any trainable parameter");
  }
  if (backward_done_) throw std::runtime_error("backward() may be called only once per tape");
  backward_done_ = true;
  ln.grad.v[0] = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    if (n.needs_grad && n.back) n.back(*this, i);
  }
}

}  // namespace metarl
