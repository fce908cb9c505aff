#include "sattn/numcore/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sattn/error.hpp"

namespace sattn::num {
namespace {

// Dot product with eight fixed partial sums. The summation order depends
// only on n, never on where the operands live.
double dot_kernel(const double* a, const double* b, std::size_t n) noexcept {
  double acc[8] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    for (std::size_t u = 0; u < 8; ++u) acc[u] += a[j + u] * b[j + u];
  }
  double s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
  for (; j < n; ++j) s += a[j] * b[j];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  for (std::size_t j = 0; j < n; ++j) y[j] += alpha * x[j];
}

double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (const double t : terms) s += t;
  return s;
}

Tape& common_tape(const char* op, Var a) {
  if (!a.valid()) throw ShapeError(std::string(op) + ": empty input");
  return *a.tape();
}

Tape& common_tape(const char* op, Var a, Var b) {
  if (!a.valid() || !b.valid()) throw ShapeError(std::string(op) + ": empty input");
  if (a.tape() != b.tape()) throw ShapeError(std::string(op) + ": inputs on different tapes");
  return *a.tape();
}

[[noreturn]] void mismatch(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a) + " vs " + to_string(b));
}

Shape matrix_shape(std::size_t rows, std::size_t cols) { return Shape{rows, cols}; }

void accumulate(Tape& tape, Var target, const Tensor& g) {
  if (!tape.requires_grad(target)) return;
  auto dst = tape.grad_buffer(target).data();
  auto src = g.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
}

template <class Forward, class Derivative>
Var unary(const char* op, Var a, Forward f, Derivative df) {
  Tape& tape = common_tape(op, a);
  const Tensor& x = a.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  return tape.record(std::move(y), {a}, [a, df](Tape& t, const Tensor& g) {
    if (!t.requires_grad(a)) return;
    const Tensor& xin = t.value(a);
    Tensor& ga = t.grad_buffer(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * df(xin[i]);
  });
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& tape = common_tape("matmul", a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.cols() != B.rows()) mismatch("matmul", A.shape(), B.shape());
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  Tensor C(matrix_shape(m, n));
  // k outermost so each row of B is loaded once; per element the sum still
  // runs over k in ascending order.
  for (std::size_t kk = 0; kk < k; ++kk) {
    const double* brow = B.data().data() + kk * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double aik = A.at(i, kk);
      if (aik == 0.0) continue;
      axpy(aik, brow, C.data().data() + i * n, n);
    }
  }
  return tape.record(std::move(C), {a, b}, [a, b](Tape& t, const Tensor& g) {
    const Tensor& A = t.value(a);
    const Tensor& B = t.value(b);
    const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
    if (t.requires_grad(a)) {
      Tensor& ga = t.grad_buffer(a);
      for (std::size_t kk = 0; kk < k; ++kk) {
        const double* brow = B.data().data() + kk * n;
        for (std::size_t i = 0; i < m; ++i) {
          ga.at(i, kk) += dot_kernel(g.data().data() + i * n, brow, n);
        }
      }
    }
    if (t.requires_grad(b)) {
      Tensor& gb = t.grad_buffer(b);
      for (std::size_t kk = 0; kk < k; ++kk) {
        double* dst = gb.data().data() + kk * n;
        for (std::size_t i = 0; i < m; ++i) {
          const double aik = A.at(i, kk);
          if (aik == 0.0) continue;
          axpy(aik, g.data().data() + i * n, dst, n);
        }
      }
    }
  });
}

Var matmul_nt(Var a, Var b) {
  Tape& tape = common_tape("matmul_nt", a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.cols() != B.cols()) mismatch("matmul_nt", A.shape(), B.shape());
  const std::size_t m = A.rows(), k = A.cols(), n = B.rows();
  Tensor C(matrix_shape(m, n));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      C.at(i, j) = dot_kernel(A.data().data() + i * k, B.data().data() + j * k, k);
    }
  }
  return tape.record(std::move(C), {a, b}, [a, b](Tape& t, const Tensor& g) {
    const Tensor& A = t.value(a);
    const Tensor& B = t.value(b);
    const std::size_t m = A.rows(), k = A.cols(), n = B.rows();
    if (t.requires_grad(a)) {
      Tensor& ga = t.grad_buffer(a);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          axpy(g.at(i, j), B.data().data() + j * k, ga.data().data() + i * k, k);
        }
      }
    }
    if (t.requires_grad(b)) {
      Tensor& gb = t.grad_buffer(b);
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
          axpy(g.at(i, j), A.data().data() + i * k, gb.data().data() + j * k, k);
        }
      }
    }
  });
}

Var add(Var a, Var b) {
  Tape& tape = common_tape("add", a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.shape() != B.shape()) mismatch("add", A.shape(), B.shape());
  Tensor C(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) C[i] = A[i] + B[i];
  return tape.record(std::move(C), {a, b}, [a, b](Tape& t, const Tensor& g) {
    accumulate(t, a, g);
    accumulate(t, b, g);
  });
}

Var sub(Var a, Var b) {
  Tape& tape = common_tape("sub", a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.shape() != B.shape()) mismatch("sub", A.shape(), B.shape());
  Tensor C(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) C[i] = A[i] - B[i];
  return tape.record(std::move(C), {a, b}, [a, b](Tape& t, const Tensor& g) {
    accumulate(t, a, g);
    if (t.requires_grad(b)) {
      Tensor& gb = t.grad_buffer(b);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Var mul(Var a, Var b) {
  Tape& tape = common_tape("mul", a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.shape() != B.shape()) mismatch("mul", A.shape(), B.shape());
  Tensor C(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) C[i] = A[i] * B[i];
  return tape.record(std::move(C), {a, b}, [a, b](Tape& t, const Tensor& g) {
    const Tensor& A = t.value(a);
    const Tensor& B = t.value(b);
    if (t.requires_grad(a)) {
      Tensor& ga = t.grad_buffer(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * B[i];
    }
    if (t.requires_grad(b)) {
      Tensor& gb = t.grad_buffer(b);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * A[i];
    }
  });
}

Var scale(Var a, double factor) {
  return unary(
      "scale", a, [factor](double x) { return factor * x; },
      [factor](double) { return factor; });
}

Var add_bias(Var a, Var bias) {
  Tape& tape = common_tape("add_bias", a, bias);
  const Tensor& A = a.value();
  const Tensor& b = bias.value();
  if (b.rows() != 1 || b.cols() != A.cols()) mismatch("add_bias", A.shape(), b.shape());
  Tensor C(matrix_shape(A.rows(), A.cols()));
  for (std::size_t r = 0; r < A.rows(); ++r) {
    for (std::size_t c = 0; c < A.cols(); ++c) C.at(r, c) = A.at(r, c) + b[c];
  }
  return tape.record(std::move(C), {a, bias}, [a, bias](Tape& t, const Tensor& g) {
    if (t.requires_grad(a)) {
      Tensor& ga = t.grad_buffer(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.requires_grad(bias)) {
      Tensor& gb = t.grad_buffer(bias);
      const std::size_t cols = g.cols();
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) gb[c] += g.at(r, c);
      }
    }
  });
}

Var sigmoid(Var a) {
  auto f = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  return unary("sigmoid", a, f, [f](double x) {
    const double s = f(x);
    return s * (1.0 - s);
  });
}

Var tanh(Var a) {
  return unary(
      "tanh", a, [](double x) { return std::tanh(x); },
      [](double x) {
        const double y = std::tanh(x);
        return 1.0 - y * y;
      });
}

Var relu(Var a) {
  return unary(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

Var exp(Var a) {
  return unary(
      "exp", a, [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); });
}

Var clamp(Var a, double lo, double hi) {
  return unary(
      "clamp", a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  Tape& tape = common_tape("concat", parts[0]);
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  for (const Var& p : parts) {
    common_tape("concat", parts[0], p);
    if (p.rows() != rows) mismatch("concat", parts[0].shape(), p.shape());
    cols += p.cols();
  }
  Tensor C(matrix_shape(rows, cols));
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& P = p.value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(P.data().data() + r * P.cols(), P.cols(), C.data().data() + r * cols + offset);
    }
    offset += P.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return tape.record(std::move(C), inputs, [inputs, cols](Tape& t, const Tensor& g) {
    std::size_t offset = 0;
    for (const Var& p : inputs) {
      const std::size_t pc = t.value(p).cols();
      if (t.requires_grad(p)) {
        Tensor& gp = t.grad_buffer(p);
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < pc; ++c) gp.at(r, c) += g[r * cols + offset + c];
        }
      }
      offset += pc;
    }
  });
}

Var concat(Var a, Var b) {
  const Var parts[] = {a, b};
  return concat(std::span<const Var>(parts));
}

Var slice_cols(Var a, std::size_t begin, std::size_t end) {
  Tape& tape = common_tape("slice_cols", a);
  const Tensor& A = a.value();
  if (begin > end || end > A.cols()) {
    throw ShapeError("slice_cols: range [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") outside shape " + to_string(A.shape()));
  }
  const std::size_t width = end - begin;
  Tensor C(matrix_shape(A.rows(), width));
  for (std::size_t r = 0; r < A.rows(); ++r) {
    std::copy_n(A.data().data() + r * A.cols() + begin, width, C.data().data() + r * width);
  }
  return tape.record(std::move(C), {a}, [a, begin, width](Tape& t, const Tensor& g) {
    if (!t.requires_grad(a)) return;
    Tensor& ga = t.grad_buffer(a);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < width; ++c) ga.at(r, begin + c) += g.at(r, c);
    }
  });
}

Var softmax(Var a) {
  Tape& tape = common_tape("softmax", a);
  const Tensor& x = a.value();
  if (x.rows() != 1 || x.size() == 0) {
    throw ShapeError("softmax: expected a non-empty row vector, got " + to_string(x.shape()));
  }
  const double mx = *std::max_element(x.data().begin(), x.data().end());
  Tensor y(matrix_shape(1, x.size()));
  std::vector<double> terms(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = std::exp(x[i] - mx);
    terms[i] = y[i];
  }
  const double z = sorted_sum(terms);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] /= z;
  const Tensor out = y;
  return tape.record(std::move(y), {a}, [a, out](Tape& t, const Tensor& g) {
    if (!t.requires_grad(a)) return;
    std::vector<double> terms(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) terms[i] = out[i] * g[i];
    const double inner = sorted_sum(terms);
    Tensor& ga = t.grad_buffer(a);
    for (std::size_t i = 0; i < out.size(); ++i) ga[i] += out[i] * (g[i] - inner);
  });
}

Var weighted_row_sum(Var weights, Var rows) {
  Tape& tape = common_tape("weighted_row_sum", weights, rows);
  const Tensor& w = weights.value();
  const Tensor& X = rows.value();
  if (w.rows() != 1 || w.cols() != X.rows()) mismatch("weighted_row_sum", w.shape(), X.shape());
  const std::size_t m = X.rows(), n = X.cols();
  Tensor out(matrix_shape(1, n));
  std::vector<double> terms(m);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) terms[i] = w[i] * X.at(i, j);
    out[j] = sorted_sum(terms);
  }
  return tape.record(std::move(out), {weights, rows}, [weights, rows](Tape& t, const Tensor& g) {
    const Tensor& w = t.value(weights);
    const Tensor& X = t.value(rows);
    const std::size_t m = X.rows(), n = X.cols();
    if (t.requires_grad(weights)) {
      Tensor& gw = t.grad_buffer(weights);
      for (std::size_t i = 0; i < m; ++i) gw[i] += dot_kernel(g.data().data(), X.data().data() + i * n, n);
    }
    if (t.requires_grad(rows)) {
      Tensor& gx = t.grad_buffer(rows);
      for (std::size_t i = 0; i < m; ++i) axpy(w[i], g.data().data(), gx.data().data() + i * n, n);
    }
  });
}

Var assemble_rows(Tape& tape, std::span<const RowRef> refs, std::size_t cols) {
  Tensor out(matrix_shape(refs.size(), cols));
  std::vector<Var> inputs;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    const RowRef& ref = refs[k];
    if (!ref.source.valid()) continue;
    if (ref.source.tape() != &tape) throw ShapeError("assemble_rows: source on another tape");
    const Tensor& src = ref.source.value();
    if (src.cols() != cols || ref.row >= src.rows()) {
      throw ShapeError("assemble_rows: row " + std::to_string(ref.row) + " of shape " +
                       to_string(src.shape()) + " does not fit width " + std::to_string(cols));
    }
    std::copy_n(src.data().data() + ref.row * cols, cols, out.data().data() + k * cols);
    inputs.push_back(ref.source);
  }
  std::vector<RowRef> saved(refs.begin(), refs.end());
  return tape.record(std::move(out), inputs, [saved, cols](Tape& t, const Tensor& g) {
    for (std::size_t k = 0; k < saved.size(); ++k) {
      const RowRef& ref = saved[k];
      if (!ref.source.valid() || !t.requires_grad(ref.source)) continue;
      Tensor& gs = t.grad_buffer(ref.source);
      axpy(1.0, g.data().data() + k * cols, gs.data().data() + ref.row * cols, cols);
    }
  });
}

Var sum(Var a) {
  Tape& tape = common_tape("sum", a);
  const Tensor& x = a.value();
  double s = 0.0;
  for (const double v : x.data()) s += v;
  return tape.record(Tensor::scalar(s), {a}, [a](Tape& t, const Tensor& g) {
    if (!t.requires_grad(a)) return;
    Tensor& ga = t.grad_buffer(a);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[0];
  });
}

Var dot(Var a, Var b) {
  Tape& tape = common_tape("dot", a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.size() != B.size()) mismatch("dot", A.shape(), B.shape());
  const double s = dot_kernel(A.data().data(), B.data().data(), A.size());
  return tape.record(Tensor::scalar(s), {a, b}, [a, b](Tape& t, const Tensor& g) {
    const Tensor& A = t.value(a);
    const Tensor& B = t.value(b);
    if (t.requires_grad(a)) {
      Tensor& ga = t.grad_buffer(a);
      for (std::size_t i = 0; i < A.size(); ++i) ga[i] += g[0] * B[i];
    }
    if (t.requires_grad(b)) {
      Tensor& gb = t.grad_buffer(b);
      for (std::size_t i = 0; i < B.size(); ++i) gb[i] += g[0] * A[i];
    }
  });
}

}  // namespace sattn::num
