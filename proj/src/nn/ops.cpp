#include "ftkn/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ftkn/errors.hpp"
#include "ftkn/nn/op_counter.hpp"

namespace ftkn::nn {

namespace {

using detail::make_result;

// Returns the parent's grad buffer when it takes gradients, else null.
double* grad_of(const std::shared_ptr<Node>& p) { return p->requires_grad ? p->grad_buffer().data() : nullptr; }

void require(bool ok, const std::string& msg) {
  if (!ok) throw DimensionError(msg);
}

std::string dims(const Tensor& t) { return shape_string(t.shape()); }

// c[N x M] += a[N x K] * b[K x M]
void gemm_nn(const double* a, const double* b, double* c, std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c + i * m;
    const double* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b + p * m;
      for (std::size_t j = 0; j < m; ++j) ci[j] += av * bp[j];
    }
  }
}

// c[N x M] += a[N x K] * b[M x K]^T
void gemm_nt(const double* a, const double* b, double* c, std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a + i * k;
    for (std::size_t j = 0; j < m; ++j) {
      const double* bj = b + j * k;
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
      c[i * m + j] += s;
    }
  }
}

// c[K x M] += a[N x K]^T * b[N x M]
void gemm_tn(const double* a, const double* b, double* c, std::size_t n, std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a + i * k;
    const double* bi = b + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      double av = ai[p];
      if (av == 0.0) continue;
      double* cp = c + p * m;
      for (std::size_t j = 0; j < m; ++j) cp[j] += av * bi[j];
    }
  }
}

Shape matrix_shape(std::size_t r, std::size_t c) { return {r, c}; }

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  require(b.rows() == k, "matmul: " + dims(a) + " x " + dims(b));
  std::vector<double> out(n * m, 0.0);
  gemm_nn(a.data().data(), b.data().data(), out.data(), n, k, m);
  count_mul_adds(n * k * m);
  return make_result(matrix_shape(n, m), std::move(out), {a, b},
                     [n, k, m](Node& self) {
                       const auto& pa = self.parents[0];
                       const auto& pb = self.parents[1];
                       if (double* ga = grad_of(pa)) gemm_nt(self.grad.data(), pb->value.data(), ga, n, m, k);
                       if (double* gb = grad_of(pb)) gemm_tn(pa->value.data(), self.grad.data(), gb, n, k, m);
                     },
                     "matmul");
}

Tensor matmul_transposed(const Tensor& a, const Tensor& b) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  require(b.cols() == k, "matmul_transposed: " + dims(a) + " x " + dims(b) + "^T");
  std::vector<double> out(n * m, 0.0);
  gemm_nt(a.data().data(), b.data().data(), out.data(), n, k, m);
  count_mul_adds(n * k * m);
  return make_result(matrix_shape(n, m), std::move(out), {a, b},
                     [n, k, m](Node& self) {
                       const auto& pa = self.parents[0];
                       const auto& pb = self.parents[1];
                       // dA = dC * B ; dB = dC^T * A
                       if (double* ga = grad_of(pa)) gemm_nn(self.grad.data(), pb->value.data(), ga, n, m, k);
                       if (double* gb = grad_of(pb)) gemm_tn(self.grad.data(), pa->value.data(), gb, n, m, k);
                     },
                     "matmul_transposed");
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  const std::size_t n = x.rows(), din = x.cols(), dout = weight.cols();
  require(weight.rows() == din, "linear: input " + dims(x) + " vs weight " + dims(weight));
  require(bias.size() == dout, "linear: bias " + dims(bias) + " vs weight " + dims(weight));
  std::vector<double> out(n * dout);
  const double* b = bias.data().data();
  for (std::size_t i = 0; i < n; ++i) std::copy(b, b + dout, out.begin() + static_cast<std::ptrdiff_t>(i * dout));
  gemm_nn(x.data().data(), weight.data().data(), out.data(), n, din, dout);
  count_mul_adds(n * din * dout);
  return make_result(matrix_shape(n, dout), std::move(out), {x, weight, bias},
                     [n, din, dout](Node& self) {
                       const auto& px = self.parents[0];
                       const auto& pw = self.parents[1];
                       const auto& pb = self.parents[2];
                       const double* g = self.grad.data();
                       if (double* gx = grad_of(px)) gemm_nt(g, pw->value.data(), gx, n, dout, din);
                       if (double* gw = grad_of(pw)) gemm_tn(px->value.data(), g, gw, n, din, dout);
                       if (double* gb = grad_of(pb)) {
                         for (std::size_t i = 0; i < n; ++i)
                           for (std::size_t j = 0; j < dout; ++j) gb[j] += g[i * dout + j];
                       }
                     },
                     "linear");
}

Tensor add(const Tensor& a, const Tensor& b) {
  require(a.size() == b.size() && a.rows() == b.rows(), "add: " + dims(a) + " + " + dims(b));
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) + b.at(i);
  return make_result(a.shape(), std::move(out), {a, b},
                     [](Node& self) {
                       for (int s = 0; s < 2; ++s) {
                         if (double* g = grad_of(self.parents[s]))
                           for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
                       }
                     },
                     "add");
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require(a.size() == b.size() && a.rows() == b.rows(), "sub: " + dims(a) + " - " + dims(b));
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) - b.at(i);
  return make_result(a.shape(), std::move(out), {a, b},
                     [](Node& self) {
                       if (double* g = grad_of(self.parents[0]))
                         for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
                       if (double* g = grad_of(self.parents[1]))
                         for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] -= self.grad[i];
                     },
                     "sub");
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require(a.size() == b.size() && a.rows() == b.rows(), "mul: " + dims(a) + " * " + dims(b));
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * b.at(i);
  return make_result(a.shape(), std::move(out), {a, b},
                     [](Node& self) {
                       const auto& pa = self.parents[0];
                       const auto& pb = self.parents[1];
                       if (double* g = grad_of(pa))
                         for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * pb->value[i];
                       if (double* g = grad_of(pb))
                         for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * pa->value[i];
                     },
                     "mul");
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * factor;
  return make_result(a.shape(), std::move(out), {a},
                     [factor](Node& self) {
                       if (double* g = grad_of(self.parents[0]))
                         for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * factor;
                     },
                     "scale");
}

Tensor relu(const Tensor& x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, x.at(i));
  return make_result(x.shape(), std::move(out), {x},
                     [](Node& self) {
                       const auto& px = self.parents[0];
                       if (double* g = grad_of(px))
                         for (std::size_t i = 0; i < self.grad.size(); ++i)
                           if (px->value[i] > 0.0) g[i] += self.grad[i];
                     },
                     "relu");
}

Tensor sigmoid(const Tensor& x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = x.at(i);
    out[i] = v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  }
  return make_result(x.shape(), std::move(out), {x},
                     [](Node& self) {
                       if (double* g = grad_of(self.parents[0]))
                         for (std::size_t i = 0; i < self.grad.size(); ++i) {
                           double s = self.value[i];
                           g[i] += self.grad[i] * s * (1.0 - s);
                         }
                     },
                     "sigmoid");
}

namespace {

// dx_ij = p_ij (dp_ij - sum_k p_ik dp_ik)
void softmax_backward(const std::vector<double>& p, const std::vector<double>& dp, double* dx, std::size_t n,
                      std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* pi = p.data() + i * m;
    const double* gi = dp.data() + i * m;
    double dot = 0.0;
    for (std::size_t j = 0; j < m; ++j) dot += pi[j] * gi[j];
    for (std::size_t j = 0; j < m; ++j) dx[i * m + j] += pi[j] * (gi[j] - dot);
  }
}

}  // namespace

Tensor softmax_rows(const Tensor& x, const std::vector<bool>& key_valid) {
  const std::size_t n = x.rows(), m = x.cols();
  require(key_valid.empty() || key_valid.size() == m, "softmax_rows: mask length vs " + dims(x));
  std::vector<double> out(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.data().data() + i * m;
    double* oi = out.data() + i * m;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j)
      if (key_valid.empty() || key_valid[j]) mx = std::max(mx, xi[j]);
    if (!std::isfinite(mx)) continue;  // fully masked row
    double z = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (!key_valid.empty() && !key_valid[j]) continue;
      oi[j] = std::exp(xi[j] - mx);
      z += oi[j];
    }
    for (std::size_t j = 0; j < m; ++j) oi[j] /= z;
  }
  return make_result(x.shape(), std::move(out), {x},
                     [n, m](Node& self) {
                       if (double* g = grad_of(self.parents[0])) softmax_backward(self.value, self.grad, g, n, m);
                     },
                     "softmax_rows");
}

Tensor softmax_rows_gated(const Tensor& x, const Tensor& gates) {
  const std::size_t n = x.rows(), m = x.cols();
  require(gates.size() == m, "softmax_rows_gated: gates " + dims(gates) + " vs " + dims(x));
  std::vector<double> out(n * m, 0.0);
  std::vector<double> denom(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.data().data() + i * m;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) mx = std::max(mx, xi[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      out[i * m + j] = gates.at(j) * std::exp(xi[j] - mx);
      z += out[i * m + j];
    }
    // All gates closed: the row stays zero.
    if (z <= 0.0) {
      std::fill(out.begin() + static_cast<std::ptrdiff_t>(i * m), out.begin() + static_cast<std::ptrdiff_t>((i + 1) * m), 0.0);
      continue;
    }
    denom[i] = z;
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] /= z;
  }
  return make_result(
      x.shape(), std::move(out), {x, gates},
      [n, m, denom](Node& self) {
        const auto& px = self.parents[0];
        const auto& pg = self.parents[1];
        double* gx = grad_of(px);
        double* gg = grad_of(pg);
        for (std::size_t i = 0; i < n; ++i) {
          if (denom[i] <= 0.0) continue;
          const double* pi = self.value.data() + i * m;
          const double* di = self.grad.data() + i * m;
          const double* xi = px->value.data() + i * m;
          double dot = 0.0;
          for (std::size_t j = 0; j < m; ++j) dot += pi[j] * di[j];
          if (gx)
            for (std::size_t j = 0; j < m; ++j) gx[i * m + j] += pi[j] * (di[j] - dot);
          if (gg) {
            // p_ij = g_j e_ij / Z  ->  dp_ij/dg_k = [j==k] e_ij / Z - p_ij e_ik / Z
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j) mx = std::max(mx, xi[j]);
            for (std::size_t k = 0; k < m; ++k) {
              double e_over_z = std::exp(xi[k] - mx) / denom[i];
              gg[k] += e_over_z * (di[k] - dot);
            }
          }
        }
      },
      "softmax_rows_gated");
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, double eps) {
  const std::size_t n = x.rows(), d = x.cols();
  require(gain.size() == d && shift.size() == d, "layer_norm: params vs " + dims(x));
  std::vector<double> out(n * d), xhat(n * d), inv_std(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.data().data() + i * d;
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += xi[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (xi[j] - mean) * (xi[j] - mean);
    var /= static_cast<double>(d);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) {
      xhat[i * d + j] = (xi[j] - mean) * inv_std[i];
      out[i * d + j] = xhat[i * d + j] * gain.at(j) + shift.at(j);
    }
  }
  return make_result(x.shape(), std::move(out), {x, gain, shift},
                     [n, d, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
                       const auto& pgain = self.parents[1];
                       double* gx = grad_of(self.parents[0]);
                       double* gg = grad_of(pgain);
                       double* gs = grad_of(self.parents[2]);
                       const double dd = static_cast<double>(d);
                       for (std::size_t i = 0; i < n; ++i) {
                         const double* go = self.grad.data() + i * d;
                         const double* xh = xhat.data() + i * d;
                         if (gg)
                           for (std::size_t j = 0; j < d; ++j) gg[j] += go[j] * xh[j];
                         if (gs)
                           for (std::size_t j = 0; j < d; ++j) gs[j] += go[j];
                         if (gx) {
                           double s1 = 0.0, s2 = 0.0;
                           for (std::size_t j = 0; j < d; ++j) {
                             double gh = go[j] * pgain->value[j];
                             s1 += gh;
                             s2 += gh * xh[j];
                           }
                           for (std::size_t j = 0; j < d; ++j) {
                             double gh = go[j] * pgain->value[j];
                             gx[i * d + j] += inv_std[i] * (gh - s1 / dd - xh[j] * s2 / dd);
                           }
                         }
                       }
                     },
                     "layer_norm");
}

MaxPoolResult max_pool_seq(const Tensor& x) {
  const std::size_t k = x.rows(), d = x.cols();
  if (k == 0) throw DimensionError("max_pool_seq: empty sequence");
  std::vector<double> out(x.data().begin(), x.data().begin() + static_cast<std::ptrdiff_t>(d));
  std::vector<std::size_t> arg(d, 0);
  for (std::size_t i = 1; i < k; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double v = x.at(i * d + j);
      if (v > out[j]) {
        out[j] = v;
        arg[j] = i;
      }
    }
  }
  auto pooled = make_result(matrix_shape(1, d), std::move(out), {x},
                            [d, arg](Node& self) {
                              if (double* g = grad_of(self.parents[0]))
                                for (std::size_t j = 0; j < d; ++j) g[arg[j] * d + j] += self.grad[j];
                            },
                            "max_pool_seq");
  return {std::move(pooled), std::move(arg)};
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end) {
  const std::size_t n = x.rows(), m = x.cols();
  require(begin <= end && end <= m, "slice_cols out of range for " + dims(x));
  const std::size_t w = end - begin;
  std::vector<double> out(n * w);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < w; ++j) out[i * w + j] = x.at(i * m + begin + j);
  return make_result(matrix_shape(n, w), std::move(out), {x},
                     [n, m, w, begin](Node& self) {
                       if (double* g = grad_of(self.parents[0]))
                         for (std::size_t i = 0; i < n; ++i)
                           for (std::size_t j = 0; j < w; ++j) g[i * m + begin + j] += self.grad[i * w + j];
                     },
                     "slice_cols");
}

Tensor concat_cols(std::span<const Tensor> parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  const std::size_t n = parts[0].rows();
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  for (const auto& p : parts) {
    require(p.rows() == n, "concat_cols: row mismatch " + dims(p));
    offsets.push_back(total);
    total += p.cols();
  }
  std::vector<double> out(n * total);
  for (std::size_t s = 0; s < parts.size(); ++s) {
    const std::size_t w = parts[s].cols();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < w; ++j) out[i * total + offsets[s] + j] = parts[s].at(i * w + j);
  }
  std::vector<Tensor> parents(parts.begin(), parts.end());
  return make_result(matrix_shape(n, total), std::move(out), std::move(parents),
                     [n, total, offsets](Node& self) {
                       for (std::size_t s = 0; s < self.parents.size(); ++s) {
                         double* g = grad_of(self.parents[s]);
                         if (!g) continue;
                         const std::size_t w = self.parents[s]->value.size() / std::max<std::size_t>(n, 1);
                         for (std::size_t i = 0; i < n; ++i)
                           for (std::size_t j = 0; j < w; ++j) g[i * w + j] += self.grad[i * total + offsets[s] + j];
                       }
                     },
                     "concat_cols");
}

Tensor concat_rows(std::span<const Tensor> parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  const std::size_t m = parts[0].cols();
  std::size_t total = 0;
  std::vector<double> out;
  for (const auto& p : parts) {
    require(p.cols() == m, "concat_rows: column mismatch " + dims(p));
    total += p.rows();
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  std::vector<Tensor> parents(parts.begin(), parts.end());
  return make_result(matrix_shape(total, m), std::move(out), std::move(parents),
                     [](Node& self) {
                       std::size_t offset = 0;
                       for (const auto& p : self.parents) {
                         const std::size_t len = p->value.size();
                         if (double* g = grad_of(p))
                           for (std::size_t i = 0; i < len; ++i) g[i] += self.grad[offset + i];
                         offset += len;
                       }
                     },
                     "concat_rows");
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows) {
  const std::size_t n = x.rows(), m = x.cols();
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  std::vector<double> out(idx.size() * m);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    require(idx[i] < n, "gather_rows: index " + std::to_string(idx[i]) + " out of range for " + dims(x));
    std::copy_n(x.data().begin() + static_cast<std::ptrdiff_t>(idx[i] * m), m,
                out.begin() + static_cast<std::ptrdiff_t>(i * m));
  }
  return make_result(matrix_shape(idx.size(), m), std::move(out), {x},
                     [m, idx](Node& self) {
                       if (double* g = grad_of(self.parents[0]))
                         for (std::size_t i = 0; i < idx.size(); ++i)
                           for (std::size_t j = 0; j < m; ++j) g[idx[i] * m + j] += self.grad[i * m + j];
                     },
                     "gather_rows");
}

Tensor repeat_row(const Tensor& row, std::size_t count) {
  require(row.rows() == 1, "repeat_row: expected a single row, got " + dims(row));
  const std::size_t m = row.cols();
  std::vector<double> out(count * m);
  for (std::size_t i = 0; i < count; ++i)
    std::copy(row.data().begin(), row.data().end(), out.begin() + static_cast<std::ptrdiff_t>(i * m));
  return make_result(matrix_shape(count, m), std::move(out), {row},
                     [count, m](Node& self) {
                       if (double* g = grad_of(self.parents[0]))
                         for (std::size_t i = 0; i < count; ++i)
                           for (std::size_t j = 0; j < m; ++j) g[j] += self.grad[i * m + j];
                     },
                     "repeat_row");
}

Tensor reshape(const Tensor& x, Shape shape) {
  require(shape_size(shape) == x.size(), "reshape: " + dims(x) + " -> " + shape_string(shape));
  std::vector<double> out(x.data().begin(), x.data().end());
  return make_result(std::move(shape), std::move(out), {x},
                     [](Node& self) {
                       if (double* g = grad_of(self.parents[0]))
                         for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
                     },
                     "reshape");
}

Tensor mask_rows(const Tensor& x, const std::vector<bool>& keep) {
  const std::size_t n = x.rows(), m = x.cols();
  require(keep.size() == n, "mask_rows: mask length vs " + dims(x));
  std::vector<bool> flags(keep.begin(), keep.end());
  std::vector<double> out(x.data().begin(), x.data().end());
  for (std::size_t i = 0; i < n; ++i)
    if (!flags[i]) std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(i * m), m, 0.0);
  return make_result(x.shape(), std::move(out), {x},
                     [n, m, flags](Node& self) {
                       if (double* g = grad_of(self.parents[0]))
                         for (std::size_t i = 0; i < n; ++i)
                           if (flags[i])
                             for (std::size_t j = 0; j < m; ++j) g[i * m + j] += self.grad[i * m + j];
                     },
                     "mask_rows");
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return make_result(matrix_shape(1, 1), {s}, {x},
                     [](Node& self) {
                       if (double* g = grad_of(self.parents[0])) {
                         const std::size_t len = self.parents[0]->value.size();
                         for (std::size_t i = 0; i < len; ++i) g[i] += self.grad[0];
                       }
                     },
                     "sum");
}

Tensor bce_with_logits(const Tensor& logits, std::span<const double> targets) {
  require(logits.size() == targets.size(), "bce_with_logits: target count vs " + dims(logits));
  std::vector<double> t(targets.begin(), targets.end());
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double z = logits.at(i);
    // max(z,0) - z t + log(1 + exp(-|z|))
    s += std::max(z, 0.0) - z * t[i] + std::log1p(std::exp(-std::abs(z)));
  }
  return make_result(matrix_shape(1, 1), {s}, {logits},
                     [t](Node& self) {
                       const auto& pl = self.parents[0];
                       if (double* g = grad_of(pl))
                         for (std::size_t i = 0; i < t.size(); ++i) {
                           double z = pl->value[i];
                           double p = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
                           g[i] += self.grad[0] * (p - t[i]);
                         }
                     },
                     "bce_with_logits");
}

Tensor smooth_l1(const Tensor& pred, std::span<const double> targets, double beta) {
  require(pred.size() == targets.size(), "smooth_l1: target count vs " + dims(pred));
  std::vector<double> t(targets.begin(), targets.end());
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double d = std::abs(pred.at(i) - t[i]);
    s += d < beta ? 0.5 * d * d / beta : d - 0.5 * beta;
  }
  return make_result(matrix_shape(1, 1), {s}, {pred},
                     [t, beta](Node& self) {
                       const auto& pp = self.parents[0];
                       if (double* g = grad_of(pp))
                         for (std::size_t i = 0; i < t.size(); ++i) {
                           double d = pp->value[i] - t[i];
                           double dd = std::abs(d) < beta ? d / beta : (d > 0 ? 1.0 : -1.0);
                           g[i] += self.grad[0] * dd;
                         }
                     },
                     "smooth_l1");
}

}  // namespace ftkn::nn
