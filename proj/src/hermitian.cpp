#include "rmt/hermitian.hpp"

#include "rmt/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rmt {

HermitianMatrix::HermitianMatrix(std::size_t n) : n_(n), a_(n * n) {}

HermitianMatrix HermitianMatrix::identity(std::size_t n) {
  HermitianMatrix h(n);
  for (std::size_t i = 0; i < n; ++i) h.a_[i * n + i] = 1.0;
  return h;
}

HermitianMatrix HermitianMatrix::from_dense(std::size_t n, std::span<const Complex> entries) {
  require(entries.size() == n * n, ErrorKind::shape, "from_dense: expected n*n entries");
  HermitianMatrix h(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Complex v = entries[i * n + j];
      require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorKind::parameter,
              "from_dense: non-finite entry");
      require(v == std::conj(entries[j * n + i]), ErrorKind::parameter,
              "from_dense: matrix is not Hermitian");
    }
  }
  std::copy(entries.begin(), entries.end(), h.a_.begin());
  return h;
}

void HermitianMatrix::set(std::size_t i, std::size_t j, Complex value) {
  require(i < n_ && j < n_, ErrorKind::shape, "HermitianMatrix::set: index out of range");
  if (i == j) {
    require(value.imag() == 0.0, ErrorKind::parameter, "diagonal entries must be real");
    a_[i * n_ + i] = value;
    return;
  }
  a_[i * n_ + j] = value;
  a_[j * n_ + i] = std::conj(value);
}

void HermitianMatrix::scale(double factor) {
  for (auto& v : a_) v *= factor;
}

double HermitianMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : a_) m = std::max(m, std::abs(v));
  return m;
}

double HermitianMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += a_[i * n_ + i].real();
  return t;
}

double HermitianMatrix::trace_of_square() const {
  double t = 0.0;
  for (const auto& v : a_) t += std::norm(v);
  return t;
}

bool HermitianMatrix::all_finite() const {
  return std::all_of(a_.begin(), a_.end(),
                     [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

HermitianMatrix HermitianMatrix::shifted(double c) const {
  HermitianMatrix h = *this;
  for (std::size_t i = 0; i < n_; ++i) h.a_[i * n_ + i] += c;
  return h;
}

std::vector<Complex> HermitianMatrix::apply(std::span<const Complex> x) const {
  require(x.size() == n_, ErrorKind::shape, "apply: vector length mismatch");
  std::vector<Complex> y(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    Complex acc = 0.0;
    const Complex* row = a_.data() + i * n_;
    for (std::size_t j = 0; j < n_; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

namespace {

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;         // off[k] couples k and k+1; off[n-1] = 0
  std::vector<Complex> reflectors;  // row k holds v_k (entries k+1..n-1)
  std::vector<Complex> taus;
};

// Unitary reduction Q^H A Q = T, Q = H_0 H_1 ... H_{n-2}, H_k = I - tau_k v_k v_k^H.
// Only the lower triangle of the working copy is read or updated.
Tridiagonal tridiagonalize(const HermitianMatrix& h, bool keep_reflectors) {
  const std::size_t n = h.size();
  std::vector<Complex> a(h.data().begin(), h.data().end());
  Tridiagonal t;
  t.diag.assign(n, 0.0);
  t.off.assign(n, 0.0);
  t.taus.assign(n, 0.0);
  if (keep_reflectors) t.reflectors.assign(n * n, 0.0);

  std::vector<Complex> v(n), y(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Complex alpha = a[(k + 1) * n + k];
    double xnorm2 = 0.0;
    for (std::size_t i = k + 2; i < n; ++i) xnorm2 += std::norm(a[i * n + k]);

    Complex tau = 0.0;
    double beta = alpha.real();
    std::fill(v.begin() + static_cast<std::ptrdiff_t>(k) + 1, v.end(), Complex(0.0));
    v[k + 1] = 1.0;
    if (xnorm2 != 0.0 || alpha.imag() != 0.0) {
      beta = -std::copysign(std::sqrt(std::norm(alpha) + xnorm2), alpha.real());
      tau = Complex((beta - alpha.real()) / beta, -alpha.imag() / beta);
      const Complex scale = 1.0 / (alpha - beta);
      for (std::size_t i = k + 2; i < n; ++i) v[i] = a[i * n + k] * scale;
    }
    t.diag[k] = a[k * n + k].real();
    t.off[k] = beta;
    t.taus[k] = tau;
    if (keep_reflectors) std::copy(v.begin() + k + 1, v.end(), t.reflectors.begin() + k * n + k + 1);
    if (tau == Complex(0.0)) continue;

    // y = tau * A22 v, using the lower triangle only.
    std::fill(y.begin() + k + 1, y.end(), Complex(0.0));
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex* row = a.data() + i * n;
      Complex acc = 0.0;
      const Complex vi = v[i];
      for (std::size_t j = k + 1; j < i; ++j) {
        acc += row[j] * v[j];
        y[j] += std::conj(row[j]) * vi;
      }
      y[i] += acc + row[i].real() * vi;
    }
    Complex yv = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      y[i] *= tau;
      yv += std::conj(y[i]) * v[i];
    }
    const Complex half = -0.5 * tau * yv;
    for (std::size_t i = k + 1; i < n; ++i) y[i] += half * v[i];  // y becomes w

    for (std::size_t i = k + 1; i < n; ++i) {
      Complex* row = a.data() + i * n;
      const Complex vi = v[i];
      const Complex wi = y[i];
      for (std::size_t j = k + 1; j <= i; ++j) row[j] -= vi * std::conj(y[j]) + wi * std::conj(v[j]);
    }
  }
  if (n > 0) t.diag[n - 1] = a[(n - 1) * n + (n - 1)].real();
  if (n > 0) t.off[n - 1] = 0.0;
  return t;
}

// Implicit QL on a symmetric tridiagonal matrix. When `z` is non-null it holds
// n rows of length n (row k = component vector of eigenpair k) and receives
// the accumulated rotations.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>* z) {
  const std::size_t n = d.size();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    std::size_t m = l;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++iterations > 60)
        fail(ErrorKind::numerical, "tridiagonal QL did not converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (std::size_t ii = m; ii-- > l;) {
        const double f = s * e[ii];
        const double b = c * e[ii];
        r = std::hypot(f, g);
        e[ii + 1] = r;
        if (r == 0.0) {
          d[ii + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[ii + 1] - p;
        r = (d[ii] - g) * s + 2.0 * c * b;
        p = s * r;
        d[ii + 1] = g + p;
        g = c * r - b;
        if (z != nullptr) {
          double* zi = z->data() + ii * n;
          double* zj = z->data() + (ii + 1) * n;
          for (std::size_t k = 0; k < n; ++k) {
            const double fk = zj[k];
            zj[k] = s * zi[k] + c * fk;
            zi[k] = c * zi[k] - s * fk;
          }
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

void check_input(const HermitianMatrix& h) {
  require(h.all_finite(), ErrorKind::parameter, "eigensolver: matrix has non-finite entries");
}

}  // namespace

std::vector<double> eigenvalues_hermitian(const HermitianMatrix& h) {
  check_input(h);
  Tridiagonal t = tridiagonalize(h, false);
  tridiagonal_ql(t.diag, t.off, nullptr);
  std::sort(t.diag.begin(), t.diag.end());
  return t.diag;
}

EigenSystem eigensystem_hermitian(const HermitianMatrix& h) {
  check_input(h);
  const std::size_t n = h.size();
  Tridiagonal t = tridiagonalize(h, true);
  std::vector<double> z(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) z[k * n + k] = 1.0;
  tridiagonal_ql(t.diag, t.off, &z);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t.diag[a] < t.diag[b]; });

  EigenSystem sys;
  sys.n = n;
  sys.values.resize(n);
  sys.vectors.resize(n * n);
  std::vector<Complex> x(n);
  for (std::size_t out = 0; out < n; ++out) {
    const std::size_t k = order[out];
    sys.values[out] = t.diag[k];
    for (std::size_t i = 0; i < n; ++i) x[i] = z[k * n + i];
    // x <- H_0 H_1 ... H_{n-2} x
    for (std::size_t r = n - 1; r-- > 0;) {
      const Complex tau = t.taus[r];
      if (tau == Complex(0.0)) continue;
      const Complex* v = t.reflectors.data() + r * n;
      Complex dot = 0.0;
      for (std::size_t i = r + 1; i < n; ++i) dot += std::conj(v[i]) * x[i];
      const Complex f = tau * dot;
      for (std::size_t i = r + 1; i < n; ++i) x[i] -= f * v[i];
    }
    std::copy(x.begin(), x.end(), sys.vectors.begin() + out * n);
  }
  return sys;
}

double residual_norm(const HermitianMatrix& h, double lambda, std::span<const Complex> v) {
  const std::vector<Complex> hv = h.apply(v);
  double acc = 0.0;
  for (std::size_t i = 0; i < hv.size(); ++i) acc += std::norm(hv[i] - lambda * v[i]);
  return std::sqrt(acc);
}

}  // namespace rmt
