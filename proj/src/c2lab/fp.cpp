#include "c2lab/fp.hpp"

#include <map>

namespace c2lab {

bool is_prime_u32(uint32_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  if (n % 3 == 0) return n == 3;
  for (uint64_t d = 5; d * d <= n; d += 6) {
    if (n % d == 0 || n % (d + 2) == 0) return false;
  }
  return true;
}

PrimeField::PrimeField(uint32_t p) : p_(p) {
  if (p >= (1u << 31) || !is_prime_u32(p)) {
    throw PreconditionError("field modulus must be a prime below 2^31");
  }
}

uint32_t PrimeField::pow(uint32_t a, uint64_t e) const {
  uint32_t r = 1 % p_;
  uint32_t base = a;
  while (e > 0) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

uint32_t PrimeField::inv(uint32_t a) const {
  if (a == 0) throw PreconditionError("division by zero in prime field");
  // Extended Euclid on (a, p); p prime so gcd is 1.
  int64_t t = 0, new_t = 1;
  int64_t r = p_, new_r = a;
  while (new_r != 0) {
    int64_t q = r / new_r;
    int64_t tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (t < 0) t += p_;
  return static_cast<uint32_t>(t);
}

uint32_t PrimeField::reduce_int(int64_t x) const {
  int64_t r = x % static_cast<int64_t>(p_);
  if (r < 0) r += p_;
  return static_cast<uint32_t>(r);
}

FpMatrix FpMatrix::identity(size_t n) {
  FpMatrix m(n, n);
  for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

FpMatrix FpMatrix::mul(const FpMatrix& o, const PrimeField& fp) const {
  if (cols_ != o.rows_) throw PreconditionError("matrix product dimension mismatch");
  FpMatrix out(rows_, o.cols_);
  for (size_t i = 0; i < rows_; ++i) {
    for (size_t k = 0; k < cols_; ++k) {
      uint32_t a = at(i, k);
      if (a == 0) continue;
      for (size_t j = 0; j < o.cols_; ++j) {
        out.at(i, j) = fp.add(out.at(i, j), fp.mul(a, o.at(k, j)));
      }
    }
  }
  return out;
}

std::vector<uint32_t> FpMatrix::mat_vec(const std::vector<uint32_t>& v,
                                        const PrimeField& fp) const {
  if (v.size() != cols_) throw PreconditionError("matrix-vector dimension mismatch");
  std::vector<uint32_t> out(rows_, 0);
  for (size_t i = 0; i < rows_; ++i) {
    uint64_t acc = 0;
    for (size_t j = 0; j < cols_; ++j) {
      acc += static_cast<uint64_t>(at(i, j)) * v[j] % fp.modulus();
    }
    out[i] = static_cast<uint32_t>(acc % fp.modulus());
  }
  return out;
}

uint32_t FpMatrix::det(const PrimeField& fp) const {
  if (rows_ != cols_) throw PreconditionError("determinant of non-square matrix");
  size_t n = rows_;
  std::vector<uint32_t> a = data_;
  auto at2 = [&](size_t i, size_t j) -> uint32_t& { return a[i * n + j]; };
  uint32_t det = 1 % fp.modulus();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    while (pivot < n && at2(pivot, col) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      for (size_t j = col; j < n; ++j) std::swap(at2(pivot, j), at2(col, j));
      det = fp.neg(det);
    }
    uint32_t pv = at2(col, col);
    det = fp.mul(det, pv);
    uint32_t pv_inv = fp.inv(pv);
    for (size_t i = col + 1; i < n; ++i) {
      uint32_t f = at2(i, col);
      if (f == 0) continue;
      f = fp.mul(f, pv_inv);
      at2(i, col) = 0;
      for (size_t j = col + 1; j < n; ++j) {
        at2(i, j) = fp.sub(at2(i, j), fp.mul(f, at2(col, j)));
      }
    }
  }
  return det;
}

OrbitDecomposition iterate_until_periodic(const FpMatrix& step,
                                          const std::vector<uint32_t>& v0,
                                          const PrimeField& fp,
                                          uint64_t max_steps) {
  std::vector<std::vector<uint32_t>> orbit;
  std::map<std::vector<uint32_t>, size_t> seen;
  std::vector<uint32_t> v = v0;
  while (true) {
    auto it = seen.find(v);
    if (it != seen.end()) {
      size_t lambda = it->second;
      OrbitDecomposition out;
      out.preperiod.assign(orbit.begin(), orbit.begin() + lambda);
      out.period.assign(orbit.begin() + lambda, orbit.end());
      return out;
    }
    if (orbit.size() >= max_steps) {
      throw BudgetExceededError("orbit did not close within the step budget");
    }
    seen.emplace(v, orbit.size());
    orbit.push_back(v);
    v = step.mat_vec(v, fp);
  }
}

}  // namespace c2lab
