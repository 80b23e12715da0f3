#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "c2lab/errors.hpp"

namespace c2lab {

bool is_prime_u32(uint32_t n);

// Arithmetic in the field of integers mod p. Elements are canonical
// representatives in [0, p); all operations assume reduced inputs except
// reduce_int, which maps an arbitrary signed value into the field.
class PrimeField {
 public:
  explicit PrimeField(uint32_t p);

  uint32_t modulus() const { return p_; }

  uint32_t add(uint32_t a, uint32_t b) const {
    uint32_t s = a + b;
    return s >= p_ || s < a ? s - p_ : s;
  }
  uint32_t sub(uint32_t a, uint32_t b) const { return a >= b ? a - b : a + p_ - b; }
  uint32_t neg(uint32_t a) const { return a == 0 ? 0 : p_ - a; }
  uint32_t mul(uint32_t a, uint32_t b) const {
    return static_cast<uint32_t>(static_cast<uint64_t>(a) * b % p_);
  }
  uint32_t pow(uint32_t a, uint64_t e) const;
  uint32_t inv(uint32_t a) const;
  uint32_t reduce_int(int64_t x) const;

 private:
  uint32_t p_;
};

// Dense matrix over a prime field, row-major.
class FpMatrix {
 public:
  FpMatrix() : rows_(0), cols_(0) {}
  FpMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  static FpMatrix identity(size_t n);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  uint32_t& at(size_t i, size_t j) { return data_[i * cols_ + j]; }
  uint32_t at(size_t i, size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const FpMatrix& o) const = default;

  FpMatrix mul(const FpMatrix& o, const PrimeField& fp) const;
  std::vector<uint32_t> mat_vec(const std::vector<uint32_t>& v, const PrimeField& fp) const;

  // Determinant by Gaussian elimination; requires a square matrix.
  uint32_t det(const PrimeField& fp) const;

 private:
  size_t rows_, cols_;
  std::vector<uint32_t> data_;
};

// Orbit of v0 under repeated application of step, split at the first
// repeated vector: preperiod holds v_0..v_{lambda-1}, period holds the
// cycle v_lambda..v_{lambda+rho-1}.
struct OrbitDecomposition {
  std::vector<std::vector<uint32_t>> preperiod;
  std::vector<std::vector<uint32_t>> period;
};

OrbitDecomposition iterate_until_periodic(const FpMatrix& step,
                                          const std::vector<uint32_t>& v0,
                                          const PrimeField& fp,
                                          uint64_t max_steps = 1u << 20);

}  // namespace c2lab
