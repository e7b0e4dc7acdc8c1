#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <random>

namespace tim::gf {

/// Seeded generator used everywhere randomness is injected.
using Rng = std::mt19937_64;

struct NotPrime : std::invalid_argument {
  explicit NotPrime(std::uint64_t q);
  std::uint64_t q;
};

struct FieldMismatch : std::invalid_argument {
  FieldMismatch(std::uint32_t a, std::uint32_t b);
};

struct DivisionByZero : std::domain_error {
  DivisionByZero();
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class Element;

/// Prime field GF(q). Holds only the modulus, so it is cheap to copy.
class Field {
 public:
  /// Throws NotPrime unless q is a prime below 2^31.
  explicit Field(std::uint64_t q);

  std::uint32_t q() const noexcept { return q_; }

  /// Reduces any integer (including negatives) into the field.
  Element operator()(std::int64_t v) const noexcept;
  Element zero() const noexcept;
  Element one() const noexcept;

  friend bool operator==(const Field&, const Field&) = default;

 private:
  friend class Element;
  struct Tag {};
  Field(std::uint32_t q, Tag) noexcept : q_(q) {}
  std::uint32_t q_;
};

bool is_prime(std::uint64_t n) noexcept;

class Element {
 public:
  Element(std::uint32_t value, Field field) noexcept;

  std::uint32_t value() const noexcept { return value_; }
  Field field() const noexcept { return Field{q_, Field::Tag{}}; }
  std::uint32_t modulus() const noexcept { return q_; }
  bool is_zero() const noexcept { return value_ == 0; }

  Element inv() const;

  friend Element operator+(Element a, Element b);
  friend Element operator-(Element a, Element b);
  friend Element operator*(Element a, Element b);
  friend Element operator/(Element a, Element b);
  friend Element operator-(Element a);

  Element& operator+=(Element b) { return *this = *this + b; }
  Element& operator-=(Element b) { return *this = *this - b; }
  Element& operator*=(Element b) { return *this = *this * b; }

  friend bool operator==(const Element&, const Element&) = default;

 private:
  friend class Field;
  Element(std::uint32_t value, std::uint32_t q) noexcept : value_(value), q_(q) {}
  std::uint32_t value_;
  std::uint32_t q_;
};

std::ostream& operator<<(std::ostream& os, Element e);

inline Element add(Element a, Element b) { return a + b; }
inline Element mul(Element a, Element b) { return a * b; }
inline Element neg(Element a) { return -a; }
inline Element inv(Element a) { return a.inv(); }
inline Element div(Element a, Element b) { return a / b; }

/// Uniform over {1, ..., q-1}.
Element rand_nonzero(Field field, Rng& rng);
/// Uniform over {0, ..., q-1}.
Element rand_element(Field field, Rng& rng);

/// Dense row-major matrix over GF(q).
class Matrix {
 public:
  Matrix(Field field, std::size_t rows, std::size_t cols);
  /// Entries are reduced mod q.
  Matrix(Field field, std::initializer_list<std::initializer_list<std::int64_t>> rows);

  static Matrix identity(Field field, std::size_t n);

  Field field() const noexcept { return field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Element at(std::size_t r, std::size_t c) const;
  void set(std::size_t r, std::size_t c, Element v);

  std::vector<Element> operator*(std::span<const Element> x) const;
  Matrix operator*(const Matrix& rhs) const;

  /// Columns [first, first + count) as a new matrix.
  Matrix col_block(std::size_t first, std::size_t count) const;
  /// Horizontal concatenation.
  static Matrix hcat(const Matrix& left, const Matrix& right);

  /// Row-major values, each in [0, q).
  std::span<const std::uint32_t> raw() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  Field field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint32_t> data_;
};

std::size_t rank(const Matrix& m);

enum class SolveStatus { Ok, Inconsistent, Underdetermined };

std::string to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::Ok;
  /// One entry per queried coordinate when status == Ok, else empty.
  std::vector<Element> values;

  bool ok() const noexcept { return status == SolveStatus::Ok; }
};

/// Solves A x = y for every coordinate of x.
Solution solve(const Matrix& a, std::span<const Element> y);

/// Solves A x = y, requiring uniqueness only on `wanted` coordinates.
/// Inconsistent systems fail regardless of which coordinates were asked for.
Solution solve(const Matrix& a, std::span<const Element> y,
               std::span<const std::size_t> wanted);

}  // namespace tim::gf
