#include "tim/galois.hpp"

#include <algorithm>
#include <ostream>

#include <boost/random/uniform_int_distribution.hpp>

namespace tim::gf {

NotPrime::NotPrime(std::uint64_t q)
    : std::invalid_argument("field modulus is not prime: " + std::to_string(q)), q(q) {}

FieldMismatch::FieldMismatch(std::uint32_t a, std::uint32_t b)
    : std::invalid_argument("operands from different fields: GF(" + std::to_string(a) +
                            ") vs GF(" + std::to_string(b) + ")") {}

DivisionByZero::DivisionByZero() : std::domain_error("division by zero in GF(q)") {}

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

Field::Field(std::uint64_t q) : q_(0) {
  if (q >= (std::uint64_t{1} << 31) || !is_prime(q)) throw NotPrime(q);
  q_ = static_cast<std::uint32_t>(q);
}

Element Field::operator()(std::int64_t v) const noexcept {
  std::int64_t r = v % static_cast<std::int64_t>(q_);
  if (r < 0) r += q_;
  return Element{static_cast<std::uint32_t>(r), q_};
}

Element Field::zero() const noexcept { return Element{0u, q_}; }
Element Field::one() const noexcept { return Element{1u, q_}; }

Element::Element(std::uint32_t value, Field field) noexcept
    : value_(value % field.q()), q_(field.q()) {}

namespace {

void check_same(Element a, Element b) {
  if (a.modulus() != b.modulus()) throw FieldMismatch(a.modulus(), b.modulus());
}

std::uint32_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t q) {
  std::uint64_t r = 1;
  base %= q;
  while (exp) {
    if (exp & 1) r = r * base % q;
    base = base * base % q;
    exp >>= 1;
  }
  return static_cast<std::uint32_t>(r);
}

}  // namespace

Element operator+(Element a, Element b) {
  check_same(a, b);
  std::uint64_t s = std::uint64_t{a.value_} + b.value_;
  return Element{static_cast<std::uint32_t>(s % a.q_), a.q_};
}

Element operator-(Element a, Element b) {
  check_same(a, b);
  std::uint64_t s = std::uint64_t{a.value_} + a.q_ - b.value_;
  return Element{static_cast<std::uint32_t>(s % a.q_), a.q_};
}

Element operator*(Element a, Element b) {
  check_same(a, b);
  std::uint64_t p = std::uint64_t{a.value_} * b.value_;
  return Element{static_cast<std::uint32_t>(p % a.q_), a.q_};
}

Element operator-(Element a) {
  return Element{a.value_ == 0 ? 0u : a.q_ - a.value_, a.q_};
}

// Fermat: a^(q-2) is the inverse for prime q.
Element Element::inv() const {
  if (value_ == 0) throw DivisionByZero();
  return Element{pow_mod(value_, q_ - 2, q_), q_};
}

Element operator/(Element a, Element b) {
  check_same(a, b);
  return a * b.inv();
}

std::ostream& operator<<(std::ostream& os, Element e) { return os << e.value(); }

Element rand_nonzero(Field field, Rng& rng) {
  boost::random::uniform_int_distribution<std::uint32_t> dist(1, field.q() - 1);
  return Element{dist(rng), field};
}

Element rand_element(Field field, Rng& rng) {
  boost::random::uniform_int_distribution<std::uint32_t> dist(0, field.q() - 1);
  return Element{dist(rng), field};
}

// ---------------------------------------------------------------------------

Matrix::Matrix(Field field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

Matrix::Matrix(Field field, std::initializer_list<std::initializer_list<std::int64_t>> rows)
    : field_(field), rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionMismatch("ragged matrix literal");
    for (auto v : row) data_.push_back(field(v).value());
  }
}

Matrix Matrix::identity(Field field, std::size_t n) {
  Matrix m(field, n, n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1;
  return m;
}

Element Matrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("matrix index out of range");
  return Element{data_[r * cols_ + c], field_};
}

void Matrix::set(std::size_t r, std::size_t c, Element v) {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("matrix index out of range");
  if (v.modulus() != field_.q()) throw FieldMismatch(v.modulus(), field_.q());
  data_[r * cols_ + c] = v.value();
}

std::vector<Element> Matrix::operator*(std::span<const Element> x) const {
  if (x.size() != cols_) throw DimensionMismatch("matrix-vector size mismatch");
  std::vector<Element> out(rows_, field_.zero());
  for (std::size_t r = 0; r < rows_; ++r) {
    Element acc = field_.zero();
    for (std::size_t c = 0; c < cols_; ++c) acc += at(r, c) * x[c];
    out[r] = acc;
  }
  return out;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw DimensionMismatch("matrix product size mismatch");
  if (!(field_ == rhs.field_)) throw FieldMismatch(field_.q(), rhs.field_.q());
  Matrix out(field_, rows_, rhs.cols_);
  const std::uint64_t q = field_.q();
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < rhs.cols_; ++c) {
      std::uint64_t acc = 0;
      for (std::size_t k = 0; k < cols_; ++k)
        acc = (acc + std::uint64_t{data_[r * cols_ + k]} * rhs.data_[k * rhs.cols_ + c]) % q;
      out.data_[r * out.cols_ + c] = static_cast<std::uint32_t>(acc);
    }
  return out;
}

Matrix Matrix::col_block(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw DimensionMismatch("column block out of range");
  Matrix out(field_, rows_, count);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < count; ++c)
      out.data_[r * count + c] = data_[r * cols_ + first + c];
  return out;
}

Matrix Matrix::hcat(const Matrix& left, const Matrix& right) {
  if (left.rows_ != right.rows_) throw DimensionMismatch("hcat row mismatch");
  if (!(left.field_ == right.field_)) throw FieldMismatch(left.field_.q(), right.field_.q());
  Matrix out(left.field_, left.rows_, left.cols_ + right.cols_);
  for (std::size_t r = 0; r < left.rows_; ++r) {
    std::copy_n(left.data_.begin() + r * left.cols_, left.cols_,
                out.data_.begin() + r * out.cols_);
    std::copy_n(right.data_.begin() + r * right.cols_, right.cols_,
                out.data_.begin() + r * out.cols_ + left.cols_);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// In-place reduced row echelon form. Pivots are taken left to right, each
// from the first row (top down) holding a nonzero entry in that column.
// Returns the pivot column of each pivot row.
std::vector<std::size_t> rref(std::vector<std::uint32_t>& m, std::size_t rows, std::size_t cols,
                              std::size_t pivot_cols, std::uint32_t q) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  auto cell = [&](std::size_t r, std::size_t c) -> std::uint32_t& { return m[r * cols + c]; };
  for (std::size_t col = 0; col < pivot_cols && row < rows; ++col) {
    std::size_t p = row;
    while (p < rows && cell(p, col) == 0) ++p;
    if (p == rows) continue;
    if (p != row)
      for (std::size_t c = 0; c < cols; ++c) std::swap(cell(p, c), cell(row, c));
    const std::uint64_t scale = pow_mod(cell(row, col), q - 2, q);
    for (std::size_t c = col; c < cols; ++c)
      cell(row, c) = static_cast<std::uint32_t>(cell(row, c) * scale % q);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == row || cell(r, col) == 0) continue;
      const std::uint64_t f = cell(r, col);
      for (std::size_t c = col; c < cols; ++c)
        cell(r, c) = static_cast<std::uint32_t>((cell(r, c) + q - f * cell(row, c) % q) % q);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

std::size_t rank(const Matrix& m) {
  std::vector<std::uint32_t> work(m.raw().begin(), m.raw().end());
  return rref(work, m.rows(), m.cols(), m.cols(), m.field().q()).size();
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Ok: return "ok";
    case SolveStatus::Inconsistent: return "inconsistent";
    case SolveStatus::Underdetermined: return "underdetermined";
  }
  return "?";
}

Solution solve(const Matrix& a, std::span<const Element> y) {
  std::vector<std::size_t> all(a.cols());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return solve(a, y, all);
}

Solution solve(const Matrix& a, std::span<const Element> y,
               std::span<const std::size_t> wanted) {
  if (y.size() != a.rows()) throw DimensionMismatch("solve: rows(A) != len(y)");
  const std::uint32_t q = a.field().q();
  const std::size_t n = a.cols();
  const std::size_t w = n + 1;
  std::vector<std::uint32_t> aug(a.rows() * w);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    if (y[r].modulus() != q) throw FieldMismatch(y[r].modulus(), q);
    std::copy_n(a.raw().begin() + r * n, n, aug.begin() + r * w);
    aug[r * w + n] = y[r].value();
  }
  const auto pivots = rref(aug, a.rows(), w, n, q);

  for (std::size_t r = pivots.size(); r < a.rows(); ++r)
    if (aug[r * w + n] != 0) return {SolveStatus::Inconsistent, {}};

  Solution out;
  for (std::size_t coord : wanted) {
    if (coord >= n) throw DimensionMismatch("solve: queried coordinate out of range");
    auto it = std::find(pivots.begin(), pivots.end(), coord);
    if (it == pivots.end()) return {SolveStatus::Underdetermined, {}};
    const std::size_t row = static_cast<std::size_t>(it - pivots.begin());
    // The coordinate is pinned only if its row has no free-column entries.
    for (std::size_t c = 0; c < n; ++c) {
      if (c == coord || aug[row * w + c] == 0) continue;
      if (std::find(pivots.begin(), pivots.end(), c) == pivots.end())
        return {SolveStatus::Underdetermined, {}};
    }
    out.values.push_back(Element{aug[row * w + n], a.field()});
  }
  return out;
}

}  // namespace tim::gf
