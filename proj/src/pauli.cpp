#include "hhdmft/pauli.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <map>

#include "hhdmft/errors.hpp"

namespace hhdmft {

namespace {

char op_char(PauliOp op) {
  switch (op) {
    case PauliOp::I:
      return 'I';
    case PauliOp::X:
      return 'X';
    case PauliOp::Y:
      return 'Y';
    case PauliOp::Z:
      return 'Z';
  }
  return '?';
}

// Single-qubit product table: a*b = i^phase * result.
struct OpProduct {
  int phase;
  PauliOp result;
};

OpProduct op_multiply(PauliOp a, PauliOp b) {
  if (a == PauliOp::I) return {0, b};
  if (b == PauliOp::I) return {0, a};
  if (a == b) return {0, PauliOp::I};
  const int ia = static_cast<int>(a);
  const int ib = static_cast<int>(b);
  const int third = 6 - ia - ib;
  // Cyclic X->Y->Z->X gives +i, anticyclic gives -i.
  const bool cyclic = (ib - ia + 3) % 3 == 1;
  return {cyclic ? 1 : 3, static_cast<PauliOp>(third)};
}

void check_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    throw InvalidArgument(fmt::format("register size mismatch: {} vs {}", a, b));
  }
}

}  // namespace

PauliString::PauliString(std::size_t n) : ops_(n, PauliOp::I) {
  if (n > kMaxQubits) throw CapacityError("Pauli string longer than 64 qubits");
}

PauliString PauliString::parse(std::string_view label) {
  PauliString p(label.size());
  for (std::size_t q = 0; q < label.size(); ++q) {
    switch (label[q]) {
      case 'I':
        p.ops_[q] = PauliOp::I;
        break;
      case 'X':
        p.ops_[q] = PauliOp::X;
        break;
      case 'Y':
        p.ops_[q] = PauliOp::Y;
        break;
      case 'Z':
        p.ops_[q] = PauliOp::Z;
        break;
      default:
        throw InvalidArgument(fmt::format("invalid Pauli label '{}'", label));
    }
  }
  return p;
}

PauliString PauliString::single(std::size_t n, std::size_t qubit, PauliOp op) {
  if (qubit >= n) throw InvalidArgument("qubit index out of range");
  PauliString p(n);
  p.ops_[qubit] = op;
  return p;
}

bool PauliString::is_identity() const noexcept {
  return std::all_of(ops_.begin(), ops_.end(), [](PauliOp o) { return o == PauliOp::I; });
}

std::size_t PauliString::y_count() const noexcept {
  return static_cast<std::size_t>(std::count(ops_.begin(), ops_.end(), PauliOp::Y));
}

std::uint64_t PauliString::x_mask() const noexcept {
  std::uint64_t m = 0;
  const std::size_t n = ops_.size();
  for (std::size_t q = 0; q < n; ++q) {
    if (ops_[q] == PauliOp::X || ops_[q] == PauliOp::Y) m |= std::uint64_t{1} << (n - 1 - q);
  }
  return m;
}

std::uint64_t PauliString::z_mask() const noexcept {
  std::uint64_t m = 0;
  const std::size_t n = ops_.size();
  for (std::size_t q = 0; q < n; ++q) {
    if (ops_[q] == PauliOp::Z || ops_[q] == PauliOp::Y) m |= std::uint64_t{1} << (n - 1 - q);
  }
  return m;
}

std::string PauliString::label() const {
  std::string s;
  s.reserve(ops_.size());
  for (PauliOp o : ops_) s.push_back(op_char(o));
  return s;
}

cplx Phase::value() const noexcept {
  switch (((k % 4) + 4) % 4) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {0.0, 1.0};
    case 2:
      return {-1.0, 0.0};
    default:
      return {0.0, -1.0};
  }
}

PauliProduct multiply(const PauliString& a, const PauliString& b) {
  check_same_size(a.size(), b.size());
  PauliString out(a.size());
  int k = 0;
  for (std::size_t q = 0; q < a.size(); ++q) {
    const OpProduct r = op_multiply(a.op(q), b.op(q));
    k += r.phase;
    out.set(q, r.result);
  }
  return {Phase{k % 4}, out};
}

void PauliSum::add(cplx coefficient, const PauliString& s) {
  if (terms_.empty() && n_ == 0) n_ = s.size();
  check_same_size(n_, s.size());
  terms_.push_back({coefficient, s});
}

void PauliSum::add(cplx coefficient, std::string_view label) { add(coefficient, PauliString::parse(label)); }

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (other.terms_.empty()) return *this;
  if (terms_.empty() && n_ == 0) n_ = other.n_;
  check_same_size(n_, other.n_);
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

PauliSum PauliSum::scaled(cplx factor) const {
  PauliSum out = *this;
  for (auto& t : out.terms_) t.coefficient *= factor;
  return out;
}

bool PauliSum::is_hermitian(double tol) const {
  const PauliSum s = simplify(*this, 0.0);
  return std::all_of(s.terms().begin(), s.terms().end(),
                     [tol](const PauliTerm& t) { return std::abs(t.coefficient.imag()) <= tol; });
}

std::string PauliSum::render() const {
  std::string out;
  for (const auto& t : terms_) {
    if (t.coefficient.imag() == 0.0) {
      out += fmt::format("{} * {}\n", t.coefficient.real(), t.string.label());
    } else {
      out += fmt::format("({}{:+}j) * {}\n", t.coefficient.real(), t.coefficient.imag(), t.string.label());
    }
  }
  return out;
}

PauliSum concatenate(const PauliSum& a, const PauliSum& b) {
  PauliSum out = a;
  out += b;
  return out;
}

PauliSum simplify(const PauliSum& s, double tol) {
  if (tol < 0.0) throw InvalidArgument("simplify tolerance must be non-negative");
  std::map<PauliString, cplx> merged;
  for (const auto& t : s.terms()) merged[t.string] += t.coefficient;
  PauliSum out(s.num_qubits());
  for (const auto& [str, c] : merged) {
    if (std::abs(c) > tol) out.add(c, str);
  }
  return out;
}

PauliSum sum_product(const PauliSum& a, const PauliSum& b) {
  if (!a.empty() && !b.empty()) check_same_size(a.num_qubits(), b.num_qubits());
  std::map<PauliString, cplx> acc;
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      const PauliProduct p = multiply(ta.string, tb.string);
      acc[p.product] += p.phase.value() * ta.coefficient * tb.coefficient;
    }
  }
  PauliSum out(a.empty() ? b.num_qubits() : a.num_qubits());
  for (const auto& [str, c] : acc) out.add(c, str);
  return simplify(out);
}

Eigen::MatrixXcd to_matrix(const PauliString& p, std::size_t cap) {
  PauliSum s(p.size());
  s.add(1.0, p);
  return to_matrix(s, cap);
}

Eigen::MatrixXcd to_matrix(const PauliSum& s, std::size_t cap) {
  const std::size_t n = s.num_qubits();
  if (n > cap) {
    throw CapacityError(fmt::format("register of {} qubits exceeds matrix cap {}", n, cap));
  }
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : s.terms()) {
    const std::uint64_t xm = t.string.x_mask();
    const std::uint64_t zm = t.string.z_mask();
    const cplx base = t.coefficient * Phase{static_cast<int>(t.string.y_count() % 4)}.value();
    for (std::uint64_t b = 0; b < dim; ++b) {
      const double sign = (std::popcount(b & zm) & 1) ? -1.0 : 1.0;
      m(static_cast<Eigen::Index>(b ^ xm), static_cast<Eigen::Index>(b)) += sign * base;
    }
  }
  return m;
}

Eigen::VectorXcd apply_pauli(const PauliString& p, const Eigen::VectorXcd& psi) {
  const std::uint64_t dim = static_cast<std::uint64_t>(psi.size());
  if (p.size() >= 64 || (std::uint64_t{1} << p.size()) != dim) {
    throw InvalidArgument("Pauli string does not match state dimension");
  }
  const std::uint64_t xm = p.x_mask();
  const std::uint64_t zm = p.z_mask();
  const cplx base = Phase{static_cast<int>(p.y_count() % 4)}.value();
  Eigen::VectorXcd out(psi.size());
  for (std::uint64_t b = 0; b < dim; ++b) {
    const double sign = (std::popcount(b & zm) & 1) ? -1.0 : 1.0;
    out(static_cast<Eigen::Index>(b ^ xm)) = sign * base * psi(static_cast<Eigen::Index>(b));
  }
  return out;
}

Eigen::VectorXcd apply_sum(const PauliSum& s, const Eigen::VectorXcd& psi) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  for (const auto& t : s.terms()) out += t.coefficient * apply_pauli(t.string, psi);
  return out;
}

}  // namespace hhdmft
