#pragma once

#include <Eigen/Dense>
#include <compare>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hhdmft {

using cplx = std::complex<double>;

enum class PauliOp : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Tensor product of single-qubit Paulis. Qubit 0 is the leftmost factor
/// and the most significant bit of a basis index.
class PauliString {
 public:
  static constexpr std::size_t kMaxQubits = 64;

  PauliString() = default;
  explicit PauliString(std::size_t n);

  static PauliString parse(std::string_view label);
  static PauliString single(std::size_t n, std::size_t qubit, PauliOp op);

  std::size_t size() const noexcept { return ops_.size(); }
  PauliOp op(std::size_t qubit) const { return ops_.at(qubit); }
  void set(std::size_t qubit, PauliOp op) { ops_.at(qubit) = op; }

  bool is_identity() const noexcept;
  std::size_t y_count() const noexcept;
  /// Positions carrying X or Y, as basis-index bits.
  std::uint64_t x_mask() const noexcept;
  /// Positions carrying Y or Z, as basis-index bits.
  std::uint64_t z_mask() const noexcept;

  std::string label() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString& a, const PauliString& b) { return a.ops_ <=> b.ops_; }

 private:
  std::vector<PauliOp> ops_;
};

/// i^k with k in {0,1,2,3}.
struct Phase {
  int k = 0;
  cplx value() const noexcept;
  friend bool operator==(const Phase&, const Phase&) = default;
};

struct PauliProduct {
  Phase phase;
  PauliString product;
};

PauliProduct multiply(const PauliString& a, const PauliString& b);

struct PauliTerm {
  cplx coefficient;
  PauliString string;
};

class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(std::size_t n) : n_(n) {}

  std::size_t num_qubits() const noexcept { return n_; }
  const std::vector<PauliTerm>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  void add(cplx coefficient, const PauliString& s);
  void add(cplx coefficient, std::string_view label);

  PauliSum& operator+=(const PauliSum& other);
  PauliSum scaled(cplx factor) const;

  /// True when every coefficient is real within tol. Pauli strings are
  /// Hermitian, so this is Hermiticity of the simplified operator.
  bool is_hermitian(double tol = 1e-12) const;

  /// One "coeff * STRING" line per term.
  std::string render() const;

 private:
  std::size_t n_ = 0;
  std::vector<PauliTerm> terms_;
};

PauliSum concatenate(const PauliSum& a, const PauliSum& b);
PauliSum simplify(const PauliSum& s, double tol = 1e-12);
PauliSum sum_product(const PauliSum& a, const PauliSum& b);

inline constexpr std::size_t kDefaultMatrixCap = 12;

Eigen::MatrixXcd to_matrix(const PauliString& p, std::size_t cap = kDefaultMatrixCap);
Eigen::MatrixXcd to_matrix(const PauliSum& s, std::size_t cap = kDefaultMatrixCap);

/// P|psi> without forming a matrix.
Eigen::VectorXcd apply_pauli(const PauliString& p, const Eigen::VectorXcd& psi);
/// Sum_k c_k P_k |psi>.
Eigen::VectorXcd apply_sum(const PauliSum& s, const Eigen::VectorXcd& psi);

}  // namespace hhdmft
