#include "hhdmft/model.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>

#include "hhdmft/errors.hpp"

namespace hhdmft {

void ModelParams::validate() const {
  for (const auto& [name, value] : {std::pair{"U", U}, std::pair{"V", V}, std::pair{"mu", mu},
                                    std::pair{"omega0", omega0}, std::pair{"lambda", lambda}}) {
    if (!std::isfinite(value)) throw InvalidArgument(fmt::format("{} must be finite", name));
  }
  if (!(omega0 > 0.0)) throw InvalidArgument("omega0 must be positive");
  if (n_boson_levels < 2) throw InvalidArgument("n_boson_levels must be at least 2");
}

std::string to_string(MuConvention c) {
  switch (c) {
    case MuConvention::Explicit:
      return "explicit";
    case MuConvention::HalfFilling:
      return "half-filling";
    case MuConvention::HalfU:
      return "U/2";
  }
  return "?";
}

MuConvention mu_convention_from_string(const std::string& s) {
  if (s == "half-filling") return MuConvention::HalfFilling;
  if (s == "U/2") return MuConvention::HalfU;
  if (s == "explicit") return MuConvention::Explicit;
  throw InvalidArgument(fmt::format("unknown mu convention '{}'", s));
}

PauliSum jw_annihilation(std::size_t i, std::size_t n_modes) {
  if (i >= n_modes) throw InvalidArgument(fmt::format("mode {} outside {} modes", i, n_modes));
  PauliString px(n_modes);
  for (std::size_t k = 0; k < i; ++k) px.set(k, PauliOp::Z);
  PauliString py = px;
  px.set(i, PauliOp::X);
  py.set(i, PauliOp::Y);
  PauliSum s(n_modes);
  s.add(0.5, px);
  s.add(cplx(0.0, 0.5), py);
  return s;
}

PauliSum jw_creation(std::size_t i, std::size_t n_modes) {
  PauliSum c = jw_annihilation(i, n_modes);
  PauliSum out(n_modes);
  for (const auto& t : c.terms()) out.add(std::conj(t.coefficient), t.string);
  return out;
}

namespace {

void require_one_boson_qubit(const ModelParams& p) {
  p.validate();
  if (p.n_boson_levels != 2) {
    throw UnsupportedConfiguration(
        fmt::format("Pauli form needs n_boson_levels = 2, got {}", p.n_boson_levels));
  }
}

void add_nonzero(PauliSum& s, double c, std::string_view label) {
  if (c != 0.0) s.add(c, label);
}

}  // namespace

PauliSum build_pauli_hamiltonian(const ModelParams& p) {
  require_one_boson_qubit(p);
  PauliSum h(kQubits);
  add_nonzero(h, p.U / 4 - p.mu + p.omega0 / 2, "IIIII");
  add_nonzero(h, p.U / 4, "ZZIII");
  for (const char* s : {"XZXII", "YZYII", "IXZXI", "IYZYI"}) add_nonzero(h, -p.V / 2, s);
  add_nonzero(h, -p.omega0 / 2, "IIIIZ");
  add_nonzero(h, p.lambda, "IIIIX");
  return h;
}

PauliSum build_full_pauli_hamiltonian(const ModelParams& p) {
  PauliSum h = build_pauli_hamiltonian(p);
  add_nonzero(h, -p.U / 4 + p.mu / 2, "ZIIII");
  add_nonzero(h, -p.U / 4 + p.mu / 2, "IZIII");
  add_nonzero(h, -p.lambda / 2, "ZIIIX");
  add_nonzero(h, -p.lambda / 2, "IZIIX");
  return h;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

namespace {

Eigen::MatrixXcd fermion_annihilation(std::size_t i) { return to_matrix(jw_annihilation(i, kFermionModes)); }

Eigen::MatrixXcd boson_annihilation(int nb) {
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(nb, nb);
  for (int k = 1; k < nb; ++k) b(k - 1, k) = std::sqrt(static_cast<double>(k));
  return b;
}

}  // namespace

Eigen::MatrixXcd build_full_hamiltonian(const ModelParams& p) {
  p.validate();
  const int nb = p.n_boson_levels;
  std::array<Eigen::MatrixXcd, kFermionModes> c;
  for (std::size_t i = 0; i < kFermionModes; ++i) c[i] = fermion_annihilation(i);
  const Eigen::MatrixXcd n_up = c[0].adjoint() * c[0];
  const Eigen::MatrixXcd n_dn = c[1].adjoint() * c[1];
  const Eigen::MatrixXcd n_imp = n_up + n_dn;

  // Bath orbital sign chosen so that the hopping reads -V/2 (XZX + YZY) in
  // the Pauli form; impurity observables do not depend on this gauge.
  Eigen::MatrixXcd hf = p.U * n_up * n_dn - p.mu * n_imp;
  for (std::size_t s = 0; s < 2; ++s) {
    hf -= p.V * (c[s].adjoint() * c[s + 2] + c[s + 2].adjoint() * c[s]);
  }
  const Eigen::MatrixXcd b = boson_annihilation(nb);
  const Eigen::MatrixXcd idf = Eigen::MatrixXcd::Identity(16, 16);
  const Eigen::MatrixXcd idb = Eigen::MatrixXcd::Identity(nb, nb);
  return kron(hf, idb) + p.omega0 * kron(idf, b.adjoint() * b) + p.lambda * kron(n_imp, b + b.adjoint());
}

Eigen::MatrixXcd impurity_annihilation_matrix(int spin, int n_boson_levels) {
  if (spin != 0 && spin != 1) throw InvalidArgument("spin index must be 0 or 1");
  return kron(fermion_annihilation(static_cast<std::size_t>(spin)),
              Eigen::MatrixXcd::Identity(n_boson_levels, n_boson_levels));
}

Eigen::MatrixXcd impurity_occupation_matrix(int n_boson_levels) {
  const Eigen::MatrixXcd c0 = impurity_annihilation_matrix(0, n_boson_levels);
  const Eigen::MatrixXcd c1 = impurity_annihilation_matrix(1, n_boson_levels);
  return c0.adjoint() * c0 + c1.adjoint() * c1;
}

}  // namespace hhdmft
