#include "atomfringe/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "atomfringe/errors.hpp"

namespace atomfringe {

namespace {

double sq(double x) { return x * x; }

void check_cut(int j) {
  if (j < 0 || j > 2) throw DomainError("atom index must be 0, 1 or 2");
}

int qubit_count(const Eigen::MatrixXcd& m) {
  switch (m.rows()) {
    case 2: return 1;
    case 4: return 2;
    case 8: return 3;
    default: throw DomainError("operator dimension must be 2, 4 or 8");
  }
}

double trace_norm_hermitian(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.cast<cdouble>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double concurrence_bloch(const TwoQubitBlochState& state) {
  return state.s() * std::sin(state.theta());
}

double negativity_cut(const WLikeState& state, int j) {
  check_cut(j);
  const double c = state.c(static_cast<std::size_t>(j));
  return 2.0 * c * std::sqrt(std::max(0.0, 1.0 - c * c));
}

double negativity_max(const WLikeState& state) {
  return std::max({negativity_cut(state, 0), negativity_cut(state, 1), negativity_cut(state, 2)});
}

double mixedness(const WLikeState& state) {
  const auto& c = state.c();
  const double a = c[0] * c[0], b = c[1] * c[1], d = c[2] * c[2];
  return 8.0 / 3.0 * (a * b + b * d + d * a);
}

double geometric_measure_wlike(const WLikeState& state) {
  const auto& c = state.c();
  if (sq(c[0]) > sq(c[1]) + sq(c[2])) return 1.0 - sq(c[0]);
  const double c0 = 0.5 * (c[0] + c[1] + c[2]);
  const double heron = std::max(0.0, c0 * (c0 - c[0]) * (c0 - c[1]) * (c0 - c[2]));
  const double r = c[0] * c[1] * c[2] / (4.0 * std::sqrt(heron));
  return 1.0 - 4.0 * r * r;
}

double three_pi(const WLikeState& state) {
  const auto& c = state.c();
  const double p = 4.0 * sq(c[0] * c[1] * c[2]);
  double sum = 0.0;
  for (double cj : c) {
    const double c2 = cj * cj;
    const double x = p / (c2 * c2 * c2);
    // sqrt(1+x)-1 without cancellation
    sum += c2 * c2 * x / (std::sqrt(1.0 + x) + 1.0);
  }
  return 4.0 / 3.0 * sum;
}

double concurrence_wootters(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw DomainError("Wootters concurrence needs a two-qubit state");
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Eigen::MatrixXcd s = psd_sqrt(rho.matrix());
  const Eigen::MatrixXcd x = s * yy * s.conjugate();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(x);
  const Eigen::VectorXd sv = svd.singularValues();
  return std::max(0.0, sv(0) - sv(1) - sv(2) - sv(3));
}

Eigen::MatrixXcd partial_transpose(const Eigen::MatrixXcd& m, int qubit) {
  const int n = qubit_count(m);
  if (qubit < 0 || qubit >= n) throw DomainError("qubit index out of range");
  const int bit = 1 << (n - 1 - qubit);
  const auto dim = m.rows();
  Eigen::MatrixXcd out(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      const Eigen::Index i2 = (i & ~bit) | (j & bit);
      const Eigen::Index j2 = (j & ~bit) | (i & bit);
      out(i2, j2) = m(i, j);
    }
  return out;
}

Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& m, int qubit) {
  const int n = qubit_count(m);
  if (n < 2) throw DomainError("cannot trace out the only qubit");
  if (qubit < 0 || qubit >= n) throw DomainError("qubit index out of range");
  const int bit = 1 << (n - 1 - qubit);
  const Eigen::Index low = bit - 1;
  const Eigen::Index half = m.rows() / 2;
  auto expand = [&](Eigen::Index k, Eigen::Index b) {
    return ((k & ~low) << 1) | (b ? bit : 0) | (k & low);
  };
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(half, half);
  for (Eigen::Index i = 0; i < half; ++i)
    for (Eigen::Index j = 0; j < half; ++j)
      for (Eigen::Index b = 0; b < 2; ++b) out(i, j) += m(expand(i, b), expand(j, b));
  return out;
}

Eigen::Matrix2cd reduced_state(const DensityMatrix& rho, int qubit) {
  const int n = rho.qubits();
  if (qubit < 0 || qubit >= n) throw DomainError("qubit index out of range");
  Eigen::MatrixXcd m = rho.matrix();
  for (int q = n - 1; q >= 0; --q)
    if (q != qubit) m = partial_trace(m, q);
  return m;
}

double negativity_partial_transpose(const DensityMatrix& rho, int qubit) {
  return trace_norm_hermitian(partial_transpose(rho.matrix(), qubit)) - 1.0;
}

double mixedness_from_reductions(const DensityMatrix& rho) {
  const int n = rho.qubits();
  double sum = 0.0;
  for (int q = 0; q < n; ++q) {
    const Eigen::Matrix2cd r = reduced_state(rho, q);
    sum += 2.0 * (1.0 - (r * r).trace().real());
  }
  return sum / n;
}

double three_pi_from_negativities(const DensityMatrix& rho) {
  if (rho.dim() != 8) throw DomainError("three-pi needs a three-qubit state");
  double sum = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double nj = negativity_partial_transpose(rho, j);
    const Eigen::MatrixXcd pair = partial_trace(rho.matrix(), j);
    const double npair = trace_norm_hermitian(partial_transpose(pair, 0)) - 1.0;
    sum += nj * nj - 2.0 * npair * npair;
  }
  return sum / 3.0;
}

double geometric_measure_numeric(const DensityMatrix& psi, const GeometricOptions& options) {
  if (psi.dim() != 8) throw DomainError("geometric measure needs a three-qubit state");
  if (!psi.is_pure(1e-9)) throw DomainError("geometric measure needs a pure state");
  if (options.restarts < 2) throw DomainError("geometric measure needs at least 2 restarts");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(psi.matrix());
  const Eigen::VectorXcd v = es.eigenvectors().col(7);

  // Alternating maximization: with two factors fixed the best third is the normalized contraction.
  auto contract = [&](const std::array<Eigen::Vector2cd, 3>& q, int k) {
    Eigen::Vector2cd w = Eigen::Vector2cd::Zero();
    for (int i = 0; i < 8; ++i) {
      const std::array<int, 3> b{(i >> 2) & 1, (i >> 1) & 1, i & 1};
      cdouble c = v(i);
      for (int j = 0; j < 3; ++j)
        if (j != k) c *= std::conj(q[static_cast<std::size_t>(j)](b[static_cast<std::size_t>(j)]));
      w(b[static_cast<std::size_t>(k)]) += c;
    }
    return w;
  };

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(options.restarts));
  double best = 0.0;
  for (int r = 0; r < options.restarts; ++r) {
    std::array<Eigen::Vector2cd, 3> q;
    for (auto& qk : q) {
      qk << cdouble(gauss(rng), gauss(rng)), cdouble(gauss(rng), gauss(rng));
      qk.normalize();
    }
    double prev = -1.0, ov = 0.0;
    for (int it = 0; it < 20000; ++it) {
      for (int k = 0; k < 3; ++k) {
        const Eigen::Vector2cd w = contract(q, k);
        const double n = w.norm();
        if (n == 0.0) break;
        q[static_cast<std::size_t>(k)] = w / n;
        ov = n * n;
      }
      if (std::abs(ov - prev) <= 1e-16) break;
      prev = ov;
    }
    values.push_back(-ov);
    best = std::min(best, -ov);
  }
  const auto hits = std::count_if(values.begin(), values.end(),
                                  [&](double f) { return f - best <= options.agreement; });
  if (hits < 2)
    throw ConvergenceError("geometric measure: restarts did not agree on the optimum", 1.0 + best);
  return std::max(0.0, 1.0 + best);
}

}  // namespace atomfringe
