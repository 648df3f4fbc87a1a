#include "atomfringe/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "atomfringe/errors.hpp"

namespace atomfringe {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_two_pi(double x) {
  double y = std::fmod(x, 2.0 * kPi);
  if (y < 0.0) y += 2.0 * kPi;
  if (y >= 2.0 * kPi) y = 0.0;
  return y;
}

double wrap_pi(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

TwoQubitBlochState::TwoQubitBlochState(double s, double theta, double phi) {
  if (!std::isfinite(s) || !std::isfinite(theta) || !std::isfinite(phi))
    throw InvalidState("bloch state: non-finite parameter");
  if (s < 0.0 || s > 1.0) throw InvalidState("bloch state: s=" + fmt(s) + " outside [0,1]");
  if (theta < 0.0 || theta > kPi)
    throw InvalidState("bloch state: theta=" + fmt(theta) + " outside [0,pi]");
  s_ = s;
  theta_ = theta;
  phi_ = wrap_two_pi(phi);
}

TwoQubitBlochState TwoQubitBlochState::from_vector(double sx, double sy, double sz) {
  double s = std::sqrt(sx * sx + sy * sy + sz * sz);
  if (s > 1.0 && s < 1.0 + 1e-12) s = 1.0;
  if (s == 0.0) return TwoQubitBlochState(0.0, 0.0, 0.0);
  double theta = std::atan2(std::hypot(sx, sy), sz);
  double phi = (sx == 0.0 && sy == 0.0) ? 0.0 : std::atan2(sy, sx);
  return TwoQubitBlochState(s, theta, phi);
}

double TwoQubitBlochState::sx() const noexcept { return s_ * std::sin(theta_) * std::cos(phi_); }
double TwoQubitBlochState::sy() const noexcept { return s_ * std::sin(theta_) * std::sin(phi_); }
double TwoQubitBlochState::sz() const noexcept { return s_ * std::cos(theta_); }

Eigen::Vector3d TwoQubitBlochState::bloch_vector() const { return {sx(), sy(), sz()}; }

cdouble TwoQubitBlochState::rho01() const noexcept { return {0.5 * sx(), -0.5 * sy()}; }

Eigen::Matrix2cd TwoQubitBlochState::matrix() const {
  Eigen::Matrix2cd m;
  m(0, 0) = 0.5 * (1.0 + sz());
  m(1, 1) = 0.5 * (1.0 - sz());
  m(0, 1) = rho01();
  m(1, 0) = std::conj(rho01());
  return m;
}

WLikeState::WLikeState(double c1, double c2, double c3, double phi2, double phi3) {
  for (double c : {c1, c2, c3})
    if (!std::isfinite(c)) throw InvalidState("wlike state: non-finite amplitude");
  if (!std::isfinite(phi2) || !std::isfinite(phi3))
    throw InvalidState("wlike state: non-finite phase");
  if (c3 <= 0.0)
    throw InvalidState("wlike state: amplitudes must be strictly positive (c3=" + fmt(c3) + ")");
  if (c1 < c2 || c2 < c3)
    throw InvalidState("wlike state: amplitudes must satisfy c1 >= c2 >= c3");
  double n = std::sqrt(c1 * c1 + c2 * c2 + c3 * c3);
  c_ = {c1 / n, c2 / n, c3 / n};
  phi2_ = wrap_pi(phi2);
  phi3_ = wrap_pi(phi3);
}

std::array<cdouble, 3> WLikeState::amplitudes() const {
  return {cdouble(c_[0], 0.0), std::polar(c_[1], phi2_), std::polar(c_[2], phi3_)};
}

Canonicalized canonicalize(std::span<const cdouble, 3> amplitudes) {
  double norm2 = 0.0;
  for (const auto& a : amplitudes) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw InvalidState("canonicalize: non-finite amplitude");
    norm2 += std::norm(a);
  }
  if (norm2 == 0.0) throw InvalidState("canonicalize: all amplitudes are zero");

  std::array<int, 3> perm{0, 1, 2};
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    return std::abs(amplitudes[a]) > std::abs(amplitudes[b]);
  });

  const double norm = std::sqrt(norm2);
  std::array<double, 3> mod{};
  std::array<double, 3> ph{};
  for (int k = 0; k < 3; ++k) {
    mod[k] = std::abs(amplitudes[perm[k]]) / norm;
    ph[k] = mod[k] > 0.0 ? std::arg(amplitudes[perm[k]]) : 0.0;
  }
  if (mod[2] == 0.0)
    throw InvalidState("canonicalize: a zero amplitude reduces the state to the two-atom case");

  WLikeState st(mod[0], mod[1], mod[2], ph[1] - ph[0], ph[2] - ph[0]);
  return {st, perm, ph, norm};
}

DensityMatrix::DensityMatrix(const Eigen::MatrixXcd& m, double tolerance) {
  const auto n = m.rows();
  if (m.cols() != n || (n != 2 && n != 4 && n != 8))
    throw InvalidState("density matrix: dimension must be 2, 4 or 8");
  if (!m.allFinite()) throw InvalidState("density matrix: non-finite entry");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tolerance)
    throw InvalidState("density matrix: not Hermitian");
  if (std::abs(m.trace() - cdouble(1.0)) > tolerance)
    throw InvalidState("density matrix: trace differs from 1");

  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -tolerance)
    throw InvalidState("density matrix: eigenvalue " + fmt(ev.minCoeff()) + " below tolerance");
  if (ev.minCoeff() < 0.0) {
    ev = ev.cwiseMax(0.0);
    h = es.eigenvectors() * ev.cast<cdouble>().asDiagonal() * es.eigenvectors().adjoint();
  }
  m_ = h;
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
  double n = psi.norm();
  if (n == 0.0) throw InvalidState("density matrix: zero state vector");
  Eigen::VectorXcd v = psi / n;
  return DensityMatrix(v * v.adjoint());
}

int DensityMatrix::qubits() const noexcept {
  switch (m_.rows()) {
    case 2: return 1;
    case 4: return 2;
    default: return 3;
  }
}

bool DensityMatrix::is_pure(double tol) const {
  return std::abs((m_ * m_).trace().real() - 1.0) < tol;
}

DensityMatrix embed(const TwoQubitBlochState& state) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  const Eigen::Matrix2cd r = state.matrix();
  const int idx[2] = {2, 1};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(idx[i], idx[j]) = r(i, j);
  return DensityMatrix(m);
}

Eigen::VectorXcd state_vector(const WLikeState& state) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
  const auto a = state.amplitudes();
  v(4) = a[0];
  v(2) = a[1];
  v(1) = a[2];
  return v;
}

DensityMatrix embed(const WLikeState& state) { return DensityMatrix::pure(state_vector(state)); }

nlohmann::json to_json(const TwoQubitBlochState& state) {
  return {{"type", "bloch"}, {"s", state.s()}, {"theta", state.theta()}, {"phi", state.phi()}};
}

nlohmann::json to_json(const WLikeState& state) {
  return {{"type", "wlike"},
          {"c", {state.c(0), state.c(1), state.c(2)}},
          {"phases", {state.phi2(), state.phi3()}}};
}

nlohmann::json to_json(const AtomicState& state) {
  return std::visit([](const auto& s) { return to_json(s); }, state);
}

AtomicState state_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || !j.contains("type")) throw InvalidState("state record needs a \"type\"");
    const auto type = j.at("type").get<std::string>();
    if (type == "bloch") {
      return TwoQubitBlochState(j.at("s").get<double>(), j.at("theta").get<double>(),
                                j.value("phi", 0.0));
    }
    if (type == "wlike") {
      const auto& c = j.at("c");
      if (!c.is_array() || c.size() != 3) throw InvalidState("wlike record needs 3 amplitudes");
      std::array<double, 3> ph{0.0, 0.0, 0.0};
      if (j.contains("phases")) {
        const auto& p = j.at("phases");
        if (!p.is_array() || (p.size() != 2 && p.size() != 3))
          throw InvalidState("wlike record: \"phases\" must hold 2 (phi2, phi3) or 3 entries");
        if (p.size() == 2) {
          ph[1] = p[0].get<double>();
          ph[2] = p[1].get<double>();
        } else {
          for (int k = 0; k < 3; ++k) ph[k] = p[k].get<double>();
        }
      }
      std::array<cdouble, 3> amp;
      for (int k = 0; k < 3; ++k) {
        double ck = c[k].get<double>();
        if (ck < 0.0) throw InvalidState("wlike record: negative amplitude");
        amp[k] = std::polar(ck, ph[k]);
      }
      return canonicalize(amp).state;
    }
    throw InvalidState("unknown state type \"" + type + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidState(std::string("malformed state record: ") + e.what());
  }
}

}  // namespace atomfringe
