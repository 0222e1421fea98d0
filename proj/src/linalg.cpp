#include "nanoloc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "nanoloc/errors.hpp"

namespace nanoloc {

namespace {

using cd = std::complex<double>;

double off_diagonal_norm(const Eigen::MatrixXcd& a) {
  double sum = 0.0;
  for (Eigen::Index q = 0; q < a.cols(); ++q)
    for (Eigen::Index p = 0; p < a.rows(); ++p)
      if (p != q) sum += std::norm(a(p, q));
  return std::sqrt(sum);
}

// Zeroes a(p, q) with U = diag-phase * real Givens, A <- U^H A U, V <- V U.
void rotate(Eigen::MatrixXcd& a, Eigen::MatrixXcd& v, Eigen::Index p, Eigen::Index q) {
  const cd apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const cd phase = apq / mag;  // e^{i phi}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * mag);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  // U restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
  const cd upp = c;
  const cd upq = s;
  const cd uqp = -s * std::conj(phase);
  const cd uqq = c * std::conj(phase);

  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const cd akp = a(k, p);
    const cd akq = a(k, q);
    a(k, p) = akp * upp + akq * uqp;
    a(k, q) = akp * upq + akq * uqq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const cd apk = a(p, k);
    const cd aqk = a(q, k);
    a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
    a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const cd vkp = v(k, p);
    const cd vkq = v(k, q);
    v(k, p) = vkp * upp + vkq * uqp;
    v(k, q) = vkp * upq + vkq * uqq;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
}

void normalize_phase(Eigen::Ref<Eigen::VectorXcd> vec) {
  for (Eigen::Index i = 0; i < vec.size(); ++i) {
    const double m = std::abs(vec(i));
    if (m > 1e-6) {
      vec *= std::conj(vec(i)) / m;
      vec(i) = m;
      return;
    }
  }
}

bool lexicographic_less(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i).real() != y(i).real()) return x(i).real() < y(i).real();
    if (x(i).imag() != y(i).imag()) return x(i).imag() < y(i).imag();
  }
  return false;
}

}  // namespace

EigPair hermitian_eig(const Eigen::MatrixXcd& r, JacobiPolicy policy) {
  if (r.rows() != r.cols() || r.rows() == 0) throw ContractError("eigendecomposition needs a square matrix");
  const Eigen::Index n = r.rows();
  if (!r.allFinite()) throw ContractError("matrix has non-finite entries");

  const double scale = r.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    return {Eigen::VectorXd::Zero(n), Eigen::MatrixXcd::Identity(n, n)};
  }
  Eigen::MatrixXcd a = r / scale;
  const double norm = a.norm();
  if ((a - a.adjoint()).norm() > 1e-8 * norm) throw ContractError("matrix is not Hermitian");
  a = 0.5 * (a + a.adjoint()).eval();

  Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
  for (int sweep = 0; sweep < policy.max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= policy.tolerance * norm) break;
    for (Eigen::Index p = 0; p < n - 1; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
  }

  for (Eigen::Index i = 0; i < n; ++i) normalize_phase(v.col(i));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() > a(y, y).real(); });
  // Reorder runs of (numerically) equal eigenvalues by their vectors.
  const double tie = 1e-12 * norm;
  for (std::size_t begin = 0; begin < order.size();) {
    std::size_t end = begin + 1;
    while (end < order.size() &&
           a(order[begin], order[begin]).real() - a(order[end], order[end]).real() <= tie)
      ++end;
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end),
              [&](Eigen::Index x, Eigen::Index y) {
                return lexicographic_less(v.col(x), v.col(y));
              });
    begin = end;
  }

  EigPair out{Eigen::VectorXd(n), Eigen::MatrixXcd(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    out.values(i) = a(src, src).real() * scale;
    out.vectors.col(i) = v.col(src);
  }
  return out;
}

}  // namespace nanoloc
