#include "srcf/transfer.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "srcf/error.hpp"

namespace srcf {

namespace {

struct Branches {
  Sign sign;
  std::vector<Digit> digits;
};

Branches autonomous_branches(const NonAutonomousIFS& system) {
  if (!system.autonomous()) {
    throw Error(ErrorCode::kNonAutonomousInput, "NonAutonomousInput: transfer operator needs one sign and one alphabet");
  }
  return {system.sign(1), system.alphabet(1)};
}

// Barycentric weights for Chebyshev-Lobatto nodes: (-1)^j, halved at the ends.
Eigen::MatrixXd collocation(const Branches& br, double s, std::size_t degree) {
  const std::size_t m = degree + 1;
  std::vector<double> x(m);
  std::vector<double> w(m);
  for (std::size_t j = 0; j < m; ++j) {
    x[j] = (1 - std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(degree))) / 2;
    w[j] = (j % 2 ? -1.0 : 1.0) * ((j == 0 || j == degree) ? 0.5 : 1.0);
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  const double sg = br.sign == Sign::kPlus ? 1.0 : -1.0;
  std::vector<double> basis(m);
  for (std::size_t row = 0; row < m; ++row) {
    for (Digit digit : br.digits) {
      const double den = static_cast<double>(digit) + sg * x[row];
      const double y = 1 / den;
      const double weight = std::pow(den, -2 * s);
      // Lagrange basis values at y
      std::size_t hit = m;
      double total = 0;
      for (std::size_t k = 0; k < m; ++k) {
        const double diff = y - x[k];
        if (diff == 0) {
          hit = k;
          break;
        }
        basis[k] = w[k] / diff;
        total += basis[k];
      }
      for (std::size_t k = 0; k < m; ++k) {
        const double l = hit < m ? (k == hit ? 1.0 : 0.0) : basis[k] / total;
        a(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k)) += weight * l;
      }
    }
  }
  return a;
}

long double leading_eigenvalue(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::kInvalidArgument, "eigenvalue solver failed");
  double best = -std::numeric_limits<double>::infinity();
  const auto& ev = solver.eigenvalues();
  double mag = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) mag = std::max(mag, std::abs(ev[i]));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i].imag()) <= 1e-9 * std::max(1.0, mag)) best = std::max(best, ev[i].real());
  }
  return best;
}

}  // namespace

long double transfer_eigenvalue(const NonAutonomousIFS& system, long double s, std::size_t degree) {
  if (degree < 2) throw Error(ErrorCode::kInvalidArgument, "collocation degree must be at least 2");
  const Branches br = autonomous_branches(system);
  return leading_eigenvalue(collocation(br, static_cast<double>(s), degree));
}

TransferEstimate transfer_refine(const NonAutonomousIFS& system, long double s, std::size_t min_degree,
                                 std::size_t max_degree, long double shift_tolerance) {
  const Branches br = autonomous_branches(system);
  TransferEstimate e;
  e.s = s;
  std::size_t degree = std::max<std::size_t>(2, min_degree);
  long double prev = leading_eigenvalue(collocation(br, static_cast<double>(s), degree));
  e.lambda = prev;
  e.degree = degree;
  e.shift = std::numeric_limits<long double>::infinity();
  while (degree * 2 <= max_degree) {
    degree *= 2;
    const long double cur = leading_eigenvalue(collocation(br, static_cast<double>(s), degree));
    e.shift = std::abs(cur - prev);
    e.lambda = cur;
    e.degree = degree;
    if (e.shift < shift_tolerance) {
      e.converged = true;
      break;
    }
    prev = cur;
  }
  return e;
}

nlohmann::json TransferRoot::to_json() const {
  return {{"s", format_real(s, 15)}, {"bracket", format_bracket(lo, hi, 15)}, {"degree", degree}};
}

TransferRoot transfer_dimension(const NonAutonomousIFS& system, long double tolerance, std::size_t min_degree,
                                std::size_t fixed_degree) {
  const Branches br = autonomous_branches(system);
  TransferRoot r;
  std::size_t degree = fixed_degree;
  const auto log_lambda = [&](long double s) {
    if (fixed_degree) return std::log(leading_eigenvalue(collocation(br, static_cast<double>(s), fixed_degree)));
    const TransferEstimate e = transfer_refine(system, s, min_degree);
    degree = std::max(degree, e.degree);
    return std::log(e.lambda);
  };
  r.lo = 0;
  r.hi = 1;
  if (br.digits.size() == 1 && log_lambda(0) <= 0) r.hi = 0;
  while (r.hi - r.lo > tolerance) {
    const long double mid = (r.lo + r.hi) / 2;
    if (log_lambda(mid) > 0) {
      r.lo = mid;
    } else {
      r.hi = mid;
    }
  }
  r.s = (r.lo + r.hi) / 2;
  r.degree = degree;
  return r;
}

}  // namespace srcf
