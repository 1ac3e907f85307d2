#include "ssm/arith.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ssm/walk.hpp"

namespace ssm {
namespace {

bool fits_int64(long double v) {
  return std::abs(v) < 9.0e18L;
}

// Smallest convergent q <= cap reproducing x within tolerance, if any.
std::optional<Convergent> rational_match(double x, const ContinuedFraction& cf) {
  const double tol = kRationalMatchTolerance * std::max(1.0, std::abs(x));
  for (const auto& c : cf.convergents) {
    if (c.q > kRationalDenominatorCap) break;
    if (std::abs(x - c.value()) <= tol) return c;
  }
  return std::nullopt;
}

bool passes_denominator_cap(const ContinuedFraction& cf) {
  return !cf.convergents.empty() && cf.convergents.back().q > kRationalDenominatorCap;
}

}  // namespace

const char* to_string(GroupVerdict verdict) {
  switch (verdict) {
    case GroupVerdict::kLattice: return "lattice";
    case GroupVerdict::kNonLattice: return "non-lattice";
    case GroupVerdict::kUndetermined: return "undetermined";
  }
  return "undetermined";
}

ContinuedFraction continued_fraction(double x, int max_terms) {
  if (!(std::isfinite(x) && x > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "continued fraction needs a finite x > 0");
  }
  if (max_terms < 0 || max_terms > kMaxContinuedFractionTerms) {
    throw Error(ErrorCode::kInvalidArgument, "continued fraction depth must lie in [0, 40]");
  }
  ContinuedFraction cf;
  cf.value = x;
  long double y = x;
  long double a = std::floor(y);
  long double frac = y - a;
  cf.integer_part = static_cast<std::int64_t>(a);

  long double p_prev = 1.0L;
  long double q_prev = 0.0L;
  long double p = a;
  long double q = 1.0L;
  cf.convergents.push_back({static_cast<std::int64_t>(p), 1});

  for (int k = 0; k < max_terms; ++k) {
    if (frac < kRationalRemainder) {
      cf.terminated = true;
      break;
    }
    y = 1.0L / frac;
    a = std::floor(y);
    frac = y - a;
    const long double p_next = a * p + p_prev;
    const long double q_next = a * q + q_prev;
    if (!fits_int64(p_next) || !fits_int64(q_next)) break;
    cf.quotients.push_back(static_cast<std::int64_t>(a));
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    cf.convergents.push_back({static_cast<std::int64_t>(p), static_cast<std::int64_t>(q)});
  }
  return cf;
}

GroupClassification classify_group(const IfsSpec& spec, int depth) {
  const StepDistribution dist = step_distribution(spec);
  const auto atoms = dist.atoms();
  GroupClassification out;
  out.depth = depth;
  if (atoms.size() == 1) {
    out.verdict = GroupVerdict::kLattice;
    out.generator = atoms.front().step;
    return out;
  }

  bool all_rational = true;
  std::vector<Convergent> against_smallest(atoms.size(), Convergent{1, 1});
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      const double ratio = atoms[j].step / atoms[i].step;
      const ContinuedFraction cf = continued_fraction(ratio, depth);
      const auto match = rational_match(ratio, cf);
      if (match) {
        if (i == 0) against_smallest[j] = *match;
        continue;
      }
      all_rational = false;
      if (passes_denominator_cap(cf)) {
        out.verdict = GroupVerdict::kNonLattice;
        out.witness = std::minmax(atoms[i].source, atoms[j].source);
        return out;
      }
    }
  }
  if (!all_rational) return out;

  // x_j = x_0 p_j / q_j, so g = x_0 / lcm(q_j) divides every atom; then strip
  // any common factor of the integer multiples.
  std::int64_t lcm = 1;
  for (const auto& c : against_smallest) lcm = std::lcm(lcm, c.q);
  double generator = atoms.front().step / static_cast<double>(lcm);
  std::int64_t common = 0;
  for (const auto& a : atoms) common = std::gcd(common, std::llround(a.step / generator));
  generator *= static_cast<double>(common);
  for (const auto& a : atoms) {
    const double multiple = a.step / generator;
    if (std::abs(multiple - std::round(multiple)) > 1e-10) return out;
  }
  out.verdict = GroupVerdict::kLattice;
  out.generator = generator;
  return out;
}

DiophantineEstimate diophantine_exponent_estimate(double x, int depth) {
  const ContinuedFraction cf = continued_fraction(std::abs(x), depth);
  if (cf.terminated && cf.convergents.back().q <= kRationalDenominatorCap) {
    std::ostringstream os;
    os.precision(17);
    os << x << " is rational at working precision (" << cf.convergents.back().p << "/"
       << cf.convergents.back().q << ")";
    throw Error(ErrorCode::kRationalInput, os.str());
  }
  const long double target = std::abs(x);
  const long double floor = 1e-15L * std::max<long double>(1.0L, target);
  DiophantineEstimate out;
  for (const auto& c : cf.convergents) {
    if (c.q < 2) continue;
    const long double err =
        std::abs(target - static_cast<long double>(c.p) / static_cast<long double>(c.q));
    if (err <= floor) break;
    const double exponent = static_cast<double>(std::log(1.0L / err) / std::log(static_cast<long double>(c.q)));
    out.exponents.push_back(exponent);
    out.convergents.push_back(c);
  }
  if (out.exponents.empty()) {
    throw Error(ErrorCode::kRationalInput, "no convergent above the precision floor");
  }
  out.l_estimate = *std::max_element(out.exponents.begin(), out.exponents.end());
  return out;
}

PisotResult pisot_check(std::span<const std::int64_t> coefficients, double tolerance) {
  if (coefficients.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "polynomial must have degree >= 1");
  }
  if (coefficients.front() != 1) {
    throw Error(ErrorCode::kNonMonic, "polynomial must be monic (leading coefficient 1)");
  }
  const auto n = static_cast<Eigen::Index>(coefficients.size() - 1);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    companion(0, k) = -static_cast<double>(coefficients[static_cast<std::size_t>(k) + 1]);
  }
  for (Eigen::Index k = 1; k < n; ++k) companion(k, k - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);

  PisotResult out;
  for (Eigen::Index k = 0; k < n; ++k) out.roots.push_back(solver.eigenvalues()(k));
  std::sort(out.roots.begin(), out.roots.end(),
            [](const auto& a, const auto& b) { return std::abs(a) > std::abs(b); });

  std::size_t dominant = 0;
  bool others_inside = true;
  for (const auto& z : out.roots) {
    const bool real = std::abs(z.imag()) <= tolerance * std::max(1.0, std::abs(z));
    if (real && z.real() > 1.0 + tolerance) {
      ++dominant;
    } else if (std::abs(z) >= 1.0 - tolerance) {
      others_inside = false;
    }
  }
  out.is_pisot = dominant == 1 && others_inside;
  return out;
}

}  // namespace ssm
