#pragma once

// The random walk with i.i.d. steps X_k ~ lambda = sum_j p_j delta_{-log r_j},
// its first passage n_t = inf{n >= 1 : S_n >= t}, overshoot limit laws, the
// renewal and cutoff operators, and Laplace-transform diagnostics.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ssm/ifs.hpp"
#include "ssm/random.hpp"

namespace ssm {

inline constexpr double kAtomMergeTolerance = 1e-12;
inline constexpr double kResonanceThreshold = 1e-13;
inline constexpr double kUSeriesCutoff = 1e-4;
inline constexpr std::size_t kRenewalNodeCap = 10'000'000;

struct StepAtom {
  double step = 0.0;    // x_j > 0
  double weight = 0.0;  // p_j
  std::size_t source = 0;  // index of the first map contributing to this atom
};

class StepDistribution {
 public:
  // Atoms are merged (|x_i - x_j| <= kAtomMergeTolerance) and sorted by step.
  static StepDistribution from_atoms(std::vector<StepAtom> atoms);

  std::span<const StepAtom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double mean() const { return mean_; }
  double second_moment() const { return second_moment_; }
  double third_moment() const { return third_moment_; }
  double max_step() const { return atoms_.back().step; }
  double min_step() const { return atoms_.front().step; }
  double total_weight() const;

  double draw(RandomStream& stream) const { return atoms_[stream.pick(cumulative_)].step; }

 private:
  std::vector<StepAtom> atoms_;
  std::vector<double> cumulative_;
  double mean_ = 0.0;
  double second_moment_ = 0.0;
  double third_moment_ = 0.0;
};

StepDistribution step_distribution(const IfsSpec& spec);

struct ResidueSample {
  std::size_t stop_index = 0;  // n_t
  double overshoot = 0.0;      // S_{n_t} - t
  double crossing_step = 0.0;  // X_{n_t}
  double undershoot = 0.0;     // t - S_{n_t - 1}
};

ResidueSample sample_stopping(const StepDistribution& dist, double t, RandomStream& stream);

// N overshoots S_{n_t} - t, in trajectory order.
std::vector<double> sample_overshoots(const StepDistribution& dist, double t, std::size_t n,
                                      const McConfig& config);

// p(x) = lambda((x, inf)) and the limit overshoot law with density p(x)/sigma.
class LimitOvershootLaw {
 public:
  explicit LimitOvershootLaw(const StepDistribution& dist);

  std::span<const double> breakpoints() const { return breakpoints_; }
  double mean_step() const { return sigma_; }
  double tail(double x) const;
  double cdf(double x) const;
  // (1/sigma) * integral of p; equals 1 up to rounding.
  double total_mass() const;
  // Limit mean overshoot m2 / (2 sigma).
  double mean_overshoot() const;

 private:
  std::vector<double> breakpoints_;  // 0 = x_0 < x_1 < ... < x_m
  std::vector<double> tails_;        // p on [x_{k-1}, x_k)
  double sigma_ = 0.0;
};

double overshoot_cdf_limit(const LimitOvershootLaw& law, double x);

// Kolmogorov-Smirnov distance between the empirical law of `samples` and cdf.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  double empirical_mass = 0.0;
  double limit_mass = 0.0;
};

std::vector<HistogramBin> overshoot_histogram(std::span<const double> overshoots,
                                              const LimitOvershootLaw& law, std::size_t bins);

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

// A bounded function vanishing outside [support_low, support_high].
struct SupportedFunction {
  std::function<double(double)> f;
  double support_low = 0.0;
  double support_high = 0.0;

  double operator()(double x) const { return f(x); }
};

SupportedFunction indicator(double low, double high);

// Rf(t) = sum_{n >= 0} E f(S_n - t), averaged over n independent trajectories.
McEstimate renewal_operator_mc(const StepDistribution& dist, const SupportedFunction& f, double t,
                               std::size_t n, const McConfig& config);

// Exact Rf(t) by depth-first enumeration of step-count vectors with S_n <= t + b.
double renewal_operator_exact(const StepDistribution& dist, const SupportedFunction& f, double t,
                              std::size_t node_cap = kRenewalNodeCap);

struct CutoffMass {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t trajectories = 0;
};

// E_C(1)(t): number of n >= 0 with S_n < t <= S_n + X_{n+1}, averaged.
// At t = 0 the first step is the crossing (n_t >= 1 convention).
CutoffMass cutoff_mass(const StepDistribution& dist, double t, std::size_t n,
                       const McConfig& config);

// f(step, position) with position = S_{n_t - 1} - t in [-step, 0).
using JointFunction = std::function<double(double step, double position)>;

struct JointResidueCheck {
  double estimate = 0.0;
  double standard_error = 0.0;
  double limit = 0.0;
};

// Monte Carlo of E f(X_{n_t}, S_{n_t - 1} - t) next to the limit
// (1/sigma) sum_j p_j integral_{-x_j}^0 f(x_j, u) du.
JointResidueCheck joint_residue_check(const StepDistribution& dist, const JointFunction& f,
                                      double t, std::size_t n, const McConfig& config);

double joint_residue_limit(const StepDistribution& dist, const JointFunction& f);

std::complex<double> laplace(const StepDistribution& dist, std::complex<double> z);

// u(ib) = 1 / (1 - L(ib)) - 1 / (sigma i b), continued through b = 0.
std::complex<double> u_function(const StepDistribution& dist, double b);

struct DiophantineScan {
  double minimum = 0.0;  // min |b|^l |1 - L(ib)|
  double argmin = 0.0;
  std::size_t grid_points = 0;
};

using ScanObserver = std::function<void(double b, double abs_one_minus_laplace, double weighted)>;

// Grid scan of |b|^l |1 - L(ib)| over b in [1, b_max]; the best grid cells are
// refined by Gauss-Newton steps on 1 - L(ib). The observer sees every grid point.
DiophantineScan weakly_dioph_scan(const StepDistribution& dist, double l, double b_max,
                                  double grid_step, const ScanObserver& observer = {});

}  // namespace ssm
