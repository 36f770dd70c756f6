#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "stealthguard/topology.hpp"

namespace stealthguard {

/// Numeric instance of a structured system together with its detector.
///
///   x(k+1) = A x(k) + B u(k) + w(k),     w ~ N(0, Q)
///   y(k)   = C x(k) + D u(k) + v(k),     v ~ N(0, R)
///   xhat(k) = (A - K C A) xhat(k-1) + K y(k)
///   z(k)   = y(k) - C A xhat(k-1),        alarm iff z' P^-1 z > eta
struct Realization {
  Eigen::MatrixXd A, B, C, D, Q, R, K, P;
  double eta = 0.0;

  int agents() const { return static_cast<int>(A.rows()); }
  int observers() const { return static_cast<int>(C.rows()); }
  int inputs() const { return static_cast<int>(B.cols()); }
};

struct RealizeOptions {
  double spectral_radius = 0.9;
  /// Q = process_noise * I.
  double process_noise = 1.0;
  /// R = measurement_noise * I. Zero matches the noiseless nominal sensor
  /// model; the residue deltas do not depend on it.
  double measurement_noise = 0.0;
  /// eta is the upper chi-square(m) quantile at this probability.
  double false_alarm_probability = 0.05;
};

/// Draws the free entries of A from U([-1,-0.1] u [0.1,1]), rescales A to the
/// target spectral radius, fills B, C, D with the dedicated 0/1 indicators and
/// computes the steady-state filter gain and residue covariance.
///
/// Throws NumericalError if the gain iteration does not converge.
Realization realize(const StructuredSystem& system, std::uint64_t seed,
                    const RealizeOptions& options = {});

struct SteadyStateFilter {
  Eigen::MatrixXd gain;                 // K
  Eigen::MatrixXd residue_covariance;   // P = C S C' + R
  Eigen::MatrixXd prior_covariance;     // S, one-step prediction error
  int iterations = 0;
};

/// Fixed point of the one-step predictor/corrector Riccati recursion.
SteadyStateFilter steady_state_filter(const Eigen::MatrixXd& A,
                                      const Eigen::MatrixXd& C,
                                      const Eigen::MatrixXd& Q,
                                      const Eigen::MatrixXd& R);

double spectral_radius(const Eigen::MatrixXd& matrix);

/// Upper-tail chi-square quantile: P(chi2(dof) > eta) = probability.
double chi_square_threshold(int dof, double probability);

struct NormalRankResult {
  int rank = 0;
  /// Over all probes, the largest value of the smallest singular value of
  /// G(z) (0 when G has fewer rows than columns). A value below 1e-10 means
  /// every probe looked rank deficient.
  double best_min_singular_value = 0.0;
  int probes = 0;
};

/// Relative cut-off under which a singular value counts as zero.
inline constexpr double kRankTolerance = 1e-9;

/// Normal rank of G(z) = C (zI - A)^-1 B + D, estimated as the largest
/// numerical rank over `trials` random complex points with 1.05 <= |z| <= 1.5.
NormalRankResult normal_rank_probe(const Realization& real, int trials,
                                   std::uint64_t seed = 7);
int normal_rank(const Realization& real, int trials, std::uint64_t seed = 7);

using InputSequence = std::vector<Eigen::VectorXd>;

/// Noise-free difference between the nominal and the attacked run
/// (delta = nominal - attacked), from zero initial deviation.
struct DeltaTrace {
  std::vector<Eigen::VectorXd> dx, dxhat, dy, dz;
};

DeltaTrace simulate_delta(const Realization& real, const InputSequence& inputs,
                          int steps);

struct AttackTrace {
  int horizon = 0;
  InputSequence inputs;
  DeltaTrace delta;
};

struct PerfectAttackSearch {
  std::optional<AttackTrace> attack;
  /// Dimension of the input space mapped to zero output.
  int null_dimension = 0;
  double smallest_singular_value = 0.0;
  double largest_singular_value = 0.0;
  /// A singular value lies within a decade of the rank cut-off.
  bool ambiguous = false;
  /// max_k |dy(k)|_inf of the returned attack over the horizon plus n
  /// trailing zero-input steps.
  double max_output_deviation = 0.0;
};

/// Searches for inputs u(0..N-1), not all zero, whose outputs vanish over the
/// horizon and for n further steps after the input stops. That makes the
/// final state deviation unobservable, so the output deviation stays zero
/// forever and the attack is perfect. Among such inputs the one with the
/// largest state deviation is returned, with unit 2-norm.
///
/// Requires horizon >= 2n.
PerfectAttackSearch find_perfect_attack(const Realization& real, int horizon);

struct RunTrace {
  std::vector<Eigen::VectorXd> x, xhat, y, z;
  std::vector<double> statistic;
  std::vector<bool> alarm;
};

struct SimulationOptions {
  bool noise = true;
  /// x(0); zero when unset.
  std::optional<Eigen::VectorXd> initial_state;
};

struct SimulationResult {
  int horizon = 0;
  RunTrace nominal;
  std::optional<RunTrace> attacked;
  std::optional<DeltaTrace> delta;
  InputSequence inputs;
};

/// Runs the nominal and, when `attack` is given, the attacked system on the
/// same noise draws. The delta trace comes from the noise-free difference
/// system, so it does not depend on the noise at all.
SimulationResult simulate(const Realization& real,
                          const std::optional<InputSequence>& attack,
                          std::uint64_t seed, int horizon,
                          const SimulationOptions& options = {});

/// Fraction of steady-state steps (after `burn_in`) that raise an alarm with
/// threshold `eta` and no attack.
double false_alarm_rate(const Realization& real, double eta, int samples,
                        std::uint64_t seed, int burn_in = 1000);

/// Comma-separated trace with a header row: k, x*, xhat*, y*, z*, stat,
/// alarm, then for attacked runs u*, xa*, xahat*, ya*, za*, stat_a, alarm_a,
/// dx*, dy*, dz*.
void write_trace_csv(std::ostream& out, const SimulationResult& result);

/// Realization as named row-major matrices with a dimension header per
/// matrix. Values are printed with 17 significant digits so a write/read
/// round-trip is exact.
void write_realization(std::ostream& out, const Realization& real);
Realization read_realization(std::istream& in);

}  // namespace stealthguard
