#include "stealthguard/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <boost/math/distributions/chi_squared.hpp>

#include "stealthguard/error.hpp"

namespace stealthguard {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_real(const Pattern& p) { return p.cast<double>(); }

// Square root factor F with F F' = M for a symmetric PSD M.
MatrixXd psd_factor(const MatrixXd& m) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (m + m.transpose()));
  VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

double max_abs(const std::vector<VectorXd>& seq) {
  double best = 0.0;
  for (const auto& v : seq)
    if (v.size() > 0) best = std::max(best, v.cwiseAbs().maxCoeff());
  return best;
}

}  // namespace

double spectral_radius(const MatrixXd& matrix) {
  if (matrix.size() == 0) return 0.0;
  Eigen::EigenSolver<MatrixXd> eig(matrix, /*computeEigenvectors=*/false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

double chi_square_threshold(int dof, double probability) {
  if (dof < 0) throw InvalidInput("negative degrees of freedom");
  if (!(probability > 0.0 && probability < 1.0))
    throw InvalidInput("false-alarm probability must lie in (0, 1)");
  if (dof == 0) return 0.0;
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::quantile(boost::math::complement(dist, probability));
}

SteadyStateFilter steady_state_filter(const MatrixXd& A, const MatrixXd& C,
                                      const MatrixXd& Q, const MatrixXd& R) {
  const auto n = A.rows();
  const auto m = C.rows();
  SteadyStateFilter f;
  f.gain = MatrixXd::Zero(n, m);
  f.residue_covariance = MatrixXd::Zero(m, m);
  MatrixXd S = Q;
  if (m == 0) {
    f.prior_covariance = S;
    return f;
  }
  const MatrixXd I = MatrixXd::Identity(n, n);
  constexpr int kMaxIterations = 100000;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const MatrixXd innovation = C * S * C.transpose() + R;
    Eigen::LDLT<MatrixXd> ldlt(innovation);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, innovation.norm()))
      throw NumericalError(
          "innovation covariance became singular; use positive process or "
          "measurement noise");
    const MatrixXd K = ldlt.solve(C * S).transpose();
    const MatrixXd J = I - K * C;
    const MatrixXd posterior = J * S * J.transpose() + K * R * K.transpose();
    MatrixXd next = A * posterior * A.transpose() + Q;
    next = 0.5 * (next + next.transpose());
    const double change = (next - S).norm();
    S = std::move(next);
    if (change <= 1e-13 * (1.0 + S.norm())) {
      f.prior_covariance = S;
      f.residue_covariance = C * S * C.transpose() + R;
      f.gain = Eigen::LDLT<MatrixXd>(f.residue_covariance).solve(C * S).transpose();
      f.iterations = it;
      return f;
    }
  }
  throw NumericalError("steady-state gain iteration did not converge");
}

Realization realize(const StructuredSystem& system, std::uint64_t seed,
                    const RealizeOptions& options) {
  if (!(options.spectral_radius > 0.0 && options.spectral_radius < 1.0))
    throw InvalidInput("target spectral radius must lie in (0, 1)");
  if (options.process_noise < 0.0 || options.measurement_noise < 0.0)
    throw InvalidInput("noise intensities must be non-negative");

  const int n = system.topology().agent_count();
  const int m = system.topology().observer_count();
  const Pattern pattern = system.a_pattern();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> magnitude(0.1, 1.0);
  std::bernoulli_distribution negative(0.5);

  Realization real;
  double rho = 0.0;
  for (int attempt = 0; attempt < 100 && !(rho > 1e-12); ++attempt) {
    real.A = MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (pattern(i, j)) real.A(i, j) = (negative(rng) ? -1.0 : 1.0) * magnitude(rng);
    rho = spectral_radius(real.A);
  }
  if (!(rho > 1e-12)) throw NumericalError("could not draw a non-nilpotent A");
  real.A *= options.spectral_radius / rho;

  real.B = to_real(system.b_pattern());
  real.C = to_real(system.c_pattern());
  real.D = to_real(system.d_pattern());
  real.Q = options.process_noise * MatrixXd::Identity(n, n);
  real.R = options.measurement_noise * MatrixXd::Identity(m, m);

  const SteadyStateFilter filter = steady_state_filter(real.A, real.C, real.Q, real.R);
  real.K = filter.gain;
  real.P = filter.residue_covariance;
  real.eta = chi_square_threshold(m, options.false_alarm_probability);

  const double filter_rho = spectral_radius(real.A - real.K * real.C * real.A);
  if (!(filter_rho < 1.0))
    throw NumericalError("steady-state filter is not stable");
  return real;
}

NormalRankResult normal_rank_probe(const Realization& real, int trials,
                                   std::uint64_t seed) {
  if (trials < 3) throw InvalidInput("normal rank needs at least 3 probe points");
  NormalRankResult result;
  const auto n = real.A.rows();
  const auto m = real.C.rows();
  const auto q = real.B.cols();
  if (m == 0 || q == 0) return result;

  Eigen::EigenSolver<MatrixXd> eig(real.A, false);
  const Eigen::VectorXcd spectrum = eig.eigenvalues();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(1.05, 1.5);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const Eigen::MatrixXcd A = real.A.cast<std::complex<double>>();
  const Eigen::MatrixXcd B = real.B.cast<std::complex<double>>();
  const Eigen::MatrixXcd C = real.C.cast<std::complex<double>>();
  const Eigen::MatrixXcd D = real.D.cast<std::complex<double>>();

  int accepted = 0;
  for (int attempt = 0; accepted < trials; ++attempt) {
    if (attempt > 100 * trials) throw NumericalError("no usable probe points");
    const std::complex<double> z = std::polar(radius(rng), angle(rng));
    if (spectrum.size() > 0 && (spectrum.array() - z).abs().minCoeff() < 0.05) continue;
    ++accepted;
    const Eigen::MatrixXcd resolvent_b =
        (z * Eigen::MatrixXcd::Identity(n, n) - A).partialPivLu().solve(B);
    const Eigen::MatrixXcd G = C * resolvent_b + D;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G);
    const VectorXd sv = svd.singularValues();
    // Cut-off relative to an upper bound on |G(z)|.
    const double scale = C.norm() * resolvent_b.norm() + D.norm();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > kRankTolerance * scale) ++rank;
    result.rank = std::max(result.rank, rank);
    const double smallest = G.rows() < G.cols() ? 0.0 : sv(sv.size() - 1);
    result.best_min_singular_value = std::max(result.best_min_singular_value, smallest);
  }
  result.probes = accepted;
  return result;
}

int normal_rank(const Realization& real, int trials, std::uint64_t seed) {
  return normal_rank_probe(real, trials, seed).rank;
}

DeltaTrace simulate_delta(const Realization& real, const InputSequence& inputs,
                          int steps) {
  const auto n = real.A.rows();
  const auto q = real.B.cols();
  const MatrixXd CA = real.C * real.A;
  DeltaTrace d;
  VectorXd dx = VectorXd::Zero(n);
  VectorXd dxhat_prev = VectorXd::Zero(n);
  const VectorXd no_input = VectorXd::Zero(q);
  for (int k = 0; k < steps; ++k) {
    const VectorXd& u = k < static_cast<int>(inputs.size()) ? inputs[k] : no_input;
    if (u.size() != q) throw InvalidInput("attack input has the wrong dimension");
    const VectorXd dy = real.C * dx - real.D * u;
    const VectorXd dz = dy - CA * dxhat_prev;
    VectorXd dxhat = real.A * dxhat_prev + real.K * dz;
    d.dx.push_back(dx);
    d.dy.push_back(dy);
    d.dz.push_back(dz);
    d.dxhat.push_back(dxhat);
    dx = real.A * dx - real.B * u;
    dxhat_prev = std::move(dxhat);
  }
  return d;
}

PerfectAttackSearch find_perfect_attack(const Realization& real, int horizon) {
  const int n = real.agents();
  const int m = real.observers();
  const int q = real.inputs();
  if (horizon < 2 * n) throw InvalidInput("horizon must be at least 2n");
  PerfectAttackSearch search;
  if (q == 0) return search;

  const int window = horizon + n;
  const int cols = q * horizon;
  // markov[j] = A^j B
  std::vector<MatrixXd> markov;
  markov.push_back(real.B);
  for (int j = 1; j < window; ++j) markov.push_back(real.A * markov.back());

  MatrixXd outputs = MatrixXd::Zero(static_cast<Eigen::Index>(m) * window, cols);
  MatrixXd states = MatrixXd::Zero(static_cast<Eigen::Index>(n) * horizon, cols);
  for (int k = 0; k < window; ++k) {
    for (int j = 0; j < horizon && j <= k; ++j) {
      const MatrixXd block = j == k ? real.D : MatrixXd(real.C * markov[k - 1 - j]);
      outputs.block(static_cast<Eigen::Index>(k) * m, static_cast<Eigen::Index>(j) * q, m, q) = block;
    }
  }
  for (int k = 1; k <= horizon; ++k)
    for (int j = 0; j < k; ++j)
      states.block(static_cast<Eigen::Index>(k - 1) * n, static_cast<Eigen::Index>(j) * q, n, q) =
          markov[k - 1 - j];

  MatrixXd null_basis;
  if (outputs.rows() == 0) {
    null_basis = MatrixXd::Identity(cols, cols);
  } else {
    Eigen::BDCSVD<MatrixXd> svd(outputs, Eigen::ComputeFullV);
    const VectorXd sv = svd.singularValues();
    const double top = sv(0);
    search.largest_singular_value = top;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      const double rel = top > 0.0 ? sv(i) / top : 0.0;
      if (rel > kRankTolerance) ++rank;
      if (rel > 0.1 * kRankTolerance && rel < 10.0 * kRankTolerance) search.ambiguous = true;
    }
    search.smallest_singular_value = outputs.rows() < cols ? 0.0 : sv(sv.size() - 1);
    null_basis = svd.matrixV().rightCols(cols - rank);
  }
  search.null_dimension = static_cast<int>(null_basis.cols());
  if (search.null_dimension == 0) return search;

  // Among null-space inputs pick the one that moves the state the most.
  VectorXd stacked;
  const MatrixXd reach = states * null_basis;
  if (reach.norm() > 0.0) {
    Eigen::JacobiSVD<MatrixXd> pick(reach, Eigen::ComputeFullV);
    stacked = null_basis * pick.matrixV().col(0);
  } else {
    stacked = null_basis.col(0);
  }
  stacked.normalize();

  AttackTrace trace;
  trace.horizon = horizon;
  for (int k = 0; k < horizon; ++k) trace.inputs.push_back(stacked.segment(static_cast<Eigen::Index>(k) * q, q));
  const DeltaTrace extended = simulate_delta(real, trace.inputs, window);
  search.max_output_deviation = max_abs(extended.dy);
  trace.delta = simulate_delta(real, trace.inputs, horizon);
  search.attack = std::move(trace);
  return search;
}

namespace {

class Detector {
 public:
  explicit Detector(const Realization& real) : m_(real.observers()) {
    if (m_ > 0) {
      ldlt_.compute(real.P);
      if (ldlt_.info() != Eigen::Success || !ldlt_.isPositive() ||
          ldlt_.vectorD().minCoeff() <= 0.0)
        throw InvalidInput("residue covariance P must be positive definite");
    }
  }

  double statistic(const VectorXd& z) const {
    if (m_ == 0) return 0.0;
    return z.dot(ldlt_.solve(z));
  }

 private:
  int m_;
  Eigen::LDLT<MatrixXd> ldlt_;
};

void check_dimensions(const Realization& real) {
  const auto n = real.A.rows();
  const auto m = real.C.rows();
  const auto q = real.B.cols();
  if (real.A.cols() != n || real.B.rows() != n || real.C.cols() != n ||
      real.D.rows() != m || real.D.cols() != q || real.Q.rows() != n ||
      real.Q.cols() != n || real.R.rows() != m || real.R.cols() != m ||
      real.K.rows() != n || real.K.cols() != m || real.P.rows() != m ||
      real.P.cols() != m)
    throw InvalidInput("realization matrices have inconsistent dimensions");
}

}  // namespace

SimulationResult simulate(const Realization& real,
                          const std::optional<InputSequence>& attack,
                          std::uint64_t seed, int horizon,
                          const SimulationOptions& options) {
  check_dimensions(real);
  if (horizon < 0) throw InvalidInput("negative horizon");
  const auto n = real.A.rows();
  const auto m = real.C.rows();
  const auto q = real.B.cols();
  if (!(spectral_radius(real.A - real.K * real.C * real.A) < 1.0))
    throw InvalidInput("filter dynamics A - KCA are not stable");
  const Detector detector(real);
  const MatrixXd CA = real.C * real.A;
  const MatrixXd w_factor = psd_factor(real.Q);
  const MatrixXd v_factor = psd_factor(real.R);

  VectorXd x0 = VectorXd::Zero(n);
  if (options.initial_state) {
    if (options.initial_state->size() != n) throw InvalidInput("initial state has wrong size");
    x0 = *options.initial_state;
  }

  SimulationResult result;
  result.horizon = horizon;
  if (attack) {
    result.inputs = *attack;
    for (const auto& u : result.inputs)
      if (u.size() != q) throw InvalidInput("attack input has the wrong dimension");
    result.attacked.emplace();
  }

  struct Run {
    VectorXd x, xhat_prev;
    RunTrace* trace;
  };
  Run nominal{x0, VectorXd::Zero(n), &result.nominal};
  Run attacked{x0, VectorXd::Zero(n), attack ? &*result.attacked : nullptr};

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&](Eigen::Index size) {
    VectorXd e(size);
    for (Eigen::Index i = 0; i < size; ++i) e(i) = gauss(rng);
    return e;
  };
  const VectorXd no_input = VectorXd::Zero(q);

  auto step = [&](Run& run, const VectorXd& w, const VectorXd& v, const VectorXd* u) {
    VectorXd y = real.C * run.x + v;
    if (u) y += real.D * *u;
    const VectorXd z = y - CA * run.xhat_prev;
    VectorXd xhat = real.A * run.xhat_prev + real.K * z;
    const double stat = detector.statistic(z);
    auto& t = *run.trace;
    t.x.push_back(run.x);
    t.y.push_back(y);
    t.z.push_back(z);
    t.xhat.push_back(xhat);
    t.statistic.push_back(stat);
    t.alarm.push_back(m > 0 && stat > real.eta);
    VectorXd next = real.A * run.x + w;
    if (u) next += real.B * *u;
    run.x = std::move(next);
    run.xhat_prev = std::move(xhat);
  };

  for (int k = 0; k < horizon; ++k) {
    VectorXd w = VectorXd::Zero(n);
    VectorXd v = VectorXd::Zero(m);
    if (options.noise) {
      w = w_factor * draw(n);
      v = v_factor * draw(m);
    }
    step(nominal, w, v, nullptr);
    if (attack) {
      const VectorXd& u = k < static_cast<int>(attack->size()) ? (*attack)[k] : no_input;
      step(attacked, w, v, &u);
    }
  }
  if (attack) result.delta = simulate_delta(real, *attack, horizon);
  return result;
}

double false_alarm_rate(const Realization& real, double eta, int samples,
                        std::uint64_t seed, int burn_in) {
  if (samples <= 0) throw InvalidInput("need a positive number of samples");
  if (burn_in < 0) throw InvalidInput("negative burn-in");
  Realization tuned = real;
  tuned.eta = eta;
  const SimulationResult run = simulate(tuned, std::nullopt, seed, burn_in + samples);
  const auto& alarms = run.nominal.alarm;
  const auto hits = std::count(alarms.begin() + burn_in, alarms.end(), true);
  return static_cast<double>(hits) / samples;
}

namespace {

void header_block(std::ostream& out, const char* prefix, Eigen::Index count) {
  for (Eigen::Index i = 0; i < count; ++i) out << ',' << prefix << (i + 1);
}

void value_block(std::ostream& out, const VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << v(i);
}

}  // namespace

void write_trace_csv(std::ostream& out, const SimulationResult& result) {
  const auto& nom = result.nominal;
  const Eigen::Index n = nom.x.empty() ? 0 : nom.x.front().size();
  const Eigen::Index m = nom.y.empty() ? 0 : nom.y.front().size();
  const bool attacked = result.attacked.has_value();
  Eigen::Index q = 0;
  if (!result.inputs.empty()) q = result.inputs.front().size();

  out << 'k';
  header_block(out, "x", n);
  header_block(out, "xhat", n);
  header_block(out, "y", m);
  header_block(out, "z", m);
  out << ",stat,alarm";
  if (attacked) {
    header_block(out, "u", q);
    header_block(out, "xa", n);
    header_block(out, "xahat", n);
    header_block(out, "ya", m);
    header_block(out, "za", m);
    out << ",stat_a,alarm_a";
    header_block(out, "dx", n);
    header_block(out, "dy", m);
    header_block(out, "dz", m);
  }
  out << '\n';

  const auto old_precision = out.precision(17);
  const VectorXd no_input = VectorXd::Zero(q);
  for (int k = 0; k < result.horizon; ++k) {
    out << k;
    value_block(out, nom.x[k]);
    value_block(out, nom.xhat[k]);
    value_block(out, nom.y[k]);
    value_block(out, nom.z[k]);
    out << ',' << nom.statistic[k] << ',' << (nom.alarm[k] ? 1 : 0);
    if (attacked) {
      const auto& att = *result.attacked;
      value_block(out, k < static_cast<int>(result.inputs.size()) ? result.inputs[k] : no_input);
      value_block(out, att.x[k]);
      value_block(out, att.xhat[k]);
      value_block(out, att.y[k]);
      value_block(out, att.z[k]);
      out << ',' << att.statistic[k] << ',' << (att.alarm[k] ? 1 : 0);
      value_block(out, result.delta->dx[k]);
      value_block(out, result.delta->dy[k]);
      value_block(out, result.delta->dz[k]);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

void write_realization(std::ostream& out, const Realization& real) {
  const auto old_precision = out.precision(17);
  out << "# stealthguard realization\n";
  out << "eta " << real.eta << '\n';
  const std::pair<const char*, const MatrixXd*> named[] = {
      {"A", &real.A}, {"B", &real.B}, {"C", &real.C}, {"D", &real.D},
      {"Q", &real.Q}, {"R", &real.R}, {"K", &real.K}, {"P", &real.P}};
  for (const auto& [name, mat] : named) {
    out << "matrix " << name << ' ' << mat->rows() << ' ' << mat->cols() << '\n';
    for (Eigen::Index i = 0; i < mat->rows(); ++i) {
      for (Eigen::Index j = 0; j < mat->cols(); ++j) out << (j ? " " : "") << (*mat)(i, j);
      out << '\n';
    }
  }
  out.precision(old_precision);
}

Realization read_realization(std::istream& in) {
  Realization real;
  std::map<std::string, MatrixXd*> slots = {
      {"A", &real.A}, {"B", &real.B}, {"C", &real.C}, {"D", &real.D},
      {"Q", &real.Q}, {"R", &real.R}, {"K", &real.K}, {"P", &real.P}};
  std::map<std::string, bool> seen;
  bool have_eta = false;
  std::string token;
  while (in >> token) {
    if (token.front() == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (token == "eta") {
      if (!(in >> real.eta)) throw InvalidInput("realization: bad eta value");
      have_eta = true;
    } else if (token == "matrix") {
      std::string name;
      Eigen::Index rows = 0, cols = 0;
      if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0)
        throw InvalidInput("realization: bad matrix header");
      auto it = slots.find(name);
      if (it == slots.end()) throw InvalidInput("realization: unknown matrix '" + name + "'");
      MatrixXd& mat = *it->second;
      mat.resize(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
          if (!(in >> mat(i, j)))
            throw InvalidInput("realization: matrix " + name + " is truncated");
      seen[name] = true;
    } else {
      throw InvalidInput("realization: unexpected token '" + token + "'");
    }
  }
  if (!have_eta) throw InvalidInput("realization: missing eta");
  for (const auto& [name, _] : slots)
    if (!seen[name]) throw InvalidInput("realization: missing matrix " + name);
  check_dimensions(real);
  return real;
}

}  // namespace stealthguard
