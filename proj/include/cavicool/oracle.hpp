#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cavicool/params.hpp"

namespace cavicool::oracle {

using SpMat = Eigen::SparseMatrix<std::complex<double>>;
using DenseOp = Eigen::MatrixXcd;

// Highest retained Fock number of the cavity and motional modes; the
// Hilbert dimension is 2 (cavity + 1) (motion + 1).
struct Truncation {
  int cavity = 3;
  int motion = 6;
  bool operator==(const Truncation&) const = default;
};

struct ModelLimits {
  // Liouville dimension (d^2) up to which the vectorized generator may be
  // assembled. Time evolution is matrix-free and only bounded by max_hilbert.
  long max_liouville = 20000;
  int max_hilbert = 1000;
};

// TLS x cavity x motion with Lamb-Dicke-linearized couplings in the frame
// rotating at the drive frequency. Basis index = (tls (N_c+1) + n_c)(N_m+1)
// + n_m with tls 0 = |e>, 1 = |g>.
class LindbladModel {
 public:
  LindbladModel(const SystemParams& p, Truncation t, ModelLimits limits = {});

  const SystemParams& params() const { return p_; }
  Truncation truncation() const { return t_; }
  int dim() const { return dim_; }
  double bare_detuning() const { return Delta_H_; }

  const SpMat& hamiltonian() const { return H_; }
  const std::vector<SpMat>& jumps() const { return jumps_; }
  const SpMat& motion_number() const { return n_motion_; }
  const SpMat& cavity_number() const { return n_cavity_; }
  const SpMat& excited_projector() const { return p_excited_; }

  // Scratch buffers for apply; one per concurrent caller.
  struct Workspace {
    explicit Workspace(int d) : a(d, d), b(d, d) {}
    DenseOp a, b;
  };

  // out = L(rho) without forming the superoperator.
  void apply(const Eigen::Ref<const DenseOp>& rho, Eigen::Ref<DenseOp> out,
             Workspace& work) const;
  void apply(const Eigen::Ref<const DenseOp>& rho, DenseOp& out) const;
  // Same map for Hermitian rho; the result is Hermitian by construction.
  void apply_hermitian(const Eigen::Ref<const DenseOp>& rho,
                       Eigen::Ref<DenseOp> out, Workspace& work) const;

  // Column-stacked generator; throws std::length_error above the cap.
  SpMat generator() const;

  // |g><g| x thermal(N) x |n><n| (cavity thermal state renormalized on the
  // truncated space).
  DenseOp initial_state(int n_motion) const;

  // Largest |Tr L(X)| over a few deterministic Hermitian probes, relative to
  // the probe norm.
  double trace_defect() const;
  double hermiticity_error() const;

  // Steady state from the null vector of the generator (sparse LU).
  DenseOp steady_state() const;

 private:
  SystemParams p_;
  Truncation t_;
  ModelLimits limits_;
  int dim_;
  double Delta_H_;
  SpMat H_, H_eff_, H_eff_adj_, n_motion_, n_cavity_, p_excited_;
  std::vector<SpMat> jumps_, jumps_adj_;
};

// Number of cavity levels to keep for a thermal tail below `tail`.
int thermal_cutoff(double N, double tail);

struct Sample {
  double t = 0.0;
  double n = 0.0;          // <a^dag a>
  double n_cavity = 0.0;   // <c^dag c>
  double rho_ee = 0.0;
  double trace = 0.0;
  double min_eigenvalue = 0.0;
  double hermiticity = 0.0;
  double purity = 0.0;
  double top_cavity = 0.0;  // population of the highest cavity Fock level
  double top_motion = 0.0;
};

struct Physicality {
  double trace_drift = 0.0;
  double hermiticity = 0.0;
  double min_eigenvalue = 0.0;
  double top_cavity = 0.0;
  double top_motion = 0.0;
  double max_purity = 0.0;

  bool ok(double trace_tol = 1e-8, double psd_tol = 1e-10,
          double top_tol = 1e-6) const;
  std::vector<std::string> violations(double trace_tol = 1e-8,
                                      double psd_tol = 1e-10,
                                      double top_tol = 1e-6) const;
};

struct Trajectory {
  int n_init = 0;
  std::vector<Sample> samples;
  Physicality physicality;
  long steps = 0;
};

enum class Integrator { krylov, dopri5 };

struct EvolveOptions {
  Integrator method = Integrator::krylov;
  // Krylov: subspace size and local error allowed per unit time.
  int krylov_dim = 30;
  double krylov_tol = 1e-12;
  // Dormand-Prince tolerances.
  double rel_tol = 1e-8;
  double abs_tol = 1e-11;  // 1e-10 lets min eigenvalues dip to about -1.5e-10
  double min_step = 1e-12;  // relative to the time span
};

// Propagates rho0 and samples it at the requested times. The Krylov method
// applies exp(L tau) with an adaptive step; cost is insensitive to the
// stiffness of cavity damping at high Fock numbers. Throws std::runtime_error
// with diagnostics on step-size collapse.
Trajectory evolve(const LindbladModel& m, const DenseOp& rho0,
                  const std::vector<double>& t_grid,
                  const EvolveOptions& opt = {});

struct FitResult {
  double W = 0.0;
  double A_plus = 0.0;
  std::optional<double> n0;  // absent when W <= 0
  std::vector<double> intercepts;
  double residual = 0.0;  // max |model - data| in the window
  double swing = 0.0;     // max |n(t_end) - n(t_start)| over trajectories
  double t_start = 0.0;
  double t_end = 0.0;
  std::optional<double> n0_null_vector;
  std::vector<std::string> flags;
};

// Joint least-squares fit of n_k(t) = c_k e^{-W tau} + A_+ (1 - e^{-W tau})/W,
// tau = t - t_start, sharing W and A_+ across trajectories.
FitResult fit_cooling(const std::vector<Trajectory>& trajectories,
                      double t_start);

// Transient discard time 10 / min(kappa, gamma~_N).
double transient_time(const SystemParams& p);

struct OracleRun {
  Truncation truncation;
  std::vector<Trajectory> trajectories;
  FitResult fit;
};

struct SweepOptions {
  std::vector<int> n_init = {0, 1};
  double window = 0.0;   // fit window length; 0 picks a default
  int samples = 41;
  double rel_change = 1e-3;
  bool null_vector = true;
  ModelLimits limits{400000, 1000};
  EvolveOptions evolve;
};

struct ConvergenceRecord {
  std::vector<OracleRun> runs;
  bool converged = false;
  std::optional<std::size_t> certified;  // index into runs
  std::vector<std::string> notes;

  const OracleRun& best() const;
};

OracleRun run_oracle(const SystemParams& p, Truncation t,
                     const SweepOptions& opt = {});

// Default schedule grows both truncations from the thermal and heuristic
// floors.
std::vector<Truncation> default_schedule(const SystemParams& p,
                                         const std::vector<int>& n_init,
                                         int levels = 3);

// Runs the schedule until two successive levels agree on W and n0.
ConvergenceRecord convergence_sweep(const SystemParams& p,
                                    const std::vector<Truncation>& schedule,
                                    const SweepOptions& opt = {});

// Second-order rates from the cavity-eliminated molecular master equation on
// TLS x motion{0,1,2}: A_+ = rate 0 -> 1, A_- = rate 1 -> 0.
struct PerturbativeRates {
  double A_minus = 0.0;
  double A_plus = 0.0;
  double imag_residual = 0.0;
};

PerturbativeRates perturbative_rates(const SystemParams& p);

}  // namespace cavicool::oracle
