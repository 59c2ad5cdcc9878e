#include "cavicool/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseLU>
#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "cavicool/bloch.hpp"
#include "cavicool/pauli.hpp"

namespace cavicool::oracle {

namespace {

using Triplet = Eigen::Triplet<cplx>;

SpMat identity(int n) {
  SpMat m(n, n);
  m.setIdentity();
  return m;
}

SpMat lowering(int levels) {
  SpMat m(levels, levels);
  std::vector<Triplet> t;
  for (int n = 1; n < levels; ++n) t.emplace_back(n - 1, n, std::sqrt(double(n)));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat sparse(const Mat2& m) { return m.sparseView(); }

SpMat kron3(const SpMat& a, const SpMat& b, const SpMat& c) {
  SpMat ab = Eigen::kroneckerProduct(a, b);
  SpMat abc = Eigen::kroneckerProduct(ab, c);
  abc.prune(cplx(0.0));
  return abc;
}

}  // namespace

LindbladModel::LindbladModel(const SystemParams& p, Truncation t,
                             ModelLimits limits)
    : p_(p), t_(t), limits_(limits) {
  p.validate();
  if (t.cavity < 1 || t.motion < 1)
    throw std::invalid_argument("truncation needs at least two levels per mode");
  const int nc = t.cavity + 1, nm = t.motion + 1;
  dim_ = 2 * nc * nm;
  if (dim_ > limits.max_hilbert)
    throw std::length_error("Hilbert dimension " + std::to_string(dim_) +
                            " exceeds cap " + std::to_string(limits.max_hilbert));
  Delta_H_ = cavicool::bare_detuning(p);

  const SpMat I2 = identity(2), Ic = identity(nc), Im = identity(nm);
  const SpMat c = kron3(I2, lowering(nc), Im);
  const SpMat a = kron3(I2, Ic, lowering(nm));
  const SpMat sp = kron3(sparse(pauli::raising()), Ic, Im);
  const SpMat sz = kron3(sparse(pauli::sigma_z()), Ic, Im);
  const SpMat sx = kron3(sparse(pauli::sigma_x()), Ic, Im);
  const SpMat Id = identity(dim_);
  const SpMat cd = c.adjoint(), ad = a.adjoint(), sm = sp.adjoint();
  const SpMat x = a + ad;

  n_cavity_ = cd * c;
  n_motion_ = ad * a;
  p_excited_ = 0.5 * (Id + sz);

  H_ = (p.Delta_c - Delta_H_) * n_cavity_ + p.nu * n_motion_ -
       0.5 * Delta_H_ * sz + 0.5 * p.Omega * SpMat(sx * (Id + p.eta * x)) +
       p.g * SpMat((Id + p.eta_c * x) * SpMat(sp * c + sm * cd));
  H_.prune(cplx(0.0));

  jumps_.push_back(std::sqrt(2.0 * p.kappa * (p.N + 1.0)) * c);
  if (p.N > 0.0) jumps_.push_back(std::sqrt(2.0 * p.kappa * p.N) * cd);
  SpMat decay(dim_, dim_);
  for (const auto& L : jumps_) decay += SpMat(L.adjoint()) * L;
  H_eff_ = H_ - cplx(0.0, 0.5) * decay;
  H_eff_adj_ = H_eff_.adjoint();
  for (const auto& L : jumps_) jumps_adj_.emplace_back(L.adjoint());
}

void LindbladModel::apply(const Eigen::Ref<const DenseOp>& rho,
                          Eigen::Ref<DenseOp> out, Workspace& work) const {
  // rho H_eff^dag and L rho L^dag are formed as adjoints of left products.
  work.a.noalias() = H_eff_ * rho;
  out = cplx(0.0, -1.0) * work.a;
  work.a = rho.adjoint();
  work.b.noalias() = H_eff_ * work.a;
  out += cplx(0.0, 1.0) * work.b.adjoint();
  for (const auto& L : jumps_) {
    work.b.noalias() = L * rho;
    work.a = work.b.adjoint();
    work.b.noalias() = L * work.a;
    out += work.b.adjoint();
  }
}

void LindbladModel::apply(const Eigen::Ref<const DenseOp>& rho,
                          DenseOp& out) const {
  Workspace work(dim_);
  out.resize(dim_, dim_);
  apply(rho, out, work);
}

void LindbladModel::apply_hermitian(const Eigen::Ref<const DenseOp>& rho,
                                    Eigen::Ref<DenseOp> out,
                                    Workspace& work) const {
  // Dense x sparse products only; they are several times faster than the
  // sparse x dense ones for these shapes. a = rho H_eff^dag = (H_eff rho)^dag.
  work.a.noalias() = rho * H_eff_adj_;
  out = cplx(0.0, 1.0) * work.a;
  out += cplx(0.0, -1.0) * work.a.adjoint();
  // Jump terms are symmetrized so rounding cannot seed an anti-Hermitian
  // part, which this map would not damp.
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    work.a.noalias() = rho * jumps_adj_[k];
    work.b = work.a.adjoint();
    work.a.noalias() = work.b * jumps_adj_[k];
    out += 0.5 * work.a;
    out += 0.5 * work.a.adjoint();
  }
}

SpMat LindbladModel::generator() const {
  const long liouville = long(dim_) * dim_;
  if (liouville > limits_.max_liouville)
    throw std::length_error("Liouville dimension " + std::to_string(liouville) +
                            " exceeds cap " +
                            std::to_string(limits_.max_liouville));
  const SpMat Id = identity(dim_);
  const SpMat Heff_conj = H_eff_.conjugate();
  SpMat G = cplx(0.0, -1.0) * SpMat(Eigen::kroneckerProduct(Id, H_eff_));
  G += cplx(0.0, 1.0) * SpMat(Eigen::kroneckerProduct(Heff_conj, Id));
  for (const auto& L : jumps_) {
    const SpMat Lc = L.conjugate();
    G += SpMat(Eigen::kroneckerProduct(Lc, L));
  }
  G.prune(cplx(0.0));
  return G;
}

DenseOp LindbladModel::initial_state(int n_motion) const {
  if (n_motion < 0 || n_motion > t_.motion)
    throw std::invalid_argument("initial motional level outside truncation");
  const int nc = t_.cavity + 1, nm = t_.motion + 1;
  std::vector<double> thermal(nc);
  double norm = 0.0;
  for (int n = 0; n < nc; ++n) {
    thermal[n] = std::pow(p_.N / (p_.N + 1.0), n) / (p_.N + 1.0);
    norm += thermal[n];
  }
  DenseOp rho = DenseOp::Zero(dim_, dim_);
  for (int n = 0; n < nc; ++n) {
    const int idx = (pauli::kGround * nc + n) * nm + n_motion;
    rho(idx, idx) = thermal[n] / norm;
  }
  return rho;
}

double LindbladModel::trace_defect() const {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  DenseOp out(dim_, dim_);
  for (int probe = 0; probe < 3; ++probe) {
    DenseOp x(dim_, dim_);
    for (int j = 0; j < dim_; ++j)
      for (int i = 0; i < dim_; ++i) x(i, j) = cplx(gauss(rng), gauss(rng));
    x = (x + x.adjoint()).eval();
    apply(x, out);
    worst = std::max(worst, std::abs(out.trace()) / x.norm());
  }
  return worst;
}

double LindbladModel::hermiticity_error() const {
  return SpMat(H_ - SpMat(H_.adjoint())).coeffs().cwiseAbs().maxCoeff();
}

DenseOp LindbladModel::steady_state() const {
  const SpMat G = generator();
  const long n = G.rows();
  std::vector<Triplet> t;
  t.reserve(G.nonZeros() + dim_);
  for (int k = 0; k < G.outerSize(); ++k)
    for (SpMat::InnerIterator it(G, k); it; ++it)
      if (it.row() != 0) t.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < dim_; ++i) t.emplace_back(0, i + long(dim_) * i, 1.0);
  SpMat M(n, n);
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("steady-state factorization failed");
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs(0) = 1.0;
  const Eigen::VectorXcd v = lu.solve(rhs);
  DenseOp rho = Eigen::Map<const DenseOp>(v.data(), dim_, dim_);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return rho / rho.trace();
}

int thermal_cutoff(double N, double tail) {
  if (N <= 0.0) return 0;
  const double r = N / (N + 1.0);
  int n = 0;
  double p = 1.0 / (N + 1.0);
  while (p >= tail) {
    p *= r;
    ++n;
  }
  return n;
}

bool Physicality::ok(double trace_tol, double psd_tol, double top_tol) const {
  return violations(trace_tol, psd_tol, top_tol).empty();
}

std::vector<std::string> Physicality::violations(double trace_tol,
                                                 double psd_tol,
                                                 double top_tol) const {
  std::vector<std::string> v;
  if (trace_drift > trace_tol) v.emplace_back("trace");
  if (hermiticity > trace_tol) v.emplace_back("hermiticity");
  if (min_eigenvalue < -psd_tol) v.emplace_back("positivity");
  if (top_cavity >= top_tol) v.emplace_back("cavity-truncation");
  if (top_motion >= top_tol) v.emplace_back("motion-truncation");
  if (max_purity > 1.0 + trace_tol) v.emplace_back("purity");
  return v;
}

namespace {

using State = std::vector<double>;

Eigen::Map<const DenseOp> as_matrix(const State& x, int d) {
  return {reinterpret_cast<const cplx*>(x.data()), d, d};
}

Eigen::Map<DenseOp> as_matrix(State& x, int d) {
  return {reinterpret_cast<cplx*>(x.data()), d, d};
}

struct Diagonals {
  Eigen::VectorXd n, n_cavity, excited, top_cavity, top_motion;
};

Diagonals diagonals(const LindbladModel& m) {
  const int d = m.dim();
  const Truncation t = m.truncation();
  const int nc = t.cavity + 1, nm = t.motion + 1;
  Diagonals out{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d),
                Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d),
                Eigen::VectorXd::Zero(d)};
  for (int s = 0; s < 2; ++s)
    for (int c = 0; c < nc; ++c)
      for (int k = 0; k < nm; ++k) {
        const int i = (s * nc + c) * nm + k;
        out.n(i) = k;
        out.n_cavity(i) = c;
        out.excited(i) = s == pauli::kExcited ? 1.0 : 0.0;
        out.top_cavity(i) = c == t.cavity ? 1.0 : 0.0;
        out.top_motion(i) = k == t.motion ? 1.0 : 0.0;
      }
  return out;
}

Sample observe(const DenseOp& rho, double t, const Diagonals& diag) {
  Sample s;
  s.t = t;
  const Eigen::VectorXd pop = rho.diagonal().real();
  s.n = pop.dot(diag.n);
  s.n_cavity = pop.dot(diag.n_cavity);
  s.rho_ee = pop.dot(diag.excited);
  s.trace = rho.trace().real();
  s.top_cavity = pop.dot(diag.top_cavity);
  s.top_motion = pop.dot(diag.top_motion);
  s.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  const DenseOp herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseOp> es(herm, Eigen::EigenvaluesOnly);
  s.min_eigenvalue = es.eigenvalues().minCoeff();
  s.purity = (herm * herm).trace().real();
  return s;
}

// Real inner product tr(a^dag b); real for Hermitian a, b.
double inner(const DenseOp& a, const DenseOp& b) {
  return (a.array().conjugate() * b.array()).sum().real();
}

// Adaptive Krylov propagation of rho -> exp(L t) rho. L maps Hermitian
// operators to Hermitian operators, so the Arnoldi basis stays Hermitian and
// the Hessenberg matrix is real. Step control follows the usual a posteriori
// estimate from the augmented exponential.
class KrylovPropagator {
 public:
  KrylovPropagator(const LindbladModel& m, const EvolveOptions& opt, double span)
      : m_(m),
        mk_(std::max(opt.krylov_dim, 3)),
        tol_(opt.krylov_tol),
        min_step_(opt.min_step * span),
        basis_(mk_ + 1, DenseOp(m.dim(), m.dim())),
        p_(m.dim(), m.dim()),
        work_(m.dim()),
        tau_(1e-3 * std::min(span, 1.0)) {}

  long steps() const { return steps_; }

  void advance(DenseOp& w, double span) {
    double t = 0.0;
    while (t < span) {
      const double beta = w.norm();
      if (beta == 0.0) return;
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(mk_ + 2, mk_ + 2);
      basis_[0] = w / beta;
      int used = mk_;
      bool breakdown = false;
      for (int j = 0; j < mk_; ++j) {
        m_.apply_hermitian(basis_[j], p_, work_);
        for (int pass = 0; pass < 2; ++pass)
          for (int i = 0; i <= j; ++i) {
            const double h = inner(basis_[i], p_);
            H(i, j) += h;
            p_ -= h * basis_[i];
          }
        const double s = p_.norm();
        if (s < 1e-13 * beta) {
          used = j + 1;
          breakdown = true;
          break;
        }
        H(j + 1, j) = s;
        basis_[j + 1] = p_ / s;
      }
      double avnorm = 0.0;
      if (!breakdown) {
        H(mk_ + 1, mk_) = 1.0;
        m_.apply_hermitian(basis_[mk_], p_, work_);
        avnorm = p_.norm();
      }
      const int size = breakdown ? used : mk_ + 2;
      for (int attempt = 0;; ++attempt) {
        const double ts = std::min(tau_, span - t);
        const Eigen::MatrixXd F = (ts * H.topLeftCorner(size, size)).exp();
        double err = 0.0, order = 1.0;
        if (!breakdown) {
          const double p1 = beta * std::abs(F(mk_, 0));
          const double p2 = beta * std::abs(F(mk_ + 1, 0)) * avnorm;
          if (p1 > 10.0 * p2) {
            err = p2;
            order = 1.0 / mk_;
          } else if (p1 > p2) {
            err = p1 * p2 / (p1 - p2);
            order = 1.0 / mk_;
          } else {
            err = p1;
            order = 1.0 / (mk_ - 1);
          }
        }
        if (err <= 1.2 * ts * tol_) {
          const int terms = breakdown ? used : mk_ + 1;
          w.setZero();
          for (int i = 0; i < terms; ++i) w += (beta * F(i, 0)) * basis_[i];
          t += ts;
          ++steps_;
          const double grow =
              err > 0.0 ? 0.9 * std::pow(ts * tol_ / err, order) : 10.0;
          // A step clipped to the sampling grid keeps its earlier proposal.
          const double proposal = ts * std::min(grow, 10.0);
          tau_ = ts < tau_ ? std::max(tau_, proposal) : proposal;
          break;
        }
        tau_ = 0.9 * ts * std::pow(ts * tol_ / err, order);
        if (tau_ < min_step_ || attempt > 30) {
          std::ostringstream msg;
          msg << "Krylov step size collapsed to " << tau_ << " (dim " << m_.dim()
              << ", steps " << steps_ << ", error " << err << ")";
          throw std::runtime_error(msg.str());
        }
      }
    }
  }

 private:
  const LindbladModel& m_;
  int mk_;
  double tol_, min_step_;
  std::vector<DenseOp> basis_;
  DenseOp p_;
  LindbladModel::Workspace work_;
  double tau_;
  long steps_ = 0;
};

void evolve_dopri5(const LindbladModel& m, const DenseOp& rho0,
                   const std::vector<double>& t_grid, const EvolveOptions& opt,
                   const Diagonals& diag, Trajectory& traj) {
  namespace odeint = boost::numeric::odeint;
  const int d = m.dim();
  State x(2L * d * d);
  as_matrix(x, d) = rho0;
  LindbladModel::Workspace work(d);
  auto rhs = [&](const State& in, State& dxdt, double) {
    m.apply_hermitian(as_matrix(in, d), as_matrix(dxdt, d), work);
  };

  using Stepper = odeint::runge_kutta_dopri5<State>;
  auto stepper = odeint::make_dense_output(opt.abs_tol, opt.rel_tol, Stepper());
  const double t0 = t_grid.front(), t_end = t_grid.back();
  const double span = std::max(t_end - t0, 1.0);
  std::size_t next = 1;
  if (next >= t_grid.size()) return;
  stepper.initialize(x, t0, 1e-3 * std::min(span, 1.0));
  State obs(x.size());
  while (next < t_grid.size()) {
    const auto [from, to] = stepper.do_step(rhs);
    (void)from;
    ++traj.steps;
    while (next < t_grid.size() && t_grid[next] <= to) {
      stepper.calc_state(t_grid[next], obs);
      traj.samples.push_back(observe(as_matrix(obs, d), t_grid[next], diag));
      ++next;
    }
    if (stepper.current_time_step() < opt.min_step * span) {
      std::ostringstream msg;
      msg << "step size collapsed to " << stepper.current_time_step()
          << " at t=" << to << " (dim " << d << ", steps " << traj.steps
          << ", last n=" << traj.samples.back().n << ")";
      throw std::runtime_error(msg.str());
    }
  }
}

}  // namespace

Trajectory evolve(const LindbladModel& m, const DenseOp& rho0,
                  const std::vector<double>& t_grid, const EvolveOptions& opt) {
  if (t_grid.empty()) throw std::invalid_argument("empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("time grid must be strictly increasing");
  const int d = m.dim();
  if (rho0.rows() != d || rho0.cols() != d)
    throw std::invalid_argument("initial state has wrong dimension");

  const Diagonals diag = diagonals(m);
  Trajectory traj;
  traj.samples.reserve(t_grid.size());
  traj.samples.push_back(observe(rho0, t_grid.front(), diag));
  if (opt.method == Integrator::dopri5) {
    evolve_dopri5(m, rho0, t_grid, opt, diag, traj);
  } else {
    const double span = std::max(t_grid.back() - t_grid.front(), 1.0);
    KrylovPropagator prop(m, opt, span);
    DenseOp rho = rho0;
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
      prop.advance(rho, t_grid[i] - t_grid[i - 1]);
      traj.samples.push_back(observe(rho, t_grid[i], diag));
    }
    traj.steps = prop.steps();
  }

  Physicality& ph = traj.physicality;
  ph.min_eigenvalue = traj.samples.front().min_eigenvalue;
  for (const auto& s : traj.samples) {
    ph.trace_drift = std::max(ph.trace_drift, std::abs(s.trace - 1.0));
    ph.hermiticity = std::max(ph.hermiticity, s.hermiticity);
    ph.min_eigenvalue = std::min(ph.min_eigenvalue, s.min_eigenvalue);
    ph.top_cavity = std::max(ph.top_cavity, s.top_cavity);
    ph.top_motion = std::max(ph.top_motion, s.top_motion);
    ph.max_purity = std::max(ph.max_purity, s.purity);
  }
  return traj;
}

namespace {

struct FitData {
  std::vector<int> traj;
  std::vector<double> tau;
  std::vector<double> n;
  int count = 0;
};

// (1 - e^{-W tau}) / W, continuous at W = 0.
double relax(double W, double tau) {
  const double x = W * tau;
  if (std::abs(x) < 1e-8) return tau * (1.0 - 0.5 * x);
  return -std::expm1(-x) / W;
}

struct LinearFit {
  Eigen::VectorXd coef;  // intercepts then A_+
  Eigen::VectorXd residual;
};

LinearFit solve_linear(const FitData& data, double W) {
  const long rows = long(data.tau.size());
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(rows, data.count + 1);
  Eigen::VectorXd y(rows);
  for (long i = 0; i < rows; ++i) {
    X(i, data.traj[i]) = std::exp(-W * data.tau[i]);
    X(i, data.count) = relax(W, data.tau[i]);
    y(i) = data.n[i];
  }
  LinearFit out;
  out.coef = X.colPivHouseholderQr().solve(y);
  out.residual = X * out.coef - y;
  return out;
}

}  // namespace

FitResult fit_cooling(const std::vector<Trajectory>& trajectories,
                      double t_start) {
  if (trajectories.empty()) throw std::invalid_argument("no trajectories to fit");
  FitData data;
  data.count = int(trajectories.size());
  FitResult out;
  out.t_start = t_start;
  out.t_end = t_start;
  std::vector<double> slopes, means, backsteps;
  for (int k = 0; k < data.count; ++k) {
    std::vector<double> ts, ns;
    for (const auto& s : trajectories[k].samples) {
      if (s.t < t_start - 1e-12 * std::max(1.0, t_start)) continue;
      ts.push_back(s.t - t_start);
      ns.push_back(s.n);
      data.traj.push_back(k);
      data.tau.push_back(s.t - t_start);
      data.n.push_back(s.n);
    }
    if (ts.size() < 3)
      throw std::invalid_argument("fit window holds fewer than three samples");
    out.t_end = std::max(out.t_end, t_start + ts.back());
    out.swing = std::max(out.swing, std::abs(ns.back() - ns.front()));
    backsteps.push_back(0.0);
    const double dir = ns.back() >= ns.front() ? 1.0 : -1.0;
    for (std::size_t i = 1; i < ns.size(); ++i)
      backsteps.back() = std::max(backsteps.back(), -(ns[i] - ns[i - 1]) * dir);
    const double tm = std::accumulate(ts.begin(), ts.end(), 0.0) / ts.size();
    const double nm = std::accumulate(ns.begin(), ns.end(), 0.0) / ns.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      sxy += (ts[i] - tm) * (ns[i] - nm);
      sxx += (ts[i] - tm) * (ts[i] - tm);
    }
    slopes.push_back(sxy / sxx);
    means.push_back(nm);
  }

  const double T = out.t_end - t_start;
  double W_est = 0.0;
  if (data.count >= 2) {
    const auto lo = std::min_element(means.begin(), means.end()) - means.begin();
    const auto hi = std::max_element(means.begin(), means.end()) - means.begin();
    if (means[hi] > means[lo])
      W_est = -(slopes[hi] - slopes[lo]) / (means[hi] - means[lo]);
  }
  double half = std::max(0.5 * std::abs(W_est), 1e-3 / T);
  const auto rss = [&](double W) {
    return solve_linear(data, W).residual.squaredNorm();
  };
  double W = W_est;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const auto [w, f] = boost::math::tools::brent_find_minima(
        rss, W_est - half, W_est + half, 40);
    (void)f;
    W = w;
    const bool at_edge = std::abs(w - (W_est - half)) < 1e-6 * half ||
                         std::abs(w - (W_est + half)) < 1e-6 * half;
    if (!at_edge) break;
    W_est = w;
    half *= 4.0;
  }

  const LinearFit best = solve_linear(data, W);
  out.W = W;
  out.A_plus = best.coef(data.count);
  out.intercepts.assign(best.coef.data(), best.coef.data() + data.count);
  out.residual = best.residual.cwiseAbs().maxCoeff();
  if (W > 0.0)
    out.n0 = out.A_plus / W;
  else
    out.flags.emplace_back("net-heating");
  if (out.residual > 1e-3 * out.swing) out.flags.emplace_back("non-exponential");
  // Motional coherences left by the initial state ring at the trap frequency;
  // only reversals comparable to the fit tolerance count.
  if (*std::max_element(backsteps.begin(), backsteps.end()) > 1e-3 * out.swing)
    out.flags.emplace_back("non-monotone");
  return out;
}

double transient_time(const SystemParams& p) {
  double rate = p.kappa;
  try {
    const BlochSystem b = bloch_system(p);
    if (b.rates.tilde_gamma_N > 0.0) rate = std::min(rate, b.rates.tilde_gamma_N);
  } catch (const std::domain_error&) {
  }
  return rate > 0.0 ? 10.0 / rate : 10.0;
}

const OracleRun& ConvergenceRecord::best() const {
  if (runs.empty()) throw std::logic_error("empty convergence record");
  return certified ? runs[*certified] : runs.back();
}

OracleRun run_oracle(const SystemParams& p, Truncation t,
                     const SweepOptions& opt) {
  const LindbladModel model(p, t, opt.limits);
  const double t1 = transient_time(p);
  const double window = opt.window > 0.0 ? opt.window : 2.0 * t1;
  std::vector<double> grid;
  const int fit_samples = std::max(opt.samples, 3);
  const int lead = 10;
  for (int i = 0; i < lead; ++i) grid.push_back(t1 * i / lead);
  for (int i = 0; i < fit_samples; ++i)
    grid.push_back(t1 + window * i / (fit_samples - 1));

  OracleRun run;
  run.truncation = t;
  for (int n : opt.n_init) {
    Trajectory traj = evolve(model, model.initial_state(n), grid, opt.evolve);
    traj.n_init = n;
    run.trajectories.push_back(std::move(traj));
  }
  run.fit = fit_cooling(run.trajectories, t1);
  const long liouville = long(model.dim()) * model.dim();
  if (opt.null_vector && liouville <= 10000) {
    const DenseOp rho = model.steady_state();
    run.fit.n0_null_vector =
        (SpMat(model.motion_number()) * rho).trace().real();
  }
  return run;
}

std::vector<Truncation> default_schedule(const SystemParams& p,
                                         const std::vector<int>& n_init,
                                         int levels) {
  const double g_over_k = p.kappa > 0.0 ? p.g / p.kappa : 1.0;
  const int floor =
      2 + int(std::ceil(3.0 * p.N + 5.0 * g_over_k * g_over_k));
  const int cavity = std::max(floor, thermal_cutoff(p.N, 5e-7));
  const int top_init =
      n_init.empty() ? 0 : *std::max_element(n_init.begin(), n_init.end());
  const int motion = top_init + 5;
  const int step = p.N > 0.0 ? 2 : 1;
  std::vector<Truncation> out;
  for (int k = 0; k < levels; ++k) out.push_back({cavity + k * step, motion + k});
  return out;
}

ConvergenceRecord convergence_sweep(const SystemParams& p,
                                    const std::vector<Truncation>& schedule,
                                    const SweepOptions& opt) {
  if (schedule.empty()) throw std::invalid_argument("empty truncation schedule");
  ConvergenceRecord rec;
  const auto rel = [](double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
  };
  for (const Truncation& t : schedule) {
    rec.runs.push_back(run_oracle(p, t, opt));
    const std::size_t k = rec.runs.size() - 1;
    if (k == 0) continue;
    const FitResult& a = rec.runs[k - 1].fit;
    const FitResult& b = rec.runs[k].fit;
    const double dW = rel(a.W, b.W);
    const double dn = a.n0 && b.n0 ? rel(*a.n0, *b.n0) : rel(a.A_plus, b.A_plus);
    std::ostringstream note;
    note << "cavity " << t.cavity << " motion " << t.motion << ": dW=" << dW
         << " dn0=" << dn;
    rec.notes.push_back(note.str());
    if (dW < opt.rel_change && dn < opt.rel_change) {
      rec.converged = true;
      rec.certified = k;
      break;
    }
  }
  return rec;
}

PerturbativeRates perturbative_rates(const SystemParams& p) {
  p.validate();
  constexpr int nm = 3;
  constexpr int d = 2 * nm;
  using Op = Eigen::Matrix<cplx, d, d>;
  using Super = Eigen::Matrix<cplx, d * d, d * d>;

  const double Delta_H = cavicool::bare_detuning(p);
  const BCoefficients b(p.Omega, Delta_H, p.Delta_c, p.kappa);
  Eigen::Matrix<cplx, nm, nm> a = Eigen::Matrix<cplx, nm, nm>::Zero();
  for (int n = 1; n < nm; ++n) a(n - 1, n) = std::sqrt(double(n));
  const auto id_m = Eigen::Matrix<cplx, nm, nm>::Identity();
  const auto tls = [&](const Mat2& s, const Eigen::Matrix<cplx, nm, nm>& m) {
    Op out;
    out = Eigen::kroneckerProduct(s, m);
    return out;
  };
  const Mat2 sm = pauli::lowering(), id2 = Mat2::Identity();
  const Mat2 HI = -0.5 * Delta_H * pauli::sigma_z() + 0.5 * p.Omega * pauli::sigma_x();
  const Eigen::Matrix<cplx, nm, nm> x = a + a.adjoint();

  const auto sandwich = [](const Op& l, const Op& r) -> Super {
    Super s;
    s = Eigen::kroneckerProduct(r.transpose(), l);
    return s;
  };
  const Op one = Op::Identity();

  const auto generator = [&](double s) -> Super {
    const Op H = p.nu * tls(id2, a.adjoint() * a) + tls(HI, id_m) +
                 s * 0.5 * p.eta * p.Omega * tls(pauli::sigma_x(), x);
    const Op S = p.g * (tls(sm, id_m) + s * p.eta_c * tls(sm, x));
    const Op T = p.g * (tls(b.sigma_minus(0.0), id_m) +
                        s * p.eta_c * (tls(b.sigma_minus(p.nu), a) +
                                       tls(b.sigma_minus(-p.nu), a.adjoint())));
    const Op Sd = S.adjoint(), Td = T.adjoint();
    const double up = p.N + 1.0, down = p.N;
    Super L = cplx(0.0, -1.0) * sandwich(H, one) + cplx(0.0, 1.0) * sandwich(one, H);
    L += up * (sandwich(T, Sd) - sandwich(Sd * T, one));
    L += up * (sandwich(S, Td) - sandwich(one, Td * S));
    L += down * (sandwich(Td, S) - sandwich(S * Td, one));
    L += down * (sandwich(Sd, T) - sandwich(one, T * Sd));
    return L;
  };

  const Super L0 = generator(0.0);
  const Super Lp = generator(1.0), Lm = generator(-1.0);
  const Super L1 = 0.5 * (Lp - Lm);
  const Super L2 = 0.5 * (Lp + Lm) - L0;

  const InternalState ss = liouvillian_steady_state(internal_liouvillian(p));
  std::vector<int> coherent;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      if (i % nm != j % nm) coherent.push_back(i + d * j);
  const int nc = int(coherent.size());
  Eigen::MatrixXcd L0c(nc, nc);
  for (int r = 0; r < nc; ++r)
    for (int c = 0; c < nc; ++c) L0c(r, c) = L0(coherent[r], coherent[c]);
  const auto L0c_lu = L0c.partialPivLu();

  const auto rate = [&](int from, int to) {
    Op rho0 = Op::Zero();
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) rho0(s * nm + from, t * nm + from) = ss.rho(s, t);
    const Eigen::Matrix<cplx, d * d, 1> v0 = Eigen::Map<const Eigen::Matrix<cplx, d * d, 1>>(rho0.data());
    const Eigen::Matrix<cplx, d * d, 1> x1 = L1 * v0;
    Eigen::VectorXcd xc(nc);
    for (int r = 0; r < nc; ++r) xc(r) = x1(coherent[r]);
    const Eigen::VectorXcd yc = L0c_lu.solve(xc);
    Eigen::Matrix<cplx, d * d, 1> y = Eigen::Matrix<cplx, d * d, 1>::Zero();
    for (int r = 0; r < nc; ++r) y(coherent[r]) = yc(r);
    const Eigen::Matrix<cplx, d * d, 1> out = L2 * v0 - L1 * y;
    cplx total = 0.0;
    for (int s = 0; s < 2; ++s) {
      const int i = s * nm + to;
      total += out(i + d * i);
    }
    return total;
  };

  const cplx up = rate(0, 1), down = rate(1, 0);
  PerturbativeRates r;
  r.A_plus = up.real();
  r.A_minus = down.real();
  r.imag_residual = std::max(std::abs(up.imag()), std::abs(down.imag()));
  return r;
}

}  // namespace cavicool::oracle
