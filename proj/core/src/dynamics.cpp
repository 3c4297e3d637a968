#include "gqt/dynamics.hpp"

#include <cmath>
#include <limits>

namespace gqt {

// ---------------------------------------------------------------------------
// Schedule

Schedule Schedule::constant(double lambda) { return Schedule(Shape::constant, lambda, lambda); }

Schedule Schedule::linear(double lambda_i, double lambda_f) {
  return Schedule(Shape::linear, lambda_i, lambda_f);
}

Schedule Schedule::sudden(double lambda_i, double lambda_f) {
  return Schedule(Shape::sudden, lambda_i, lambda_f);
}

double Schedule::value(double s) const {
  switch (shape_) {
    case Shape::constant:
      return lambda_i_;
    case Shape::linear:
      return lambda_i_ + (lambda_f_ - lambda_i_) * s;
    case Shape::sudden:
      return s > 0.0 ? lambda_f_ : lambda_i_;
  }
  return lambda_i_;
}

double Schedule::rate(double) const {
  return shape_ == Shape::linear ? lambda_f_ - lambda_i_ : 0.0;
}

Schedule::Shape parse_schedule_shape(const std::string& name) {
  if (name == "constant") return Schedule::Shape::constant;
  if (name == "linear") return Schedule::Shape::linear;
  if (name == "sudden") return Schedule::Shape::sudden;
  throw DomainError("unknown schedule '" + name + "' (expected constant | linear | sudden)");
}

const char* to_string(Schedule::Shape shape) {
  switch (shape) {
    case Schedule::Shape::constant:
      return "constant";
    case Schedule::Shape::linear:
      return "linear";
    case Schedule::Shape::sudden:
      return "sudden";
  }
  return "constant";
}

// ---------------------------------------------------------------------------
// Protocol

Protocol::Protocol(HermitianObservable h0_, HermitianObservable v_, Schedule schedule_,
                   double duration_, std::size_t n_steps_)
    : h0(std::move(h0_)), v(std::move(v_)), schedule(schedule_), duration(duration_), n_steps(n_steps_) {
  if (h0.dim() != v.dim()) throw DomainError("protocol: H0 and V dimensions differ");
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw DomainError("protocol duration must be >= 0");
  if (n_steps < 1) throw DomainError("protocol needs n_steps >= 1");
  if (!std::isfinite(schedule.initial()) || !std::isfinite(schedule.final())) {
    throw DomainError("schedule endpoints must be finite");
  }
}

HermitianObservable Protocol::hamiltonian(double lambda) const { return h0 + v.scaled(lambda); }

Protocol Protocol::with_step(double dt) const {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  Protocol p = *this;
  p.n_steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(duration / dt)));
  return p;
}

HermitianObservable HamiltonianFamily::at(double lambda) const { return h0 + v.scaled(lambda); }

namespace {

// Precomputed half-step propagators and work weights shared by every
// trajectory of a protocol.
struct StepPlan {
  std::size_t n_steps;
  double dt;
  std::vector<CMatrix> half;     // exp(-i H(λ_mid) dt / 2) per step (one entry if λ_mid is fixed)
  std::vector<double> weight;    // λ'(s_mid) ds per step
  CMatrix v;
  double jump = 0.0;             // λ_f - λ_i applied at s = 0 (sudden only)

  const CMatrix& half_step(std::size_t k) const { return half.size() == 1 ? half.front() : half[k]; }
};

StepPlan make_plan(const Protocol& p) {
  StepPlan plan;
  plan.n_steps = p.n_steps;
  const double ds = 1.0 / static_cast<double>(p.n_steps);
  plan.dt = p.duration * ds;
  plan.v = p.v.matrix();
  plan.weight.assign(p.n_steps, 0.0);
  const Schedule& sch = p.schedule;
  if (sch.shape() == Schedule::Shape::linear) {
    plan.half.reserve(p.n_steps);
    for (std::size_t k = 0; k < p.n_steps; ++k) {
      const double s_mid = (static_cast<double>(k) + 0.5) * ds;
      plan.half.push_back(HamiltonianSystem(p.hamiltonian(sch.value(s_mid))).propagator(0.5 * plan.dt));
      plan.weight[k] = sch.rate(s_mid) * ds;
    }
  } else {
    plan.half.push_back(HamiltonianSystem(p.hamiltonian(sch.final())).propagator(0.5 * plan.dt));
    if (sch.shape() == Schedule::Shape::sudden) plan.jump = sch.final() - sch.initial();
  }
  return plan;
}

template <class Visitor>
double run_plan(const StepPlan& plan, const CVector& z0, Visitor&& on_step) {
  CVector psi = z0;
  double work = 0.0;
  if (plan.jump != 0.0) work += plan.jump * quadratic_form(plan.v, psi);
  for (std::size_t k = 0; k < plan.n_steps; ++k) {
    const CMatrix& u = plan.half_step(k);
    CVector mid = u * psi;
    if (plan.weight[k] != 0.0) work += plan.weight[k] * quadratic_form(plan.v, mid);
    psi.noalias() = u * mid;
    on_step(k, psi);
  }
  return work;
}

}  // namespace

// ---------------------------------------------------------------------------
// Evolution

TrajectoryRecord evolve(const HamiltonianSystem& sys, const ProjectiveState& z0, double duration,
                        double dt) {
  if (sys.dim() != z0.dim()) throw DomainError("evolve: dimension mismatch");
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw DomainError("evolve: duration must be >= 0");
  if (!(dt > 0.0)) throw DomainError("evolve: time step must be positive");
  if (duration > 0.0 && dt > duration * (1.0 + 1e-12)) throw DomainError("evolve: dt exceeds duration");
  const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(duration / dt)));
  const double step = duration / static_cast<double>(n);
  const CMatrix u = sys.propagator(step);

  TrajectoryRecord rec;
  rec.times.reserve(n + 1);
  rec.states.reserve(n + 1);
  rec.times.push_back(0.0);
  rec.states.push_back(z0);
  CVector psi = z0.amplitudes();
  for (std::size_t k = 1; k <= n; ++k) {
    psi = u * psi;
    rec.times.push_back(duration * static_cast<double>(k) / static_cast<double>(n));
    rec.states.push_back(ProjectiveState::from_amplitudes(psi));
  }
  return rec;
}

TrajectoryRecord evolve(const HermitianObservable& h, const ProjectiveState& z0, double duration,
                        double dt) {
  return evolve(HamiltonianSystem(h), z0, duration, dt);
}

TrajectoryRecord evolve_driven(const Protocol& p, const ProjectiveState& z0) {
  if (p.h0.dim() != z0.dim()) throw DomainError("evolve_driven: dimension mismatch");
  const StepPlan plan = make_plan(p);
  TrajectoryRecord rec;
  rec.times.reserve(p.n_steps + 1);
  rec.states.reserve(p.n_steps + 1);
  rec.times.push_back(0.0);
  rec.states.push_back(z0);
  rec.work = run_plan(plan, z0.amplitudes(), [&](std::size_t k, const CVector& psi) {
    rec.times.push_back(p.duration * static_cast<double>(k + 1) / static_cast<double>(p.n_steps));
    rec.states.push_back(ProjectiveState::from_amplitudes(psi));
  });
  return rec;
}

TrajectoryRecord evolve_driven(const Protocol& p, const ProjectiveState& z0, double dt) {
  return evolve_driven(p.with_step(dt), z0);
}

double driven_work(const Protocol& p, const ProjectiveState& z0) {
  if (p.h0.dim() != z0.dim()) throw DomainError("driven_work: dimension mismatch");
  return run_plan(make_plan(p), z0.amplitudes(), [](std::size_t, const CVector&) {});
}

double trajectory_work(const TrajectoryRecord& rec, const Protocol& p) {
  if (rec.states.size() != p.n_steps + 1 || rec.times.size() != p.n_steps + 1) {
    throw DomainError("trajectory record has " + std::to_string(rec.states.size()) +
                      " grid points; protocol expects " + std::to_string(p.n_steps + 1));
  }
  if (std::abs(rec.times.back() - p.duration) > 1e-12 * std::max(1.0, p.duration) ||
      rec.times.front() != 0.0) {
    throw DomainError("trajectory record time grid does not match the protocol duration");
  }
  if (rec.states.front().dim() != p.h0.dim()) throw DomainError("trajectory/protocol dimension mismatch");
  const StepPlan plan = make_plan(p);
  double work = 0.0;
  if (plan.jump != 0.0) work += plan.jump * quadratic_form(plan.v, rec.states.front().amplitudes());
  for (std::size_t k = 0; k < plan.n_steps; ++k) {
    if (plan.weight[k] == 0.0) continue;
    const CVector mid = plan.half_step(k) * rec.states[k].amplitudes();
    work += plan.weight[k] * quadratic_form(plan.v, mid);
  }
  return work;
}

// ---------------------------------------------------------------------------
// Jarzynski experiment

JarzynskiReport jarzynski_experiment(const Protocol& p, double beta, const SamplerConfig& cfg, double dt) {
  return jarzynski_experiment(p.with_step(dt), beta, cfg);
}

JarzynskiReport jarzynski_experiment(const Protocol& p, double beta, const SamplerConfig& cfg) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("Jarzynski experiment needs beta > 0");
  const HamiltonianSystem initial(p.hamiltonian(p.schedule.initial()));
  const HamiltonianSystem final_sys(p.hamiltonian(p.schedule.final()));
  const double log_qi = log_partition_function(initial, beta);
  const double log_qf = log_partition_function(final_sys, beta);

  const CanonicalBatch batch = sample_canonical(initial, beta, cfg);
  const StepPlan plan = make_plan(p);

  auto parts = run_streams<std::vector<double>>(cfg, [&](std::size_t, StreamRange r, Engine&) {
    std::vector<double> w;
    w.reserve(r.end - r.begin);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      w.push_back(run_plan(plan, batch.states[i].amplitudes(), [](std::size_t, const CVector&) {}));
    }
    return w;
  });

  JarzynskiReport rep;
  rep.works.reserve(cfg.n_samples);
  for (auto& part : parts) rep.works.insert(rep.works.end(), part.begin(), part.end());
  rep.n_trajectories = rep.works.size();
  rep.acceptance_rate = batch.acceptance_rate;

  // Shifted exponent keeps e^{-β(W - W_min)} in range; moments are rescaled after.
  double w_min = std::numeric_limits<double>::infinity();
  for (double w : rep.works) w_min = std::min(w_min, w);
  double mean_x = 0.0, m2_x = 0.0, mean_w = 0.0, m2_w = 0.0;
  std::size_t n = 0;
  for (double w : rep.works) {
    ++n;
    const double x = std::exp(-beta * (w - w_min));
    const double dx = x - mean_x;
    mean_x += dx / static_cast<double>(n);
    m2_x += dx * (x - mean_x);
    const double dw = w - mean_w;
    mean_w += dw / static_cast<double>(n);
    m2_w += dw * (w - mean_w);
  }
  const double nn = static_cast<double>(n);
  const double scale = std::exp(-beta * w_min);
  rep.mean_exp_neg_beta_W = scale * mean_x;
  rep.std_error = n > 1 ? scale * std::sqrt(m2_x / (nn - 1.0) / nn) : 0.0;
  rep.mean_W = mean_w;
  rep.mean_W_std_error = n > 1 ? std::sqrt(m2_w / (nn - 1.0) / nn) : 0.0;
  rep.delta_F_closed_form = -(log_qf - log_qi) / beta;
  rep.exp_neg_beta_delta_F = std::exp(log_qf - log_qi);

  const double diff = std::abs(rep.mean_exp_neg_beta_W - rep.exp_neg_beta_delta_F);
  if (rep.std_error > 0.0) {
    rep.discrepancy_sigma = diff / rep.std_error;
  } else {
    rep.discrepancy_sigma = diff <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  rep.second_law_holds = rep.mean_W >= rep.delta_F_closed_form - 3.0 * rep.mean_W_std_error - 1e-12;
  return rep;
}

// ---------------------------------------------------------------------------
// First Law

FirstLawReport first_law_check(const HamiltonianFamily& family, double beta, double lambda0,
                               double dlambda) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("first-law check needs beta > 0");
  if (!(dlambda > 0.0) || !std::isfinite(dlambda)) throw DomainError("first-law check needs dlambda > 0");
  if (family.h0.dim() != family.v.dim()) throw DomainError("family: H0 and V dimensions differ");
  const HamiltonianSystem minus(family.at(lambda0 - dlambda));
  const HamiltonianSystem centre(family.at(lambda0));
  const HamiltonianSystem plus(family.at(lambda0 + dlambda));
  const ThermoReport tm = thermo_report(minus, beta);
  const ThermoReport tp = thermo_report(plus, beta);
  // Validates the centre spectrum as well.
  const CMatrix rho0 = geometric_density_matrix(centre, beta);
  const CMatrix rho_m = geometric_density_matrix(minus, beta);
  const CMatrix rho_p = geometric_density_matrix(plus, beta);

  FirstLawReport r;
  r.dlambda = 2.0 * dlambda;
  r.dU = tp.U - tm.U;
  r.dF = tp.F - tm.F;
  r.dHq = tp.Hq - tm.Hq;
  r.dW = std::real((rho0 * family.v.matrix()).trace()) * r.dlambda;
  r.dQ = std::real(((rho_p - rho_m) * centre.observable().matrix()).trace());
  r.residual_energy = std::abs(r.dU - (r.dW + r.dQ)) / r.dlambda;
  r.residual_free = std::abs(r.dF - r.dW) / r.dlambda;
  r.residual_entropy = std::abs(r.dHq - beta * r.dQ) / r.dlambda;
  return r;
}

}  // namespace gqt
