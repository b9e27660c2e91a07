#pragma once

#include "aglab/competitor.hpp"
#include "aglab/energy.hpp"
#include "aglab/fields.hpp"

namespace aglab {

struct MinimizeOptions {
  int max_iters = 500;
  double grad_tol = 1e-5;                 // stationarity threshold on |g|_2
  double boundary_penalty_weight = 1e3;   // lambda_b
  double armijo_c1 = 1e-4;
  int max_backtracks = 50;
  int restart_every = 50;
  enum class Seed { Competitor, Cone, Zero } seed = Seed::Competitor;
  double seed_beta = 0.0;  // 0: use 16*eps^2 (the tightest admissible scale)
  int seed_q = 24;
  int n_boundary_samples = 0;  // 0: auto from perimeter / (2h)

  void validate() const {
    if (!(boundary_penalty_weight > 0.0)) throw ValidationError("boundary penalty weight must be positive");
    if (!(grad_tol > 0.0)) throw ValidationError("grad_tol must be positive");
    if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
  }
};

struct IterationRecord {
  int iter = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  bool restarted = false;
};

struct MinimizeResult {
  ScalarField u;
  std::vector<IterationRecord> trace;
  bool converged = false;
  bool stalled = false;
  bool numerical_failure = false;        // NaN encountered; trace holds the partial log
  std::string failure_message;
  double final_energy = 0.0;
  double boundary_residual_value = 0.0;  // max |u| on boundary samples (extrapolated)
  double boundary_residual_grad = 0.0;   // max |grad u . eta - 1| on boundary samples
};

// Discrete objective: the Aviles-Giga energy on the shared quadrature plus a
// quadratic penalty enforcing the admissible-class trace conditions on
// boundary samples. The gradient is the exact adjoint of the forward stencils.
class DiscreteObjective {
 public:
  DiscreteObjective(const ConvexDomain& domain, MaskPtr dm, double eps, double lambda_b, int n_samples = 0)
      : dm_(std::move(dm)), eps_(eps), lambda_(lambda_b) {
    const GridSpec& g = dm_->spec;
    const int n = g.count();
    base_valid_.assign(n, 0);
    for (int k : dm_->dofs) base_valid_[k] = 1;

    // structural validity of derived fields (depends only on the mask)
    std::vector<double> zero(n, 0.0), tmp;
    dm_->dx.apply(zero, base_valid_, tmp, gx_ok_);
    dm_->dy.apply(zero, base_valid_, tmp, gy_ok_);
    std::vector<std::uint8_t> hxx_ok, hyy_ok, hxy1_ok, hxy2_ok;
    dm_->dx.apply(zero, gx_ok_, tmp, hxx_ok);
    dm_->dy.apply(zero, gy_ok_, tmp, hyy_ok);
    dm_->dy.apply(zero, gx_ok_, tmp, hxy1_ok);
    dm_->dx.apply(zero, gy_ok_, tmp, hxy2_ok);
    eval_ok_.assign(n, 0);
    for (int k = 0; k < n; ++k)
      eval_ok_[k] = gx_ok_[k] && gy_ok_[k] && hxx_ok[k] && hyy_ok[k] && hxy1_ok[k] && hxy2_ok[k];

    // boundary samples with interpolation blocks over derivative-valid nodes
    std::vector<std::uint8_t> deriv_ok(n, 0);
    for (int k = 0; k < n; ++k) deriv_ok[k] = gx_ok_[k] && gy_ok_[k];
    int ns = n_samples > 0 ? n_samples
                           : std::max(64, static_cast<int>(std::ceil(domain.perimeter() / (2.0 * g.h))));
    ds_ = domain.perimeter() / ns;
    for (const BoundarySample& bs : domain.boundary_samples(ns)) {
      Vec2 q = bs.point + bs.inward_normal * g.h;
      const int ic = static_cast<int>(std::lround((q.x - g.origin.x) / g.h));
      const int jc = static_cast<int>(std::lround((q.y - g.origin.y) / g.h));
      int bi = -1, bj = -1;
      for (int ring = 0; ring <= 3 && bi < 0; ++ring)
        for (int dj = -ring; dj <= ring && bi < 0; ++dj)
          for (int di = -ring; di <= ring; ++di) {
            if (std::max(std::abs(di), std::abs(dj)) != ring) continue;
            int ci = ic + di, cj = jc + dj;
            if (ci - 1 < 0 || ci + 1 >= g.nx || cj - 1 < 0 || cj + 1 >= g.ny) continue;
            bool ok = true;
            for (int oj = -1; oj <= 1 && ok; ++oj)
              for (int oi = -1; oi <= 1; ++oi)
                if (!deriv_ok[g.idx(ci + oi, cj + oj)]) {
                  ok = false;
                  break;
                }
            if (ok) {
              bi = ci;
              bj = cj;
              break;
            }
          }
      if (bi < 0) {
        ++dropped_samples_;
        continue;
      }
      PenaltySample ps;
      ps.normal = bs.inward_normal;
      const double tx = (q.x - (g.origin.x + g.h * bi)) / g.h;
      const double ty = (q.y - (g.origin.y + g.h * bj)) / g.h;
      auto L = [](double t, int k) {
        return k == 0 ? 0.5 * t * (t - 1.0) : (k == 1 ? 1.0 - t * t : 0.5 * t * (t + 1.0));
      };
      int c = 0;
      for (int oj = -1; oj <= 1; ++oj)
        for (int oi = -1; oi <= 1; ++oi, ++c) {
          ps.node[c] = g.idx(bi + oi, bj + oj);
          ps.w[c] = L(tx, oi + 1) * L(ty, oj + 1);
        }
      samples_.push_back(ps);
    }
    build_preconditioner();
  }

  // Diagonal of the state-independent quadratic part of the objective
  // (regularization stencils plus the boundary penalty, with an eikonal-scale
  // floor for the penalty term). Drives the preconditioned NCG directions.
  void build_preconditioner() {
    const DomainMask& dm = *dm_;
    const int n = dm.spec.count();
    const double cell = dm.spec.h * dm.spec.h;
    precond_.assign(n, 0.0);

    // expand a composed second-derivative row A(B(.)) at node k into (i, coeff)
    auto expand2 = [&](const FdOp& A, const FdOp& B, int k, std::vector<std::pair<int, double>>& out) {
      out.clear();
      for (int a = A.row_start[k]; a < A.row_start[k + 1]; ++a) {
        const int j = A.col[a];
        for (int b = B.row_start[j]; b < B.row_start[j + 1]; ++b) {
          const int i = B.col[b];
          const double cfs = A.coef[a] * B.coef[b];
          bool merged = false;
          for (auto& e : out)
            if (e.first == i) {
              e.second += cfs;
              merged = true;
              break;
            }
          if (!merged) out.emplace_back(i, cfs);
        }
      }
    };

    std::vector<std::pair<int, double>> row, row2;
    for (int k : dm.dofs) {
      if (!eval_ok_[k]) continue;
      const double c = dm.weight[k] * cell;
      expand2(dm.dx, dm.dx, k, row);
      for (auto& [i, a] : row) precond_[i] += c * eps_ * a * a;
      expand2(dm.dy, dm.dy, k, row);
      for (auto& [i, a] : row) precond_[i] += c * eps_ * a * a;
      // hxy = (Dy gx + Dx gy)/2, entering the energy with weight 2
      expand2(dm.dy, dm.dx, k, row);
      expand2(dm.dx, dm.dy, k, row2);
      for (auto& [i, a] : row2) {
        bool merged = false;
        for (auto& e : row)
          if (e.first == i) {
            e.second += a;
            merged = true;
            break;
          }
        if (!merged) row.emplace_back(i, a);
      }
      for (auto& [i, a] : row) precond_[i] += 2.0 * c * eps_ * sqr(0.5 * a);
      // eikonal-term floor at |grad u| ~ 1
      for (int a = dm.dx.row_start[k]; a < dm.dx.row_start[k + 1]; ++a)
        precond_[dm.dx.col[a]] += 2.0 * c / eps_ * sqr(dm.dx.coef[a]);
      for (int a = dm.dy.row_start[k]; a < dm.dy.row_start[k + 1]; ++a)
        precond_[dm.dy.col[a]] += 2.0 * c / eps_ * sqr(dm.dy.coef[a]);
    }

    // exact diagonal of the (affine-in-u) boundary penalty
    const double h = dm.spec.h;
    std::vector<std::pair<int, double>> gn_row;
    for (const PenaltySample& ps : samples_) {
      gn_row.clear();
      auto add = [&](int i, double v) {
        for (auto& e : gn_row)
          if (e.first == i) {
            e.second += v;
            return;
          }
        gn_row.emplace_back(i, v);
      };
      for (int c = 0; c < 9; ++c) {
        const int node = ps.node[c];
        for (int a = dm.dx.row_start[node]; a < dm.dx.row_start[node + 1]; ++a)
          add(dm.dx.col[a], ps.w[c] * dm.dx.coef[a] * ps.normal.x);
        for (int a = dm.dy.row_start[node]; a < dm.dy.row_start[node + 1]; ++a)
          add(dm.dy.col[a], ps.w[c] * dm.dy.coef[a] * ps.normal.y);
      }
      // rv = uq - h * gn, rg = gn - 1
      for (auto& [i, gni] : gn_row) {
        double rvi = -h * gni;
        precond_[i] += 2.0 * lambda_ * ds_ * (rvi * rvi + gni * gni);
      }
      for (int c = 0; c < 9; ++c) precond_[ps.node[c]] += 2.0 * lambda_ * ds_ * sqr(ps.w[c]);
    }

    double dmax = 0.0;
    for (int k : dm.dofs) dmax = std::max(dmax, precond_[k]);
    const double floor = std::max(dmax * 1e-8, 1e-300);
    for (int k = 0; k < n; ++k) precond_[k] = std::max(precond_[k], floor);
  }

  const std::vector<double>& preconditioner() const { return precond_; }

  const MaskPtr& mask() const { return dm_; }
  double lambda_b() const { return lambda_; }
  int dropped_samples() const { return dropped_samples_; }
  const std::vector<std::uint8_t>& eval_valid() const { return eval_ok_; }

  // Energy and its exact gradient with respect to node values.
  double energy_and_gradient(const std::vector<double>& u, std::vector<double>* grad) const {
    const DomainMask& dm = *dm_;
    const GridSpec& g = dm.spec;
    const int n = g.count();
    for (int k : dm.dofs)
      if (std::isnan(u[k])) throw NumericError("NaN field value at node " + std::to_string(k));

    std::vector<double> gx, gy, hxx, hyy, hxy1, hxy2;
    std::vector<std::uint8_t> dummy;
    dm.dx.apply(u, base_valid_, gx, dummy);
    dm.dy.apply(u, base_valid_, gy, dummy);
    dm.dx.apply(gx, gx_ok_, hxx, dummy);
    dm.dy.apply(gy, gy_ok_, hyy, dummy);
    dm.dy.apply(gx, gx_ok_, hxy1, dummy);
    dm.dx.apply(gy, gy_ok_, hxy2, dummy);

    const double cell = g.h * g.h;
    std::vector<double> terms;
    terms.reserve(dm.dofs.size() + samples_.size());
    std::vector<double> s_gx, s_gy, s_hxx, s_hyy, s_hxy;
    if (grad) {
      grad->assign(n, 0.0);
      s_gx.assign(n, 0.0);
      s_gy.assign(n, 0.0);
      s_hxx.assign(n, 0.0);
      s_hyy.assign(n, 0.0);
      s_hxy.assign(n, 0.0);
    }
    for (int k : dm.dofs) {
      if (!eval_ok_[k]) continue;
      const double c = dm.weight[k] * cell;
      const double hxy = 0.5 * (hxy1[k] + hxy2[k]);
      const double P = 1.0 - (gx[k] * gx[k] + gy[k] * gy[k]);
      const double F = hxx[k] * hxx[k] + 2.0 * hxy * hxy + hyy[k] * hyy[k];
      terms.push_back(c * (0.5 / eps_ * P * P + 0.5 * eps_ * F));
      if (grad) {
        const double dP = c / eps_ * P;  // d/dP of c * P^2/(2 eps)
        s_gx[k] += dP * (-2.0 * gx[k]);
        s_gy[k] += dP * (-2.0 * gy[k]);
        s_hxx[k] += c * eps_ * hxx[k];
        s_hyy[k] += c * eps_ * hyy[k];
        s_hxy[k] += c * eps_ * 2.0 * hxy;
      }
    }

    // boundary penalty: (u(p))^2 + (grad u . eta - 1)^2 on boundary samples,
    // with u(p) estimated as u(q) - h * (grad u . eta)(q), q = p + h eta
    std::vector<double> s_gx_pen, s_gy_pen;
    if (grad) {
      s_gx_pen.assign(n, 0.0);
      s_gy_pen.assign(n, 0.0);
    }
    const double h = g.h;
    for (const PenaltySample& ps : samples_) {
      double uq = 0.0, gn = 0.0;
      for (int c = 0; c < 9; ++c) {
        uq += ps.w[c] * u[ps.node[c]];
        gn += ps.w[c] * (gx[ps.node[c]] * ps.normal.x + gy[ps.node[c]] * ps.normal.y);
      }
      const double rv = uq - h * gn;   // boundary value residual
      const double rg = gn - 1.0;      // trace-gradient residual
      terms.push_back(lambda_ * ds_ * (rv * rv + rg * rg));
      if (grad) {
        const double av = 2.0 * lambda_ * ds_ * rv;
        const double ag = 2.0 * lambda_ * ds_ * rg;
        for (int c = 0; c < 9; ++c) {
          (*grad)[ps.node[c]] += av * ps.w[c];
          const double gsens = (ag - av * h) * ps.w[c];
          s_gx_pen[ps.node[c]] += gsens * ps.normal.x;
          s_gy_pen[ps.node[c]] += gsens * ps.normal.y;
        }
      }
    }

    if (grad) {
      // backprop hessian sensitivities into gradient-field sensitivities
      std::vector<double> t1(n, 0.0), t2(n, 0.0), t3(n, 0.0), t4(n, 0.0);
      dm.dx.apply_transpose(s_hxx, eval_ok_, t1);
      dm.dy.apply_transpose(s_hyy, eval_ok_, t2);
      std::vector<double> half_xy(n, 0.0);
      for (int k = 0; k < n; ++k) half_xy[k] = 0.5 * s_hxy[k];
      dm.dy.apply_transpose(half_xy, eval_ok_, t3);
      dm.dx.apply_transpose(half_xy, eval_ok_, t4);
      for (int k = 0; k < n; ++k) {
        s_gx[k] += t1[k] + t3[k] + s_gx_pen[k];
        s_gy[k] += t2[k] + t4[k] + s_gy_pen[k];
      }
      std::vector<std::uint8_t> all_gx(n, 0), all_gy(n, 0);
      for (int k = 0; k < n; ++k) {
        all_gx[k] = gx_ok_[k];
        all_gy[k] = gy_ok_[k];
      }
      dm.dx.apply_transpose(s_gx, all_gx, *grad);
      dm.dy.apply_transpose(s_gy, all_gy, *grad);
    }
    return pairwise_sum(terms);
  }

  // residuals of the trace conditions at the penalty samples
  std::pair<double, double> boundary_residuals(const std::vector<double>& u) const {
    const DomainMask& dm = *dm_;
    std::vector<double> gx, gy;
    std::vector<std::uint8_t> dummy;
    dm.dx.apply(u, base_valid_, gx, dummy);
    dm.dy.apply(u, base_valid_, gy, dummy);
    double rv = 0.0, rg = 0.0;
    const double h = dm.spec.h;
    for (const PenaltySample& ps : samples_) {
      double uq = 0.0, gn = 0.0;
      for (int c = 0; c < 9; ++c) {
        uq += ps.w[c] * u[ps.node[c]];
        gn += ps.w[c] * (gx[ps.node[c]] * ps.normal.x + gy[ps.node[c]] * ps.normal.y);
      }
      rv = std::max(rv, std::abs(uq - h * gn));
      rg = std::max(rg, std::abs(gn - 1.0));
    }
    return {rv, rg};
  }

 private:
  struct PenaltySample {
    int node[9];
    double w[9];
    Vec2 normal;
  };

  MaskPtr dm_;
  double eps_;
  double lambda_;
  double ds_ = 0.0;
  int dropped_samples_ = 0;
  std::vector<PenaltySample> samples_;
  std::vector<std::uint8_t> base_valid_, gx_ok_, gy_ok_, eval_ok_;
  std::vector<double> precond_;
};

// Polak-Ribiere nonlinear conjugate gradient with Armijo backtracking and
// periodic restarts. Accepted iterates have nonincreasing energy.
inline MinimizeResult minimize_field(const ConvexDomain& domain, double eps, const MinimizeOptions& opts,
                                     double h, const ScalarField* seed = nullptr, int threads = 1) {
  opts.validate();
  if (h > eps / 4.0 + 1e-15) throw ValidationError("minimize needs h <= eps/4");

  ScalarField u0 = [&]() -> ScalarField {
    if (seed) return *seed;
    const double beta = opts.seed_beta > 0.0 ? opts.seed_beta : 16.0 * eps * eps;
    switch (opts.seed) {
      case MinimizeOptions::Seed::Competitor:
        return build_competitor(domain, CompetitorParams(eps, beta, opts.seed_q), h, threads);
      case MinimizeOptions::Seed::Cone: {
        MaskPtr dm = rasterize(domain, h, threads);
        ScalarField d = ScalarField::sample(dm, [&](Vec2 p) { return domain.signed_distance(p); }, threads);
        // same regime guard as build_competitor: the cap is skipped when its
        // offset is nonpositive
        return (1.0 - 10.0 * std::pow(beta, 3.0 / 32.0) > 0.0) ? cone_cap(d, beta) : d;
      }
      default:
        return ScalarField::zeros(rasterize(domain, h, threads));
    }
  }();

  DiscreteObjective obj(domain, u0.dm, eps, opts.boundary_penalty_weight, opts.n_boundary_samples);
  const int n = u0.dm->spec.count();
  const std::vector<double>& M = obj.preconditioner();
  std::vector<double> x = u0.v;
  std::vector<double> g(n, 0.0), z(n, 0.0), zprev, gprev, dir(n, 0.0);

  MinimizeResult result;
  result.u = u0;
  double E = obj.energy_and_gradient(x, &g);
  auto refresh_z = [&]() {
    double s = 0.0;
    for (int k : u0.dm->dofs) {
      z[k] = g[k] / M[k];
      s += g[k] * g[k];
    }
    return std::sqrt(s);
  };
  double gn = refresh_z();

  try {
    for (int it = 0; it < opts.max_iters; ++it) {
      bool restarted = false;
      double gd = 0.0;
      if (it == 0 || (opts.restart_every > 0 && it % opts.restart_every == 0)) {
        restarted = true;
      } else {
        // preconditioned Polak-Ribiere
        double num = 0.0, den = 0.0;
        for (int k : u0.dm->dofs) {
          num += g[k] * (z[k] - zprev[k]);
          den += gprev[k] * zprev[k];
        }
        double beta_pr = std::max(0.0, num / std::max(den, 1e-300));
        for (int k : u0.dm->dofs) {
          dir[k] = -z[k] + beta_pr * dir[k];
          gd += g[k] * dir[k];
        }
        if (!(gd < 0.0)) restarted = true;
      }
      if (restarted) {
        gd = 0.0;
        for (int k = 0; k < n; ++k) dir[k] = -z[k];
        for (int k : u0.dm->dofs) gd += g[k] * dir[k];
      }

      // quadratic model along the direction fixes the step scale, then Armijo
      std::vector<double> xt(n, 0.0);
      double t = 1.0;
      {
        const double tau = 1.0;
        for (int k = 0; k < n; ++k) xt[k] = x[k] + tau * dir[k];
        double Etrial = obj.energy_and_gradient(xt, nullptr);
        double curv = 2.0 * (Etrial - E - tau * gd) / (tau * tau);
        if (std::isfinite(curv) && curv > 0.0) t = clamp(-gd / curv, 1e-6 * tau, 1e6 * tau);
      }
      double Et = 0.0;
      bool accepted = false;
      for (int bt = 0; bt < opts.max_backtracks; ++bt) {
        for (int k = 0; k < n; ++k) xt[k] = x[k] + t * dir[k];
        Et = obj.energy_and_gradient(xt, nullptr);
        if (std::isfinite(Et) && Et <= E + opts.armijo_c1 * t * gd) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      result.trace.push_back({it, E, gn, accepted ? t : 0.0, restarted});
      if (!accepted) {
        result.stalled = true;
        break;
      }
      x.swap(xt);
      gprev = g;
      zprev = z;
      E = Et;
      obj.energy_and_gradient(x, &g);
      gn = refresh_z();
      if (gn <= opts.grad_tol) {
        result.converged = true;
        result.trace.push_back({static_cast<int>(result.trace.size()), E, gn, 0.0, false});
        break;
      }
    }
  } catch (const NumericError& e) {
    result.numerical_failure = true;
    result.failure_message = e.what();
  }

  result.u.v = x;
  result.final_energy = E;
  if (!result.numerical_failure) {
    auto [rv, rg] = obj.boundary_residuals(x);
    result.boundary_residual_value = rv;
    result.boundary_residual_grad = rg;
  }
  return result;
}

}  // namespace aglab
