#include "driftlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "driftlab/error.hpp"
#include "driftlab/parallel.hpp"
#include "driftlab/quadrature.hpp"
#include "driftlab/spatial.hpp"

namespace driftlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Weighted samples (w, |f|) representing the measure |f| dx.
struct Samples {
  std::vector<double> w;
  std::vector<double> v;
  double vmax = 0.0;
};

Samples samples_of(const ScalarField& f) {
  const Mesh& m = *f.mesh();
  Samples s;
  if (f.layout() == Layout::Cell) {
    s.w.resize(m.num_cells());
    s.v.resize(m.num_cells());
    for (std::size_t k = 0; k < m.num_cells(); ++k) {
      s.w[k] = m.volume(k);
      s.v[k] = std::abs(f[k]);
    }
  } else {
    const auto& rule = high_order_rule(m.dim());
    const std::size_t nq = rule.weights.size();
    s.w.resize(m.num_cells() * nq);
    s.v.resize(m.num_cells() * nq);
    for (std::size_t k = 0; k < m.num_cells(); ++k)
      for (std::size_t q = 0; q < nq; ++q) {
        s.w[k * nq + q] = m.volume(k) * rule.weights[q];
        s.v[k * nq + q] = std::abs(f.eval(k, rule.bary[q]));
      }
  }
  for (double x : s.v) s.vmax = std::max(s.vmax, x);
  return s;
}

// log int |f|^p
double log_moment(const Samples& s, double p) {
  if (s.vmax == 0.0) return -kInf;
  double sum = 0.0;
  for (std::size_t i = 0; i < s.v.size(); ++i)
    if (s.v[i] > 0.0) sum += s.w[i] * std::pow(s.v[i] / s.vmax, p);
  return p * std::log(s.vmax) + std::log(sum);
}

double omega(int n) { return n == 2 ? std::numbers::pi : 4.0 * std::numbers::pi / 3.0; }

std::vector<double> abs_cell_values(const ScalarField& f) {
  const Mesh& m = *f.mesh();
  std::vector<double> v(m.num_cells());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::abs(f.cell_mean(k));
  return v;
}

double ratio(double coarse, double fine) {
  if (coarse == fine) return 1.0;
  if (coarse <= 0.0) return fine > 0.0 ? kInf : 1.0;
  return fine / coarse;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict refinement_verdict(double coarse, double fine, const Refinement& rule) {
  if (!std::isfinite(fine)) return Verdict::Fails;
  const double r = ratio(coarse, fine);
  if (r >= rule.diverge) return Verdict::Fails;
  if (r <= rule.stable) return Verdict::Holds;
  return Verdict::Inconclusive;
}

double lp_modular(const ScalarField& f, double p) {
  require(p >= 1.0 && std::isfinite(p), "Lp exponent must satisfy 1 <= p < inf");
  return std::exp(log_moment(samples_of(f), p));
}

double lp_norm(const ScalarField& f, double p) {
  require(p >= 1.0 && std::isfinite(p), "Lp exponent must satisfy 1 <= p < inf");
  const double lm = log_moment(samples_of(f), p);
  return std::isfinite(lm) ? std::exp(lm / p) : 0.0;
}

double sup_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

GrowthEstimate growth_limit(const std::vector<ScalarField>& ladder, double p_max, double stability) {
  require(!ladder.empty(), "growth_limit needs at least one level");
  require(p_max >= 16.0, "p_max must be >= 16");
  GrowthEstimate est;
  const Samples fine = samples_of(ladder.back());
  const bool has_coarse = ladder.size() >= 2;
  const Samples coarse = has_coarse ? samples_of(ladder[ladder.size() - 2]) : Samples{};
  std::vector<std::pair<double, double>> resolved;  // (p, q)
  for (double p = 8.0; p <= p_max * (1 + 1e-12); p *= 2.0) {
    const double lf = log_moment(fine, p);
    const double nf = std::isfinite(lf) ? std::exp(lf / p) : 0.0;
    est.samples.emplace_back(p, nf);
    bool stable = true;
    if (has_coarse) {
      const double lc = log_moment(coarse, p);
      const double nc = std::isfinite(lc) ? std::exp(lc / p) : 0.0;
      stable = std::abs(ratio(nc, nf) - 1.0) <= stability;
    }
    if (stable) {
      est.resolved.push_back(p);
      resolved.emplace_back(p, nf / p);
    }
  }
  if (resolved.empty()) {
    est.limit = kInf;
  } else if (resolved.size() == 1) {
    est.limit = resolved[0].second;
  } else {
    const auto [p1, q1] = resolved[resolved.size() - 2];
    const auto [p2, q2] = resolved.back();
    est.limit = std::max(0.0, (p2 * q2 - p1 * q1) / (p2 - p1));
  }
  return est;
}

double growth_limit(const ScalarField& f, double p_max) {
  return growth_limit(std::vector<ScalarField>{f}, p_max).limit;
}

double log_exp_integral(const ScalarField& f, double gamma) {
  const Samples s = samples_of(f);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.v.size(); ++i) sum += s.w[i] * std::exp(gamma * (s.v[i] - s.vmax));
  return gamma * s.vmax + std::log(sum);
}

GammaEstimate exp_gamma_star(const ScalarField& coarse, const ScalarField& fine, double tau) {
  GammaEstimate est;
  const Samples c = samples_of(coarse);
  const Samples f = samples_of(fine);
  est.sup_growth = f.vmax - c.vmax;
  if (est.sup_growth <= 0.02 * std::max(f.vmax, 1.0)) {
    est.gamma_star = kInf;
    return est;
  }
  auto log_v = [](const Samples& s, double g) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.v.size(); ++i) sum += s.w[i] * std::exp(g * (s.v[i] - s.vmax));
    return g * s.vmax + std::log(sum);
  };
  auto growth = [&](double g) { return (log_v(f, g) - log_v(c, g)) / est.sup_growth; };
  double lo = 0.0, hi = 1.0;
  if (growth(lo) >= tau) {
    est.gamma_star = 0.0;
    return est;
  }
  while (growth(hi) < tau) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e4) {
      est.gamma_star = kInf;
      return est;
    }
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (growth(mid) < tau ? lo : hi) = mid;
  }
  est.gamma_star = lo;
  return est;
}

int bmo_max_depth(const Mesh& mesh) {
  const double side = mesh.domain().is_round() ? 2.0 : 1.0;
  int d = 0;
  while (side * std::ldexp(1.0, -(d + 1)) >= 2.0 * mesh.h()) ++d;
  return d;
}

BmoResult bmo_norm(const ScalarField& f, int max_depth) {
  const Mesh& m = *f.mesh();
  require(max_depth >= 0, "max_depth must be >= 0");
  const int allowed = bmo_max_depth(m);
  if (max_depth > allowed)
    fail_validation("max_depth " + std::to_string(max_depth) +
                    " exceeds the mesh resolution (cube side would fall below 2h; largest "
                    "admissible depth is " +
                    std::to_string(allowed) + ")");
  const int dim = m.dim();
  const Domain& dom = m.domain();
  const Point lo = dom.box_lo();
  const double side0 = dom.is_round() ? 2.0 : 1.0;
  const std::size_t nc = m.num_cells();
  std::vector<Point> cen(nc);
  std::vector<double> val(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    cen[k] = m.centroid(k);
    val[k] = f.cell_mean(k);
  }
  BmoResult res;
  double running = 0.0;
  for (int depth = 0; depth <= max_depth; ++depth) {
    const double s = side0 * std::ldexp(1.0, -depth);
    const int n = 1 << depth;
    const int span = n + 2;  // indices -1 .. n
    std::size_t ncubes = 1;
    for (int d = 0; d < dim; ++d) ncubes *= span;
    double best = 0.0;
    const int nshift = dim == 2 ? 9 : 27;
    for (int sh = 0; sh < nshift; ++sh) {
      Point off{};
      int code = sh;
      for (int d = 0; d < dim; ++d) {
        off[d] = 0.5 * s * ((code % 3) - 1);
        code /= 3;
      }
      // cube index per axis for centroid coordinate
      auto index_of = [&](const Point& x, std::size_t& flat) {
        flat = 0;
        for (int d = dim - 1; d >= 0; --d) {
          const int i = static_cast<int>(std::floor((x[d] - lo[d] - off[d]) / s));
          if (i < -1 || i > n) return false;
          flat = flat * span + (i + 1);
        }
        return true;
      };
      std::vector<std::uint8_t> valid(ncubes, 0);
      for (std::size_t c = 0; c < ncubes; ++c) {
        std::size_t rem = c;
        Point clo{};
        for (int d = 0; d < dim; ++d) {
          const int i = static_cast<int>(rem % span) - 1;
          rem /= span;
          clo[d] = lo[d] + off[d] + i * s;
        }
        bool ok = true;
        for (int corner = 0; corner < (1 << dim) && ok; ++corner) {
          Point x{};
          for (int d = 0; d < dim; ++d) x[d] = clo[d] + ((corner >> d) & 1) * s;
          ok = dom.contains(x, 1e-12);
        }
        valid[c] = ok;
      }
      std::vector<double> vol(ncubes, 0.0), mass(ncubes, 0.0), dev(ncubes, 0.0);
      std::vector<std::size_t> where(nc);
      std::vector<std::uint8_t> hit(nc, 0);
      for (std::size_t k = 0; k < nc; ++k) {
        std::size_t flat;
        if (!index_of(cen[k], flat) || !valid[flat]) continue;
        hit[k] = 1;
        where[k] = flat;
        vol[flat] += m.volume(k);
        mass[flat] += m.volume(k) * val[k];
      }
      for (std::size_t k = 0; k < nc; ++k) {
        if (!hit[k]) continue;
        const std::size_t c = where[k];
        dev[c] += m.volume(k) * std::abs(val[k] - mass[c] / vol[c]);
      }
      for (std::size_t c = 0; c < ncubes; ++c)
        if (vol[c] > 0.0) best = std::max(best, dev[c] / vol[c]);
    }
    res.per_depth.push_back(best);
    running = std::max(running, best);
    res.profile.emplace_back(depth, running);
  }
  res.value = running;
  return res;
}

MorreyResult morrey_norm(const ScalarField& f, double p) {
  require(p >= 1.0, "Morrey exponent must be >= 1");
  const MeshPtr& mesh = f.mesh();
  const int n = mesh->dim();
  const double e = std::isinf(p) ? n : n * (1.0 - 1.0 / p);
  const CellTree tree(mesh);
  const auto w = tree.aggregate(abs_cell_values(f));
  const double diam = mesh->domain().diameter();
  MorreyResult best;
  const std::size_t nv = mesh->num_vertices();
  constexpr std::size_t keep = 16;
  for (double R = diam; R >= 2.0 * mesh->h() * (1 - 1e-12); R *= 0.5) {
    std::vector<double> coarse(nv);
    parallel_for(nv, [&](std::size_t v) {
      coarse[v] = tree.ball_integral(w, mesh->vertex(v), R, 0.5, false);
    });
    std::vector<std::size_t> idx(nv);
    for (std::size_t v = 0; v < nv; ++v) idx[v] = v;
    const std::size_t top = std::min(keep, nv);
    std::partial_sort(idx.begin(), idx.begin() + top, idx.end(), [&](std::size_t a, std::size_t b) {
      return coarse[a] != coarse[b] ? coarse[a] > coarse[b] : a < b;
    });
    for (std::size_t t = 0; t < top; ++t) {
      const Point& x = mesh->vertex(idx[t]);
      const double value = std::pow(R, -e) * tree.ball_integral(w, x, R, 1.0 / 64);
      if (value > best.value) {
        best.value = value;
        best.center = x;
        best.radius = R;
      }
    }
  }
  return best;
}

double grand_lebesgue_norm(const ScalarField& f, int n) {
  require(n == f.mesh()->dim(), "grand Lebesgue exponent must equal the domain dimension");
  const Samples s = samples_of(f);
  const double measure = f.mesh()->total_volume();
  const double delta = std::ldexp(double(n - 1), -6);
  double best = 0.0;
  for (int k = 0;; ++k) {
    const double sexp = 1.0 + k * delta;
    if (sexp > n - delta + 1e-12) break;
    const double lm = log_moment(s, sexp);
    if (!std::isfinite(lm)) continue;
    const double v = std::exp((std::log(n - sexp) - std::log(measure) + lm) / sexp);
    best = std::max(best, v);
  }
  return best;
}

double weak_norm(const ScalarField& f, double p) {
  require(p >= 1.0, "weak-Lp exponent must be >= 1");
  const Samples s = samples_of(f);
  std::vector<std::size_t> idx(s.v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return s.v[a] != s.v[b] ? s.v[a] > s.v[b] : a < b;
  });
  double measure = 0.0, best = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    // {|f| > t} for t just below v_i contains everything up to i
    measure += s.w[idx[i]];
    if (i + 1 < idx.size() && s.v[idx[i + 1]] == s.v[idx[i]]) continue;
    best = std::max(best, s.v[idx[i]] * std::pow(measure, 1.0 / p));
  }
  return best;
}

ScalarField maximal_function(const ScalarField& f) {
  const MeshPtr& mesh = f.mesh();
  const int n = mesh->dim();
  const CellTree tree(mesh);
  const auto cells = abs_cell_values(f);
  const auto w = tree.aggregate(cells);
  const auto& inc = mesh->incidence();
  const double diam = mesh->domain().diameter();
  std::vector<double> radii;
  for (double R = mesh->h(); R <= diam * (1 + 1e-12); R *= 2.0) radii.push_back(R);
  std::vector<double> out(mesh->num_vertices());
  parallel_for(out.size(), [&](std::size_t v) {
    const Point& x = mesh->vertex(v);
    double m = f.layout() == Layout::Vertex ? std::abs(f[v]) : 0.0;
    for (auto k : inc.of(v)) m = std::max(m, f.layout() == Layout::Cell ? cells[k] : 0.0);
    for (double R : radii) {
      const double ball = omega(n) * std::pow(R, n);
      m = std::max(m, tree.ball_integral(w, x, R) / ball);
    }
    out[v] = m;
  });
  return ScalarField(mesh, Layout::Vertex, std::move(out));
}

ScalarField riesz_potential(const ScalarField& f) {
  const MeshPtr& mesh = f.mesh();
  const int n = mesh->dim();
  const double power = n - 1.0;
  const CellTree tree(mesh);
  const auto cells = abs_cell_values(f);
  const auto w = tree.aggregate(cells);
  auto simplex_of = [&](std::size_t k) {
    SimplexCorners s{};
    const auto idx = mesh->cell(k);
    for (int i = 0; i <= n; ++i) s[i] = mesh->vertex(idx[i]);
    return s;
  };
  std::vector<double> out(mesh->num_vertices());
  parallel_for(out.size(), [&](std::size_t v) {
    const Point& x = mesh->vertex(v);
    auto near = [&](std::size_t k) {
      const auto idx = mesh->cell(k);
      SimplexCorners s = simplex_of(k);
      for (int i = 0; i <= n; ++i)
        if (static_cast<std::size_t>(idx[i]) == v) {
          std::swap(s[0], s[i]);
          return cells[k] * singular_simplex_integral(s, n, power);
        }
      const int levels = norm(mesh->centroid(k) - x) < 1.5 * mesh->cell_diameter(k) ? 1 : 0;
      return cells[k] * regular_simplex_integral(s, n, x, power, levels);
    };
    out[v] = tree.kernel_sum(w, x, [n](double d) { return n == 2 ? 1.0 / d : 1.0 / (d * d); }, 0.35,
                             3.0, near);
  });
  return ScalarField(mesh, Layout::Vertex, std::move(out));
}

double ti1_bound(int n, double p, double q, double measure, double f_lp) {
  const double mu = 1.0 / n;
  const double delta = 1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q);
  require(delta >= 0.0 && delta < mu, "potential estimate needs 0 <= 1/p - 1/q < 1/n");
  return std::pow((1.0 - delta) / (mu - delta), 1.0 - delta) * std::pow(omega(n), 1.0 - mu) *
         std::pow(measure, mu - delta) * f_lp;
}

double mp1_bound(int n, double q, double diameter, double morrey) {
  return n * std::pow(n - 1.0, q - 1.0) * omega(n) * std::pow(q, q) * std::pow(diameter, n) *
         std::pow(morrey, q);
}

double epsilon_slope(const ScalarField& f, double base, double power) {
  const Samples s = samples_of(f);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (double eps = 0.5; eps >= 1.0 / 16 - 1e-15; eps *= 0.5) {
    const double p = base - eps;
    const double lm = log_moment(s, p);
    if (!std::isfinite(lm)) continue;
    const double x = std::log(eps);
    const double y = power * x + lm / p;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return power;
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

NormReport classify_drift(const std::vector<ScalarField>& mags, const ClassifyOptions& options) {
  require(mags.size() >= 2, "classification needs at least two refinement levels");
  const ScalarField& fine = mags.back();
  const ScalarField& coarse = mags[mags.size() - 2];
  const int n = fine.mesh()->dim();
  const auto& rule = options.rule;
  NormReport rep;

  auto record = [&](const std::string& name, double c, double f, Verdict v) {
    rep.evidence[name] = {c, f};
    rep.criteria[name] = v;
  };
  auto modular_test = [&](const std::string& name, double p) {
    const double c = lp_modular(coarse, p), f = lp_modular(fine, p);
    record(name, c, f, refinement_verdict(c, f, rule));
  };

  const double sc = sup_norm(coarse), sf = sup_norm(fine);
  record("bounded", sc, sf, refinement_verdict(sc, sf, rule));
  modular_test("L2", 2.0);
  modular_test("Ln", n);
  modular_test("L2n/(n+2)", 2.0 * n / (n + 2.0));

  const auto growth = growth_limit(mags, options.p_max);
  rep.lp_samples = growth.samples;
  rep.growth_limit_L = growth.limit;
  record("ZC1", growth.resolved.size(), growth.limit,
         std::isfinite(growth.limit) ? Verdict::Holds : Verdict::Fails);

  const auto gamma = exp_gamma_star(coarse, fine);
  rep.gamma_star = gamma.gamma_star;
  // Power-type blow-up drives gamma* down to tau itself.
  const double tau = 0.1;
  record("exp_summable", gamma.sup_growth, gamma.gamma_star,
         gamma.gamma_star >= 2.0 * tau   ? Verdict::Holds
         : gamma.gamma_star <= 1.2 * tau ? Verdict::Fails
                                         : Verdict::Inconclusive);

  const auto mc = morrey_norm(coarse, n), mf = morrey_norm(fine, n);
  rep.morrey_n = mf.value;
  record("Mn", mc.value, mf.value, refinement_verdict(mc.value, mf.value, rule));

  const double gc = grand_lebesgue_norm(coarse, n), gf = grand_lebesgue_norm(fine, n);
  rep.grand_lebesgue_n = gf;
  const double c2_slope = epsilon_slope(fine, n, 1.0 / n);
  Verdict c2 = refinement_verdict(gc, gf, rule);
  if (c2_slope < -0.25) c2 = Verdict::Fails;
  record("C2", gc, gf, c2);
  rep.evidence["C2_slope"] = {c2_slope, c2_slope};

  const double tc = lp_modular(coarse, 2.0 - 1.0 / 16), tf = lp_modular(fine, 2.0 - 1.0 / 16);
  const double t2_slope = epsilon_slope(fine, 2.0, 0.5);
  Verdict t2 = refinement_verdict(tc, tf, rule);
  if (t2 == Verdict::Holds && t2_slope <= 0.25) t2 = Verdict::Inconclusive;
  if (t2_slope < -0.25) t2 = Verdict::Fails;
  record("theorem2", tc, tf, t2);
  rep.evidence["theorem2_slope"] = {t2_slope, t2_slope};

  rep.weak_n = weak_norm(fine, n);

  if (options.with_bmo) {
    const int dc = bmo_max_depth(*coarse.mesh()), df = bmo_max_depth(*fine.mesh());
    const auto bc = bmo_norm(coarse, dc), bf = bmo_norm(fine, df);
    rep.bmo = bf.value;
    rep.bmo_depth_profile = bf.profile;
    Verdict v = refinement_verdict(bc.value, bf.value, rule);
    if (v == Verdict::Holds && bf.profile.size() >= 2) {
      const double last = bf.profile.back().second;
      const double prev = bf.profile[bf.profile.size() - 2].second;
      if (ratio(prev, last) > 1.1) v = Verdict::Inconclusive;
    }
    record("BMO", bc.value, bf.value, v);
  }
  return rep;
}

NormReport classify_drift(const std::vector<SkewField>& ladder, const ClassifyOptions& options) {
  std::vector<ScalarField> mags;
  for (const auto& A : ladder) mags.push_back(magnitude(A));
  return classify_drift(mags, options);
}

NormReport classify_drift(const std::vector<VectorField>& ladder, const ClassifyOptions& options) {
  std::vector<ScalarField> mags;
  for (const auto& a : ladder) mags.push_back(magnitude(a));
  return classify_drift(mags, options);
}

}  // namespace driftlab
