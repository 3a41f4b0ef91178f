#include "bopp/weyl.hpp"

#include <algorithm>
#include <cmath>

namespace bopp {

namespace {

long wrapi(long k, long N) {
  k %= N;
  return k < 0 ? k + N : k;
}

void unravel(std::size_t i, int N, int d, long* k) {
  for (int a = d - 1; a >= 0; --a) {
    k[a] = static_cast<long>(i % N);
    i /= N;
  }
}

double max_abs(const CMat& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

std::function<cplx(const double*)> evaluator(const SymbolSpec& a) {
  if (a.fn) return a.fn;
  if (a.refined) {
    auto interp = std::make_shared<TrigInterpolator>(*a.refined);
    return [interp](const double* z) { return (*interp)(z); };
  }
  if (a.constant) {
    const cplx c = *a.constant;
    return [c](const double*) { return c; };
  }
  fail(Errc::InvalidArgument, "symbol has no evaluator");
}

}  // namespace

// ---------------------------------------------------------------------------
// Symbols

cplx SymbolSpec::operator()(const double* z) const {
  if (fn) return fn(z);
  if (refined) {
    const GridSpec& g = refined->grid;
    const int N = g.points;
    std::size_t idx = 0;
    for (int a = 0; a < g.dim; ++a) {
      const double t = z[a] / g.spacing(a) + N / 2;
      const double rt = std::round(t);
      if (std::abs(t - rt) > 1e-6) fail(Errc::MidpointUnavailable, "point is off the refined symbol lattice");
      idx = idx * N + static_cast<std::size_t>(wrapi(static_cast<long>(rt), N));
    }
    return refined->values[idx];
  }
  if (constant) return *constant;
  fail(Errc::InvalidArgument, "empty symbol");
}

SymbolSpec symbol_closed(int dim, std::function<cplx(const double*)> fn, std::string name) {
  SymbolSpec s;
  s.domain_dim = dim;
  s.fn = std::move(fn);
  s.name = std::move(name);
  return s;
}

SymbolSpec symbol_constant(int dim, cplx c) {
  SymbolSpec s = symbol_closed(dim, [c](const double*) { return c; }, "constant");
  s.constant = c;
  QuadraticData q;
  q.c0 = c;
  q.b = RVec::Zero(dim);
  q.Q = RMat::Zero(dim, dim);
  s.quadratic = q;
  return s;
}

SymbolSpec symbol_quadratic(const QuadraticData& q, std::string name) {
  const int d = static_cast<int>(q.b.size());
  if (q.Q.rows() != d || q.Q.cols() != d) fail(Errc::DimensionMismatch, "quadratic symbol blocks");
  QuadraticData qs = q;
  qs.Q = 0.5 * (q.Q + q.Q.transpose());
  SymbolSpec s = symbol_closed(
      d,
      [qs, d](const double* z) {
        const Eigen::Map<const RVec> zv(z, d);
        return qs.c0 + qs.b.dot(zv) + 0.5 * zv.dot(qs.Q * zv);
      },
      std::move(name));
  s.quadratic = qs;
  return s;
}

SymbolSpec symbol_harmonic(int n, double scale) {
  QuadraticData q;
  q.b = RVec::Zero(2 * n);
  q.Q = scale * RMat::Identity(2 * n, 2 * n);
  return symbol_quadratic(q, "harmonic");
}

SymbolSpec symbol_gaussian(const RVec& center, double width, cplx amplitude) {
  const int d = static_cast<int>(center.size());
  if (!(width > 0.0)) fail(Errc::InvalidArgument, "gaussian width must be positive");
  return symbol_closed(
      d,
      [center, width, amplitude, d](const double* z) {
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) r2 += (z[a] - center(a)) * (z[a] - center(a));
        return amplitude * std::exp(-r2 / (2.0 * width * width));
      },
      "gaussian");
}

SymbolSpec symbol_linear(int dim, int axis) {
  if (axis < 0 || axis >= dim) fail(Errc::InvalidArgument, "linear symbol axis out of range");
  QuadraticData q;
  q.b = RVec::Zero(dim);
  q.b(axis) = 1.0;
  q.Q = RMat::Zero(dim, dim);
  return symbol_quadratic(q, axis < dim / 2 ? "linear-x" : "linear-xi");
}

SymbolSpec symbol_tapered(const SymbolSpec& a, double width) {
  if (!(width > 0.0)) fail(Errc::InvalidArgument, "taper width must be positive");
  auto ev = evaluator(a);
  const int d = a.domain_dim;
  return symbol_closed(
      d,
      [ev, width, d](const double* z) {
        double r2 = 0.0;
        for (int i = 0; i < d; ++i) r2 += z[i] * z[i];
        return ev(z) * std::exp(-r2 / (2.0 * width * width));
      },
      a.name + "-tapered");
}

SymbolSpec symbol_sum(const SymbolSpec& a, const SymbolSpec& b) {
  if (a.domain_dim != b.domain_dim) fail(Errc::DimensionMismatch, "symbol_sum");
  auto ea = evaluator(a), eb = evaluator(b);
  SymbolSpec s = symbol_closed(a.domain_dim, [ea, eb](const double* z) { return ea(z) + eb(z); }, a.name + "+" + b.name);
  if (a.constant && b.constant) s.constant = *a.constant + *b.constant;
  if (a.quadratic && b.quadratic) {
    QuadraticData q = *a.quadratic;
    q.c0 += b.quadratic->c0;
    q.b += b.quadratic->b;
    q.Q += b.quadratic->Q;
    s.quadratic = q;
  }
  return s;
}

SymbolSpec compose_linear(const SymbolSpec& a, const RMat& f) {
  const int d = a.domain_dim;
  if (f.rows() != d || f.cols() != d) fail(Errc::DimensionMismatch, "compose_linear");
  auto ev = evaluator(a);
  SymbolSpec s = symbol_closed(
      d,
      [ev, f, d](const double* z) {
        const RVec w = f * Eigen::Map<const RVec>(z, d);
        return ev(w.data());
      },
      a.name + "-composed");
  s.constant = a.constant;
  if (a.quadratic) {
    QuadraticData q = *a.quadratic;
    q.b = f.transpose() * a.quadratic->b;
    q.Q = f.transpose() * a.quadratic->Q * f;
    s.quadratic = q;
  }
  return s;
}

SymbolSpec symbol_from_field(const SampledField& base) {
  SymbolSpec s;
  s.domain_dim = base.grid.dim;
  s.refined = std::make_shared<const SampledField>(upsample2(base));
  s.name = "sampled";
  return s;
}

SampledField sample_symbol(const SymbolSpec& a, const GridSpec& g) {
  if (a.domain_dim != g.dim) fail(Errc::DimensionMismatch, "sample_symbol");
  return SampledField::sample(g, [&](const double* z) { return a(z); });
}

// ---------------------------------------------------------------------------
// Operator matrices

SampledField OperatorMatrix::apply(const SampledField& U) const {
  if (!U.grid.matches(grid)) fail(Errc::GridMismatch, "operator applied to a field on another grid");
  const Eigen::Map<const CVec> u(U.values.data(), static_cast<Eigen::Index>(U.values.size()));
  SampledField out(grid);
  Eigen::Map<CVec>(out.values.data(), static_cast<Eigen::Index>(out.values.size())) = entries * u;
  return out;
}

double OperatorMatrix::hermiticity_residual() const {
  const double m = max_abs(entries);
  if (m == 0.0) return 0.0;
  return max_abs(entries - entries.adjoint()) / m;
}

OperatorMatrix make_operator(const GridSpec& g, CMat entries) {
  OperatorMatrix A;
  A.grid = g;
  A.entries = std::move(entries);
  A.hermitian_flag = A.hermiticity_residual() <= 1e-10;
  return A;
}

namespace {

void check_cap(const GridSpec& g, std::size_t cap) {
  if (g.total() > cap) fail(Errc::GridCapExceeded, "dense operator needs <= " + std::to_string(cap) + " grid points");
}

}  // namespace

OperatorMatrix weyl_kernel(const SymbolSpec& a, const GridSpec& g) {
  const int n = g.dim, N = g.points;
  if (a.domain_dim != 2 * n) fail(Errc::DimensionMismatch, "weyl_kernel: symbol must live on R^{2n}");
  check_cap(g, 4096);
  const std::size_t M = g.total();
  if (a.constant) return make_operator(g, *a.constant * CMat::Identity(M, M));
  // xi runs over 2N points of step h^/2 on the dual box, so exp(i(x-y)xi) has
  // period 4L in x - y and no pair of grid points aliases.
  const GridSpec d = g.dual();
  const int N2 = 2 * N;
  std::size_t M2 = 1;
  for (int ax = 0; ax < n; ++ax) M2 *= N2;
  // E[(r + N) * N2 + m] = exp(i pi r (m - N) / N), r = p - q in (-N, N).
  std::vector<cplx> E(static_cast<std::size_t>(N2) * N2);
  for (int r = -N; r < N; ++r)
    for (int m = 0; m < N2; ++m) E[(r + N) * N2 + m] = std::polar(1.0, kPi * r * (m - N) / N);
  std::vector<std::vector<long>> km(M2, std::vector<long>(n));
  std::vector<std::vector<double>> xi(M2, std::vector<double>(n));
  for (std::size_t m = 0; m < M2; ++m) {
    unravel(m, N2, n, km[m].data());
    for (int ax = 0; ax < n; ++ax) xi[m][ax] = 0.5 * d.spacing(ax) * (km[m][ax] - N);
  }
  const double pre = std::pow(static_cast<double>(N2), -n);
  std::vector<std::vector<long>> kidx(M, std::vector<long>(n));
  for (std::size_t i = 0; i < M; ++i) unravel(i, N, n, kidx[i].data());
  CMat K(M, M);
  std::vector<double> z(2 * n);
  std::vector<long> r(n);
  for (std::size_t p = 0; p < M; ++p)
    for (std::size_t q = 0; q < M; ++q) {
      for (int ax = 0; ax < n; ++ax) {
        z[ax] = 0.5 * (g.coord(ax, kidx[p][ax]) + g.coord(ax, kidx[q][ax]));
        r[ax] = kidx[p][ax] - kidx[q][ax] + N;
      }
      cplx s = 0.0;
      for (std::size_t m = 0; m < M2; ++m) {
        cplx ph = 1.0;
        for (int ax = 0; ax < n; ++ax) {
          ph *= E[r[ax] * N2 + km[m][ax]];
          z[n + ax] = xi[m][ax];
        }
        s += ph * a(z.data());
      }
      K(p, q) = pre * s;
    }
  return make_operator(g, std::move(K));
}

SymbolSpec symbol_from_kernel(const OperatorMatrix& K) {
  const GridSpec& g = K.grid;
  const int n = g.dim, N = g.points;
  const std::size_t M = g.total();
  // Multiplication operators: the symbol is the diagonal, constant in xi.  The
  // half-step interpolation below is only meaningful for smooth kernels.
  const double big = K.entries.cwiseAbs().maxCoeff();
  if ((K.entries - CMat(K.entries.diagonal().asDiagonal())).cwiseAbs().maxCoeff() <= 1e-14 * big) {
    SampledField out(phase_space_grid(g));
    for (std::size_t p = 0; p < M; ++p)
      for (std::size_t k = 0; k < M; ++k) out.values[p * M + k] = K.entries(p, p);
    return symbol_from_field(out);
  }
  std::vector<double> L2(g.halfwidth);
  L2.insert(L2.end(), g.halfwidth.begin(), g.halfwidth.end());
  SampledField Kf(GridSpec::make(N, L2));
  const double inv_cell = 1.0 / g.cell();
  for (std::size_t p = 0; p < M; ++p)
    for (std::size_t q = 0; q < M; ++q) Kf.values[p * M + q] = K.entries(p, q) * inv_cell;
  // K(x + s h/2, x' - s h/2) for every half-step mask s.
  const int nmask = 1 << n;
  std::vector<SampledField> Ks(nmask);
  for (int s = 0; s < nmask; ++s) {
    std::vector<double> sh(2 * n, 0.0);
    for (int a = 0; a < n; ++a)
      if (s >> a & 1) {
        sh[a] = -0.5 * g.spacing(a);
        sh[n + a] = 0.5 * g.spacing(a);
      }
    Ks[s] = shift_field(Kf, sh);
  }
  const int N2 = 2 * N;
  std::size_t M2 = 1;
  for (int a = 0; a < n; ++a) M2 *= N2;
  SampledField out(phase_space_grid(g));
  std::vector<cplx> row(M2);
  std::vector<long> j(n), m(n), kk(n);
  for (std::size_t jx = 0; jx < M; ++jx) {
    unravel(jx, N, n, j.data());
    for (std::size_t im = 0; im < M2; ++im) {
      unravel(im, N2, n, m.data());
      int mask = 0;
      bool inside = true;
      std::size_t iu = 0, iv = 0;
      for (int a = 0; a < n; ++a) {
        const long mc = m[a] - N;
        const long fl = mc >= 0 ? mc / 2 : -((-mc + 1) / 2);
        if (mc & 1) mask |= 1 << a;
        const long ju = j[a] + fl, jv = j[a] - fl;
        if (ju < 0 || ju >= N || jv < 0 || jv >= N) inside = false;
        iu = iu * N + ju;
        iv = iv * N + jv;
      }
      row[im] = inside ? Ks[mask].values[iu * M + iv] : cplx(0.0);
    }
    dft_centered(row, N2, n, -1);
    for (std::size_t k = 0; k < M; ++k) {
      unravel(k, N, n, kk.data());
      std::size_t p = 0;
      for (int a = 0; a < n; ++a) p = p * N2 + 2 * kk[a];
      out.values[jx * M + k] = g.cell() * row[p];
    }
  }
  return symbol_from_field(out);
}

SymbolSpec lift_symbol(const SymbolSpec& a, const SymplecticForm& form) {
  const int d = 2 * form.n;
  if (a.domain_dim != d) fail(Errc::DimensionMismatch, "lift_symbol");
  RMat Lm(d, 2 * d);
  Lm << RMat::Identity(d, d), -0.5 * form.omega;
  auto ev = evaluator(a);
  SymbolSpec s = symbol_closed(
      2 * d,
      [ev, Lm, d](const double* z) {
        const RVec w = Lm * Eigen::Map<const RVec>(z, 2 * d);
        return ev(w.data());
      },
      a.name + "-lifted");
  s.constant = a.constant;
  if (a.quadratic) {
    QuadraticData q;
    q.c0 = a.quadratic->c0;
    q.b = Lm.transpose() * a.quadratic->b;
    q.Q = Lm.transpose() * a.quadratic->Q * Lm;
    s.quadratic = q;
  }
  return s;
}

// ---------------------------------------------------------------------------
// F_omega a on lattices

namespace {

// Applies E (K x len) along `axis` of a tensor with the given shape.
void transform_axis(std::vector<cplx>& data, std::vector<std::size_t>& shape, int axis, const CMat& E) {
  std::size_t outer = 1, inner = 1;
  for (int b = 0; b < axis; ++b) outer *= shape[b];
  for (std::size_t b = axis + 1; b < shape.size(); ++b) inner *= shape[b];
  const std::size_t len = shape[axis], K = static_cast<std::size_t>(E.rows());
  std::vector<cplx> next(outer * K * inner, cplx(0.0));
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t k = 0; k < K; ++k) {
      cplx* dst = next.data() + (o * K + k) * inner;
      for (std::size_t q = 0; q < len; ++q) {
        const cplx e = E(k, q);
        const cplx* src = data.data() + (o * len + q) * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] += e * src[i];
      }
    }
  data.swap(next);
  shape[axis] = K;
}

// F_omega a(w) for w_a = (k - offset) * step_a, k = 0..K-1 on every axis, using
// F_omega a(w) = (2pi)^{-n} |det Omega|^{1/2} int e^{-i w.y} a(Omega y) dy.
SampledField fomega_table(const SymbolSpec& a, const SymplecticForm& form, int K, long offset,
                          const std::vector<double>& step, const PhaseOptions& opt) {
  const int d = 2 * form.n;
  if (a.domain_dim != d) fail(Errc::DimensionMismatch, "F_omega symbol dimension");
  auto ev = evaluator(a);
  const double inv_norm = form.omega_inv.operatorNorm();
  const double Ly = opt.quad_halfwidth * inv_norm;
  double wmax = 0.0;
  for (int ax = 0; ax < d; ++ax) wmax = std::max(wmax, std::abs(step[ax]) * std::max<double>(offset, K - offset));
  int Nq = std::max(opt.quad_points, 8);
  while (kPi / (2.0 * Ly / Nq) < wmax) Nq *= 2;
  if (std::pow(static_cast<double>(Nq), d) > static_cast<double>(std::size_t(1) << 24))
    fail(Errc::GridCapExceeded, "F_omega quadrature grid too large");
  const GridSpec qg = GridSpec::make(d, Nq, Ly);
  std::vector<cplx> data(qg.total());
  std::vector<double> y(d);
  RVec yv(d);
  for (std::size_t i = 0; i < data.size(); ++i) {
    qg.point(i, y.data());
    for (int ax = 0; ax < d; ++ax) yv(ax) = y[ax];
    const RVec z = form.omega * yv;
    data[i] = ev(z.data());
  }
  // The box must carry the whole symbol: compare the outer faces with the peak.
  double peak = 0.0, edge = 0.0;
  {
    std::vector<long> k(d);
    for (std::size_t i = 0; i < data.size(); ++i) {
      unravel(i, Nq, d, k.data());
      const double v = std::abs(data[i]);
      peak = std::max(peak, v);
      for (int ax = 0; ax < d; ++ax)
        if (k[ax] == 0 || k[ax] == Nq - 1) edge = std::max(edge, v);
    }
  }
  if (edge > 1e-10 * peak)
    fail(Errc::MidpointUnavailable, "symbol is not negligible at the edge of the F_omega quadrature box; raise quad_halfwidth");
  std::vector<std::size_t> shape(d, static_cast<std::size_t>(Nq));
  for (int ax = 0; ax < d; ++ax) {
    CMat E(K, Nq);
    for (int k = 0; k < K; ++k)
      for (int q = 0; q < Nq; ++q) E(k, q) = std::polar(1.0, -(k - offset) * step[ax] * qg.coord(ax, q));
    transform_axis(data, shape, ax, E);
  }
  const double pre = std::pow(2.0 * kPi, -form.n) * std::sqrt(form.det_abs) * qg.cell();
  std::vector<double> L(d);
  for (int ax = 0; ax < d; ++ax) L[ax] = std::abs(step[ax]) * K / 2.0;
  SampledField out(GridSpec::make(K, L));
  for (std::size_t i = 0; i < data.size(); ++i) out.values[i] = pre * data[i];
  return out;
}

void check_phase_grid(const SymbolSpec& a, const SymplecticForm& form, const GridSpec& g) {
  if (g.dim != 2 * form.n) fail(Errc::DimensionMismatch, "operator grid must live on R^{2n}");
  if (a.domain_dim != 2 * form.n) fail(Errc::DimensionMismatch, "symbol must live on R^{2n}");
}

}  // namespace

SampledField fomega_symbol_doubled(const SymbolSpec& a, const SymplecticForm& form, const GridSpec& g,
                                   const PhaseOptions& opt) {
  check_phase_grid(a, form, g);
  std::vector<double> step(g.dim);
  for (int ax = 0; ax < g.dim; ++ax) step[ax] = 2.0 * g.spacing(ax);
  return fomega_table(a, form, 2 * g.points, g.points, step, opt);
}

SampledField fomega_symbol_lattice(const SymbolSpec& a, const SymplecticForm& form, const GridSpec& g,
                                   const PhaseOptions& opt) {
  check_phase_grid(a, form, g);
  std::vector<double> step(g.dim);
  for (int ax = 0; ax < g.dim; ++ax) step[ax] = g.spacing(ax);
  return fomega_table(a, form, g.points, g.points / 2, step, opt);
}

// ---------------------------------------------------------------------------
// Phase-space operators

namespace {

// Spectral derivative on one periodic axis (Nyquist mode dropped); real antisymmetric.
RMat spectral_derivative(int N, double h) {
  RMat D = RMat::Zero(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) {
      double s = 0.0;
      for (int m = -N / 2 + 1; m < N / 2; ++m) {
        const double w = 2.0 * kPi * m / (N * h);
        s -= w * std::sin(2.0 * kPi * m * (j - k) / N);
      }
      D(j, k) = s / N;
    }
  return D;
}

CMat lifted_matrix(const QuadraticData& q, const SymplecticForm& form, const GridSpec& g) {
  const int d = g.dim, N = g.points;
  const std::size_t M = g.total();
  std::vector<RMat> D(d), D2(d);
  for (int ax = 0; ax < d; ++ax) {
    D[ax] = spectral_derivative(N, g.spacing(ax));
    D2[ax] = D[ax] * D[ax];
  }
  // Z_a = X_a + sum_c gm(a, c) D_c with gm = (i/2) Omega.
  const CMat gm = cplx(0.0, 0.5) * form.omega.cast<cplx>();
  const CMat Qc = q.Q.cast<cplx>();
  const CMat Gam = Qc * gm;                    // couples z_a with D_c
  const CMat Lam = gm.transpose() * Qc * gm;   // couples D_c D_d
  const CVec lin = gm.transpose() * q.b.cast<cplx>();
  std::vector<std::vector<long>> k(M, std::vector<long>(d));
  std::vector<RVec> z(M, RVec(d));
  std::vector<CVec> gz(M);
  for (std::size_t i = 0; i < M; ++i) {
    unravel(i, N, d, k[i].data());
    for (int ax = 0; ax < d; ++ax) z[i](ax) = g.coord(ax, k[i][ax]);
    gz[i] = Gam.transpose() * z[i].cast<cplx>();
  }
  CMat A = CMat::Zero(M, M);
  int diff[2];
  for (std::size_t p = 0; p < M; ++p)
    for (std::size_t r = 0; r < M; ++r) {
      int nd = 0;
      for (int ax = 0; ax < d && nd <= 2; ++ax)
        if (k[p][ax] != k[r][ax]) {
          if (nd < 2) diff[nd] = ax;
          ++nd;
        }
      if (nd > 2) continue;
      cplx v = 0.0;
      if (nd == 0) {
        v = q.c0 + q.b.dot(z[p]) + 0.5 * z[p].dot(q.Q * z[p]);
        for (int c = 0; c < d; ++c) v += 0.5 * Lam(c, c) * D2[c](k[p][c], k[p][c]);
      } else if (nd == 1) {
        const int c = diff[0];
        const double dv = D[c](k[p][c], k[r][c]);
        v = lin(c) * dv + 0.5 * (gz[p](c) + gz[r](c)) * dv + 0.5 * Lam(c, c) * D2[c](k[p][c], k[r][c]);
      } else {
        const int c = diff[0], e = diff[1];
        v = 0.5 * (Lam(c, e) + Lam(e, c)) * D[c](k[p][c], k[r][c]) * D[e](k[p][e], k[r][e]);
      }
      A(p, r) = v;
    }
  return A;
}

}  // namespace

OperatorMatrix phase_weyl_matrix(const SymbolSpec& a, const SymplecticForm& form, const GridSpec& g,
                                 const PhaseOptions& opt) {
  check_phase_grid(a, form, g);
  check_cap(g, opt.cap);
  const std::size_t M = g.total();
  if (a.constant) return make_operator(g, *a.constant * CMat::Identity(M, M));
  const bool lifted = opt.route == PhaseOptions::Route::Lifted ||
                      (opt.route == PhaseOptions::Route::Auto && a.quadratic.has_value());
  if (lifted) {
    if (!a.quadratic) fail(Errc::InvalidArgument, "lifted route needs a quadratic symbol");
    return make_operator(g, lifted_matrix(*a.quadratic, form, g));
  }
  const int d = g.dim, N = g.points, n = form.n;
  const SampledField T = fomega_symbol_doubled(a, form, g, opt);
  const std::size_t N2 = 2 * static_cast<std::size_t>(N);
  std::vector<std::vector<long>> k(M, std::vector<long>(d));
  std::vector<RVec> z(M, RVec(d)), wz(M);
  for (std::size_t i = 0; i < M; ++i) {
    unravel(i, N, d, k[i].data());
    for (int ax = 0; ax < d; ++ax) z[i](ax) = g.coord(ax, k[i][ax]);
    wz[i] = form.omega_inv * z[i];
  }
  const double pre = std::pow(2.0 / kPi, n) / std::sqrt(form.det_abs) * g.cell();
  CMat A(M, M);
  for (std::size_t p = 0; p < M; ++p)
    for (std::size_t r = 0; r < M; ++r) {
      std::size_t idx = 0;
      for (int ax = 0; ax < d; ++ax) idx = idx * N2 + static_cast<std::size_t>(k[p][ax] - k[r][ax] + N);
      A(p, r) = pre * T.values[idx] * std::polar(1.0, 2.0 * z[p].dot(wz[r]));
    }
  return make_operator(g, std::move(A));
}

SampledField phase_weyl_apply_quadrature(const SymbolSpec& a, const SymplecticForm& form, const SampledField& U,
                                         const PhaseOptions& opt) {
  const GridSpec& g = U.grid;
  check_phase_grid(a, form, g);
  check_cap(g, opt.cap);
  if (a.constant) return *a.constant * U;
  const int d = g.dim, N = g.points, n = form.n;
  const std::size_t M = g.total();
  const SampledField F = fomega_symbol_lattice(a, form, g, opt);
  // U(z - s h/2) for every half-step mask s.
  const int nmask = 1 << d;
  std::vector<SampledField> Us(nmask);
  for (int s = 0; s < nmask; ++s) {
    std::vector<double> sh(d, 0.0);
    for (int ax = 0; ax < d; ++ax)
      if (s >> ax & 1) sh[ax] = 0.5 * g.spacing(ax);
    Us[s] = shift_field(U, sh);
  }
  double fmax = 0.0;
  for (const auto& v : F.values) fmax = std::max(fmax, std::abs(v));
  std::vector<std::vector<long>> k(M, std::vector<long>(d));
  std::vector<RVec> z(M, RVec(d));
  for (std::size_t i = 0; i < M; ++i) {
    unravel(i, N, d, k[i].data());
    for (int ax = 0; ax < d; ++ax) z[i](ax) = g.coord(ax, k[i][ax]);
  }
  SampledField out(g);
  std::vector<long> fl(d);
  for (std::size_t m = 0; m < M; ++m) {
    const cplx Fm = F.values[m];
    if (std::abs(Fm) <= 1e-18 * fmax) continue;
    int mask = 0;
    for (int ax = 0; ax < d; ++ax) {
      const long mc = k[m][ax] - N / 2;
      fl[ax] = mc >= 0 ? mc / 2 : -((-mc + 1) / 2);
      if (mc & 1) mask |= 1 << ax;
    }
    const RVec w0 = form.omega_inv * z[m];
    const SampledField& src = Us[mask];
    for (std::size_t i = 0; i < M; ++i) {
      std::size_t idx = 0;
      for (int ax = 0; ax < d; ++ax) idx = idx * N + static_cast<std::size_t>(wrapi(k[i][ax] - fl[ax], N));
      out.values[i] += Fm * std::polar(1.0, -z[i].dot(w0)) * src.values[idx];
    }
  }
  const double pre = std::pow(2.0 * kPi, -n) / std::sqrt(form.det_abs) * g.cell();
  for (auto& v : out.values) v *= pre;
  return out;
}

SymbolSpec twisted_product(const SymbolSpec& a, const SymbolSpec& b, const GridSpec& g, std::size_t cap) {
  if (g.dim % 2 || a.domain_dim != g.dim || b.domain_dim != g.dim)
    fail(Errc::DimensionMismatch, "twisted_product needs symbols on the same R^{2n} grid");
  check_cap(g, cap);
  const int d = g.dim, n = d / 2, N = g.points;
  const std::size_t M = g.total();
  if (a.constant) return symbol_from_field(*a.constant * sample_symbol(b, g));
  if (b.constant) return symbol_from_field(*b.constant * sample_symbol(a, g));
  const SampledField Fa = sympl_fourier_sigma(sample_symbol(a, g));
  const SampledField Fb = sympl_fourier_sigma(sample_symbol(b, g));
  const GridSpec& G = Fa.grid;
  // P[ax][k * N + j] = exp(i xi_k x_j / 2) on the (x_ax, xi_ax) pair.
  std::vector<std::vector<cplx>> P(n, std::vector<cplx>(static_cast<std::size_t>(N) * N));
  for (int ax = 0; ax < n; ++ax)
    for (int kk = 0; kk < N; ++kk)
      for (int j = 0; j < N; ++j) P[ax][kk * N + j] = std::polar(1.0, 0.5 * G.coord(n + ax, kk) * G.coord(ax, j));
  std::vector<std::vector<long>> k(M, std::vector<long>(d));
  for (std::size_t i = 0; i < M; ++i) unravel(i, N, d, k[i].data());
  SampledField Fc(G);
  const double pre = std::pow(2.0 * kPi, -n) * G.cell();
  for (std::size_t i = 0; i < M; ++i) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      const cplx fb = Fb.values[j];
      if (fb == 0.0) continue;
      std::size_t idx = 0;
      cplx ph = 1.0;
      for (int ax = 0; ax < d; ++ax) idx = idx * N + static_cast<std::size_t>(wrapi(k[i][ax] - k[j][ax] + N / 2, N));
      for (int ax = 0; ax < n; ++ax)
        ph *= P[ax][k[i][n + ax] * N + k[j][ax]] * std::conj(P[ax][k[j][n + ax] * N + k[i][ax]]);
      s += ph * Fa.values[idx] * fb;
    }
    Fc.values[i] = pre * s;
  }
  return symbol_from_field(sympl_fourier_sigma(Fc));
}

// ---------------------------------------------------------------------------
// Conjugation identities

ConjugationReport conjugation_check(const SymbolSpec& a, const SymplecticForm& form, const RMat& S, const GridSpec& g,
                                    const PhaseOptions& opt) {
  const int n = form.n;
  if (S.rows() != 2 * n || S.cols() != 2 * n) fail(Errc::DimensionMismatch, "conjugation_check: S size");
  if (!is_symplectic(S, 1e-10)) fail(Errc::NotSymplectic, "S^T J S differs from J");
  const DarbouxFactor fac = darboux_factor(form);
  const SymplecticForm sig = standard_form(n);
  const RMat fS = fac.f * S;
  const OperatorMatrix A1 = phase_weyl_matrix(compose_linear(a, fac.f), sig, g, opt);
  const OperatorMatrix A2 = phase_weyl_matrix(compose_linear(a, fS), sig, g, opt);
  ResampleOptions ro;
  ro.verify = false;
  const double centers[4][2] = {{0.0, 0.0}, {0.7, -0.4}, {-0.5, 0.8}, {1.0, 0.3}};
  ConjugationReport rep;
  for (const auto& c : centers) {
    const SampledField U = SampledField::sample(g, [&](const double* z) {
      double r2 = 0.0;
      for (int ax = 0; ax < g.dim; ++ax) {
        const double t = z[ax] - (ax % 2 ? c[1] : c[0]);
        r2 += t * t;
      }
      return std::exp(-r2 / 2.0) * std::polar(1.0, 0.3 * z[0]);
    });
    const SampledField lhs = A2.apply(U);
    const SampledField V = pushforward_matrix(U, S, Direction::Inverse, &g, ro);
    const SampledField rhs = pushforward_matrix(A1.apply(V), S, Direction::Forward, &g, ro);
    const double den = lhs.norm();
    const double res = den > 0.0 ? norm(lhs - rhs) / den : norm(rhs);
    rep.residual = std::max(rep.residual, res);
    ++rep.probes;
  }
  return rep;
}

EquaReport equa_check(const SymbolSpec& a, const SymplecticForm& form, int points, const PhaseOptions& opt) {
  const DarbouxFactor fac = darboux_factor(form);
  bool exact = false;
  const GridSpec Gw = adapted_grid(form, points, &exact);
  const GridSpec G0 = grid_image(Gw, fac.f_inv);
  if (!exact || !substitution_is_exact(Gw, fac.f, G0))
    fail(Errc::InvalidArgument, "equa_check needs a form whose Darboux factor maps lattices exactly");
  const OperatorMatrix Aw = phase_weyl_matrix(a, form, Gw, opt);
  const OperatorMatrix A0 = phase_weyl_matrix(compose_linear(a, fac.f), standard_form(form.n), G0, opt);
  // M_f is an index remap with a constant factor: (M_f X)[i] = s X[pi(i)].
  SampledField idx(Gw);
  for (std::size_t i = 0; i < idx.values.size(); ++i) idx.values[i] = static_cast<double>(i);
  ResampleOptions ro;
  ro.verify = false;
  const double s = std::sqrt(std::abs(fac.f.determinant()));
  const SampledField mapped = linear_substitution(idx, fac.f, 1.0, G0, ro);
  const std::size_t M = Gw.total();
  std::vector<std::size_t> pi(M);
  for (std::size_t i = 0; i < M; ++i) pi[i] = static_cast<std::size_t>(std::llround(mapped.values[i].real()));
  // (M_f A_w X)[i] = s sum_r A_w(pi(i), r) X[r];  (A' M_f X)[i] = s sum_r A'(i, pi^{-1}(r)) X[r].
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t r = 0; r < M; ++r) {
      const cplx lhs = s * Aw.entries(pi[i], pi[r]);
      const cplx rhs = s * A0.entries(i, r);
      num += std::norm(lhs - rhs);
      den += std::norm(rhs);
    }
  EquaReport rep;
  rep.residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return rep;
}

}  // namespace bopp
