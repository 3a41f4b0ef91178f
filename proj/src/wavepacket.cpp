#include "bopp/wavepacket.hpp"

#include <cmath>

namespace bopp {

namespace {

long wrapi(long k, long N) {
  k %= N;
  return k < 0 ? k + N : k;
}

std::vector<double> hermite_1d(double t, int kmax) {
  std::vector<double> psi(kmax + 1);
  psi[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * t * t);
  if (kmax >= 1) psi[1] = std::sqrt(2.0) * t * psi[0];
  for (int k = 1; k < kmax; ++k)
    psi[k + 1] = std::sqrt(2.0 / (k + 1)) * t * psi[k] - std::sqrt(static_cast<double>(k) / (k + 1)) * psi[k - 1];
  return psi;
}

// Index helpers for multi-indices on N^n.
void unravel(std::size_t i, int N, int n, long* k) {
  for (int a = n - 1; a >= 0; --a) {
    k[a] = static_cast<long>(i % N);
    i /= N;
  }
}

}  // namespace

SampledField hermite_function(const GridSpec& g, const std::vector<int>& ks, double width) {
  if (static_cast<int>(ks.size()) != g.dim) fail(Errc::DimensionMismatch, "hermite index count");
  for (int k : ks)
    if (k < 0) fail(Errc::InvalidArgument, "negative Hermite index");
  SampledField h = SampledField::sample(g, [&](const double* x) {
    double v = 1.0;
    for (int a = 0; a < g.dim; ++a) v *= hermite_1d(x[a] / width, ks[a])[ks[a]] / std::sqrt(width);
    return cplx(v);
  });
  const double nrm = h.norm();
  for (auto& v : h.values) v /= nrm;
  return h;
}

SampledField hermite_function(const GridSpec& g, int k, double width) {
  std::vector<int> ks(g.dim, 0);
  ks[0] = k;
  return hermite_function(g, ks, width);
}

Window Window::from_field(const SampledField& f, bool normalize) {
  Window w{f, normalize};
  if (normalize) {
    const double nrm = f.norm();
    if (!(nrm > 0.0)) fail(Errc::InvalidArgument, "window has zero norm");
    for (auto& v : w.field.values) v /= nrm;
  }
  return w;
}

Window Window::hermite(const GridSpec& g, int k, double width) {
  return Window{hermite_function(g, k, width), true};
}

namespace {

// Half-step variants of a field: variant s is U(x + sign * s_a h_a / 2).
std::vector<SampledField> half_shifts(const SampledField& u, double sign) {
  const int n = u.grid.dim;
  std::vector<SampledField> out(1 << n);
  for (int s = 0; s < (1 << n); ++s) {
    std::vector<double> sh(n, 0.0);
    for (int a = 0; a < n; ++a)
      if (s >> a & 1) sh[a] = -sign * 0.5 * u.grid.spacing(a);
    out[s] = shift_field(u, sh);
  }
  return out;
}

// For y index m (centered, per axis in [-N, N)) and x index j: the indices of
// x + y/2 and x - y/2 in the half-shift variant `mask`; false when outside the box.
bool split_index(const long* j, const long* m, int n, int N, std::size_t& iu, std::size_t& iv, int& mask) {
  iu = iv = 0;
  mask = 0;
  for (int a = 0; a < n; ++a) {
    const long mc = m[a];
    const long fl = mc >= 0 ? mc / 2 : -((-mc + 1) / 2);
    if (mc & 1) mask |= 1 << a;
    const long ju = j[a] + fl, jv = j[a] - fl;
    if (ju < 0 || ju >= N || jv < 0 || jv >= N) return false;
    iu = iu * N + ju;
    iv = iv * N + jv;
  }
  return true;
}

}  // namespace

SampledField cross_wigner(const SampledField& u, const SampledField& v) {
  if (!u.grid.matches(v.grid)) fail(Errc::GridMismatch, "cross_wigner");
  const GridSpec& g = u.grid;
  const int n = g.dim, N = g.points, N2 = 2 * N;
  const std::size_t M = g.total();
  std::size_t M2 = 1;
  for (int a = 0; a < n; ++a) M2 *= N2;
  const auto us = half_shifts(u, +1.0);
  const auto vs = half_shifts(v, -1.0);
  SampledField out(phase_space_grid(g));
  const double pre = g.cell() / std::pow(2.0 * kPi, n);
  std::vector<cplx> row(M2);
  std::vector<long> j(n), m(n), k(n);
  for (std::size_t jx = 0; jx < M; ++jx) {
    unravel(jx, N, n, j.data());
    for (std::size_t im = 0; im < M2; ++im) {
      unravel(im, N2, n, m.data());
      for (int a = 0; a < n; ++a) m[a] -= N;
      std::size_t iu, iv;
      int mask;
      row[im] = split_index(j.data(), m.data(), n, N, iu, iv, mask)
                    ? us[mask].values[iu] * std::conj(vs[mask].values[iv])
                    : cplx(0.0);
    }
    dft_centered(row, N2, n, -1);
    cplx* dst = out.values.data() + jx * M;
    for (std::size_t ik = 0; ik < M; ++ik) {
      unravel(ik, N, n, k.data());
      std::size_t p = 0;
      for (int a = 0; a < n; ++a) p = p * N2 + 2 * k[a];
      dst[ik] = pre * row[p];
    }
  }
  return out;
}

SampledField wavepacket(const Window& phi, const SampledField& u) {
  SampledField W = cross_wigner(u, phi.field);
  const double s = std::pow(2.0 * kPi, u.grid.dim / 2.0);
  for (auto& v : W.values) v *= s;
  return W;
}

SampledField wavepacket_adjoint(const Window& phi, const SampledField& U) {
  const GridSpec& g = phi.field.grid;
  const int n = g.dim, N = g.points, N2 = 2 * N;
  if (!U.grid.matches(phase_space_grid(g))) fail(Errc::GridMismatch, "wavepacket_adjoint: U is not on the phase grid of the window");
  const std::size_t M = g.total();
  std::size_t M2 = 1;
  for (int a = 0; a < n; ++a) M2 *= N2;
  const auto ps = half_shifts(phi.field, -1.0);
  // Exact transpose of wavepacket(): accumulate per half-step variant, then undo the shift.
  std::vector<SampledField> acc(1 << n, SampledField(g));
  std::vector<cplx> row(M);
  std::vector<long> j(n), m(n), mw(n);
  for (std::size_t jx = 0; jx < M; ++jx) {
    std::copy(U.values.begin() + jx * M, U.values.begin() + (jx + 1) * M, row.begin());
    dft_centered(row, N, n, +1);
    unravel(jx, N, n, j.data());
    for (std::size_t im = 0; im < M2; ++im) {
      unravel(im, N2, n, m.data());
      std::size_t ir = 0;
      for (int a = 0; a < n; ++a) {
        m[a] -= N;
        ir = ir * N + wrapi(m[a] + N / 2, N);
      }
      std::size_t iu, iv;
      int mask;
      if (!split_index(j.data(), m.data(), n, N, iu, iv, mask)) continue;
      acc[mask].values[iu] += row[ir] * ps[mask].values[iv];
    }
  }
  SampledField out(g);
  for (int s = 0; s < (1 << n); ++s) {
    std::vector<double> sh(n, 0.0);
    for (int a = 0; a < n; ++a)
      if (s >> a & 1) sh[a] = 0.5 * g.spacing(a);
    out = out + shift_field(acc[s], sh);
  }
  const double pre = std::pow(2.0 * kPi, -n / 2.0) * g.cell() * g.dual().cell();
  for (auto& v : out.values) v *= pre;
  return out;
}

SampledField projector(const Window& phi, const SampledField& U) { return wavepacket(phi, wavepacket_adjoint(phi, U)); }

SampledField wavepacket_inverse(const Window& phi, const SampledField& U, double tol) {
  SampledField u = wavepacket_adjoint(phi, U);
  const SampledField PU = wavepacket(phi, u);
  const double nrm = U.norm();
  const double res = nrm > 0.0 ? norm(PU - U) / nrm : 0.0;
  if (res > tol) fail(Errc::NotInRange, "projector residual " + std::to_string(res));
  return u;
}

SampledField wavepacket_f(const DarbouxFactor& factor, const Window& phi, const SampledField& u,
                          const GridSpec* out_grid, const ResampleOptions& opt) {
  return pushforward_Mf(wavepacket(phi, u), factor, Direction::Inverse, out_grid, opt);
}

SampledField wavepacket_f_adjoint(const DarbouxFactor& factor, const Window& phi, const SampledField& U,
                                  const GridSpec& function_grid, const ResampleOptions& opt) {
  const GridSpec G0 = phase_space_grid(function_grid);
  return wavepacket_adjoint(phi, pushforward_Mf(U, factor, Direction::Forward, &G0, opt));
}

std::vector<SampledField> basis_generate(const DarbouxFactor& factor, const GridSpec& g, const std::vector<int>& js,
                                         const std::vector<int>& ks, double width, int max_index) {
  std::vector<Window> windows;
  std::vector<SampledField> funcs;
  for (int j : js) {
    if (j < 0 || j > max_index) fail(Errc::IndexCap, "window index " + std::to_string(j));
    windows.push_back(Window::hermite(g, j, width));
  }
  for (int k : ks) {
    if (k < 0 || k > max_index) fail(Errc::IndexCap, "function index " + std::to_string(k));
    funcs.push_back(hermite_function(g, k, width));
  }
  return basis_generate(factor, windows, funcs);
}

std::vector<SampledField> basis_generate(const DarbouxFactor& factor, const std::vector<Window>& windows,
                                         const std::vector<SampledField>& functions) {
  std::vector<SampledField> out;
  out.reserve(windows.size() * functions.size());
  for (const auto& w : windows)
    for (const auto& f : functions) out.push_back(wavepacket_f(factor, w, f));
  return out;
}

}  // namespace bopp
