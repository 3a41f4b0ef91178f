#include "bopp/ops.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace bopp {

namespace {

long wrapi(long k, long N) {
  k %= N;
  return k < 0 ? k + N : k;
}

void require_dim(const SampledField& u, int d, const char* what) {
  if (u.grid.dim != d) fail(Errc::DimensionMismatch, what);
}

}  // namespace

SampledField heisenberg_weyl(const RVec& z0, const SampledField& u) {
  const int n = u.grid.dim;
  if (z0.size() != 2 * n) fail(Errc::DimensionMismatch, "heisenberg_weyl: z0 has wrong length");
  std::vector<double> s(n);
  for (int a = 0; a < n; ++a) s[a] = z0(a);
  SampledField out = shift_field(u, s);
  const double c = z0.tail(n).dot(z0.head(n)) / 2.0;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.grid.point(i, x.data());
    double ph = -c;
    for (int a = 0; a < n; ++a) ph += z0(n + a) * x[a];
    out.values[i] *= std::polar(1.0, ph);
  }
  return out;
}

SampledField grossmann_royer(const RVec& z0, const SampledField& u) {
  const GridSpec& g = u.grid;
  const int n = g.dim, N = g.points;
  if (z0.size() != 2 * n) fail(Errc::DimensionMismatch, "grossmann_royer: z0 has wrong length");
  std::vector<long> m(n);
  for (int a = 0; a < n; ++a) {
    const double t = 2.0 * z0(a) / g.spacing(a);
    if (std::abs(t - std::round(t)) > 1e-9) fail(Errc::OffLatticeReflection, "2 x0 is not a lattice point");
    m[a] = static_cast<long>(std::round(t));
  }
  SampledField out(g);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    std::size_t rem = i, src = 0, mul = 1;
    for (int a = n - 1; a >= 0; --a) {
      const long j = static_cast<long>(rem % N);
      rem /= N;
      src += static_cast<std::size_t>(wrapi(m[a] - j + N, N)) * mul;
      mul *= N;
    }
    g.point(i, x.data());
    double ph = 0.0;
    for (int a = 0; a < n; ++a) ph += 2.0 * z0(n + a) * (x[a] - z0(a));
    out.values[i] = std::polar(1.0, ph) * u.values[src];
  }
  return out;
}

SampledField phase_translate_omega(const RVec& z0, const SampledField& U, const SymplecticForm& form) {
  const int d = 2 * form.n;
  require_dim(U, d, "phase_translate_omega: grid dimension differs from 2n");
  if (z0.size() != d) fail(Errc::DimensionMismatch, "phase_translate_omega: z0 has wrong length");
  std::vector<double> s(d);
  for (int a = 0; a < d; ++a) s[a] = z0(a) / 2.0;
  SampledField out = shift_field(U, s);
  const RVec w = form.omega_inv * z0;
  std::vector<double> z(d);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.grid.point(i, z.data());
    double ph = 0.0;
    for (int a = 0; a < d; ++a) ph += z[a] * w(a);
    out.values[i] *= std::polar(1.0, -ph);
  }
  return out;
}

MetaplecticGenerator MetaplecticGenerator::fractional_fourier(double angle) {
  MetaplecticGenerator g;
  g.kind = Kind::FractionalFourier;
  g.angle = angle;
  return g;
}

MetaplecticGenerator MetaplecticGenerator::dilation(double scale) {
  if (!(scale > 0.0)) fail(Errc::InvalidArgument, "dilation scale must be positive");
  MetaplecticGenerator g;
  g.kind = Kind::Dilation;
  g.scale = scale;
  return g;
}

MetaplecticGenerator MetaplecticGenerator::chirp_matrix(const RMat& P) {
  if (P.rows() != P.cols() || (P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    fail(Errc::InvalidArgument, "chirp matrix must be symmetric");
  MetaplecticGenerator g;
  g.kind = Kind::Chirp;
  g.chirp = P;
  return g;
}

namespace {

// exp(-i theta (H - 1/2)) for the Fourier-grid oscillator H = (X^2 + D^2)/2 on one axis.
CMat fractional_fourier_matrix(int N, double L, double theta) {
  const GridSpec g = GridSpec::make(1, N, L);
  const GridSpec d = g.dual();
  CMat F(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k)
      F(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(N)), -2.0 * kPi * (j - N / 2) * (k - N / 2) / N);
  RVec w2(N), x2(N);
  for (int k = 0; k < N; ++k) {
    w2(k) = d.coord(0, k) * d.coord(0, k);
    x2(k) = g.coord(0, k) * g.coord(0, k);
  }
  CMat H = F.adjoint() * w2.asDiagonal() * F;
  H.diagonal() += x2.cast<cplx>();
  H *= 0.5;
  H = 0.5 * (H + H.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  CVec ph(N);
  for (int k = 0; k < N; ++k) ph(k) = std::polar(1.0, -theta * (es.eigenvalues()(k) - 0.5));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

void apply_axis_matrix(SampledField& u, int axis, const CMat& A) {
  const int N = u.grid.points, d = u.grid.dim;
  std::size_t stride = 1;
  for (int a = axis + 1; a < d; ++a) stride *= N;
  const std::size_t block = stride * N;
  CVec line(N);
  for (std::size_t b = 0; b < u.values.size() / block; ++b)
    for (std::size_t s = 0; s < stride; ++s) {
      cplx* base = u.values.data() + b * block + s;
      for (int k = 0; k < N; ++k) line(k) = base[k * stride];
      const CVec r = A * line;
      for (int k = 0; k < N; ++k) base[k * stride] = r(k);
    }
}

}  // namespace

SampledField metaplectic_apply(const std::vector<MetaplecticGenerator>& gens, const SampledField& u,
                               const ResampleOptions& opt) {
  SampledField cur = u;
  const int n = u.grid.dim;
  for (const auto& g : gens) {
    switch (g.kind) {
      case MetaplecticGenerator::Kind::FractionalFourier:
        for (int a = 0; a < n; ++a)
          apply_axis_matrix(cur, a, fractional_fourier_matrix(cur.grid.points, cur.grid.halfwidth[a], g.angle));
        break;
      case MetaplecticGenerator::Kind::Dilation:
        cur = linear_substitution(cur, RMat::Identity(n, n) / g.scale, std::pow(g.scale, -n / 2.0), cur.grid, opt);
        break;
      case MetaplecticGenerator::Kind::Chirp: {
        if (g.chirp.rows() != n) fail(Errc::DimensionMismatch, "chirp matrix size");
        std::vector<double> x(n);
        RVec xv(n);
        for (std::size_t i = 0; i < cur.values.size(); ++i) {
          cur.grid.point(i, x.data());
          for (int a = 0; a < n; ++a) xv(a) = x[a];
          cur.values[i] *= std::polar(1.0, 0.5 * xv.dot(g.chirp * xv));
        }
        break;
      }
    }
  }
  return cur;
}

RMat metaplectic_projection(const std::vector<MetaplecticGenerator>& gens, int n) {
  RMat S = RMat::Identity(2 * n, 2 * n);
  const RMat I = RMat::Identity(n, n);
  for (const auto& g : gens) {
    RMat G = RMat::Zero(2 * n, 2 * n);
    switch (g.kind) {
      case MetaplecticGenerator::Kind::FractionalFourier:
        G << std::cos(g.angle) * I, std::sin(g.angle) * I, -std::sin(g.angle) * I, std::cos(g.angle) * I;
        break;
      case MetaplecticGenerator::Kind::Dilation:
        G << g.scale * I, RMat::Zero(n, n), RMat::Zero(n, n), I / g.scale;
        break;
      case MetaplecticGenerator::Kind::Chirp:
        G << I, RMat::Zero(n, n), g.chirp, I;
        break;
    }
    S = G * S;
  }
  return S;
}

cplx fitted_phase(const SampledField& a, const SampledField& b) {
  const cplx c = inner(b, a);
  return std::abs(c) > 0.0 ? c / std::abs(c) : cplx(1.0);
}

}  // namespace bopp
