#include "bopp/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace bopp {

// ---------------------------------------------------------------------------
// GridSpec

GridSpec GridSpec::make(int dim, int points, double L) {
  GridSpec g;
  g.dim = dim;
  g.points = points;
  g.halfwidth.assign(static_cast<std::size_t>(std::max(dim, 0)), L);
  g.validate();
  return g;
}

GridSpec GridSpec::make(int points, std::vector<double> L) {
  GridSpec g;
  g.dim = static_cast<int>(L.size());
  g.points = points;
  g.halfwidth = std::move(L);
  g.validate();
  return g;
}

GridSpec GridSpec::self_dual(int dim, int points, double scale) {
  return make(dim, points, std::sqrt(kPi * points * scale / 2.0));
}

std::size_t GridSpec::total() const {
  std::size_t t = 1;
  for (int a = 0; a < dim; ++a) t *= static_cast<std::size_t>(points);
  return t;
}

double GridSpec::cell() const {
  double c = 1.0;
  for (int a = 0; a < dim; ++a) c *= spacing(a);
  return c;
}

GridSpec GridSpec::dual() const {
  GridSpec g = *this;
  for (int a = 0; a < dim; ++a) g.halfwidth[a] = kPi * points / (2.0 * halfwidth[a]);
  return g;
}

bool GridSpec::matches(const GridSpec& o, double rtol) const {
  if (dim != o.dim || points != o.points) return false;
  for (int a = 0; a < dim; ++a)
    if (std::abs(halfwidth[a] - o.halfwidth[a]) > rtol * std::max(halfwidth[a], o.halfwidth[a])) return false;
  return true;
}

void GridSpec::validate() const {
  if (dim < 1) fail(Errc::GridInvalid, "dimension must be positive");
  if (points < 8 || points % 2) fail(Errc::GridInvalid, "points per axis must be even and >= 8");
  if (static_cast<int>(halfwidth.size()) != dim) fail(Errc::GridInvalid, "one halfwidth per axis required");
  for (double L : halfwidth)
    if (!(L > 0.0) || !std::isfinite(L)) fail(Errc::GridInvalid, "halfwidth must be positive");
  double t = 1.0;
  for (int a = 0; a < dim; ++a) t *= points;
  if (t > static_cast<double>(grid_point_cap()))
    fail(Errc::GridCapExceeded, "grid has " + std::to_string(t) + " points");
}

void GridSpec::point(std::size_t idx, double* z) const {
  for (int a = dim - 1; a >= 0; --a) {
    z[a] = coord(a, static_cast<long>(idx % points));
    idx /= points;
  }
}

std::size_t& grid_point_cap() {
  static std::size_t cap = std::size_t(1) << 24;
  return cap;
}

GridSpec phase_space_grid(const GridSpec& g) {
  const GridSpec d = g.dual();
  std::vector<double> L(g.halfwidth);
  L.insert(L.end(), d.halfwidth.begin(), d.halfwidth.end());
  return GridSpec::make(g.points, L);
}

namespace {

// Returns the column carrying the single nonzero of each row, or empty.
std::vector<int> monomial_pattern(const RMat& g) {
  const double scale = g.cwiseAbs().maxCoeff();
  std::vector<int> perm(g.rows(), -1);
  std::vector<int> used(g.cols(), 0);
  for (int a = 0; a < g.rows(); ++a) {
    for (int b = 0; b < g.cols(); ++b) {
      if (std::abs(g(a, b)) > 1e-12 * scale) {
        if (perm[a] >= 0 || used[b]) return {};
        perm[a] = b;
        used[b] = 1;
      }
    }
    if (perm[a] < 0) return {};
  }
  return perm;
}

}  // namespace

GridSpec grid_image(const GridSpec& G, const RMat& g) {
  if (g.rows() != G.dim) fail(Errc::DimensionMismatch, "grid_image");
  const auto perm = monomial_pattern(g);
  if (perm.empty()) return G;
  std::vector<double> L(G.dim);
  for (int a = 0; a < G.dim; ++a) L[a] = std::abs(g(a, perm[a])) * G.halfwidth[perm[a]];
  return GridSpec::make(G.points, L);
}

GridSpec adapted_grid(const SymplecticForm& form, int points, bool* exact) {
  const int n = form.n;
  const RMat J = standard_J(n);
  const double c = form.omega(0, n);
  auto set = [&](bool e) {
    if (exact) *exact = e;
  };
  if ((form.omega - c * J).cwiseAbs().maxCoeff() <= 1e-12 * std::abs(c)) {
    set(true);
    return GridSpec::self_dual(2 * n, points, std::abs(c));
  }
  // Theta-only block form [[Theta, I], [-I, 0]].
  const RMat I = RMat::Identity(n, n);
  const bool blocks = (form.omega.topRightCorner(n, n) - I).cwiseAbs().maxCoeff() < 1e-12 &&
                      (form.omega.bottomLeftCorner(n, n) + I).cwiseAbs().maxCoeff() < 1e-12 &&
                      form.omega.bottomRightCorner(n, n).cwiseAbs().maxCoeff() < 1e-12;
  if (blocks) {
    const RMat theta = form.omega.topLeftCorner(n, n);
    double tmin = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double v = std::abs(theta(i, j));
        if (v > 1e-12 && (tmin == 0.0 || v < tmin)) tmin = v;
      }
    const double t = tmin > 0.0 ? 1.0 / tmin : 1.0;
    bool integral = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double v = theta(i, j) * t;
        if (std::abs(v - std::round(v)) > 1e-9) integral = false;
      }
    if (integral) {
      // h_x h_xi N = 2 pi and h_xi^2 N = 2 pi t.
      const double hxi = std::sqrt(2.0 * kPi * t / points);
      const double hx = 2.0 * kPi / (points * hxi);
      std::vector<double> L(2 * n);
      for (int a = 0; a < n; ++a) {
        L[a] = hx * points / 2.0;
        L[n + a] = hxi * points / 2.0;
      }
      set(true);
      return GridSpec::make(points, L);
    }
  }
  set(false);
  return GridSpec::self_dual(2 * n, points, std::pow(form.det_abs, 1.0 / (2 * n)));
}

// ---------------------------------------------------------------------------
// SampledField

SampledField::SampledField(const GridSpec& g) : grid(g), values(g.total(), cplx(0.0)) {}

SampledField SampledField::sample(const GridSpec& g, const std::function<cplx(const double*)>& fn) {
  g.validate();
  SampledField U(g);
  std::vector<double> z(g.dim);
  for (std::size_t i = 0; i < U.values.size(); ++i) {
    g.point(i, z.data());
    U.values[i] = fn(z.data());
  }
  return U;
}

double SampledField::norm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s * grid.cell());
}

double SampledField::boundary_mass() const {
  double total = 0.0, shell = 0.0;
  std::vector<double> z(grid.dim);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double m = std::norm(values[i]);
    total += m;
    grid.point(i, z.data());
    for (int a = 0; a < grid.dim; ++a)
      if (std::abs(z[a]) > 0.9 * grid.halfwidth[a]) {
        shell += m;
        break;
      }
  }
  return total > 0.0 ? shell / total : 0.0;
}

namespace {

void require_same(const SampledField& a, const SampledField& b, const char* what) {
  if (!a.grid.matches(b.grid) || a.values.size() != b.values.size()) fail(Errc::GridMismatch, what);
}

}  // namespace

SampledField operator+(const SampledField& a, const SampledField& b) {
  require_same(a, b, "operator+");
  SampledField r = a;
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] += b.values[i];
  return r;
}

SampledField operator-(const SampledField& a, const SampledField& b) {
  require_same(a, b, "operator-");
  SampledField r = a;
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] -= b.values[i];
  return r;
}

SampledField operator*(cplx s, const SampledField& a) {
  SampledField r = a;
  for (auto& v : r.values) v *= s;
  return r;
}

cplx inner(const SampledField& U, const SampledField& V) {
  require_same(U, V, "inner");
  cplx s = 0.0;
  for (std::size_t i = 0; i < U.values.size(); ++i) s += U.values[i] * std::conj(V.values[i]);
  return s * U.grid.cell();
}

double norm(const SampledField& U) { return U.norm(); }

double rel_diff(const SampledField& U, const SampledField& V) {
  require_same(U, V, "rel_diff");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < U.values.size(); ++i) {
    num += std::norm(U.values[i] - V.values[i]);
    den += std::norm(V.values[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// ---------------------------------------------------------------------------
// FFT plumbing

namespace {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache c;
    return c;
  }
  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<cplx> buf(n);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan = fftw_plan_dft_1d(n, p, p, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_[key] = plan;
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

void fft_inplace(cplx* buf, int n, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(buf);
  fftw_execute_dft(PlanCache::instance().get(n, sign), p, p);
}

// Applies fn to every 1-D line along `axis`.
template <class Fn>
void for_each_line(std::vector<cplx>& data, int N, int dim, int axis, Fn&& fn) {
  std::size_t stride = 1;
  for (int a = axis + 1; a < dim; ++a) stride *= N;
  const std::size_t block = stride * N;
  const std::size_t nblocks = data.size() / block;
  std::vector<cplx> line(N);
  for (std::size_t b = 0; b < nblocks; ++b)
    for (std::size_t s = 0; s < stride; ++s) {
      cplx* base = data.data() + b * block + s;
      for (int k = 0; k < N; ++k) line[k] = base[k * stride];
      fn(line);
      for (int k = 0; k < N; ++k) base[k * stride] = line[k];
    }
}

}  // namespace

void dft_axis(std::vector<cplx>& data, int points, int dim, int axis, int sign) {
  for_each_line(data, points, dim, axis, [&](std::vector<cplx>& line) { fft_inplace(line.data(), points, sign); });
}

void dft_centered(std::vector<cplx>& data, int points, int dim, int sign) {
  const int half = points / 2;
  std::vector<cplx> tmp(points);
  for (int axis = 0; axis < dim; ++axis)
    for_each_line(data, points, dim, axis, [&](std::vector<cplx>& line) {
      for (int k = 0; k < points; ++k) tmp[k] = line[(k + half) % points];
      fft_inplace(tmp.data(), points, sign);
      for (int k = 0; k < points; ++k) line[(k + half) % points] = tmp[k];
    });
}

SampledField fourier(const SampledField& U, int sign) {
  if (sign != 1 && sign != -1) fail(Errc::InvalidArgument, "fourier sign must be +1 or -1");
  SampledField out(U.grid.dual());
  out.values = U.values;
  dft_centered(out.values, U.grid.points, U.grid.dim, sign);
  const double scale = U.grid.cell() / std::pow(2.0 * kPi, U.grid.dim / 2.0);
  for (auto& v : out.values) v *= scale;
  return out;
}

// ---------------------------------------------------------------------------
// Interpolation and substitutions

cplx contract_axes(const std::vector<cplx>& data, int points, int dim, const std::vector<std::vector<cplx>>& vecs,
                   std::vector<cplx>& work) {
  // Reduce the last axis first; the first pass reads `data` directly.
  std::size_t len = data.size() / points;
  work.resize(len);
  const std::vector<cplx>& e = vecs[dim - 1];
  for (std::size_t i = 0; i < len; ++i) {
    const cplx* row = data.data() + i * points;
    cplx s = 0.0;
    for (int m = 0; m < points; ++m) s += row[m] * e[m];
    work[i] = s;
  }
  for (int a = dim - 2; a >= 0; --a) {
    const std::vector<cplx>& ea = vecs[a];
    const std::size_t next = len / points;
    for (std::size_t i = 0; i < next; ++i) {
      cplx s = 0.0;
      for (int m = 0; m < points; ++m) s += work[i * points + m] * ea[m];
      work[i] = s;
    }
    len = next;
  }
  return work[0];
}

TrigInterpolator::TrigInterpolator(const SampledField& U) : grid_(U.grid), coeff_(U.values) {
  for (int a = 0; a < grid_.dim; ++a) dft_axis(coeff_, grid_.points, grid_.dim, a, -1);
  const double inv = std::pow(static_cast<double>(grid_.points), -grid_.dim);
  for (auto& c : coeff_) c *= inv;
  phase_.assign(grid_.dim, std::vector<cplx>(grid_.points));
}

cplx TrigInterpolator::operator()(const double* p) const {
  const int N = grid_.points;
  for (int a = 0; a < grid_.dim; ++a) {
    const double t = (p[a] + grid_.halfwidth[a]) / grid_.spacing(a);
    for (int k = 0; k < N; ++k) {
      const int m = k < N / 2 ? k : k - N;
      const double arg = 2.0 * kPi * m * t / N;
      phase_[a][k] = cplx(std::cos(arg), std::sin(arg));
    }
  }
  return contract_axes(coeff_, N, grid_.dim, phase_, work_);
}

namespace {

long wrap(long k, long N) {
  k %= N;
  return k < 0 ? k + N : k;
}

bool integer_ratio(const GridSpec& in, const RMat& T, const GridSpec& out, Eigen::MatrixXi* R) {
  if (in.points != out.points) return false;
  Eigen::MatrixXi r(T.rows(), T.cols());
  for (int a = 0; a < T.rows(); ++a)
    for (int b = 0; b < T.cols(); ++b) {
      const double v = T(a, b) * out.spacing(b) / in.spacing(a);
      const double rv = std::round(v);
      if (std::abs(v - rv) > 1e-9 * std::max(1.0, std::abs(v))) return false;
      r(a, b) = static_cast<int>(rv);
    }
  if (R) *R = r;
  return true;
}

}  // namespace

bool substitution_is_exact(const GridSpec& in, const RMat& T, const GridSpec& out) {
  return integer_ratio(in, T, out, nullptr);
}

SampledField linear_substitution(const SampledField& U, const RMat& T, double scale, const GridSpec& out_grid,
                                 const ResampleOptions& opt) {
  const GridSpec& in = U.grid;
  if (T.rows() != in.dim || T.cols() != out_grid.dim) fail(Errc::DimensionMismatch, "linear_substitution");
  out_grid.validate();
  SampledField out(out_grid);
  const int N = in.points;
  const int d = in.dim;
  Eigen::MatrixXi R;
  if (integer_ratio(in, T, out_grid, &R)) {
    std::vector<long> kout(d), kin(d);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      std::size_t rem = i;
      for (int b = d - 1; b >= 0; --b) {
        kout[b] = static_cast<long>(rem % N) - N / 2;
        rem /= N;
      }
      std::size_t idx = 0;
      for (int a = 0; a < d; ++a) {
        long s = 0;
        for (int b = 0; b < d; ++b) s += R(a, b) * kout[b];
        idx = idx * N + static_cast<std::size_t>(wrap(s + N / 2, N));
      }
      out.values[i] = scale * U.values[idx];
    }
    if (opt.estimate) *opt.estimate = 0.0;
    return out;
  }
  TrigInterpolator interp(U);
  std::vector<double> z(d);
  RVec zv(d), p(d);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out_grid.point(i, z.data());
    for (int a = 0; a < d; ++a) zv(a) = z[a];
    p = T * zv;
    out.values[i] = scale * interp(p.data());
  }
  if (opt.verify || opt.estimate) {
    // Map back; preimages outside the output box read as zero rather than the
    // periodic wrap, so mass pushed out of the box still counts as error.
    const TrigInterpolator back(out);
    const RMat Ti = T.inverse();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < U.values.size(); ++i) {
      in.point(i, z.data());
      for (int a = 0; a < d; ++a) zv(a) = z[a];
      p = Ti * zv;
      bool inside = true;
      for (int a = 0; a < d; ++a) inside = inside && std::abs(p(a)) <= out_grid.halfwidth[a];
      const cplx b = inside ? back(p.data()) / scale : cplx(0.0);
      num += std::norm(b - U.values[i]);
      den += std::norm(U.values[i]);
    }
    const double err = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    if (opt.estimate) *opt.estimate = err;
    if (opt.verify && err > opt.tol)
      fail(Errc::ResampleInaccurate, "round-trip residual " + std::to_string(err));
  }
  return out;
}

SampledField pushforward_matrix(const SampledField& U, const RMat& f, Direction dir, const GridSpec* out_grid,
                                const ResampleOptions& opt) {
  const double det = std::abs(f.determinant());
  const RMat g = dir == Direction::Forward ? RMat(f) : RMat(f.inverse());
  const double scale = dir == Direction::Forward ? std::sqrt(det) : 1.0 / std::sqrt(det);
  const GridSpec out = out_grid ? *out_grid : grid_image(U.grid, g.inverse());
  return linear_substitution(U, g, scale, out, opt);
}

SampledField pushforward_Mf(const SampledField& U, const DarbouxFactor& factor, Direction dir, const GridSpec* out_grid,
                            const ResampleOptions& opt) {
  if (U.grid.dim != factor.f.rows()) fail(Errc::DimensionMismatch, "pushforward_Mf");
  return pushforward_matrix(U, factor.f, dir, out_grid, opt);
}

SampledField sympl_fourier_sigma(const SampledField& A) {
  if (A.grid.dim % 2) fail(Errc::GridMismatch, "symplectic Fourier transform needs an even-dimensional grid");
  const int n = A.grid.dim / 2;
  const SampledField FA = fourier(A, -1);
  std::vector<double> L(2 * n);
  for (int a = 0; a < n; ++a) {
    L[a] = FA.grid.halfwidth[n + a];
    L[n + a] = FA.grid.halfwidth[a];
  }
  return linear_substitution(FA, standard_J(n), 1.0, GridSpec::make(A.grid.points, L));
}

SampledField sympl_fourier_omega(const SampledField& A, const SymplecticForm& form, const ResampleOptions& opt) {
  if (A.grid.dim != 2 * form.n) fail(Errc::GridMismatch, "F_omega grid dimension differs from 2n");
  const RMat T = -form.omega_inv;
  const double scale = 1.0 / std::sqrt(form.det_abs);
  const GridSpec dual = A.grid.dual();
  if (substitution_is_exact(dual, T, A.grid)) {
    const SampledField FA = fourier(A, -1);
    ResampleOptions o;
    o.verify = false;
    if (opt.estimate) *opt.estimate = 0.0;
    return linear_substitution(FA, T, scale, A.grid, o);
  }
  // Off-lattice: evaluate the discrete transform directly at w = T z.
  auto direct = [&](const SampledField& X) {
    const GridSpec& g = X.grid;
    const int N = g.points, d = g.dim;
    SampledField out(g);
    const double pre = scale * g.cell() / std::pow(2.0 * kPi, d / 2.0);
    std::vector<std::vector<cplx>> vecs(d, std::vector<cplx>(N));
    std::vector<cplx> work;
    std::vector<double> z(d);
    RVec zv(d), w(d);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      g.point(i, z.data());
      for (int a = 0; a < d; ++a) zv(a) = z[a];
      w = T * zv;
      for (int a = 0; a < d; ++a)
        for (int k = 0; k < N; ++k) vecs[a][k] = std::polar(1.0, -w(a) * g.coord(a, k));
      out.values[i] = pre * contract_axes(X.values, N, d, vecs, work);
    }
    return out;
  };
  SampledField out = direct(A);
  if (opt.verify || opt.estimate) {
    const double err = rel_diff(direct(out), A);
    if (opt.estimate) *opt.estimate = err;
    if (opt.verify && err > opt.tol) fail(Errc::ResampleInaccurate, "F_omega round-trip residual " + std::to_string(err));
  }
  return out;
}

SampledField shift_field(const SampledField& U, const std::vector<double>& s) {
  const GridSpec& g = U.grid;
  if (static_cast<int>(s.size()) != g.dim) fail(Errc::DimensionMismatch, "shift_field");
  const int N = g.points;
  SampledField out = U;
  for (int a = 0; a < g.dim; ++a) {
    const double t = s[a] / g.spacing(a);
    if (t == 0.0) continue;
    const double rt = std::round(t);
    if (std::abs(t - rt) < 1e-12) {
      const long sh = wrap(static_cast<long>(rt), N);
      for_each_line(out.values, N, g.dim, a, [&](std::vector<cplx>& line) {
        std::vector<cplx> tmp(line);
        for (int k = 0; k < N; ++k) line[(k + sh) % N] = tmp[k];
      });
      continue;
    }
    std::vector<cplx> ph(N);
    for (int k = 0; k < N; ++k) {
      const int m = k < N / 2 ? k : k - N;
      ph[k] = std::polar(1.0 / N, -2.0 * kPi * m * t / N);
    }
    for_each_line(out.values, N, g.dim, a, [&](std::vector<cplx>& line) {
      fft_inplace(line.data(), N, -1);
      for (int k = 0; k < N; ++k) line[k] *= ph[k];
      fft_inplace(line.data(), N, +1);
    });
  }
  return out;
}

SampledField upsample2(const SampledField& U) {
  const GridSpec& g = U.grid;
  const int N = g.points, M = 2 * N;
  std::vector<cplx> cur = U.values;
  std::vector<std::size_t> shape(g.dim, N);
  for (int a = 0; a < g.dim; ++a) {
    std::size_t outer = 1, inner = 1;
    for (int b = 0; b < a; ++b) outer *= shape[b];
    for (int b = a + 1; b < g.dim; ++b) inner *= shape[b];
    std::vector<cplx> next(outer * M * inner);
    std::vector<cplx> line(N), big(M);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t i = 0; i < inner; ++i) {
        for (int k = 0; k < N; ++k) line[k] = cur[(o * N + k) * inner + i];
        fft_inplace(line.data(), N, -1);
        std::fill(big.begin(), big.end(), cplx(0.0));
        for (int k = 0; k < N; ++k) {
          const int m = k < N / 2 ? k : k - N;
          big[wrap(m, M)] = line[k] / static_cast<double>(N);
        }
        fft_inplace(big.data(), M, +1);
        for (int k = 0; k < M; ++k) next[(o * M + k) * inner + i] = big[k];
      }
    cur.swap(next);
    shape[a] = M;
  }
  SampledField out(GridSpec::make(M, g.halfwidth));
  out.values = std::move(cur);
  return out;
}

}  // namespace bopp
