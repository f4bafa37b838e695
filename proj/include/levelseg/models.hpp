#pragma once

// Contour models as force-field computations, plus the explicit evolution
// engine that drives any of them.
//
//   cv        global two-phase means (Chan-Vese)
//   lbf       kernel-weighted local binary fitting
//   lif       local image fitting with truncated-window means
//   sdrel     edge-weighted global intensity + saliency fitting
//   proposed  local saliency fitting + local image fitting
//
// All images are expected on a 0..255 scale; the default length weight
// (0.001 * 255^2) presumes it.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "levelseg/levelset.hpp"
#include "levelseg/raster.hpp"
#include "levelseg/saliency.hpp"

namespace levelseg {

enum class ModelId { cv, lbf, lif, sdrel, proposed };

inline constexpr ModelId kAllModels[] = {ModelId::cv, ModelId::lbf, ModelId::lif, ModelId::sdrel,
                                         ModelId::proposed};

inline std::string_view model_name(ModelId id) {
  switch (id) {
    case ModelId::cv: return "cv";
    case ModelId::lbf: return "lbf";
    case ModelId::lif: return "lif";
    case ModelId::sdrel: return "sdrel";
    case ModelId::proposed: return "proposed";
  }
  return "?";
}

inline std::optional<ModelId> parse_model_id(std::string_view s) {
  for (ModelId id : kAllModels)
    if (model_name(id) == s) return id;
  return std::nullopt;
}

inline bool needs_saliency(ModelId id) { return id == ModelId::sdrel || id == ModelId::proposed; }

struct ModelParams {
  double dt = 0.1;
  double p = 2.0;
  double eps = 1.5;
  double mu = 1.0;
  double nu = 0.001 * 255.0 * 255.0;
  double sigma_s = 3.5;
  double sigma_m = 3.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double sigma_lbf = 3.0;
  double nu_cv = 0.0;  // CV area weight
  int max_iters = 1000;
  double tol = 1e-3;  // stop when sign flips < tol * pixels for 5 iterations

  void validate() const {
    auto fail = [](const std::string& what) { throw InvalidParameter("model params: " + what); };
    if (!(dt > 0)) fail("dt must be > 0");
    if (!(eps > 0)) fail("eps must be > 0");
    if (!(p > 0)) fail("p must be > 0");
    if (!(mu >= 0)) fail("mu must be >= 0");
    if (!(nu >= 0)) fail("nu must be >= 0");
    if (!(sigma_s > 1)) fail("sigma_s must be > 1");
    if (!(sigma_m > 1)) fail("sigma_m must be > 1");
    if (!(sigma_lbf > 0)) fail("sigma_lbf must be > 0");
    if (max_iters < 1) fail("max_iters must be >= 1");
    if (!(tol >= 0)) fail("tol must be >= 0");
  }
};

// dphi/dt samples. `degenerate` is set when a region statistic had an empty
// support and its denominator was clamped.
struct ForceField {
  Raster values;
  bool degenerate = false;
};

inline constexpr double kDenominatorFloor = 1e-10;

// ---------------------------------------------------------------------------
// Shared pieces

// nu * dirac * curvature + mu * (laplacian - curvature).
inline Raster regularizer_force(const LevelSetField& phi, const ModelParams& params) {
  const Raster k = curvature(phi);
  const Raster lap = laplacian(phi.values());
  Raster out(phi.width(), phi.height());
  auto dst = out.plane();
  auto kv = k.plane(), lv = lap.plane();
  auto pv = phi.samples();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] = params.nu * dirac(pv[i], params.eps) * kv[i] + params.mu * (lv[i] - kv[i]);
  return out;
}

inline void add_into(Raster& dst, const Raster& src) {
  auto d = dst.plane();
  auto s = src.plane();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

inline void require_gray(const Raster& img, const char* who) {
  if (img.channels() != 1) throw InvalidParameter(std::string(who) + " expects a grayscale image");
}

inline void require_grid(const Raster& img, const LevelSetField& phi) {
  if (img.width() != phi.width() || img.height() != phi.height())
    throw InvalidParameter("image and level set dimensions differ");
}

// ---------------------------------------------------------------------------
// Global region means

struct RegionMeans {
  double c1 = 0.0;  // inside, weighted by H(phi)
  double c2 = 0.0;  // outside, weighted by 1 - H(phi)
  bool degenerate = false;
};

inline RegionMeans region_means_global(const Raster& field, const LevelSetField& phi, double eps) {
  require_gray(field, "region_means_global");
  require_grid(field, phi);
  auto f = field.plane();
  auto pv = phi.samples();
  double num1 = 0, den1 = 0, num2 = 0, den2 = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double h = heaviside(pv[i], eps);
    num1 += f[i] * h;
    den1 += h;
    num2 += f[i] * (1.0 - h);
    den2 += 1.0 - h;
  }
  RegionMeans m;
  m.degenerate = den1 < kDenominatorFloor || den2 < kDenominatorFloor;
  m.c1 = num1 / std::max(den1, kDenominatorFloor);
  m.c2 = num2 / std::max(den2, kDenominatorFloor);
  return m;
}

// ---------------------------------------------------------------------------
// Chan-Vese

// dirac * (-l1 (I-c1)^2 + l2 (I-c2)^2 + mu * curvature - nu_cv).
inline ForceField cv_force(const Raster& img, const LevelSetField& phi, const ModelParams& params) {
  require_gray(img, "cv_force");
  const RegionMeans c = region_means_global(img, phi, params.eps);
  const Raster k = curvature(phi);
  ForceField out{Raster(img.width(), img.height()), c.degenerate};
  auto dst = out.values.plane();
  auto iv = img.plane();
  auto kv = k.plane();
  auto pv = phi.samples();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double d1 = iv[i] - c.c1, d2 = iv[i] - c.c2;
    dst[i] = dirac(pv[i], params.eps) *
             (-params.lambda1 * d1 * d1 + params.lambda2 * d2 * d2 + params.mu * kv[i] - params.nu_cv);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Local binary fitting

inline Kernel lbf_kernel(double sigma) {
  return gaussian_kernel(sigma, 4 * static_cast<int>(std::floor(sigma)) + 1);
}

// Kernel-smoothed ratio num/den with the denominator clamped.
inline Raster safe_ratio(const Raster& num, const Raster& den, bool* degenerate = nullptr) {
  Raster out(num.width(), num.height());
  auto n = num.plane(), d = den.plane();
  auto o = out.plane();
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (d[i] < kDenominatorFloor && degenerate) *degenerate = true;
    o[i] = n[i] / std::max(d[i], kDenominatorFloor);
  }
  return out;
}

// f1 = K*(H I) / K*H, f2 = K*((1-H) I) / K*(1-H).
inline std::pair<Raster, Raster> lbf_fits(const Raster& img, const LevelSetField& phi,
                                          const ModelParams& params) {
  require_gray(img, "lbf_fits");
  require_grid(img, phi);
  const Kernel K = lbf_kernel(params.sigma_lbf);
  Raster h = heaviside(phi, params.eps);
  Raster hi(img.width(), img.height()), h2(img.width(), img.height()), h2i(img.width(), img.height());
  auto hv = h.plane();
  auto iv = img.plane();
  auto a = hi.plane(), b = h2.plane(), c = h2i.plane();
  for (std::size_t i = 0; i < hv.size(); ++i) {
    a[i] = hv[i] * iv[i];
    b[i] = 1.0 - hv[i];
    c[i] = b[i] * iv[i];
  }
  return {safe_ratio(convolve2d(hi, K), convolve2d(h, K)),
          safe_ratio(convolve2d(h2i, K), convolve2d(h2, K))};
}

// e_i(x) = sum_y K(y - x) |I(x) - f_i(y)|^2, via I^2 (K*1) - 2 I (K*f_i) + K*f_i^2.
inline std::pair<Raster, Raster> lbf_residuals(const Raster& img, const Raster& f1, const Raster& f2,
                                               const Kernel& K) {
  const Raster k1 = convolve2d(Raster(img.width(), img.height(), 1, 1.0), K);
  auto residual = [&](const Raster& f) {
    Raster f_sq = f;
    for (double& v : f_sq.plane()) v *= v;
    const Raster kf = convolve2d(f, K);
    const Raster kf2 = convolve2d(f_sq, K);
    Raster e(img.width(), img.height());
    auto iv = img.plane(), one = k1.plane(), a = kf.plane(), b = kf2.plane();
    auto ev = e.plane();
    for (std::size_t i = 0; i < ev.size(); ++i) ev[i] = iv[i] * iv[i] * one[i] - 2.0 * iv[i] * a[i] + b[i];
    return e;
  };
  return {residual(f1), residual(f2)};
}

inline ForceField lbf_data_force(const Raster& img, const LevelSetField& phi, const ModelParams& params) {
  auto [f1, f2] = lbf_fits(img, phi, params);
  auto [e1, e2] = lbf_residuals(img, f1, f2, lbf_kernel(params.sigma_lbf));
  ForceField out{Raster(img.width(), img.height())};
  auto dst = out.values.plane();
  auto a = e1.plane(), b = e2.plane();
  auto pv = phi.samples();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] = dirac(pv[i], params.eps) * (-params.lambda1 * a[i] + params.lambda2 * b[i]);
  return out;
}

inline ForceField lbf_force(const Raster& img, const LevelSetField& phi, const ModelParams& params) {
  ForceField out = lbf_data_force(img, phi, params);
  add_into(out.values, regularizer_force(phi, params));
  return out;
}

// ---------------------------------------------------------------------------
// Local image fitting and its saliency counterpart

struct LocalMeans {
  Raster m1;  // inside (phi > 0)
  Raster m2;  // outside (phi <= 0)
  bool degenerate = false;
};

// Window-weighted means over the hard inside/outside indicators. Works per
// channel for vector-valued fields.
inline LocalMeans local_means_window(const Raster& field, const LevelSetField& phi, const Kernel& window) {
  require_grid(field, phi);
  const int w = field.width(), h = field.height();
  Raster in(w, h), out(w, h);
  auto pv = phi.samples();
  auto iv = in.plane(), ov = out.plane();
  for (std::size_t i = 0; i < pv.size(); ++i) {
    iv[i] = pv[i] > 0.0 ? 1.0 : 0.0;
    ov[i] = 1.0 - iv[i];
  }
  const Raster win_in = convolve2d(in, window);
  const Raster win_out = convolve2d(out, window);

  LocalMeans lm{Raster(w, h, field.channels()), Raster(w, h, field.channels())};
  for (int c = 0; c < field.channels(); ++c) {
    Raster fin(w, h), fout(w, h);
    auto src = field.plane(c);
    auto a = fin.plane(), b = fout.plane();
    for (std::size_t i = 0; i < src.size(); ++i) {
      a[i] = src[i] * iv[i];
      b[i] = src[i] * ov[i];
    }
    Raster r1 = safe_ratio(convolve2d(fin, window), win_in, &lm.degenerate);
    Raster r2 = safe_ratio(convolve2d(fout, window), win_out, &lm.degenerate);
    // A window holding no pixels of one region borrows the other region's
    // mean, so the fitting term carries no contrast there.
    auto a1 = r1.plane();
    auto a2 = r2.plane();
    auto wi = win_in.plane();
    auto wo = win_out.plane();
    for (std::size_t i = 0; i < a1.size(); ++i) {
      if (wi[i] < kDenominatorFloor)
        a1[i] = a2[i];
      else if (wo[i] < kDenominatorFloor)
        a2[i] = a1[i];
    }
    std::copy(r1.plane().begin(), r1.plane().end(), lm.m1.plane(c).begin());
    std::copy(r2.plane().begin(), r2.plane().end(), lm.m2.plane(c).begin());
  }
  return lm;
}

// m1 H(phi) + m2 (1 - H(phi)), per channel.
inline Raster fitted_image(const Raster& m1, const Raster& m2, const LevelSetField& phi, double eps) {
  if (!m1.same_shape(m2)) throw InvalidParameter("fitted_image: m1 and m2 shapes differ");
  require_grid(m1, phi);
  Raster out(m1.width(), m1.height(), m1.channels());
  auto pv = phi.samples();
  for (int c = 0; c < m1.channels(); ++c) {
    auto a = m1.plane(c), b = m2.plane(c);
    auto o = out.plane(c);
    for (std::size_t i = 0; i < o.size(); ++i) {
      const double hv = heaviside(pv[i], eps);
      o[i] = a[i] * hv + b[i] * (1.0 - hv);
    }
  }
  return out;
}

// (F - F_fit) . (m1 - m2) * dirac(phi). For vector fields the product of
// the two differences is their inner product.
inline ForceField local_fitting_term(const Raster& field, const LevelSetField& phi, double window_sigma,
                                     double eps) {
  const LocalMeans lm = local_means_window(field, phi, truncated_window(window_sigma));
  const Raster fit = fitted_image(lm.m1, lm.m2, phi, eps);
  ForceField out{Raster(field.width(), field.height()), lm.degenerate};
  auto dst = out.values.plane();
  for (int c = 0; c < field.channels(); ++c) {
    auto f = field.plane(c), fi = fit.plane(c), a = lm.m1.plane(c), b = lm.m2.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += (f[i] - fi[i]) * (a[i] - b[i]);
  }
  auto pv = phi.samples();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= dirac(pv[i], eps);
  return out;
}

inline ForceField lif_force(const Raster& img, const LevelSetField& phi, const ModelParams& params) {
  require_gray(img, "lif_force");
  return local_fitting_term(img, phi, params.sigma_m, params.eps);
}

// ---------------------------------------------------------------------------
// SDREL

// 1 / (1 + |grad(G * I)|^2); squared gradient magnitudes add across channels.
inline Raster edge_indicator(const Raster& img, double sigma = 0.8, int ksize = 3) {
  const Raster blurred = convolve_channels(img, gaussian_kernel(sigma, ksize));
  Raster g(img.width(), img.height());
  auto gv = g.plane();
  for (int c = 0; c < img.channels(); ++c) {
    auto [gx, gy] = gradient(blurred.channel(c));
    auto a = gx.plane(), b = gy.plane();
    for (std::size_t i = 0; i < gv.size(); ++i) gv[i] += a[i] * a[i] + b[i] * b[i];
  }
  for (double& v : gv) v = 1.0 / (1.0 + v);
  return g;
}

// g * (-l1 |I-c1|^2 + l2 |I-c2|^2 - a1 (S-s1)^2 + a2 (S-s2)^2).
inline ForceField sdrel_data_force(const Raster& img, const SaliencyMap& S, const LevelSetField& phi,
                                   const ModelParams& params) {
  require_grid(img, phi);
  require_grid(S.values(), phi);
  const Raster g = edge_indicator(img);
  ForceField out{Raster(img.width(), img.height())};
  auto dst = out.values.plane();
  for (int c = 0; c < img.channels(); ++c) {
    const Raster ch = img.channel(c);
    const RegionMeans m = region_means_global(ch, phi, params.eps);
    out.degenerate = out.degenerate || m.degenerate;
    auto iv = ch.plane();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      const double d1 = iv[i] - m.c1, d2 = iv[i] - m.c2;
      dst[i] += -params.lambda1 * d1 * d1 + params.lambda2 * d2 * d2;
    }
  }
  const RegionMeans s = region_means_global(S.values(), phi, params.eps);
  out.degenerate = out.degenerate || s.degenerate;
  auto sv = S.values().plane();
  auto gv = g.plane();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double d1 = sv[i] - s.c1, d2 = sv[i] - s.c2;
    dst[i] = gv[i] * (dst[i] - params.alpha1 * d1 * d1 + params.alpha2 * d2 * d2);
  }
  return out;
}

inline ForceField sdrel_force(const Raster& img, const SaliencyMap& S, const LevelSetField& phi,
                              const ModelParams& params) {
  ForceField out = sdrel_data_force(img, S, phi, params);
  add_into(out.values, regularizer_force(phi, params));
  return out;
}

// ---------------------------------------------------------------------------
// Proposed: local saliency fitting + local image fitting

inline ForceField proposed_data_force(const Raster& img, const SaliencyMap& S, const LevelSetField& phi,
                                      const ModelParams& params) {
  require_grid(img, phi);
  ForceField out = local_fitting_term(S.values(), phi, params.sigma_s, params.eps);
  const ForceField image_term = local_fitting_term(img, phi, params.sigma_m, params.eps);
  add_into(out.values, image_term.values);
  out.degenerate = out.degenerate || image_term.degenerate;
  return out;
}

inline ForceField proposed_force(const Raster& img, const SaliencyMap& S, const LevelSetField& phi,
                                 const ModelParams& params) {
  ForceField out = proposed_data_force(img, S, phi, params);
  add_into(out.values, regularizer_force(phi, params));
  return out;
}

// ---------------------------------------------------------------------------
// Evolution engine

class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(int iteration, double max_abs_force)
      : std::runtime_error(describe(iteration, max_abs_force)),
        iteration_(iteration),
        max_abs_force_(max_abs_force) {}

  int iteration() const noexcept { return iteration_; }
  double max_abs_force() const noexcept { return max_abs_force_; }

 private:
  static std::string describe(int iteration, double max_abs_force) {
    std::ostringstream os;
    os << "level set became non-finite at iteration " << iteration << " (max |force| = " << max_abs_force
       << ")";
    return os.str();
  }

  int iteration_;
  double max_abs_force_;
};

struct EvolutionTrace {
  int iterations_run = 0;
  bool converged = false;  // stopped by the stagnation rule rather than max_iters
  std::vector<std::size_t> changed_pixels;  // sign flips per iteration
  std::vector<double> max_abs_force;        // per iteration
  LevelSetField phi;
  BinaryMask mask;
  double wall_ms = 0.0;
};

inline constexpr int kStagnationWindow = 5;

inline ForceField model_force(ModelId model, const Raster& img, const SaliencyMap* S,
                              const LevelSetField& phi, const ModelParams& params) {
  switch (model) {
    case ModelId::cv: return cv_force(img, phi, params);
    case ModelId::lbf: return lbf_force(img, phi, params);
    case ModelId::lif: return lif_force(img, phi, params);
    case ModelId::sdrel: return sdrel_force(img, *S, phi, params);
    case ModelId::proposed: return proposed_force(img, *S, phi, params);
  }
  throw InvalidParameter("unknown model");
}

// Explicit Euler: phi <- phi + dt * force(phi), until max_iters or the number
// of sign flips stays below tol * pixels for kStagnationWindow iterations.
inline EvolutionTrace evolve(ModelId model, const Raster& img, const SaliencyMap* S, LevelSetField phi,
                             const ModelParams& params) {
  params.validate();
  require_grid(img, phi);
  if (needs_saliency(model) && S == nullptr)
    throw InvalidParameter(std::string(model_name(model)) + " requires a saliency map");
  if (!needs_saliency(model) && img.channels() != 1)
    throw InvalidParameter(std::string(model_name(model)) + " runs on grayscale images only");

  const auto start = std::chrono::steady_clock::now();
  EvolutionTrace trace;
  const double flip_limit = params.tol * static_cast<double>(phi.pixel_count());
  int quiet = 0;
  for (int it = 1; it <= params.max_iters; ++it) {
    const ForceField force = model_force(model, img, S, phi, params);
    auto fv = force.values.plane();
    auto pv = phi.samples();
    double peak = 0.0;
    std::size_t flips = 0;
    bool finite = true;
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double next = pv[i] + params.dt * fv[i];
      if (!std::isfinite(next)) finite = false;
      peak = std::max(peak, std::abs(fv[i]));
      if ((next > 0.0) != (pv[i] > 0.0)) ++flips;
      pv[i] = next;
    }
    if (!finite) throw NumericalAbort(it, peak);
    trace.changed_pixels.push_back(flips);
    trace.max_abs_force.push_back(peak);
    trace.iterations_run = it;
    quiet = static_cast<double>(flips) < flip_limit ? quiet + 1 : 0;
    if (quiet >= kStagnationWindow) {
      trace.converged = true;
      break;
    }
  }
  trace.mask = mask_from_phi(phi);
  trace.phi = std::move(phi);
  trace.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

}  // namespace levelseg
