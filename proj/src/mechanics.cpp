#include "ponder/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ponder/constants.hpp"

namespace ponder {

void Oscillator::validate() const {
  if (modes.empty()) throw std::invalid_argument("oscillator: mode list must be non-empty");
  if (!(temperature > 0.0))
    throw std::invalid_argument("oscillator: temperature must be > 0");
  double prev = 0.0;
  for (size_t i = 0; i < modes.size(); ++i) {
    const MechMode& m = modes[i];
    if (!(m.freq > 0.0))
      throw std::invalid_argument("oscillator: mode " + std::to_string(i) + " freq must be > 0");
    if (!(m.modal_mass > 0.0))
      throw std::invalid_argument("oscillator: mode " + std::to_string(i) + " modal_mass must be > 0");
    if (!(m.loss_factor > 0.0 && m.loss_factor < 1.0))
      throw std::invalid_argument("oscillator: mode " + std::to_string(i) +
                                  " loss_factor must be in (0,1)");
    if (!(m.freq > prev))
      throw std::invalid_argument("oscillator: mode frequencies must be strictly increasing");
    prev = m.freq;
  }
}

std::complex<double> susceptibility(const Oscillator& osc, double f) {
  if (!(f >= 0.0)) throw std::invalid_argument("susceptibility: f must be >= 0");
  const double w = 2.0 * kPi * f;
  std::complex<double> chi(0.0, 0.0);
  for (const MechMode& m : osc.modes) {
    const double w0 = 2.0 * kPi * m.freq;
    const double loss = (m.damping_kind == DampingKind::kStructural)
                            ? m.loss_factor * w0 * w0     // phi w0^2
                            : m.loss_factor * w0 * w;     // Gamma w, Gamma = w0/Q
    chi += 1.0 / (m.modal_mass * std::complex<double>(w0 * w0 - w * w, loss));
  }
  return chi;
}

double thermal_displacement_psd(const Oscillator& osc, double f) {
  if (!(f > 0.0)) throw std::invalid_argument("thermal_displacement_psd: f must be > 0");
  const double w = 2.0 * kPi * f;
  double psd = 0.0;
  for (const MechMode& m : osc.modes) {
    const double w0 = 2.0 * kPi * m.freq;
    const double d = w0 * w0 - w * w;
    if (m.damping_kind == DampingKind::kStructural) {
      const double num = 4.0 * kBoltzmann * osc.temperature * w0 * w0 * m.loss_factor;
      psd += num / (m.modal_mass * w * (d * d + w0 * w0 * w0 * w0 * m.loss_factor * m.loss_factor));
    } else {
      const double gm = m.loss_factor * w0;
      const double num = 4.0 * kBoltzmann * osc.temperature * gm;
      psd += num / (m.modal_mass * (d * d + gm * gm * w * w));
    }
  }
  return psd;
}

double thermal_force_psd(const MechMode& mode, double temperature, double f) {
  if (!(f > 0.0)) throw std::invalid_argument("thermal_force_psd: f must be > 0");
  const double w0 = 2.0 * kPi * mode.freq;
  if (mode.damping_kind == DampingKind::kStructural) {
    const double w = 2.0 * kPi * f;
    return 4.0 * kBoltzmann * temperature * mode.modal_mass * w0 * w0 * mode.loss_factor / w;
  }
  return 4.0 * kBoltzmann * temperature * mode.modal_mass * mode.loss_factor * w0;
}

double thermal_force_psd_effective(const Oscillator& osc, double f) {
  const double w = 2.0 * kPi * f;
  const std::complex<double> chi = susceptibility(osc, f);
  return 4.0 * kBoltzmann * osc.temperature / w * std::imag(1.0 / chi);
}

// ---------------------------------------------------------------------------
// Delaunay triangulation (Bowyer-Watson) and Gaussian-weighted quadrature
// ---------------------------------------------------------------------------

namespace {

struct Tri {
  int a, b, c;
};

double orient(const ShapeSample& p, const ShapeSample& q, const ShapeSample& r) {
  return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
}

bool in_circumcircle(const std::vector<ShapeSample>& pts, const Tri& t, double px, double py) {
  const ShapeSample& A = pts[t.a];
  const ShapeSample& B = pts[t.b];
  const ShapeSample& C = pts[t.c];
  const double ax = A.x - px, ay = A.y - py;
  const double bx = B.x - px, by = B.y - py;
  const double cx = C.x - px, cy = C.y - py;
  const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                     (bx * bx + by * by) * (ax * cy - cx * ay) +
                     (cx * cx + cy * cy) * (ax * by - bx * ay);
  // Triangles are kept counter-clockwise, so det > 0 means strictly inside.
  return det > 0.0;
}

std::vector<Tri> delaunay(std::vector<ShapeSample> pts, size_t n_real) {
  double lo_x = pts[0].x, hi_x = pts[0].x, lo_y = pts[0].y, hi_y = pts[0].y;
  for (const auto& p : pts) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  const double span = std::max(hi_x - lo_x, hi_y - lo_y);
  if (!(span > 0.0)) throw std::invalid_argument("modal_mass: degenerate sample cloud");
  const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
  const double big = 64.0 * span;
  pts.push_back({cx - big, cy - big, 0.0});
  pts.push_back({cx + big, cy - big, 0.0});
  pts.push_back({cx, cy + big, 0.0});
  const int s0 = static_cast<int>(pts.size()) - 3;

  std::vector<Tri> tris{{s0, s0 + 1, s0 + 2}};
  for (int i = 0; i < static_cast<int>(n_real); ++i) {
    std::vector<Tri> bad, keep;
    for (const Tri& t : tris) {
      if (in_circumcircle(pts, t, pts[i].x, pts[i].y))
        bad.push_back(t);
      else
        keep.push_back(t);
    }
    // Boundary of the cavity: edges appearing exactly once among bad triangles.
    std::vector<std::pair<int, int>> edges;
    auto add_edge = [&edges](int u, int v) {
      for (auto it = edges.begin(); it != edges.end(); ++it) {
        if ((it->first == v && it->second == u) || (it->first == u && it->second == v)) {
          edges.erase(it);
          return;
        }
      }
      edges.emplace_back(u, v);
    };
    for (const Tri& t : bad) {
      add_edge(t.a, t.b);
      add_edge(t.b, t.c);
      add_edge(t.c, t.a);
    }
    tris = std::move(keep);
    for (const auto& e : edges) {
      Tri t{e.first, e.second, i};
      if (orient(pts[t.a], pts[t.b], pts[t.c]) < 0.0) std::swap(t.b, t.c);
      if (std::abs(orient(pts[t.a], pts[t.b], pts[t.c])) > 0.0) tris.push_back(t);
    }
  }
  std::vector<Tri> out;
  for (const Tri& t : tris)
    if (t.a < static_cast<int>(n_real) && t.b < static_cast<int>(n_real) &&
        t.c < static_cast<int>(n_real))
      out.push_back(t);
  return out;
}

struct Vec2 {
  double x, y;
};

// Radon 7-point degree-5 rule in barycentric coordinates.
struct QuadNode {
  double l1, l2, l3, w;
};
constexpr double kA1 = 0.0597158717897698;
constexpr double kB1 = 0.4701420641051151;
constexpr double kA2 = 0.7974269853530873;
constexpr double kB2 = 0.1012865073234563;
const QuadNode kRadon7[7] = {
    {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225},
    {kA1, kB1, kB1, 0.1323941527885062},
    {kB1, kA1, kB1, 0.1323941527885062},
    {kB1, kB1, kA1, 0.1323941527885062},
    {kA2, kB2, kB2, 0.1259391805448271},
    {kB2, kA2, kB2, 0.1259391805448271},
    {kB2, kB2, kA2, 0.1259391805448271},
};

double gauss_weight(double x, double y, const BeamProfile& beam) {
  const double dx = x - beam.center_x, dy = y - beam.center_y;
  const double r2 = beam.waist_radius * beam.waist_radius;
  return std::exp(-(dx * dx + dy * dy) / r2);
}

// Integrate (a + b x + c y) * gaussian over a triangle, subdividing until the
// triangle is small compared to the beam waist.
double integrate_tri(Vec2 p0, Vec2 p1, Vec2 p2, double a, double b, double c,
                     const BeamProfile& beam, int depth) {
  const double area =
      0.5 * std::abs((p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x));
  if (area == 0.0) return 0.0;
  const double e01 = std::hypot(p1.x - p0.x, p1.y - p0.y);
  const double e12 = std::hypot(p2.x - p1.x, p2.y - p1.y);
  const double e20 = std::hypot(p0.x - p2.x, p0.y - p2.y);
  const double longest = std::max({e01, e12, e20});
  const double d0 = std::hypot(p0.x - beam.center_x, p0.y - beam.center_y);
  const double d1 = std::hypot(p1.x - beam.center_x, p1.y - beam.center_y);
  const double d2 = std::hypot(p2.x - beam.center_x, p2.y - beam.center_y);
  if (std::min({d0, d1, d2}) > 8.0 * beam.waist_radius + longest) return 0.0;

  if (longest > 0.5 * beam.waist_radius && depth < 14) {
    const Vec2 m01{0.5 * (p0.x + p1.x), 0.5 * (p0.y + p1.y)};
    const Vec2 m12{0.5 * (p1.x + p2.x), 0.5 * (p1.y + p2.y)};
    const Vec2 m20{0.5 * (p2.x + p0.x), 0.5 * (p2.y + p0.y)};
    return integrate_tri(p0, m01, m20, a, b, c, beam, depth + 1) +
           integrate_tri(m01, p1, m12, a, b, c, beam, depth + 1) +
           integrate_tri(m20, m12, p2, a, b, c, beam, depth + 1) +
           integrate_tri(m01, m12, m20, a, b, c, beam, depth + 1);
  }
  double sum = 0.0;
  for (const QuadNode& n : kRadon7) {
    const double x = n.l1 * p0.x + n.l2 * p1.x + n.l3 * p2.x;
    const double y = n.l1 * p0.y + n.l2 * p1.y + n.l3 * p2.y;
    sum += n.w * (a + b * x + c * y) * gauss_weight(x, y, beam);
  }
  return sum * area;
}

std::vector<int> convex_hull(const std::vector<ShapeSample>& pts) {
  std::vector<int> idx(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&pts](int i, int j) {
    return pts[i].x < pts[j].x || (pts[i].x == pts[j].x && pts[i].y < pts[j].y);
  });
  std::vector<int> hull(2 * idx.size());
  size_t k = 0;
  for (size_t i = 0; i < idx.size(); ++i) {
    while (k >= 2 && orient(pts[hull[k - 2]], pts[hull[k - 1]], pts[idx[i]]) <= 0.0) --k;
    hull[k++] = idx[i];
  }
  const size_t lower = k + 1;
  for (size_t i = idx.size() - 1; i-- > 0;) {
    while (k >= lower && orient(pts[hull[k - 2]], pts[hull[k - 1]], pts[idx[i]]) <= 0.0) --k;
    hull[k++] = idx[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool inside_hull(const std::vector<ShapeSample>& pts, const std::vector<int>& hull,
                 double x, double y, double tol) {
  for (size_t i = 0; i < hull.size(); ++i) {
    const ShapeSample& p = pts[hull[i]];
    const ShapeSample& q = pts[hull[(i + 1) % hull.size()]];
    const double cross = (q.x - p.x) * (y - p.y) - (q.y - p.y) * (x - p.x);
    if (cross < -tol) return false;
  }
  return true;
}

}  // namespace

void SampledModeShape::validate() const {
  if (surface_samples.size() < 3)
    throw std::invalid_argument("mode shape: need at least 3 surface samples");
  if (!(volume_norm > 0.0)) throw std::invalid_argument("mode shape: volume_norm must be > 0");
  double max_area = 0.0;
  const ShapeSample& p0 = surface_samples[0];
  const ShapeSample& p1 = surface_samples[1];
  for (size_t i = 2; i < surface_samples.size(); ++i)
    max_area = std::max(max_area, std::abs(orient(p0, p1, surface_samples[i])));
  if (!(max_area > 0.0))
    throw std::invalid_argument("mode shape: surface samples are collinear");
}

double laser_weighted_displacement(const SampledModeShape& shape, const BeamProfile& beam) {
  shape.validate();
  if (!(beam.waist_radius > 0.0))
    throw std::invalid_argument("modal_mass: beam waist must be > 0");
  const auto& pts = shape.surface_samples;
  const auto hull = convex_hull(pts);
  double span = 0.0;
  for (const auto& p : pts) span = std::max({span, std::abs(p.x), std::abs(p.y)});
  if (!inside_hull(pts, hull, beam.center_x, beam.center_y, 1e-12 * span * span))
    throw std::invalid_argument("modal_mass: beam center outside the sampled surface");

  const auto tris = delaunay(pts, pts.size());
  if (tris.empty()) throw std::invalid_argument("modal_mass: triangulation failed");
  double integral = 0.0;
  for (const Tri& t : tris) {
    const ShapeSample& A = pts[t.a];
    const ShapeSample& B = pts[t.b];
    const ShapeSample& C = pts[t.c];
    const double det = orient(A, B, C);
    if (det == 0.0) continue;
    // Plane psi(x,y) = a + b x + c y through the three vertices.
    const double b =
        ((B.psi_z - A.psi_z) * (C.y - A.y) - (C.psi_z - A.psi_z) * (B.y - A.y)) / det;
    const double c =
        ((C.psi_z - A.psi_z) * (B.x - A.x) - (B.psi_z - A.psi_z) * (C.x - A.x)) / det;
    const double a = A.psi_z - b * A.x - c * A.y;
    integral += integrate_tri({A.x, A.y}, {B.x, B.y}, {C.x, C.y}, a, b, c, beam, 0);
  }
  return integral / (kPi * beam.waist_radius * beam.waist_radius);
}

double modal_mass(const SampledModeShape& shape, const BeamProfile& beam) {
  const double lwd = laser_weighted_displacement(shape, beam);
  double psi_scale = 0.0;
  for (const auto& p : shape.surface_samples) psi_scale = std::max(psi_scale, std::abs(p.psi_z));
  if (std::abs(lwd) <= 1e-9 * psi_scale)
    return std::numeric_limits<double>::infinity();  // beam on a nodal point
  return shape.volume_norm / (lwd * lwd);
}

// ---------------------------------------------------------------------------
// Analytic cantilever modes (point-mass mirror pad approximation)
// ---------------------------------------------------------------------------

void CantileverGeometry::validate() const {
  const double vals[] = {length_l, radius_r, width_w, thickness_cantilever,
                         thickness_mirror, youngs_modulus, shear_modulus,
                         density_mirror, density_cantilever};
  for (double v : vals)
    if (!(v > 0.0)) throw std::invalid_argument("cantilever geometry: all fields must be > 0");
}

std::vector<AnalyticMode> analytic_modes(const CantileverGeometry& g) {
  g.validate();
  const double pi3 = kPi * kPi * kPi;
  const double tc3 = std::pow(g.thickness_cantilever, 3);
  const double lr3 = std::pow(g.length_l + g.radius_r, 3);
  const double pad = g.density_mirror * g.radius_r * g.radius_r * g.thickness_mirror;

  std::vector<AnalyticMode> out;
  out.push_back({ModeKind::kFundZ, 0,
                 0.25 * std::sqrt(g.youngs_modulus * g.width_w * tc3 / (pi3 * pad * lr3))});
  out.push_back({ModeKind::kFundY, 0,
                 0.25 * std::sqrt(g.youngs_modulus * std::pow(g.width_w, 3) *
                                  g.thickness_cantilever / (pi3 * pad * lr3))});
  out.push_back({ModeKind::kTorsion, 0,
                 0.1 * std::sqrt(g.shear_modulus * g.width_w * tc3 /
                                 (g.length_l * std::pow(g.radius_r, 4) *
                                  g.density_mirror * g.thickness_mirror))});
  const double lambda_n[] = {4.7, 7.9, 11.0};
  const double l4 = std::pow(g.length_l, 4);
  for (int n = 3; n <= 5; ++n) {
    const double ln2 = lambda_n[n - 3] * lambda_n[n - 3];
    out.push_back({ModeKind::kBendZ, n,
                   ln2 / (4.0 * kPi) *
                       std::sqrt(g.thickness_cantilever * g.thickness_cantilever *
                                 g.youngs_modulus / (3.0 * l4 * g.density_cantilever))});
    out.push_back({ModeKind::kBendY, n,
                   ln2 / (4.0 * kPi) *
                       std::sqrt(g.width_w * g.width_w * g.youngs_modulus /
                                 (3.0 * l4 * g.density_cantilever))});
  }
  std::sort(out.begin(), out.end(),
            [](const AnalyticMode& a, const AnalyticMode& b) { return a.freq < b.freq; });
  return out;
}

std::string mode_kind_name(const AnalyticMode& mode) {
  switch (mode.kind) {
    case ModeKind::kFundZ: return "fund_z";
    case ModeKind::kFundY: return "fund_y";
    case ModeKind::kTorsion: return "torsion";
    case ModeKind::kBendZ: return "bend_z" + std::to_string(mode.order);
    case ModeKind::kBendY: return "bend_y" + std::to_string(mode.order);
  }
  return "?";
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim spaces
    size_t b = field.find_first_not_of(" \t\r");
    size_t e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return out;
}

double parse_num(const std::string& s, const std::string& path, int row) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (...) {
    throw std::invalid_argument(path + ": row " + std::to_string(row) +
                                ": cannot parse number '" + s + "'");
  }
}

}  // namespace

std::vector<MechMode> load_modes_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open mode CSV: " + path);
  std::string line;
  int row = 0;
  std::vector<MechMode> modes;
  double prev = 0.0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    auto f = split_csv_line(line);
    if (row == 1 && !f.empty() && f[0] == "freq_hz") continue;  // header
    if (f.size() < 3)
      throw std::invalid_argument(path + ": row " + std::to_string(row) + ": need 3 columns");
    MechMode m;
    m.freq = parse_num(f[0], path, row);
    m.modal_mass = parse_num(f[1], path, row);
    const double q = parse_num(f[2], path, row);
    if (!(q > 1.0))
      throw std::invalid_argument(path + ": row " + std::to_string(row) + ": q must be > 1");
    m.loss_factor = 1.0 / q;
    if (!(m.freq > prev))
      throw std::invalid_argument(path + ": row " + std::to_string(row) +
                                  ": frequencies must be strictly increasing");
    prev = m.freq;
    modes.push_back(m);
  }
  if (modes.empty()) throw std::invalid_argument(path + ": no modes found");
  return modes;
}

std::vector<ShapeSample> load_mode_shape_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open shape CSV: " + path);
  std::string line;
  int row = 0;
  std::vector<ShapeSample> pts;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    auto f = split_csv_line(line);
    if (row == 1 && !f.empty() && f[0] == "x_m") continue;
    if (f.size() < 3)
      throw std::invalid_argument(path + ": row " + std::to_string(row) + ": need 3 columns");
    pts.push_back({parse_num(f[0], path, row), parse_num(f[1], path, row),
                   parse_num(f[2], path, row)});
  }
  return pts;
}

}  // namespace ponder
