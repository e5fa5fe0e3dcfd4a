#include "reeftip/folded.hpp"

#include <algorithm>
#include <cmath>

#include "reeftip/rootfind.hpp"

namespace reeftip {

namespace {

std::array<double, 2> unit_eigvec(double j11, double j12, double j21, double j22, double nu) {
  std::array<double, 2> a = {j12, nu - j11};
  std::array<double, 2> b = {nu - j22, j21};
  double na = std::hypot(a[0], a[1]);
  double nb = std::hypot(b[0], b[1]);
  std::array<double, 2> v = na >= nb ? a : b;
  double n = std::max(na, nb);
  if (n == 0.0) return {1.0, 0.0};
  v[0] /= n;
  v[1] /= n;
  if (v[0] < 0 || (v[0] == 0 && v[1] < 0)) {
    v[0] = -v[0];
    v[1] = -v[1];
  }
  return v;
}

// roots of F(H) = u(H) v(H) + r / s(H): fold-curve equilibria of the
// desingularized flow at ramp rate r > 0
std::vector<double> folded_roots(const ModelParams& p, double r, double mn, double mx) {
  auto F = [&](double H) {
    return u_factor(H, p) * v_factor(H, p) + r / feeding_rate(H, p);
  };
  ScalarFn dF = [&](double H) {
    double s = feeding_rate(H, p);
    return u_factor_dH(H, p) * v_factor(H, p) + u_factor(H, p) * v_factor_dH(H, p) -
           r * feeding_rate_deriv(H) / (s * s);
  };
  std::vector<double> roots;
  const double H_floor = 1e-12;

  // F(mn) = F(mx) = r/s > 0 at the singular-limit points, so sign changes
  // bracket the perturbed roots on either side
  double f_floor = F(H_floor);
  double f_mn = F(mn);
  if (f_floor < 0 && f_mn > 0) {
    roots.push_back(bisect_root(F, H_floor, mn, f_floor, f_mn, ROOT_FTOL, &dF));
  } else {
    for (const Bracket& b : scan_sign_changes(F, H_floor, mn, 400, true))
      roots.push_back(bisect_root(F, b.a, b.b, b.fa, b.fb, ROOT_FTOL, &dF));
  }
  double f_mx = F(mx);
  double f_big = F(H_BIG);
  if (f_mx > 0 && f_big < 0) {
    roots.push_back(bisect_root(F, mx, H_BIG, f_mx, f_big, ROOT_FTOL, &dF));
  } else {
    for (const Bracket& b : scan_sign_changes(F, mx, H_BIG, 400, false))
      roots.push_back(bisect_root(F, b.a, b.b, b.fa, b.fb, ROOT_FTOL, &dF));
  }
  // interval (mn, mx) has u*v < 0 with magnitude bounded away from 0 except
  // near the endpoints, so no additional roots live there
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

FoldedSingularity classify_folded(double H, double alpha, const ModelParams& p, double r) {
  double q = q_function(H, alpha, p);
  double drift = lambda_drift(H, alpha, p, r);
  double scale = 1.0 + std::fabs(alpha);
  if (std::fabs(q) > 1e-10 * scale || std::fabs(drift) > 1e-10 * scale)
    throw invalid_parameter("classify_folded: point does not satisfy Q = 0 and Lambda = 0");

  double s = feeding_rate(H, p);
  double w = 1.0 + H;
  double B = H + s * w * w;
  double u = u_factor(H, p);
  double v = v_factor(H, p);

  double j11 = r / (s * s) - p.lambda * B * u;
  double j12 = w * w * v / s;
  double j21 = r * q_function_dH(H, alpha, p);
  double j22 = -r / (s * s);

  FoldedSingularity fs;
  fs.H_FS = H;
  fs.alpha_FS = alpha;
  fs.trJ = j11 + j22;
  fs.detJ = j11 * j22 - j12 * j21;
  fs.Delta = fs.trJ * fs.trJ - 4.0 * fs.detJ;
  fs.relevant = u > 0.0;

  double mag = 1.0 + fs.trJ * fs.trJ + std::fabs(fs.detJ);
  double tol_det = 1e-13 * mag;
  double tol_delta = 1e-12 * mag;

  if (fs.Delta >= 0) {
    double rt = std::sqrt(fs.Delta);
    fs.eigenvalues = {std::complex<double>(0.5 * (fs.trJ - rt), 0.0),
                      std::complex<double>(0.5 * (fs.trJ + rt), 0.0)};
  } else {
    double im = 0.5 * std::sqrt(-fs.Delta);
    fs.eigenvalues = {std::complex<double>(0.5 * fs.trJ, -im),
                      std::complex<double>(0.5 * fs.trJ, im)};
  }

  if (std::fabs(fs.detJ) <= tol_det) {
    fs.kind = FoldedKind::Degenerate;
    fs.boundary_warning = r > 0.0;
  } else if (fs.detJ < 0) {
    fs.kind = FoldedKind::Saddle;
  } else if (std::fabs(fs.Delta) <= tol_delta) {
    fs.kind = FoldedKind::Degenerate;
    fs.boundary_warning = true;
  } else if (fs.Delta < 0) {
    fs.kind = FoldedKind::Focus;
  } else {
    fs.kind = FoldedKind::Node;
  }

  if (fs.kind == FoldedKind::Node || fs.kind == FoldedKind::Saddle) {
    double rt = std::sqrt(fs.Delta);
    double l_minus = 0.5 * (fs.trJ - rt);
    double l_plus = 0.5 * (fs.trJ + rt);
    double strong = std::fabs(l_minus) >= std::fabs(l_plus) ? l_minus : l_plus;
    double weak = std::fabs(l_minus) >= std::fabs(l_plus) ? l_plus : l_minus;
    fs.E_ss = unit_eigvec(j11, j12, j21, j22, strong);
    fs.E_s = unit_eigvec(j11, j12, j21, j22, weak);
    if (fs.kind == FoldedKind::Node && weak != 0.0) {
      fs.mu = strong / weak;
      fs.sectors = static_cast<int>(std::floor((fs.mu - 1.0) / 2.0));
    }
  }
  return fs;
}

std::vector<FoldedSingularity> find_folded_singularities(const ModelParams& p, double r) {
  if (!(r >= 0)) throw invalid_parameter("find_folded_singularities requires r >= 0");
  ThresholdSet t = threshold_set(p);
  std::vector<double> hs;
  if (r == 0.0)
    hs = {std::min(t.H_hat, t.H_I), std::max(t.H_hat, t.H_I)};
  else
    hs = folded_roots(p, r, std::min(t.H_hat, t.H_I), std::max(t.H_hat, t.H_I));

  std::vector<FoldedSingularity> out;
  out.reserve(hs.size());
  for (double H : hs) out.push_back(classify_folded(H, fold_alpha(H, p), p, r));
  return out;
}

double delta_prime_at_zero(const ModelParams& p) {
  ThresholdSet t = threshold_set(p);
  double w = 1.0 + t.H_hat;
  return 4.0 * w * w * v_factor(t.H_hat, p) * q_function_dH(t.H_hat, t.alpha_hat, p) /
         feeding_rate(t.H_hat, p);
}

CriticalRateResult critical_rate(const ModelParams& p) {
  auto delta_at = [&](double r) -> std::optional<double> {
    auto fss = find_folded_singularities(p, r);
    for (const auto& fs : fss)
      if (fs.relevant) return fs.Delta;
    return std::nullopt;
  };

  CriticalRateResult res;
  const double r_lo = 1e-12, r_hi = 0.1;
  const int n = 121;
  double prev_r = r_lo;
  std::optional<double> prev_d = delta_at(r_lo);
  double a = 0, b = 0;
  bool bracketed = false;
  for (int i = 1; i < n; ++i) {
    double rr = r_lo * std::pow(r_hi / r_lo, double(i) / (n - 1));
    std::optional<double> dd = delta_at(rr);
    if (prev_d && dd && ((*prev_d < 0) != (*dd < 0))) {
      a = prev_r;
      b = rr;
      bracketed = true;
      break;
    }
    if (dd) {
      prev_r = rr;
      prev_d = dd;
    }
  }
  if (!bracketed) return res;

  for (int it = 0; it < 200 && (b - a) > 1e-14 * b; ++it) {
    double m = std::sqrt(a * b);
    std::optional<double> dm = delta_at(m);
    if (!dm) break;
    if ((*dm < 0) == (*prev_d < 0))
      a = m;
    else
      b = m;
  }
  res.found = true;
  res.r_crit = 0.5 * (a + b);
  for (const auto& fs : find_folded_singularities(p, res.r_crit))
    if (fs.relevant) res.at = fs;
  return res;
}

RegionResult region_classify(const ModelParams& p, double r, double delta) {
  RegionResult res;
  ReducedFlowRegime screen;
  try {
    screen = reduced_flow_regime(p.d + delta, p);
  } catch (const invalid_parameter&) {
    return res;  // outside the geometry the classification is built on
  }
  res.regime_item = screen.item;
  res.thresholds = screen.thresholds;
  if (screen.item != 1) return res;  // no bistable window to ramp across

  if (screen.thresholds.ordering == ThresholdOrdering::Coincident) {
    res.label = RegionLabel::Boundary;
    return res;
  }
  std::optional<FoldedSingularity> rel;
  for (const auto& fs : find_folded_singularities(p, r))
    if (fs.relevant) rel = fs;
  if (!rel) {
    res.label = RegionLabel::Boundary;
    return res;
  }
  res.singularity = rel;

  switch (rel->kind) {
    case FoldedKind::Node:
      res.label = screen.thresholds.ordering == ThresholdOrdering::StarPlusHat
                      ? RegionLabel::I
                      : RegionLabel::II;
      break;
    case FoldedKind::Focus:
      res.label = rel->alpha_FS < screen.thresholds.alpha_plus ? RegionLabel::IIIa
                                                               : RegionLabel::IIIb;
      break;
    default:
      res.label = RegionLabel::Boundary;
      break;
  }
  return res;
}

bool in_funnel(double H, double alpha, const FoldedSingularity& node, const ModelParams& p) {
  if (node.kind != FoldedKind::Node)
    throw invalid_parameter("in_funnel requires a folded node");
  if (!(H > 0)) return false;
  if (!(alpha < fold_alpha(H, p))) return false;  // must sit on the attracting sheet

  auto side = [&](double h, double a) {
    return node.E_ss[0] * (a - node.alpha_FS) - node.E_ss[1] * (h - node.H_FS);
  };
  // probe a point just off the node along the weak direction, on whichever
  // side lies inside the attracting sheet; the funnel is the strong-line side
  // containing that approach
  double sigma = 1e-4 * (1.0 + std::fabs(node.H_FS));
  double hp = node.H_FS + sigma * node.E_s[0];
  double ap = node.alpha_FS + sigma * node.E_s[1];
  double hm = node.H_FS - sigma * node.E_s[0];
  double am = node.alpha_FS - sigma * node.E_s[1];
  double margin_p = fold_alpha(hp, p) - ap;
  double margin_m = fold_alpha(hm, p) - am;
  double probe = margin_p >= margin_m ? side(hp, ap) : side(hm, am);
  double here = side(H, alpha);
  return here * probe > 0;
}

}  // namespace reeftip
