#include "roadrel/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace roadrel {
namespace {

struct Panel {
  double a, b, fa, fm, fb, whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

void refine(const std::function<double(double)>& f, const Panel& p, double tol, int depth,
            QuadratureResult& out) {
  double m = 0.5 * (p.a + p.b);
  double lm = 0.5 * (p.a + m), rm = 0.5 * (m + p.b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(p.a, m, p.fa, flm, p.fm);
  double right = simpson(m, p.b, p.fm, frm, p.fb);
  double diff = left + right - p.whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
    if (depth <= 0 && std::abs(diff) > 15.0 * tol) out.converged = false;
    out.value += left + right + diff / 15.0;
    out.error_estimate += std::abs(diff) / 15.0;
    return;
  }
  refine(f, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1, out);
  refine(f, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1, out);
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol, double abs_floor, int max_depth) {
  QuadratureResult out;
  if (a == b) return out;
  // Seed with a few panels so that narrow features are not missed by a
  // single coarse Simpson estimate.
  constexpr int kSeedPanels = 8;
  double h = (b - a) / kSeedPanels;
  std::vector<Panel> panels;
  double scale = 0.0;
  double fa = f(a);
  for (int k = 0; k < kSeedPanels; ++k) {
    double x0 = a + k * h;
    double x1 = (k + 1 == kSeedPanels) ? b : x0 + h;
    double fm = f(0.5 * (x0 + x1)), fb = f(x1);
    Panel p{x0, x1, fa, fm, fb, simpson(x0, x1, fa, fm, fb)};
    scale += std::abs(p.whole);
    panels.push_back(p);
    fa = fb;
  }
  double tol = std::max(rel_tol * scale, abs_floor) / kSeedPanels;
  for (const Panel& p : panels) refine(f, p, tol, max_depth, out);
  return out;
}

}  // namespace roadrel
