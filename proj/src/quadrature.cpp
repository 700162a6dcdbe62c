#include "winstat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace winstat {

namespace {

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights, as tabulated in QUADPACK's dqk15.
const double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  double value;
  double error;
};

struct SegmentWorse {
  bool operator()(const Segment& lhs, const Segment& rhs) const {
    return lhs.error < rhs.error;
  }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double fc = f(centre);
  double resg = kWg[3] * fc;
  double resk = kWgk[7] * fc;
  double resabs = std::fabs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double absc = half * kXgk[jtw];
    fv1[jtw] = f(centre - absc);
    fv2[jtw] = f(centre + absc);
    const double fsum = fv1[jtw] + fv2[jtw];
    resg += kWg[j] * fsum;
    resk += kWgk[jtw] * fsum;
    resabs += kWgk[jtw] * (std::fabs(fv1[jtw]) + std::fabs(fv2[jtw]));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double absc = half * kXgk[jtwm1];
    fv1[jtwm1] = f(centre - absc);
    fv2[jtwm1] = f(centre + absc);
    const double fsum = fv1[jtwm1] + fv2[jtwm1];
    resk += kWgk[jtwm1] * fsum;
    resabs += kWgk[jtwm1] * (std::fabs(fv1[jtwm1]) + std::fabs(fv2[jtwm1]));
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
  }

  Segment seg;
  seg.a = a;
  seg.b = b;
  seg.value = resk * half;
  resabs *= std::fabs(half);
  resasc *= std::fabs(half);
  double err = std::fabs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * resabs);
  }
  seg.error = err;
  return seg;
}

}  // namespace

QuadResult Integrator::try_integrate(const std::function<double(double)>& f, double a,
                                     double b, std::span<const double> knots) const {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }

  std::vector<double> cuts;
  cuts.push_back(a);
  for (double k : knots) {
    if (k > a && k < b) cuts.push_back(k);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Segment, std::vector<Segment>, SegmentWorse> heap;
  double total = 0.0, toterr = 0.0;
  int evals = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Segment seg = gk15(f, cuts[i], cuts[i + 1]);
    evals += 15;
    total += seg.value;
    toterr += seg.error;
    heap.push(seg);
  }

  const auto tolerance = [&] { return std::max(opts_.abs_tol, opts_.rel_tol * std::fabs(total)); };

  while (toterr > tolerance() && static_cast<int>(heap.size()) < opts_.max_intervals) {
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;  // interval at machine resolution
    heap.pop();
    Segment left = gk15(f, worst.a, mid);
    Segment right = gk15(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    toterr += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  out.value = total;
  out.error = toterr;
  out.evaluations = evals;
  out.converged = toterr <= tolerance();
  return out;
}

double Integrator::integrate(const std::function<double(double)>& f, double a, double b,
                             std::span<const double> knots) const {
  QuadResult r = try_integrate(f, a, b, knots);
  if (!r.converged) {
    throw QuadratureError(r.error, std::max(opts_.abs_tol, opts_.rel_tol * std::fabs(r.value)));
  }
  return r.value;
}

}  // namespace winstat
