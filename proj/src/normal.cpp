#include "winstat/normal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace winstat {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kTwoPi = 6.283185307179586477;
}  // namespace

double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double norm_ppf(double p) {
  // ALGORITHM AS241, APPL. STATIST. (1988) VOL. 37, NO. 3 (PPND16).
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_ppf: p must lie in (0,1)");

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }

  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double z;
  if (r <= 5.0) {
    r -= 1.6;
    z = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    z = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -z : z;
}

namespace {

// Gauss-Legendre abscissae/weights used by BVND (6-, 12-, 20-point rules).
const double kGlX6[3] = {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970};
const double kGlW6[3] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
const double kGlX12[6] = {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050,
                          -0.5873179542866171, -0.3678314989981802, -0.1252334085114692};
const double kGlW12[6] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                          0.2031674267230659,  0.2334925365383547, 0.2491470458134029};
const double kGlX20[10] = {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
                           -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
                           -0.5108670019508271, -0.3737060887154196, -0.2277858511416451,
                           -0.07652652113349733};
const double kGlW20[10] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                           0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                           0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                           0.1527533871307259};

}  // namespace

double bvn_upper(double h, double k, double rho) {
  const double* x;
  const double* w;
  int lg;
  const double ar = std::fabs(rho);
  if (ar < 0.3) {
    x = kGlX6;  w = kGlW6;  lg = 3;
  } else if (ar < 0.75) {
    x = kGlX12; w = kGlW12; lg = 6;
  } else {
    x = kGlX20; w = kGlW20; lg = 10;
  }

  double hk = h * k;
  double bvn = 0.0;
  if (ar < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = std::asin(rho);
    for (int i = 0; i < lg; ++i) {
      double sn = std::sin(asr * (x[i] + 1.0) / 2.0);
      bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      sn = std::sin(asr * (-x[i] + 1.0) / 2.0);
      bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    bvn = bvn * asr / (2.0 * kTwoPi) + norm_cdf(-h) * norm_cdf(-k);
  } else {
    double kk = k;
    if (rho < 0.0) {
      kk = -kk;
      hk = -hk;
    }
    if (ar < 1.0) {
      const double as = (1.0 - rho) * (1.0 + rho);
      double a = std::sqrt(as);
      const double bs = (h - kk) * (h - kk);
      const double c = (4.0 - hk) / 8.0;
      const double d = (12.0 - hk) / 16.0;
      bvn = a * std::exp(-(bs / as + hk) / 2.0) *
            (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
      if (hk > -160.0) {
        const double b = std::sqrt(bs);
        bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * norm_cdf(-b / a) * b *
               (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
      }
      a /= 2.0;
      for (int i = 0; i < lg; ++i) {
        double xs = a * (x[i] + 1.0);
        xs *= xs;
        double rs = std::sqrt(1.0 - xs);
        bvn += a * w[i] *
               (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
                std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
        xs = as * (1.0 - x[i]) * (1.0 - x[i]) / 4.0;
        rs = std::sqrt(1.0 - xs);
        bvn += a * w[i] * std::exp(-(bs / xs + hk) / 2.0) *
               (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                (1.0 + c * xs * (1.0 + d * xs)));
      }
      bvn = -bvn / kTwoPi;
    }
    if (rho > 0.0) {
      bvn += norm_cdf(-std::max(h, kk));
    } else {
      bvn = -bvn + std::max(0.0, norm_cdf(-h) - norm_cdf(-kk));
    }
  }
  return bvn;
}

double bvn_cdf(double h, double k, double rho) { return bvn_upper(-h, -k, rho); }

}  // namespace winstat
