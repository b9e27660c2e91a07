#pragma once

#include <cstdio>

#include "aglab/verify.hpp"

namespace aglab {

namespace detail {
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}
}  // namespace detail

// Log-log scatter plot with the fitted line and a slope annotation. Plain
// fixed-size SVG; byte output is deterministic for identical input.
inline std::string loglog_svg(const std::vector<double>& xs, const std::vector<double>& ys,
                              const FitResult& fit, const std::string& xlabel, const std::string& ylabel,
                              const std::string& title) {
  if (xs.empty() || xs.size() != ys.size()) throw ValidationError("loglog_svg: bad data");
  const int W = 640, H = 480, ML = 70, MR = 20, MT = 40, MB = 50;
  double lxmin = 1e300, lxmax = -1e300, lymin = 1e300, lymax = -1e300;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw ValidationError("loglog_svg needs positive data");
    lx.push_back(std::log10(xs[i]));
    ly.push_back(std::log10(ys[i]));
    lxmin = std::min(lxmin, lx.back());
    lxmax = std::max(lxmax, lx.back());
    lymin = std::min(lymin, ly.back());
    lymax = std::max(lymax, ly.back());
  }
  const double xpad = std::max(0.05 * (lxmax - lxmin), 0.05);
  const double ypad = std::max(0.05 * (lymax - lymin), 0.05);
  lxmin -= xpad;
  lxmax += xpad;
  lymin -= ypad;
  lymax += ypad;
  auto X = [&](double v) { return ML + (v - lxmin) / (lxmax - lxmin) * (W - ML - MR); };
  auto Y = [&](double v) { return H - MB - (v - lymin) / (lymax - lymin) * (H - MT - MB); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
       "viewBox=\"0 0 640 480\">\n";
  s += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  s += "<rect x=\"" + detail::fmt(ML) + "\" y=\"" + detail::fmt(MT) + "\" width=\"" + detail::fmt(W - ML - MR) +
       "\" height=\"" + detail::fmt(H - MT - MB) + "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" + title +
       "</text>\n";
  s += "<text x=\"320\" y=\"470\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">log10 " +
       xlabel + "</text>\n";
  s += "<text x=\"16\" y=\"240\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       "transform=\"rotate(-90 16 240)\">log10 " +
       ylabel + "</text>\n";
  // axis ticks at the data extremes
  s += "<text x=\"" + detail::fmt(ML) + "\" y=\"" + detail::fmt(H - MB + 18) +
       "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::fmt(lxmin) + "</text>\n";
  s += "<text x=\"" + detail::fmt(W - MR - 40) + "\" y=\"" + detail::fmt(H - MB + 18) +
       "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::fmt(lxmax) + "</text>\n";
  s += "<text x=\"" + detail::fmt(ML - 64) + "\" y=\"" + detail::fmt(H - MB) +
       "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::fmt(lymin) + "</text>\n";
  s += "<text x=\"" + detail::fmt(ML - 64) + "\" y=\"" + detail::fmt(MT + 10) +
       "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::fmt(lymax) + "</text>\n";
  // fitted line across the x range
  {
    double y0 = fit.intercept + fit.slope * lxmin, y1 = fit.intercept + fit.slope * lxmax;
    s += "<line x1=\"" + detail::fmt(X(lxmin)) + "\" y1=\"" + detail::fmt(Y(y0)) + "\" x2=\"" +
         detail::fmt(X(lxmax)) + "\" y2=\"" + detail::fmt(Y(y1)) + "\" stroke=\"#c03030\" stroke-width=\"1.5\"/>\n";
  }
  for (std::size_t i = 0; i < lx.size(); ++i)
    s += "<circle cx=\"" + detail::fmt(X(lx[i])) + "\" cy=\"" + detail::fmt(Y(ly[i])) +
         "\" r=\"4\" fill=\"#3050c0\"/>\n";
  s += "<text x=\"" + detail::fmt(ML + 10) + "\" y=\"" + detail::fmt(MT + 20) +
       "\" font-family=\"sans-serif\" font-size=\"13\">slope = " + detail::fmt(fit.slope) +
       ", r2 = " + detail::fmt(fit.r_squared) + "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace aglab
