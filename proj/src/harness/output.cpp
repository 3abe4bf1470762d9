#include "hdg/harness/output.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace hdg::harness {

namespace {

std::string fmt_g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fmt_coord(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

void write_series(std::ostream& out, const ModelSeries& series, std::size_t n) {
  std::string row;
  for (std::size_t k = 0; k < series.trials.size(); ++k) {
    const TrialSeries& tr = series.trials[k];
    for (std::size_t t = 0; t < tr.count_ones.size(); ++t) {
      row.clear();
      row += series.model;
      row += ',';
      row += std::to_string(k);
      row += ',';
      row += std::to_string(t);
      row += ',';
      row += std::to_string(tr.count_ones[t]);
      row += tr.count_ones[t] == n ? ",1," : ",0,";
      if (!tr.infected.empty()) row += fmt_g(tr.infected[t]);
      row += '\n';
      out << row;
    }
  }
}

}  // namespace

void write_csv(std::ostream& out, const Dataset& data) {
  out << kCsvHeader << '\n';
  write_series(out, data.dynamic, data.num_agents);
  write_series(out, data.reference, data.num_agents);
}

std::string render_svg(const Dataset& data, const std::string& title, std::size_t max_traces,
                       std::optional<double> reference_line) {
  constexpr double W = 900, H = 420, L = 60, R = 60, Tm = 40, B = 50;
  const double pw = W - L - R, ph = H - Tm - B;
  const double T = static_cast<double>(std::max<std::size_t>(data.T, 2) - 1);
  const double n = static_cast<double>(std::max<std::size_t>(data.num_agents, 1));
  auto X = [&](double t) { return L + pw * t / T; };
  auto Y = [&](double c) { return Tm + ph * (1.0 - c / n); };
  auto YI = [&](double i) { return Tm + ph * (1.0 - i); };
  // Long runs are thinned to about 500 points per polyline.
  const std::size_t stride = std::max<std::size_t>(1, data.T / 500);

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << title << "</text>\n";
  s << "<rect x=\"" << L << "\" y=\"" << Tm << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double c = n * k / 4.0;
    s << "<text x=\"" << L - 6 << "\" y=\"" << fmt_coord(Y(c) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
      << fmt_coord(c) << "</text>\n";
    const double t = T * k / 4.0;
    s << "<text x=\"" << fmt_coord(X(t)) << "\" y=\"" << Tm + ph + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << static_cast<long>(t) << "</text>\n";
  }
  s << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"12\">t</text>\n";
  s << "<text x=\"16\" y=\"" << Tm + ph / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 " << Tm + ph / 2
    << ")\" text-anchor=\"middle\">agents playing 1</text>\n";

  auto polyline = [&](const std::vector<double>& ys, auto&& map, const std::string& style) {
    s << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t t = 0; t < ys.size(); t += stride) s << fmt_coord(X(static_cast<double>(t))) << ',' << fmt_coord(map(ys[t])) << ' ';
    s << "\"/>\n";
  };
  auto traces = [&](const ModelSeries& m, const std::string& color) {
    for (std::size_t k = 0; k < std::min(max_traces, m.trials.size()); ++k) {
      std::vector<double> ys(m.trials[k].count_ones.begin(), m.trials[k].count_ones.end());
      polyline(ys, Y, "stroke=\"" + color + "\" stroke-opacity=\"0.08\" stroke-width=\"1\"");
    }
  };
  traces(data.reference, "#1f4fd1");
  traces(data.dynamic, "#d11f1f");
  const SeriesStats sd = summarize(data.dynamic, data.num_agents);
  const SeriesStats ss = summarize(data.reference, data.num_agents);
  polyline(ss.mean_count, Y, "stroke=\"#1f4fd1\" stroke-width=\"2.2\"");
  polyline(sd.mean_count, Y, "stroke=\"#d11f1f\" stroke-width=\"2.2\"");
  if (!sd.mean_infected.empty()) {
    polyline(sd.mean_infected, YI, "stroke=\"#d11f1f\" stroke-width=\"1.5\" stroke-dasharray=\"2,3\"");
    for (int k = 0; k <= 4; ++k) {
      s << "<text x=\"" << L + pw + 6 << "\" y=\"" << fmt_coord(YI(k / 4.0) + 4) << "\" font-size=\"11\">"
        << fmt_coord(k / 4.0) << "</text>\n";
    }
    if (reference_line) {
      s << "<line x1=\"" << L << "\" x2=\"" << L + pw << "\" y1=\"" << fmt_coord(YI(*reference_line)) << "\" y2=\""
        << fmt_coord(YI(*reference_line)) << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    }
  }
  s << "<text x=\"" << L + 10 << "\" y=\"" << Tm + 16 << "\" font-size=\"12\" fill=\"#d11f1f\">dynamic</text>\n";
  s << "<text x=\"" << L + 80 << "\" y=\"" << Tm + 16 << "\" font-size=\"12\" fill=\"#1f4fd1\">static</text>\n";
  if (!sd.mean_infected.empty()) {
    s << "<text x=\"" << L + 140 << "\" y=\"" << Tm + 16 << "\" font-size=\"12\" fill=\"#d11f1f\">I(t) dotted</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace hdg::harness
